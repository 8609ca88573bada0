//! Gadgets forbidding a prescribed set of patterns on the distinguished vectors.

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::generic::{order_parts, OrderGadgetOptions};
use super::{complement, normalize, orthonormalize, params, union_real, unit, GadgetBlueprint};
use crate::error::{Error, Result};

/// Parses `"110,111"` (or whitespace separated) into validated bitstrings.
pub fn parse_patterns(text: &str, m: usize) -> Result<Vec<String>> {
    let pats: BTreeSet<String> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect();
    for p in &pats {
        if !p.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::Precondition(format!("pattern {p} is not a bitstring")));
        }
        if p.len() != m {
            return Err(Error::PatternArityMismatch(p.clone(), p.len(), m));
        }
    }
    if pats.is_empty() {
        return Err(Error::Precondition("the forbidden set is empty".into()));
    }
    Ok(pats.into_iter().collect())
}

fn default_vectors(m: usize) -> Result<Vec<Vec<f64>>> {
    if m == 3 {
        let bp = super::build_gadget_32(1.2, 1, 1)?;
        return Ok((1..=3).map(|i| bp.vectors.real(&format!("m{i}")).expect("m_i")).collect());
    }
    let d = m.max(3);
    Ok((0..m)
        .map(|i| {
            let mut v = unit(d, 0);
            if i > 0 {
                v[0] = 0.8;
                v[i] = 0.6;
            }
            v
        })
        .collect())
}

/// Gadget with `ts` and `u` distinguished that forbids `(1, .., 1, fu)`.
fn tail_recipe(
    ts: &[Vec<f64>],
    u: &[f64],
    fu: bool,
    prefix: &str,
    seed: u64,
) -> Result<Vec<(String, Vec<f64>)>> {
    let opts = OrderGadgetOptions { seed, ..Default::default() };
    let mut ms: Vec<Vec<f64>> = ts.to_vec();
    if fu {
        ms.push(u.to_vec());
        return order_parts(&ms, prefix, &opts);
    }
    // A d-clique through u: u, the x's orthogonal to u and t_1, and w in
    // span(u, t_1). With every t_i = 1 the order gadget sets w = 0 and the
    // x's are 0 through t_1, so u is forced to 1.
    let d = u.len();
    let xs = complement(&[u.to_vec(), ts[0].clone()], d);
    let mut spanned = vec![u.to_vec()];
    spanned.extend(xs.iter().cloned());
    let w = complement(&spanned, d).remove(0);
    let mut out: Vec<(String, Vec<f64>)> =
        xs.into_iter().enumerate().map(|(i, x)| (format!("{prefix}x{}", i + 1), x)).collect();
    out.push((format!("{prefix}w"), w.clone()));
    ms.push(w);
    out.extend(order_parts(&ms, &format!("{prefix}o"), &opts)?);
    Ok(out)
}

/// Parts of the gadget forbidding a single pattern.
fn singleton_parts(
    pattern: &[bool],
    ms: &[Vec<f64>],
    labels: &[String],
    prefix: &str,
    seed: u64,
) -> Result<Vec<(String, Vec<f64>)>> {
    let m = ms.len();
    let d = ms[0].len();
    let (head, fu) = (&pattern[..m - 1], pattern[m - 1]);
    let u = &ms[m - 1];
    if head.iter().all(|&b| b) {
        return tail_recipe(&ms[..m - 1], u, fu, prefix, seed);
    }
    // Complete each v_i with f_i = 0 to a basis C_i; one tail gadget per
    // choice of a non-v_i member from each such basis.
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut out = Vec::new();
    let mut choices: Vec<Vec<(String, Vec<f64>)>> = Vec::new();
    for i in 0..m - 1 {
        if head[i] {
            choices.push(vec![(labels[i].clone(), ms[i].clone())]);
            continue;
        }
        // The new members are orthogonal to v_i, so only the others count.
        let others: Vec<Vec<f64>> = ms.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v.clone()).collect();
        let mut basis = None;
        for _ in 0..1000 {
            let mut cand = vec![ms[i].clone()];
            for _ in 1..d {
                cand.push((0..d).map(|_| rng.gen_range(-1.0..1.0)).collect());
            }
            let b = orthonormalize(&cand);
            if b.len() == d && generic_against(&b[1..], &others) {
                basis = Some(b);
                break;
            }
        }
        let basis = basis.ok_or_else(|| {
            Error::DegenerateParams(format!("no generic completion of {} found", labels[i]))
        })?;
        let members: Vec<(String, Vec<f64>)> = basis[1..]
            .iter()
            .enumerate()
            .map(|(j, v)| (format!("{prefix}C{}_{}", i + 1, j + 1), v.clone()))
            .collect();
        out.extend(members.iter().cloned());
        choices.push(members);
    }
    for (j, ts) in choices.into_iter().multi_cartesian_product().enumerate() {
        let vecs: Vec<Vec<f64>> = ts.iter().map(|(_, v)| v.clone()).collect();
        out.extend(tail_recipe(&vecs, u, fu, &format!("{prefix}T{j}:"), seed.wrapping_add(j as u64 + 1))?);
    }
    Ok(out)
}

fn generic_against(vs: &[Vec<f64>], ms: &[Vec<f64>]) -> bool {
    vs.iter().all(|v| {
        ms.iter().all(|m| {
            let c = super::dot(v, m).abs();
            c > 0.05 && c < 0.95
        })
    })
}

/// Gadget forbidding every pattern in `h` on `m` distinguished vectors
/// (labelled `m1 .. mm`). Without `seed_vectors` the vectors of the
/// parametric (3,2)-gadget at θ = 1.2 are used for m = 3.
pub fn build_forbidden_gadget(
    h: &[String],
    m: usize,
    seed_vectors: Option<Vec<Vec<f64>>>,
    seed: u64,
) -> Result<GadgetBlueprint> {
    if m < 2 {
        return Err(Error::Precondition("m must be at least 2".into()));
    }
    let h = parse_patterns(&h.join(","), m)?;
    let default = seed_vectors.is_none();
    let ms = match seed_vectors {
        Some(v) => v,
        None => default_vectors(m)?,
    };
    if ms.len() != m {
        return Err(Error::Precondition(format!("{} seed vectors for m = {m}", ms.len())));
    }
    let d = ms[0].len();
    if ms.iter().any(|v| v.len() != d) || d < m.max(3) {
        return Err(Error::Precondition(format!("seed vectors must share a dimension of at least {}", m.max(3))));
    }
    let ms: Vec<Vec<f64>> = ms.iter().map(|v| normalize(v)).collect();
    let all_ones = "1".repeat(m);
    if default && m == 3 && h == [all_ones] {
        return super::build_gadget_32(1.2, 1, 1);
    }

    let labels: Vec<String> = (1..=m).map(|i| format!("m{i}")).collect();
    let mut parts = vec![labels.iter().cloned().zip(ms.iter().cloned()).collect::<Vec<_>>()];
    for (n, pat) in h.iter().enumerate() {
        let bits: Vec<bool> = pat.chars().map(|c| c == '1').collect();
        parts.push(singleton_parts(&bits, &ms, &labels, &format!("h{pat}:"), seed.wrapping_add(1000 * n as u64))?);
    }
    let mut bp = union_real(d, parts, labels, params(&[("m", m as f64), ("d", d as f64), ("seed", seed as f64)]))?;
    bp.notes.push(format!("forbidden set {}", h.join(",")));
    Ok(bp)
}
