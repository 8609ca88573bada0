//! KS proofs from k bases and one order-(k,k-1) gadget per selection.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::generic::{levels_needed, order_parts, OrderGadgetOptions};
use super::{dot, orthonormalize, params, union_real, GadgetBlueprint};
use crate::error::{Error, Result};

/// Label of vector `q` (1-based) in basis `p` (1-based).
pub fn basis_label(p: usize, q: usize) -> String {
    format!("B{p}_{q}")
}

/// Prefix of the gadget attached to the selection `(q1, .., qk)`.
pub fn selection_prefix(sel: &[usize]) -> String {
    format!("S{}:", sel.iter().join("."))
}

fn random_orthogonal_matrix(rng: &mut ChaCha8Rng, d: usize) -> Vec<Vec<f64>> {
    loop {
        let rows: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let q = orthonormalize(&rows);
        if q.len() == d {
            return q;
        }
    }
}

/// `k` bases of `R^d`: the standard basis and rotated copies chosen by a
/// seeded search that keeps cross overlaps small but bounded away from 0.
pub fn default_bases(d: usize, k: usize, seed: u64) -> Vec<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std: Vec<Vec<f64>> = (0..d).map(|i| super::unit(d, i)).collect();
    let mut bases = vec![std];
    while bases.len() < k {
        let mut best: Option<((usize, f64), Vec<Vec<f64>>)> = None;
        for _ in 0..400 {
            let cand = random_orthogonal_matrix(&mut rng, d);
            let mut cost = (0usize, 0.0f64);
            let mut ok = true;
            for b in &bases {
                for x in b {
                    for y in &cand {
                        let o = dot(x, y).abs();
                        if o < 0.05 {
                            ok = false;
                        }
                        cost.0 += levels_needed(o);
                        cost.1 = cost.1.max(o);
                    }
                }
            }
            if ok && best.as_ref().is_none_or(|(c, _)| cost < *c) {
                best = Some((cost, cand));
            }
        }
        bases.push(best.expect("a generic rotation exists").1);
    }
    bases
}

/// Construction of a KS set from `k` orthonormal bases of `R^d`.
pub fn build_ks_proof(d: usize, k: usize, bases: &[Vec<Vec<f64>>], seed: u64) -> Result<GadgetBlueprint> {
    if k < 2 || k > d {
        return Err(Error::Precondition(format!("need 2 <= k <= d, got k = {k}, d = {d}")));
    }
    if bases.len() != k {
        return Err(Error::BadBases(format!("{} bases given, k = {k}", bases.len())));
    }
    for (p, b) in bases.iter().enumerate() {
        if b.len() != d || b.iter().any(|v| v.len() != d) {
            return Err(Error::BadBases(format!("basis {} is not d x d", p + 1)));
        }
        for i in 0..d {
            for j in 0..d {
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot(&b[i], &b[j]) - want).abs() > 1e-9 {
                    return Err(Error::BadBases(format!("basis {} is not orthonormal", p + 1)));
                }
            }
        }
    }
    for (p1, p2) in (0..k).tuple_combinations() {
        for (i, x) in bases[p1].iter().enumerate() {
            for (j, y) in bases[p2].iter().enumerate() {
                let o = dot(x, y).abs();
                if o <= 1e-9 || o >= 1.0 - 1e-9 {
                    return Err(Error::BadBases(format!(
                        "{} and {} are {}",
                        basis_label(p1 + 1, i + 1),
                        basis_label(p2 + 1, j + 1),
                        if o < 0.5 { "orthogonal" } else { "identical" }
                    )));
                }
            }
        }
    }

    let mut parts = Vec::new();
    let mut basis_part = Vec::new();
    for (p, b) in bases.iter().enumerate() {
        for (q, v) in b.iter().enumerate() {
            basis_part.push((basis_label(p + 1, q + 1), v.clone()));
        }
    }
    parts.push(basis_part);
    for (n, sel) in (0..k).map(|_| 1..=d).multi_cartesian_product().enumerate() {
        let ms: Vec<Vec<f64>> = sel.iter().enumerate().map(|(p, &q)| bases[p][q - 1].clone()).collect();
        let opts = OrderGadgetOptions { seed: seed.wrapping_add(n as u64), ..Default::default() };
        let named: Vec<(String, Vec<f64>)> = order_parts(&ms, &selection_prefix(&sel), &opts)?;
        parts.push(named);
    }
    let mut bp = union_real(
        d,
        parts,
        vec![],
        params(&[("d", d as f64), ("k", k as f64), ("seed", seed as f64)]),
    )?;
    bp.notes.push(format!("{} selection gadgets", d.pow(k as u32)));
    Ok(bp)
}
