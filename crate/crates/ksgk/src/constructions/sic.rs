//! Hadamard-signed tight frames and the state-independent proofs built on them.

use std::f64::consts::PI;

use itertools::Itertools;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::generic::{order_parts, OrderGadgetOptions};
use super::{params, union_real, GadgetBlueprint};
use crate::error::{Error, Result};
use crate::orthorep::{inner, is_orthogonal, parallel_pairs, VectorSet, DEFAULT_TOLERANCE};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SicFrame {
    pub vectors: VectorSet,
    /// Frame labels in construction order.
    pub labels: Vec<String>,
    pub n: u32,
    pub q: f64,
    pub p: f64,
    /// Antipodal or coincident pairs; nonempty means the frame has fewer rays
    /// than vectors.
    pub collapsed: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

/// Sylvester Hadamard matrix of size `2^n`.
pub fn sylvester(n: u32) -> Vec<Vec<i8>> {
    let mut h = vec![vec![1i8]];
    for _ in 0..n {
        let m = h.len();
        let mut g = vec![vec![0i8; 2 * m]; 2 * m];
        for i in 0..m {
            for j in 0..m {
                g[i][j] = h[i][j];
                g[i][j + m] = h[i][j];
                g[i + m][j] = h[i][j];
                g[i + m][j + m] = -h[i][j];
            }
        }
        h = g;
    }
    h
}

fn ceil_log2(x: f64) -> u32 {
    if x <= 1.0 {
        0
    } else {
        x.log2().ceil() as u32
    }
}

/// The exponent `n` with `2^n` sign blocks.
pub fn sign_exponent(d: usize) -> u32 {
    if d % 2 == 1 {
        ceil_log2((d as f64 - 1.0) / 2.0)
    } else {
        ceil_log2((d as f64 - 2.0) / 2.0)
    }
}

/// `r * 2^n` unit vectors whose projectors sum to `(r 2^n / d) I`.
pub fn build_sic_vectors(d: usize, r: usize) -> Result<SicFrame> {
    if d < 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    if r < 4 || !r.is_multiple_of(2) {
        return Err(Error::BoundViolated(format!("r = {r} must be even and at least 4")));
    }
    let n = sign_exponent(d);
    let blocks = 1usize << n;
    let h = sylvester(n);
    let odd = d % 2 == 1;
    let half = if odd { (d - 1) / 2 } else { (d - 2) / 2 };
    let df = d as f64;
    let q = (2.0 / df).sqrt();
    let p = if odd {
        (1.0 - q * q * (df - 1.0) / 2.0).sqrt()
    } else {
        (0.5 - q * q * (df - 2.0) / 4.0).sqrt()
    };
    let total = r * blocks;
    let width = total.to_string().len();
    let mut labels = Vec::with_capacity(total);
    let mut vecs = Vec::with_capacity(total);
    for i in 0..blocks {
        for j in 1..=r {
            let ang = 2.0 * PI * j as f64 / r as f64;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let mut v = Vec::with_capacity(d);
            for row in h.iter().take(half) {
                v.push(q * ang.cos() * row[i] as f64);
            }
            for row in h.iter().take(half) {
                v.push(q * ang.sin() * row[i] as f64);
            }
            if odd {
                v.push(sign * p);
            } else {
                v.push(p);
                v.push(sign * p);
            }
            let label = format!("u{:0width$}", i * r + j);
            labels.push(label.clone());
            vecs.push((label, v));
        }
    }
    let vectors = VectorSet::from_real(d, vecs, DEFAULT_TOLERANCE)?;
    let collapsed = parallel_pairs(&vectors);
    let mut warnings = Vec::new();
    if !collapsed.is_empty() {
        warnings.push(format!(
            "AntipodalCollapse: {} pairs of frame vectors share a ray, first {}~{}",
            collapsed.len(),
            collapsed[0].0,
            collapsed[0].1
        ));
        log::warn!("{}", warnings[0]);
    }
    Ok(SicFrame { vectors, labels, n, q, p, collapsed, warnings })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SicProof {
    pub blueprint: GadgetBlueprint,
    pub frame: Vec<String>,
    /// Gadget prefix and the frame members it is attached to.
    pub gadgets: Vec<(String, Vec<String>)>,
    pub classical_bound: usize,
    pub quantum_value: f64,
    pub n: u32,
}

/// Frame vectors plus an order gadget on every k-subset that contains no
/// orthogonal pair of surviving members.
pub fn build_sic_proof(d: usize, k: usize, r: usize, seed: u64) -> Result<SicProof> {
    if k < 2 || k > d {
        return Err(Error::Precondition(format!("need 2 <= k <= d, got k = {k}, d = {d}")));
    }
    let n = sign_exponent(d);
    let bound = ((d * (k - 1)) as f64 / (1u64 << n) as f64).max(4.0);
    if !r.is_multiple_of(2) || (r as f64) <= bound {
        return Err(Error::BoundViolated(format!("r = {r} must be even and exceed {bound}")));
    }
    let frame = build_sic_vectors(d, r)?;
    if let Some((a, b)) = frame.collapsed.first() {
        return Err(Error::RayCollapse(a.clone(), b.clone()));
    }
    let vs = &frame.vectors;
    let tol = vs.tolerance();
    let real = |l: &str| vs.real(l).expect("frame label");

    let mut parts = vec![frame.labels.iter().map(|l| (l.clone(), real(l))).collect::<Vec<_>>()];
    let mut gadgets = Vec::new();
    for (i, subset) in frame.labels.iter().combinations(k).enumerate() {
        let kept: Vec<&String> = subset
            .iter()
            .filter(|a| {
                !subset.iter().any(|b| a != &b && is_orthogonal(vs.get(a).unwrap(), vs.get(b).unwrap(), tol))
            })
            .copied()
            .collect();
        if kept.len() < 2 {
            continue;
        }
        let prefix = format!("G{i}:");
        let ms: Vec<Vec<f64>> = kept.iter().map(|l| real(l)).collect();
        let opts = OrderGadgetOptions { seed: seed.wrapping_add(i as u64), ..Default::default() };
        parts.push(order_parts(&ms, &prefix, &opts)?);
        gadgets.push((prefix, kept.into_iter().cloned().collect()));
    }
    let total = frame.labels.len();
    let quantum_value = total as f64 / d as f64;
    let mut blueprint = union_real(
        d,
        parts,
        vec![],
        params(&[("d", d as f64), ("k", k as f64), ("r", r as f64), ("n", n as f64), ("seed", seed as f64)]),
    )?;
    blueprint.notes.push(format!("{} gadgets on {} frame vectors", gadgets.len(), total));
    Ok(SicProof { blueprint, frame: frame.labels, gadgets, classical_bound: k - 1, quantum_value, n })
}

/// `sum_i |<psi|u_i>|^2` over the listed labels.
pub fn frame_value(vs: &VectorSet, labels: &[String], psi: &[Complex64]) -> f64 {
    labels.iter().map(|l| inner(psi, vs.get(l).expect("label")).norm_sqr()).sum()
}
