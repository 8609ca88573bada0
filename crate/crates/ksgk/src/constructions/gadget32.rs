//! The parametric (3,2)-gadget in dimension three.

use std::f64::consts::PI;

use super::{params, GadgetBlueprint};
use crate::error::{Error, Result};

/// Chooses φ with `sin(2φ)/2 = sin^(2s-2t+1)θ cosθ`, taking the branch
/// closest to θ (so `t = s` gives φ = θ).
fn solve_phi(theta: f64, t: u32, s: u32) -> Result<f64> {
    let (sn, cs) = theta.sin_cos();
    let rhs = sn.powi(2 * s as i32 - 2 * t as i32 + 1) * cs;
    if !(rhs.abs() <= 0.5 + 1e-15) {
        return Err(Error::SolveFailure(format!("sin(2φ)/2 = {rhs} has no solution")));
    }
    let a = (2.0 * rhs).clamp(-1.0, 1.0).asin();
    let cands = [a / 2.0, (PI - a) / 2.0, a / 2.0 + PI, (PI - a) / 2.0 + PI, a / 2.0 - PI, (PI - a) / 2.0 - PI];
    let best = cands
        .into_iter()
        .min_by(|x, y| (x - theta).abs().total_cmp(&(y - theta).abs()))
        .expect("nonempty");
    // Exact when t = s.
    Ok(if t == s { theta } else { best })
}

/// Vectors of the (3,2)-gadget with repeating units up to `t` and `s`,
/// distinguished on `(m1, m2, m3)`.
pub fn build_gadget_32(theta: f64, t: u32, s: u32) -> Result<GadgetBlueprint> {
    if t < 1 || s < 1 {
        return Err(Error::Precondition("t and s must be at least 1".into()));
    }
    let (sn, cs) = theta.sin_cos();
    if !(theta > 0.0 && theta < PI) || cs.abs() < 1e-9 {
        return Err(Error::DegenerateParams(format!("θ = {theta} outside (0,π/2)∪(π/2,π)")));
    }
    let phi = solve_phi(theta, t, s)?;
    let (sp, cp) = phi.sin_cos();
    let s2t = (2.0 * theta).sin();
    let s2p = (2.0 * phi).sin();
    let pw = |k: u32| sn.powi(k as i32);

    let mut v: Vec<(String, Vec<f64>)> = Vec::new();
    let mut put = |l: String, x: [f64; 3]| v.push((l, x.to_vec()));
    put("m1".into(), [1.0, 0.0, 0.0]);
    put("m2".into(), [sn, cs, 0.0]);
    put("m3".into(), [sn, cs, -pw(2 * t + 1) / (cs * cs)]);
    put("n1".into(), [0.0, 1.0, 0.0]);
    put("n2".into(), [-cs, sn, 0.0]);
    put("n3".into(), [0.0, sn, -cs]);
    put("n4".into(), [-cs * cs, 0.5 * s2t, sn * sn]);
    put("n5".into(), [sn, cs.powi(3), sn * cs * cs]);
    put("n6".into(), [0.0, sp, -cp]);
    put("n7".into(), [-cs * cp, sn * cp, sn * sp]);
    put("n8".into(), [sn, cs * cp * cp, 0.5 * s2p * cs]);
    for k in 0..=t {
        put(format!("v{}", 4 * k), [-cs * cs, 0.0, pw(2 * k)]);
        put(format!("v{}", 4 * k + 1), [pw(2 * k), 0.0, cs * cs]);
        put(format!("v{}", 4 * k + 2), [sn * cs * cs, cs.powi(3), -pw(2 * k + 1)]);
        put(format!("v{}", 4 * k + 3), [pw(2 * k + 2), pw(2 * k + 1) * cs, cs * cs]);
    }
    let q = 0.5 * s2p * cs;
    for k in 0..=s {
        put(format!("u{}", 4 * k), [-q, 0.0, pw(2 * k + 1)]);
        put(format!("u{}", 4 * k + 1), [pw(2 * k + 1), 0.0, q]);
        put(format!("u{}", 4 * k + 2), [0.25 * s2t * s2p, 0.5 * s2p * cs * cs, -pw(2 * k + 2)]);
        put(format!("u{}", 4 * k + 3), [pw(2 * k + 3), pw(2 * k + 2) * cs, q]);
    }

    let mut bp = GadgetBlueprint::from_real(
        3,
        v,
        vec!["m1".into(), "m2".into(), "m3".into()],
        params(&[("theta", theta), ("phi", phi), ("t", t as f64), ("s", s as f64), ("d", 3.0)]),
        &[],
    )?;
    let m3 = bp.vectors.get("m3").expect("m3");
    for (a, b) in [(format!("v{}", 4 * t + 3), "m3"), (format!("u{}", 4 * s + 3), "m3")] {
        if let Some(x) = bp.vectors.get(&a) {
            let r = crate::orthorep::inner(x, m3).norm();
            bp.residuals.insert(format!("{a}-{b}"), r);
        }
    }
    if !bp.aliases.is_empty() {
        bp.notes.push(format!("{} coincident rays merged", bp.aliases.len()));
    }
    Ok(bp)
}
