//! The parametric order-(d,d-1) family for d >= 5.

use std::f64::consts::PI;

use super::{params, unit, GadgetBlueprint};
use crate::error::{Error, Result};
use crate::orthorep::inner;

/// Pairs closer to orthogonal than this (but above tolerance) are reported.
const NEAR_MISS: f64 = 1e-2;

/// Vectors of the order-(d,d-1) family with units up to `t` (from x_d) and
/// `s` (from y_d). Distinguished on `m1 .. md`.
///
/// The graph is the orthogonality graph of the vectors. The u-chain meets
/// `m_d` only in the limit, so that overlap is returned in `residuals`
/// together with every other near-orthogonal pair.
pub fn build_gadget_dd1(d: usize, theta: f64, phi: f64, t: u32, s: u32) -> Result<GadgetBlueprint> {
    if d == 4 {
        return Err(Error::UnsupportedDimension(4));
    }
    if d < 5 {
        return Err(Error::UnsupportedDimension(d));
    }
    for a in [theta, phi] {
        if !(a > 0.0 && a < PI) || a.cos().abs() < 1e-9 {
            return Err(Error::DegenerateParams(format!("angle {a} outside (0,π/2)∪(π/2,π)")));
        }
    }
    let (sn, cs) = theta.sin_cos();
    let cph = phi.cos();
    let df = d as f64;
    let big = sn * sn - 2.0 * (df - 4.0) * cs * cs;
    let small = sn * sn - (df - 4.0) * (cs * cs + cph * cph);
    if big < 0.0 || small < 0.0 {
        return Err(Error::InfeasibleAngles(format!("Δ = {big}, δ = {small}")));
    }
    let (rb, rs) = (big.sqrt(), small.sqrt());
    let k1 = (df - 3.0) / ((df - 2.0) * (df - 4.0));
    let k2 = (df - 3.0).powi(2) / ((df - 2.0) * (df - 4.0).powi(2));

    let a = (-sn + rb) / (df - 4.0);
    let b = (df - 4.0) / (df - 3.0) * cs;
    let c = sn / (df - 3.0) - rb;
    let e = k1 * cs;
    let q = cs * cs / (-sn / (df - 3.0) + rb);
    let p = k1 * sn + q + k2 * (-sn + rb);

    let a2 = (-sn + rs) / (df - 4.0);
    let b2 = (df - 4.0) / (df - 3.0) * cph;
    let c2 = sn / (df - 3.0) - rs;
    let e2 = k1 * cph;
    let q2 = cph * cph / (-sn / (df - 3.0) + rs);
    let r = cph / cs;
    let p2 = k1 * sn * r + q2 * r + k2 * (-sn + rs) * r;

    let last = d - 1;
    let pw = |k: u32| sn.powi(k as i32);
    let sparse = |entries: &[(usize, f64)]| {
        let mut z = vec![0.0; d];
        for &(i, x) in entries {
            z[i] = x;
        }
        z
    };

    let mut v: Vec<(String, Vec<f64>)> = Vec::new();
    v.push(("m1".into(), unit(d, 0)));
    for j in 2..d {
        v.push((format!("m{j}"), sparse(&[(0, sn), (d - j, cs)])));
    }
    v.push(("n1".into(), unit(d, 1)));
    v.push(("n2".into(), unit(d, 2)));
    for j in 3..d - 1 {
        v.push((format!("n{j}"), unit(d, d + 1 - j)));
    }
    v.push((format!("n{}", d - 1), sparse(&[(0, -cs), (1, sn)])));

    for (tag, aa, bb, cc, ee, pp, qq, tail) in
        [("x", a, b, c, e, p, q, cs), ("y", a2, b2, c2, e2, p2, q2, cph)]
    {
        let mut z = vec![bb; d];
        z[0] = 0.0;
        z[last] = cc;
        v.push((format!("{tag}1"), z));
        for j in 2..d {
            let mut z = vec![aa; d];
            z[0] = -cs;
            z[last] = tail;
            z[d - j] = sn;
            v.push((format!("{tag}{j}"), z));
        }
        let mut z = vec![ee; d];
        z[0] = pp;
        z[last] = qq;
        v.push((format!("{tag}{d}"), z));
    }

    for (tag, pp, qq, units) in [("v", p, q, t), ("u", p2, q2, s)] {
        for k in 0..=units {
            v.push((format!("{tag}{}", 4 * k), sparse(&[(0, -qq), (last, pp * pw(2 * k))])));
            v.push((format!("{tag}{}", 4 * k + 1), sparse(&[(0, pp * pw(2 * k)), (last, qq)])));
            v.push((
                format!("{tag}{}", 4 * k + 2),
                sparse(&[(0, qq * sn), (1, qq * cs), (last, -pp * pw(2 * k + 1))]),
            ));
            v.push((
                format!("{tag}{}", 4 * k + 3),
                sparse(&[(0, pp * pw(2 * k + 2)), (1, pp * pw(2 * k + 1) * cs), (last, qq)]),
            ));
        }
    }
    v.push((format!("m{d}"), sparse(&[(0, sn), (1, cs), (last, -p / q * pw(2 * t + 1))])));

    let distinguished: Vec<String> = (1..=d).map(|j| format!("m{j}")).collect();
    let mut bp = GadgetBlueprint::from_real(
        d,
        v,
        distinguished,
        params(&[
            ("d", df),
            ("theta", theta),
            ("phi", phi),
            ("t", t as f64),
            ("s", s as f64),
            ("Delta", big),
            ("delta", small),
        ]),
        &[],
    )?;

    let md = bp.vectors.get(&format!("m{d}")).expect("m_d").to_vec();
    let limit = format!("u{}", 4 * s + 3);
    let limit_vec = bp.vectors.get(&limit).map(<[_]>::to_vec);
    if let Some(x) = limit_vec {
        bp.residuals.insert(format!("{limit}-m{d}"), inner(&x, &md).norm());
    }
    let vt = format!("v{}", 4 * t + 3);
    if let Some(x) = bp.vectors.get(&vt).map(<[_]>::to_vec) {
        bp.residuals.insert(format!("{vt}-m{d}"), inner(&x, &md).norm());
    }
    let tol = bp.vectors.tolerance();
    let labels: Vec<String> = bp.vectors.labels().cloned().collect();
    for (i, x) in labels.iter().enumerate() {
        for y in &labels[i + 1..] {
            let o = bp.vectors.overlap(x, y).expect("label").norm();
            if o > tol && o < NEAR_MISS {
                bp.residuals.entry(format!("{x}-{y}")).or_insert(o);
            }
        }
    }
    if !bp.aliases.is_empty() {
        bp.notes.push(format!("{} coincident rays merged", bp.aliases.len()));
    }
    Ok(bp)
}
