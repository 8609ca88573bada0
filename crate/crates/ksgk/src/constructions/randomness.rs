//! 01-gadgets with the largest known distinguished overlap in d = 4 and d = 5.

use std::f64::consts::FRAC_PI_4;

use super::generic::bug_parts;
use super::{params, GadgetBlueprint};
use crate::error::{Error, Result};

/// d = 5: the two-parameter family at θ1 = π/4, θ2 = 0, θ3 = -π/4, x = 1/2,
/// distinguished on (u1, u13) with overlap 1/√5.
/// d = 4: the nested 01-gadget at overlap k/(k+2) with k = 2, i.e. 1/2.
pub fn build_randomness_gadget(d: usize) -> Result<GadgetBlueprint> {
    match d {
        4 => four(),
        5 => five(),
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

fn four() -> Result<GadgetBlueprint> {
    let c: f64 = 0.5;
    let u = [1.0, 0.0, 0.0];
    let v = [c, (1.0 - c * c).sqrt(), 0.0];
    let pad = |w: &[f64]| {
        let mut z = w.to_vec();
        z.push(0.0);
        z
    };
    let mut vecs = vec![("u".to_string(), pad(&u)), ("v".to_string(), pad(&v))];
    for (l, w) in bug_parts(&u, &v, "", 0)? {
        vecs.push((l, pad(&w)));
    }
    vecs.push(("e4".into(), vec![0.0, 0.0, 0.0, 1.0]));
    let mut bp =
        GadgetBlueprint::from_real(4, vecs, vec!["u".into(), "v".into()], params(&[("d", 4.0), ("k", 2.0)]), &[])?;
    bp.notes.push("two nested levels in a 3-space, closed by e4".into());
    Ok(bp)
}

fn five() -> Result<GadgetBlueprint> {
    let (t1, t2, t3, x) = (FRAC_PI_4, 0.0f64, -FRAC_PI_4, 0.5f64);
    let t4 = t3;
    let (s, c) = (f64::sin, f64::cos);
    let raw: Vec<(&str, [f64; 3])> = vec![
        ("u1", [1.0, 0.0, 0.0]),
        ("u13", [x, 1.0, 0.0]),
        ("u2", [0.0, c(t1), s(t1)]),
        ("u3", [0.0, c(t2), s(t2)]),
        ("u4", [0.0, c(t4), s(t4)]),
        ("u11", [-s(t1), x * s(t1), -x * c(t1)]),
        ("u5", [-x, -s(t1).powi(2), 0.5 * s(2.0 * t1)]),
        ("u6", [-c(t1 - t2) * s(t1), x * s(t2), -x * c(t2)]),
        ("u7", [-x, -c(t1 - t2) * s(t1) * s(t2), c(t1 - t2) * s(t1) * c(t2)]),
        // Printed as a second u13; it is a different vector.
        ("u12", [-s(t3), x * s(t3), -x * c(t3)]),
        ("u10", [-x, -s(t3).powi(2), 0.5 * s(2.0 * t3)]),
        ("u9", [c(t2 - t3) * s(t3), -x * s(t2), x * c(t2)]),
        ("u8", [x, c(t2 - t3) * s(t2) * s(t3), -c(t2 - t3) * c(t2) * s(t3)]),
    ];
    let mut vecs: Vec<(String, Vec<f64>)> = raw
        .into_iter()
        .map(|(l, w)| (l.to_string(), vec![w[0], w[1], w[2], 0.0, 0.0]))
        .collect();
    vecs.push(("u14".into(), vec![0.0, 0.0, 0.0, 1.0, 0.0]));
    vecs.push(("u15".into(), vec![0.0, 0.0, 0.0, 0.0, 1.0]));
    let mut bp = GadgetBlueprint::from_real(
        5,
        vecs,
        vec!["u1".into(), "u13".into()],
        params(&[("d", 5.0), ("theta1", t1), ("theta2", t2), ("theta3", t3), ("x", x)]),
        &["u7".into(), "u8".into()],
    )?;
    if let (Some(a), Some(b)) = (bp.vectors.get("u7"), bp.vectors.get("u8")) {
        let r = crate::orthorep::inner(a, b).norm();
        bp.residuals.insert("u7-u8".into(), r);
    }
    bp.notes.push("chain entry printed as a second u13 relabelled u12".into());
    Ok(bp)
}
