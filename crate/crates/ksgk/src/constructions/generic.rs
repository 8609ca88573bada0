//! Gadgets on arbitrary real vectors: the recursive 01-gadget and the
//! order-(k,k-1) gadget built from it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{combo, complement, cross3, dot, norm2, normalize, orthonormalize, params, project_out, GadgetBlueprint};
use crate::error::{Error, Result};

const TERMINAL: f64 = 1.0 / 3.0 + 1e-12;

/// Number of nested levels the 01-gadget needs for overlap `c`.
/// Level `L` handles overlaps up to `L/(L+2)`.
pub fn levels_needed(c: f64) -> usize {
    let c = c.abs();
    if c >= 1.0 {
        return usize::MAX;
    }
    let l = (2.0 * c / (1.0 - c) - 1e-9).ceil();
    (l as usize).max(1)
}

/// Random unit vector orthogonal to the orthonormal set `basis`.
fn random_orthogonal(rng: &mut ChaCha8Rng, basis: &[Vec<f64>], d: usize) -> Vec<f64> {
    loop {
        let r: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w = project_out(&r, basis);
        if norm2(&w) > 1e-3 {
            return normalize(&w);
        }
    }
}

/// Auxiliary vectors of a 01-gadget forbidding `u = v = 1`, labelled
/// `{prefix}a1 .. {prefix}f{L}` plus `{prefix}z{i}` in dimension above 3.
pub(crate) fn bug_parts(u: &[f64], v: &[f64], prefix: &str, seed: u64) -> Result<Vec<(String, Vec<f64>)>> {
    let d = u.len();
    if d < 3 || v.len() != d {
        return Err(Error::Precondition("01-gadget needs two vectors of equal dimension at least 3".into()));
    }
    let u = normalize(u);
    let mut v = normalize(v);
    let mut c = dot(&u, &v);
    if c < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
        c = -c;
    }
    if c <= 1e-9 {
        return Err(Error::DegenerateParams("distinguished vectors are already orthogonal".into()));
    }
    if c >= 1.0 - 1e-9 {
        return Err(Error::DegenerateParams("distinguished vectors are parallel".into()));
    }

    // Orthonormal frame of a 3-space containing u and v.
    let e1 = u.clone();
    let e2 = normalize(&project_out(&v, std::slice::from_ref(&e1)));
    let e3 = if d == 3 {
        cross3(&e1, &e2)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_orthogonal(&mut rng, &[e1.clone(), e2.clone()], d)
    };
    let lift = |w: [f64; 3]| combo(&[(w[0], &e1), (w[1], &e2), (w[2], &e3)]);

    let mut out = Vec::new();
    let mut cu = [1.0, 0.0, 0.0];
    let mut cv = [c, (1.0 - c * c).sqrt(), 0.0];
    let mut level = 1;
    loop {
        let c = d3(&cu, &cv);
        let p = n3(&add3(&cu, &cv, 1.0));
        let q = n3(&add3(&cu, &cv, -1.0));
        let n = c3(&p, &q);
        let terminal = c <= TERMINAL;
        let (x, y, z) = if terminal {
            let y2 = ((1.0 - 3.0 * c) / (2.0 * (1.0 - c))).max(0.0);
            (0.5f64.sqrt(), y2.sqrt(), (c / (1.0 - c)).sqrt())
        } else {
            ((2.0 * c / (1.0 + c)).sqrt(), 0.0, ((1.0 - c) / (1.0 + c)).sqrt())
        };
        let e = lin3(&[(x, &p), (y, &q), (z, &n)]);
        let f = lin3(&[(x, &p), (-y, &q), (-z, &n)]);
        let named = [
            ("a", c3(&e, &cu)),
            ("b", c3(&f, &cu)),
            ("c", c3(&e, &cv)),
            ("d", c3(&f, &cv)),
            ("e", e),
            ("f", f),
        ];
        for (name, w) in named {
            out.push((format!("{prefix}{name}{level}"), normalize(&lift(w))));
        }
        if terminal {
            break;
        }
        cu = e;
        cv = f;
        level += 1;
        if level > 10_000 {
            return Err(Error::DegenerateParams("01-gadget recursion does not terminate".into()));
        }
    }
    if d > 3 {
        for (i, w) in complement(&[e1, e2, e3], d).into_iter().enumerate() {
            out.push((format!("{prefix}z{i}"), w));
        }
    }
    Ok(out)
}

fn d3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn add3(a: &[f64; 3], b: &[f64; 3], s: f64) -> [f64; 3] {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

fn n3(a: &[f64; 3]) -> [f64; 3] {
    let n = d3(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

fn c3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn lin3(terms: &[(f64, &[f64; 3])]) -> [f64; 3] {
    let mut o = [0.0; 3];
    for (c, v) in terms {
        for i in 0..3 {
            o[i] += c * v[i];
        }
    }
    o
}

/// 01-gadget on two real unit vectors, distinguished as `u` and `v`.
pub fn zero_one_gadget(u: &[f64], v: &[f64], seed: u64) -> Result<GadgetBlueprint> {
    let d = u.len();
    let c = dot(&normalize(u), &normalize(v)).abs();
    let mut vecs = vec![("u".to_string(), u.to_vec()), ("v".to_string(), v.to_vec())];
    vecs.extend(bug_parts(u, v, "", seed)?);
    let mut bp = GadgetBlueprint::from_real(
        d,
        vecs,
        vec!["u".into(), "v".into()],
        params(&[("d", d as f64), ("overlap", c), ("levels", levels_needed(c) as f64)]),
        &[],
    )?;
    bp.notes.push(format!("{} nested levels", levels_needed(c)));
    Ok(bp)
}

#[derive(Clone, Debug)]
pub struct OrderGadgetOptions {
    pub seed: u64,
    pub attempts: u64,
}

impl Default for OrderGadgetOptions {
    fn default() -> Self {
        OrderGadgetOptions { seed: 1, attempts: 64 }
    }
}

/// Auxiliary vectors of an order-(k,k-1) gadget on the real vectors `ms`
/// (k >= 2). For k = 2 this is the 01-gadget.
///
/// Every `m_i` with i < k gets its own basis member orthogonal to it; the
/// basis is closed by `w`, which is tied to `m_k` by a 01-gadget. If all the
/// `m_i` are 1, the basis forces `w = 1` and the 01-gadget forbids it.
pub(crate) fn order_parts(
    ms: &[Vec<f64>],
    prefix: &str,
    opts: &OrderGadgetOptions,
) -> Result<Vec<(String, Vec<f64>)>> {
    let k = ms.len();
    if k < 2 {
        return Err(Error::Precondition("an order gadget needs at least two vectors".into()));
    }
    let d = ms[0].len();
    if ms.iter().any(|m| m.len() != d) || d < k.max(3) {
        return Err(Error::Precondition(format!("order gadget on {k} vectors needs dimension >= {}", k.max(3))));
    }
    let ms: Vec<Vec<f64>> = ms.iter().map(|m| normalize(m)).collect();
    for i in 0..k {
        for j in i + 1..k {
            if dot(&ms[i], &ms[j]).abs() <= 1e-9 {
                return Err(Error::DegenerateParams(format!("distinguished vectors {i} and {j} are orthogonal")));
            }
        }
    }
    if k == 2 {
        return bug_parts(&ms[0], &ms[1], &format!("{prefix}g"), opts.seed);
    }

    let mut best: Option<(usize, f64, Vec<Vec<f64>>, Vec<f64>)> = None;
    for attempt in 0..opts.attempts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(0x9e37_79b9).wrapping_add(attempt));
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for i in 0..d - 1 {
            let anchor = if i < k - 1 { &ms[i] } else { &ms[0] };
            let mut constraint = basis.clone();
            constraint.push(anchor.clone());
            let n = random_orthogonal(&mut rng, &orthonormalize(&constraint), d);
            basis.push(n);
        }
        let w = complement(&basis, d).remove(0);
        let c = dot(&w, &ms[k - 1]).abs();
        if !(0.05..=0.995).contains(&c) {
            continue;
        }
        // Accidental orthogonality to other distinguished vectors would add edges.
        let generic = basis.iter().chain(std::iter::once(&w)).enumerate().all(|(i, b)| {
            ms.iter().enumerate().all(|(j, m)| {
                let own = (i < k - 1 && i == j) || (i >= k - 1 && i < d - 1 && j == 0);
                own || dot(b, m).abs() > 1e-6
            })
        });
        if !generic {
            continue;
        }
        let key = (levels_needed(c), (c - 0.25).abs());
        if best.as_ref().is_none_or(|b| (key.0, key.1) < (b.0, b.1)) {
            best = Some((key.0, key.1, basis, w));
        }
    }
    let (_, _, basis, w) =
        best.ok_or_else(|| Error::DegenerateParams("no usable completion found for the order gadget".into()))?;
    let mut out = Vec::new();
    for (i, n) in basis.into_iter().enumerate() {
        let name = if i < k - 1 { format!("{prefix}n{}", i + 1) } else { format!("{prefix}x{}", i + 2 - k) };
        out.push((name, n));
    }
    out.extend(bug_parts(&w, &ms[k - 1], &format!("{prefix}g"), opts.seed)?);
    out.push((format!("{prefix}w"), w));
    Ok(out)
}

/// Order-(k,k-1) gadget distinguished on `m1 .. mk`.
pub fn order_gadget(ms: &[Vec<f64>], opts: &OrderGadgetOptions) -> Result<GadgetBlueprint> {
    let k = ms.len();
    let d = ms.first().map_or(0, |m| m.len());
    let labels: Vec<String> = (1..=k).map(|i| format!("m{i}")).collect();
    let mut vecs: Vec<(String, Vec<f64>)> = labels.iter().cloned().zip(ms.iter().cloned()).collect();
    vecs.extend(order_parts(ms, "", opts)?);
    GadgetBlueprint::from_real(
        d,
        vecs,
        labels,
        params(&[("d", d as f64), ("k", k as f64), ("seed", opts.seed as f64)]),
        &[],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{enumerate_patterns, DEFAULT_BUDGET};

    #[test]
    fn levels_follow_k_over_k_plus_two() {
        assert_eq!(levels_needed(0.2), 1);
        assert_eq!(levels_needed(1.0 / 3.0), 1);
        assert_eq!(levels_needed(0.5), 2);
        assert_eq!(levels_needed(0.6), 3);
        assert_eq!(levels_needed(0.8), 8);
    }

    #[test]
    fn bug_in_three_dimensions() {
        for c in [0.1f64, 1.0 / 3.0, 0.5, 0.7] {
            let u = vec![1.0, 0.0, 0.0];
            let v = vec![c, (1.0 - c * c).sqrt(), 0.0];
            let bp = zero_one_gadget(&u, &v, 0).unwrap();
            assert_eq!(bp.graph.n(), 2 + 6 * levels_needed(c));
            let p = enumerate_patterns(&bp.graph, &bp.distinguished, DEFAULT_BUDGET).unwrap();
            let got: Vec<String> = p.patterns().into_iter().collect();
            assert_eq!(got, ["00", "01", "10"], "c = {c}");
        }
    }

    #[test]
    fn bug_in_five_dimensions() {
        let u = vec![1.0, 0.0, 0.0, 0.0, 0.0];
        let v = normalize(&[0.4, 0.2, -0.3, 0.5, 0.1]);
        let bp = zero_one_gadget(&u, &v, 3).unwrap();
        let p = enumerate_patterns(&bp.graph, &bp.distinguished, DEFAULT_BUDGET).unwrap();
        assert_eq!(p.patterns().into_iter().collect::<Vec<_>>(), ["00", "01", "10"]);
    }

    #[test]
    fn orthogonal_inputs_are_rejected() {
        let r = zero_one_gadget(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 0);
        assert!(matches!(r, Err(Error::DegenerateParams(_))));
    }
}
