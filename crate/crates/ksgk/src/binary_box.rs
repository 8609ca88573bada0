//! Consistent boxes supported on at most two outcomes per context, their
//! half-integral vertices, and the classical values they bound.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::coloring::{enumerate_patterns, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::graph::{clique_number, max_cliques, weighted_independence, Graph};
use crate::orthorep::inner;

/// Maximum cliques used as measurement contexts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContextSet {
    pub contexts: Vec<Vec<String>>,
}

impl ContextSet {
    /// Every maximum clique of `g`.
    pub fn all(g: &Graph) -> ContextSet {
        ContextSet { contexts: max_cliques(g).iter().map(|c| g.labels_of(c)).collect() }
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        let omega = clique_number(g);
        for c in &self.contexts {
            let idx = g.indices(c)?;
            if c.len() != omega || !g.is_clique(&idx) {
                return Err(Error::Precondition(format!("context {c:?} is not a maximum clique")));
            }
        }
        Ok(())
    }

    /// Vertices that appear in some context, in label order.
    pub fn support(&self) -> Vec<String> {
        self.contexts.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect()
    }
}

/// One probability per (context, vertex); consistency makes it a function
/// of the vertex alone, kept in `values`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistentBox {
    pub values: BTreeMap<String, f64>,
    /// `table[c][v]` is `P(a = v | x = c)`.
    pub table: Vec<BTreeMap<String, f64>>,
}

impl ConsistentBox {
    fn from_halves(ctx: &ContextSet, labels: &[String], halves: &[u8]) -> ConsistentBox {
        let values: BTreeMap<String, f64> =
            labels.iter().zip(halves).map(|(l, &h)| (l.clone(), h as f64 / 2.0)).collect();
        let table = ctx
            .contexts
            .iter()
            .map(|c| c.iter().map(|v| (v.clone(), values[v])).collect())
            .collect();
        ConsistentBox { values, table }
    }

    /// Normalized contexts, consistent entries, at most two outcomes per context.
    pub fn check(&self) -> std::result::Result<(), String> {
        for (i, c) in self.table.iter().enumerate() {
            let s: f64 = c.values().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(format!("context {i} sums to {s}"));
            }
            if c.values().filter(|&&p| p > 0.0).count() > 2 {
                return Err(format!("context {i} has more than two outcomes"));
            }
            for (v, p) in c {
                if self.values.get(v) != Some(p) {
                    return Err(format!("{v} is inconsistent across contexts"));
                }
            }
        }
        Ok(())
    }
}

/// Half-integral assignments on the context vertices: each context carries
/// `1` on one vertex or `1/2` on two, and orthogonal pairs sum to at most 1.
pub fn enumerate_binary_vertices(g: &Graph, ctx: &ContextSet, budget: u64) -> Result<Vec<ConsistentBox>> {
    let labels = ctx.support();
    Ok(enumerate_halves(g, ctx, &labels, budget)?
        .into_iter()
        .map(|h| ConsistentBox::from_halves(ctx, &labels, &h))
        .collect())
}

/// Same enumeration, as values in halves (`0`, `1`, `2`) over `ctx.support()`.
pub fn enumerate_halves(g: &Graph, ctx: &ContextSet, labels: &[String], budget: u64) -> Result<Vec<Vec<u8>>> {
    ctx.validate(g)?;
    let pos: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let gidx: Vec<usize> = g.indices(labels)?;
    let n = labels.len();
    let adj: Vec<Vec<usize>> =
        (0..n).map(|i| (0..n).filter(|&j| g.adjacent(gidx[i], gidx[j])).collect()).collect();
    let contexts: Vec<Vec<usize>> =
        ctx.contexts.iter().map(|c| c.iter().map(|v| pos[v.as_str()]).collect()).collect();

    struct St<'a> {
        adj: &'a [Vec<usize>],
        contexts: &'a [Vec<usize>],
        val: Vec<Option<u8>>,
        out: Vec<Vec<u8>>,
        nodes: u64,
        budget: u64,
    }
    fn ok(st: &St, v: usize, x: u8) -> bool {
        st.adj[v].iter().all(|&w| st.val[w].is_none_or(|y| x + y <= 2))
    }
    fn rec(st: &mut St, k: usize) -> Result<()> {
        st.nodes += 1;
        if st.nodes > st.budget {
            return Err(Error::BudgetExceeded(st.budget));
        }
        if k == st.contexts.len() {
            st.out.push(st.val.iter().map(|x| x.unwrap_or(0)).collect());
            return Ok(());
        }
        let c = st.contexts[k].clone();
        // Support of size one or two; everything else in the context is 0.
        let mut options: Vec<Vec<(usize, u8)>> = Vec::new();
        for (i, &a) in c.iter().enumerate() {
            options.push(c.iter().map(|&v| (v, if v == a { 2 } else { 0 })).collect());
            for &b in &c[i + 1..] {
                options.push(c.iter().map(|&v| (v, if v == a || v == b { 1 } else { 0 })).collect());
            }
        }
        for opt in options {
            if opt.iter().any(|&(v, x)| st.val[v].is_some_and(|y| y != x)) {
                continue;
            }
            let fresh: Vec<(usize, u8)> = opt.iter().copied().filter(|&(v, _)| st.val[v].is_none()).collect();
            let mut placed = Vec::new();
            let mut good = true;
            for &(v, x) in &fresh {
                if !ok(st, v, x) {
                    good = false;
                    break;
                }
                st.val[v] = Some(x);
                placed.push(v);
            }
            if good {
                rec(st, k + 1)?;
            }
            for v in placed {
                st.val[v] = None;
            }
        }
        Ok(())
    }
    let mut st = St { adj: &adj, contexts: &contexts, val: vec![None; n], out: vec![], nodes: 0, budget };
    rec(&mut st, 0)?;
    let mut out = st.out;
    out.sort();
    out.dedup();
    Ok(out)
}

/// Largest `sum of targets` over the half-integral boxes; `None` when no
/// such box exists.
pub fn binary_max_sum(g: &Graph, ctx: &ContextSet, targets: &[String]) -> Result<Option<f64>> {
    let labels = ctx.support();
    let pos: Vec<usize> = targets
        .iter()
        .map(|t| {
            labels
                .iter()
                .position(|l| l == t)
                .ok_or_else(|| Error::Precondition(format!("{t} is in no context")))
        })
        .collect::<Result<_>>()?;
    let all = enumerate_halves(g, ctx, &labels, DEFAULT_BUDGET)?;
    Ok(all.iter().map(|h| pos.iter().map(|&p| h[p] as u32).sum::<u32>()).max().map(|s| s as f64 / 2.0))
}

/// `P(v1) + P(v2)` on `(|v1> + |v2>)/sqrt(2(1 + cos θ))`.
pub fn quantum_xgad_value(theta: f64) -> f64 {
    1.0 + theta.cos()
}

/// The state `(|v1> + |v2>)/|..|` for two real-overlap vectors.
pub fn xgad_state(v1: &[Complex64], v2: &[Complex64]) -> Vec<Complex64> {
    let s: Vec<Complex64> = v1.iter().zip(v2).map(|(a, b)| a + b).collect();
    let n = inner(&s, &s).re.sqrt();
    s.into_iter().map(|z| z / n).collect()
}

/// `|<psi|v1>|^2 + |<psi|v2>|^2`.
pub fn xgad_value(psi: &[Complex64], v1: &[Complex64], v2: &[Complex64]) -> f64 {
    inner(psi, v1).norm_sqr() + inner(psi, v2).norm_sqr()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CswGap {
    pub alpha_w: f64,
    /// `None` when the graph has no colouring at all.
    pub classical_completeness: Option<f64>,
    pub gap: Option<f64>,
}

/// Weighted independence with weight 1 on `v_dist` (0 elsewhere) against the
/// best colouring value on `v_dist`.
pub fn csw_gap(g: &Graph, v_dist: &[String]) -> Result<CswGap> {
    let dist: BTreeSet<&str> = v_dist.iter().map(String::as_str).collect();
    let gw = g.clone().with_weight_fn(|l| if dist.contains(l) { 1.0 } else { 0.0 })?;
    let alpha_w = weighted_independence(&gw).value;
    let ps = enumerate_patterns(g, v_dist, DEFAULT_BUDGET)?;
    let cc = ps.patterns().iter().map(|p| p.matches('1').count()).max().map(|x| x as f64);
    Ok(CswGap { alpha_w, classical_completeness: cc, gap: cc.map(|c| alpha_w - c) })
}

// Exact rational cross-check of half-integrality.

type Q = Rational64;

/// Vertices of the fractional stable-set polytope
/// `{0 <= x <= 1, x_u + x_v <= 1 on edges}` of `g`, in exact arithmetic.
pub fn fstab_vertices(g: &Graph) -> Vec<Vec<Q>> {
    let n = g.n();
    // Rows (a, b) meaning a.x <= b; tight rows are chosen below.
    let mut rows: Vec<(Vec<Q>, Q)> = (0..n)
        .map(|i| {
            let mut a = vec![Q::zero(); n];
            a[i] = -Q::one();
            (a, Q::zero())
        })
        .collect();
    for (u, v) in g.edges() {
        let mut a = vec![Q::zero(); n];
        a[u] = Q::one();
        a[v] = Q::one();
        rows.push((a, Q::one()));
    }
    // Edges already bound their endpoints by 1.
    for i in (0..n).filter(|&i| g.degree(i) == 0) {
        let mut a = vec![Q::zero(); n];
        a[i] = Q::one();
        rows.push((a, Q::one()));
    }
    let mut found = BTreeSet::new();
    let mut chosen = Vec::new();
    let mut echelon: Vec<Vec<Q>> = Vec::new();
    tight_sets(&rows, n, 0, &mut chosen, &mut echelon, &mut found);
    found.into_iter().collect()
}

/// Reduces `r` against an echelon basis; `None` when it is dependent.
fn reduce(echelon: &[Vec<Q>], r: &[Q]) -> Option<Vec<Q>> {
    let mut r = r.to_vec();
    for e in echelon {
        let p = e.iter().position(|x| !x.is_zero()).expect("nonzero row");
        if !r[p].is_zero() {
            let f = r[p] / e[p];
            for (x, y) in r.iter_mut().zip(e) {
                *x -= f * y;
            }
        }
    }
    r.iter().any(|x| !x.is_zero()).then_some(r)
}

fn tight_sets(
    rows: &[(Vec<Q>, Q)],
    n: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    echelon: &mut Vec<Vec<Q>>,
    found: &mut BTreeSet<Vec<Q>>,
) {
    if chosen.len() == n {
        let a: Vec<Vec<Q>> = chosen.iter().map(|&i| rows[i].0.clone()).collect();
        let b: Vec<Q> = chosen.iter().map(|&i| rows[i].1).collect();
        let x = solve(a, b).expect("independent rows");
        if rows.iter().all(|(a, b)| dotq(a, &x) <= *b) {
            found.insert(x);
        }
        return;
    }
    if rows.len() - start < n - chosen.len() {
        return;
    }
    for i in start..rows.len() {
        if let Some(r) = reduce(echelon, &rows[i].0) {
            chosen.push(i);
            echelon.push(r);
            tight_sets(rows, n, i + 1, chosen, echelon, found);
            echelon.pop();
            chosen.pop();
        }
    }
}

fn dotq(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gauss-Jordan on a square system.
fn solve(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
        }
        b[col] /= p;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for j in 0..n {
                    let t = a[col][j];
                    a[r][j] -= f * t;
                }
                let t = b[col];
                b[r] -= f * t;
            }
        }
    }
    Some(b)
}

/// Whether `p` is a convex combination of `pts`, by an exact phase-one
/// simplex with Bland's rule.
pub fn in_convex_hull(p: &[Q], pts: &[Vec<Q>]) -> bool {
    if pts.is_empty() {
        return false;
    }
    let m = p.len() + 1;
    let k = pts.len();
    // Columns: lambda_1..lambda_k, then m artificials. Rows: coordinates and sum.
    let cols = k + m;
    let mut t: Vec<Vec<Q>> = vec![vec![Q::zero(); cols + 1]; m];
    for i in 0..m {
        for (j, q) in pts.iter().enumerate() {
            t[i][j] = if i < p.len() { q[i] } else { Q::one() };
        }
        let rhs = if i < p.len() { p[i] } else { Q::one() };
        t[i][k + i] = Q::one();
        t[i][cols] = rhs;
        if rhs.is_negative() {
            for x in t[i].iter_mut() {
                *x = -*x;
            }
            t[i][k + i] = Q::one();
        }
    }
    let mut basis: Vec<usize> = (k..k + m).collect();
    // Objective: minimize the sum of artificials, reduced costs kept explicitly.
    loop {
        let mut reduced = vec![Q::zero(); cols];
        for j in 0..cols {
            let cj = if j >= k { Q::one() } else { Q::zero() };
            let zj: Q = (0..m).map(|i| if basis[i] >= k { t[i][j] } else { Q::zero() }).sum();
            reduced[j] = cj - zj;
        }
        let Some(enter) = (0..cols).find(|&j| reduced[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = t[i][cols] / t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            break;
        };
        let piv = t[r][enter];
        for x in t[r].iter_mut() {
            *x /= piv;
        }
        for i in 0..m {
            if i != r && !t[i][enter].is_zero() {
                let f = t[i][enter];
                for j in 0..=cols {
                    let v = t[r][j];
                    t[i][j] -= f * v;
                }
            }
        }
        basis[r] = enter;
    }
    let infeas: Q = (0..m).filter(|&i| basis[i] >= k).map(|i| t[i][cols]).sum();
    infeas.is_zero()
}

/// Extreme points of the convex hull of distinct points.
pub fn extreme_points(pts: &[Vec<Q>]) -> Vec<Vec<Q>> {
    (0..pts.len())
        .filter(|&i| {
            let others: Vec<Vec<Q>> =
                pts.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| q.clone()).collect();
            !in_convex_hull(&pts[i], &others)
        })
        .map(|i| pts[i].clone())
        .collect()
}

/// Outcome of comparing the half-integral enumeration with exact vertex
/// enumeration of the polytope on the context vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfIntegralityCheck {
    pub enumerated: usize,
    pub hull_vertices: usize,
    pub polytope_vertices: usize,
    pub agree: bool,
}

/// `ext(conv(E))` against the normalized vertices of the fractional
/// stable-set polytope, `E` being the half-integral enumeration.
pub fn half_integrality_check(g: &Graph, ctx: &ContextSet) -> Result<HalfIntegralityCheck> {
    let labels = ctx.support();
    let sub = g.induced(&g.indices(&labels)?);
    let halves = enumerate_halves(g, ctx, &labels, DEFAULT_BUDGET)?;
    let e: Vec<Vec<Q>> =
        halves.iter().map(|h| h.iter().map(|&x| Q::new(x as i64, 2)).collect()).collect();
    let hull: BTreeSet<Vec<Q>> = extreme_points(&e).into_iter().collect();
    let pos: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let contexts: Vec<Vec<usize>> =
        ctx.contexts.iter().map(|c| c.iter().map(|v| pos[v.as_str()]).collect()).collect();
    // `sub` keeps label order, which is the order of `labels`.
    let normalized: BTreeSet<Vec<Q>> = fstab_vertices(&sub)
        .into_iter()
        .filter(|x| {
            contexts.iter().all(|c| {
                let s: Q = c.iter().map(|&i| x[i]).sum();
                s == Q::one() && c.iter().filter(|&&i| !x[i].is_zero()).count() <= 2
            })
        })
        .collect();
    Ok(HalfIntegralityCheck {
        enumerated: e.len(),
        hull_vertices: hull.len(),
        polytope_vertices: normalized.len(),
        agree: hull == normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> Graph {
        Graph::new(["a", "b", "c"], [("a", "b"), ("a", "c"), ("b", "c")]).unwrap()
    }

    #[test]
    fn single_context_has_six_boxes() {
        let g = k3();
        let boxes = enumerate_binary_vertices(&g, &ContextSet::all(&g), 1000).unwrap();
        assert_eq!(boxes.len(), 6);
        assert!(boxes.iter().all(|b| b.check().is_ok()));
    }

    #[test]
    fn fstab_of_triangle() {
        let v = fstab_vertices(&k3());
        // Origin, three unit vectors and the all-halves point.
        assert_eq!(v.len(), 5);
        assert!(v.contains(&vec![Q::new(1, 2); 3]));
    }

    #[test]
    fn isolated_vertices_are_bounded() {
        let g = Graph::new(["a", "b"], Vec::<(&str, &str)>::new()).unwrap();
        assert_eq!(fstab_vertices(&g).len(), 4);
        assert!(half_integrality_check(&g, &ContextSet::all(&g)).unwrap().agree);
    }

    #[test]
    fn hull_membership() {
        let pts = vec![vec![Q::zero(), Q::zero()], vec![Q::one(), Q::zero()], vec![Q::zero(), Q::one()]];
        assert!(in_convex_hull(&[Q::new(1, 3), Q::new(1, 3)], &pts));
        assert!(!in_convex_hull(&[Q::one(), Q::one()], &pts));
        assert_eq!(extreme_points(&[pts.clone(), vec![vec![Q::new(1, 2), Q::zero()]]].concat()).len(), 3);
    }

    #[test]
    fn crossover_angle() {
        assert!((quantum_xgad_value(std::f64::consts::FRAC_PI_3) - 1.5).abs() < 1e-15);
        assert_eq!(quantum_xgad_value(0.0), 2.0);
    }
}
