//! Labelled unit vectors, Gram matrices and orthogonality graphs.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Labelled unit vectors in `C^d`, with the tolerance used for every
/// orthogonality and parallelism decision made about them.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSet {
    dimension: usize,
    entries: BTreeMap<String, Vec<Complex64>>,
    tolerance: f64,
}

/// A single coordinate in the file format: `[re, im]` or a bare real.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Coord {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VectorFile {
    pub dimension: usize,
    #[serde(default = "default_tol")]
    pub tolerance: f64,
    pub vectors: BTreeMap<String, Vec<Coord>>,
}

fn default_tol() -> f64 {
    DEFAULT_TOLERANCE
}

impl VectorSet {
    /// Validates dimensions and unit norms (within tolerance).
    pub fn new(
        dimension: usize,
        entries: BTreeMap<String, Vec<Complex64>>,
        tolerance: f64,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidVectors("dimension must be positive".into()));
        }
        if !(tolerance >= 0.0) {
            return Err(Error::InvalidVectors("tolerance must be nonnegative".into()));
        }
        for (l, v) in &entries {
            if v.len() != dimension {
                return Err(Error::InvalidVectors(format!(
                    "{l} has {} entries, dimension is {dimension}",
                    v.len()
                )));
            }
            let nrm = norm(v);
            if (nrm - 1.0).abs() > tolerance.max(1e-12) {
                return Err(Error::InvalidVectors(format!("{l} has norm {nrm}")));
            }
        }
        Ok(VectorSet { dimension, entries, tolerance })
    }

    /// Normalizes real vectors and wraps them. Zero vectors are rejected.
    pub fn from_real<S: Into<String>>(
        dimension: usize,
        vectors: impl IntoIterator<Item = (S, Vec<f64>)>,
        tolerance: f64,
    ) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (l, v) in vectors {
            let l = l.into();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n < 1e-300 {
                return Err(Error::DegenerateParams(format!("{l} is the zero vector")));
            }
            let c: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x / n, 0.0)).collect();
            if entries.insert(l.clone(), c).is_some() {
                return Err(Error::InvalidVectors(format!("duplicate label {l}")));
            }
        }
        VectorSet::new(dimension, entries, tolerance)
    }

    pub fn from_file(f: &VectorFile) -> Result<Self> {
        let entries = f
            .vectors
            .iter()
            .map(|(l, v)| {
                let c = v
                    .iter()
                    .map(|x| match *x {
                        Coord::Real(r) => Complex64::new(r, 0.0),
                        Coord::Complex([re, im]) => Complex64::new(re, im),
                    })
                    .collect();
                (l.clone(), c)
            })
            .collect();
        VectorSet::new(f.dimension, entries, f.tolerance)
    }

    /// Real vectors are written in the shorthand form.
    pub fn to_file(&self) -> VectorFile {
        let real = self.is_real();
        VectorFile {
            dimension: self.dimension,
            tolerance: self.tolerance,
            vectors: self
                .entries
                .iter()
                .map(|(l, v)| {
                    let c = v
                        .iter()
                        .map(|z| if real { Coord::Real(z.re) } else { Coord::Complex([z.re, z.im]) })
                        .collect();
                    (l.clone(), c)
                })
                .collect(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.entries.values().all(|v| v.iter().all(|z| z.im == 0.0))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &String> {
        self.entries.keys()
    }

    pub fn get(&self, label: &str) -> Option<&[Complex64]> {
        self.entries.get(label).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Vec<Complex64>)> {
        self.entries.iter()
    }

    /// Real parts, for constructions that work over the reals.
    pub fn real(&self, label: &str) -> Option<Vec<f64>> {
        self.get(label).map(|v| v.iter().map(|z| z.re).collect())
    }

    /// `<a|b>` for two labels.
    pub fn overlap(&self, a: &str, b: &str) -> Option<Complex64> {
        Some(inner(self.get(a)?, self.get(b)?))
    }

    pub fn insert(&mut self, label: String, v: Vec<Complex64>) -> Result<()> {
        if v.len() != self.dimension {
            return Err(Error::InvalidVectors(format!("{label} has wrong length")));
        }
        if self.entries.contains_key(&label) {
            return Err(Error::InvalidVectors(format!("duplicate label {label}")));
        }
        self.entries.insert(label, v);
        Ok(())
    }

    /// Keeps only the listed labels.
    pub fn restrict(&self, keep: &[String]) -> VectorSet {
        VectorSet {
            dimension: self.dimension,
            tolerance: self.tolerance,
            entries: keep
                .iter()
                .filter_map(|l| self.entries.get(l).map(|v| (l.clone(), v.clone())))
                .collect(),
        }
    }

    /// Applies `U` (row-major, d x d) to every vector.
    pub fn transform(&self, u: &[Vec<Complex64>]) -> VectorSet {
        let entries = self
            .entries
            .iter()
            .map(|(l, v)| {
                let w = u.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect();
                (l.clone(), w)
            })
            .collect();
        VectorSet { dimension: self.dimension, entries, tolerance: self.tolerance }
    }

    /// Full Gram matrix in label order.
    pub fn gram(&self) -> Vec<Vec<Complex64>> {
        let vs: Vec<&Vec<Complex64>> = self.entries.values().collect();
        vs.iter().map(|a| vs.iter().map(|b| inner(a, b)).collect()).collect()
    }
}

impl Serialize for VectorSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl<'de> Deserialize<'de> for VectorSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = VectorFile::deserialize(d)?;
        VectorSet::from_file(&f).map_err(serde::de::Error::custom)
    }
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `min_phi |a - e^{i phi} b|`, computed from the difference itself so that
/// it stays accurate when the rays nearly coincide.
pub fn ray_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let ip = inner(b, a);
    let phase = if ip.norm() > 0.0 { ip / ip.norm() } else { Complex64::new(1.0, 0.0) };
    a.iter().zip(b).map(|(x, y)| (x - phase * y).norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_orthogonal(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    inner(a, b).norm() <= tol
}

pub fn is_parallel(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    ray_distance(a, b) <= tol
}

/// All parallel label pairs, first label smaller.
pub fn parallel_pairs(vs: &VectorSet) -> Vec<(String, String)> {
    let items: Vec<(&String, &Vec<Complex64>)> = vs.iter().collect();
    let mut out = Vec::new();
    for (i, (la, a)) in items.iter().enumerate() {
        for (lb, b) in &items[i + 1..] {
            if is_parallel(a, b, vs.tolerance) {
                out.push(((*la).clone(), (*lb).clone()));
            }
        }
    }
    out
}

/// Graph with an edge for every pair with `|<u|v>| <= tol`, ignoring parallel pairs.
pub fn orthogonality_graph_lenient(vs: &VectorSet) -> Graph {
    let items: Vec<(&String, &Vec<Complex64>)> = vs.iter().collect();
    let mut edges = Vec::new();
    for (i, (la, a)) in items.iter().enumerate() {
        for (lb, b) in &items[i + 1..] {
            if is_orthogonal(a, b, vs.tolerance) {
                edges.push((la.as_str(), lb.as_str()));
            }
        }
    }
    Graph::new(items.iter().map(|(l, _)| (*l).clone()), edges).expect("labels are unique")
}

/// Orthogonality graph; parallel rays are an error.
pub fn orthogonality_graph(vs: &VectorSet) -> Result<Graph> {
    if let Some((a, b)) = parallel_pairs(vs).into_iter().next() {
        return Err(Error::DuplicateRay(a, b));
    }
    Ok(orthogonality_graph_lenient(vs))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpuriousEdge {
    pub a: String,
    pub b: String,
    pub overlap: f64,
}

/// Discrepancies between a vector set and a graph it is meant to realize.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FaithfulnessReport {
    pub missing_edges: Vec<(String, String)>,
    pub spurious_edges: Vec<SpuriousEdge>,
    pub parallel_pairs: Vec<(String, String)>,
}

impl FaithfulnessReport {
    pub fn is_faithful(&self) -> bool {
        self.missing_edges.is_empty() && self.spurious_edges.is_empty() && self.parallel_pairs.is_empty()
    }
}

pub fn check_faithful(vs: &VectorSet, g: &Graph) -> Result<FaithfulnessReport> {
    let vl: Vec<&String> = vs.labels().collect();
    let gl: Vec<&String> = g.labels().iter().collect();
    if vl != gl {
        let only_v: Vec<&&String> = vl.iter().filter(|l| g.idx(l).is_none()).collect();
        let only_g: Vec<&&String> = gl.iter().filter(|l| vs.get(l).is_none()).collect();
        return Err(Error::LabelMismatch(format!(
            "only in vectors: {only_v:?}; only in graph: {only_g:?}"
        )));
    }
    let mut rep = FaithfulnessReport::default();
    let n = g.n();
    for i in 0..n {
        let a = vs.get(g.label(i)).expect("checked");
        for j in i + 1..n {
            let b = vs.get(g.label(j)).expect("checked");
            let ov = inner(a, b).norm();
            let orth = ov <= vs.tolerance;
            match (orth, g.adjacent(i, j)) {
                (true, false) => rep.missing_edges.push((g.label(i).into(), g.label(j).into())),
                (false, true) => rep.spurious_edges.push(SpuriousEdge {
                    a: g.label(i).into(),
                    b: g.label(j).into(),
                    overlap: ov,
                }),
                _ => {}
            }
            if is_parallel(a, b, vs.tolerance) {
                rep.parallel_pairs.push((g.label(i).into(), g.label(j).into()));
            }
        }
    }
    Ok(rep)
}

/// Largest entry modulus of `sum |u><u| - (N/d) I`.
pub fn frame_residual(vs: &VectorSet) -> f64 {
    let d = vs.dimension;
    let mut s = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for (_, v) in vs.iter() {
        for i in 0..d {
            for j in 0..d {
                s[i][j] += v[i] * v[j].conj();
            }
        }
    }
    let c = vs.len() as f64 / d as f64;
    let mut worst: f64 = 0.0;
    for (i, row) in s.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            let target = if i == j { c } else { 0.0 };
            worst = worst.max((z - target).norm());
        }
    }
    worst
}

/// Merges parallel rays. Labels are scanned in `order`; a later label parallel
/// to a kept one becomes its alias unless it is in `prefer` and the kept one is
/// not, in which case the two swap roles. Returns the reduced set and the
/// alias map `dropped -> kept`.
pub fn merge_parallel(
    vs: &VectorSet,
    order: &[String],
    prefer: &[String],
) -> (VectorSet, BTreeMap<String, String>) {
    let mut kept: Vec<String> = Vec::new();
    let mut alias: BTreeMap<String, String> = BTreeMap::new();
    for l in order {
        let v = vs.get(l).expect("label in set");
        match kept.iter().position(|k| is_parallel(vs.get(k).expect("kept"), v, vs.tolerance)) {
            None => kept.push(l.clone()),
            Some(p) => {
                if prefer.contains(l) && !prefer.contains(&kept[p]) {
                    let old = std::mem::replace(&mut kept[p], l.clone());
                    for target in alias.values_mut() {
                        if *target == old {
                            *target = l.clone();
                        }
                    }
                    alias.insert(old, l.clone());
                } else {
                    alias.insert(l.clone(), kept[p].clone());
                }
            }
        }
    }
    (vs.restrict(&kept), alias)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(d: usize) -> VectorSet {
        VectorSet::from_real(
            d,
            (0..d).map(|i| {
                let mut v = vec![0.0; d];
                v[i] = 1.0;
                (format!("e{i}"), v)
            }),
            1e-9,
        )
        .unwrap()
    }

    #[test]
    fn basis_gives_complete_graph() {
        let vs = basis(3);
        let g = orthogonality_graph(&vs).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert!(check_faithful(&vs, &g).unwrap().is_faithful());
        assert!(frame_residual(&vs) < 1e-15);
    }

    #[test]
    fn parallel_detection_is_phase_blind() {
        let vs = VectorSet::from_real(2, [("a", vec![1.0, 1.0]), ("b", vec![-1.0, -1.0])], 1e-9).unwrap();
        assert!(matches!(orthogonality_graph(&vs), Err(Error::DuplicateRay(..))));
        let mut e = BTreeMap::new();
        e.insert("a".into(), vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        e.insert("b".into(), vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)]);
        let vs = VectorSet::new(2, e, 1e-9).unwrap();
        assert_eq!(parallel_pairs(&vs).len(), 1);
    }

    #[test]
    fn near_parallel_is_not_parallel() {
        let x: f64 = 1e-5;
        let vs = VectorSet::from_real(2, [("a", vec![1.0, 0.0]), ("b", vec![x.cos(), x.sin()])], 1e-9)
            .unwrap();
        assert!(parallel_pairs(&vs).is_empty());
    }

    #[test]
    fn label_mismatch() {
        let vs = basis(2);
        let g = Graph::new(["e0", "zz"], [("e0", "zz")]).unwrap();
        assert!(matches!(check_faithful(&vs, &g), Err(Error::LabelMismatch(_))));
    }

    #[test]
    fn spurious_and_missing() {
        let vs = basis(3);
        let g = Graph::new(["e0", "e1", "e2"], [("e0", "e1")]).unwrap();
        let r = check_faithful(&vs, &g).unwrap();
        assert_eq!(r.missing_edges.len(), 2);
        assert!(r.spurious_edges.is_empty());
    }

    #[test]
    fn file_round_trip_with_shorthand() {
        let txt = r#"{"dimension":2,"vectors":{"a":[1,0],"b":[[0,0],[0,1]]}}"#;
        let f: VectorFile = serde_json::from_str(txt).unwrap();
        let vs = VectorSet::from_file(&f).unwrap();
        assert_eq!(vs.tolerance(), DEFAULT_TOLERANCE);
        assert_eq!(vs.get("b").unwrap()[1], Complex64::new(0.0, 1.0));
        let back = VectorSet::from_file(&vs.to_file()).unwrap();
        assert_eq!(back, vs);
    }

    #[test]
    fn merge_prefers_listed_labels() {
        let vs = VectorSet::from_real(
            2,
            [("a", vec![1.0, 0.0]), ("b", vec![0.0, 1.0]), ("c", vec![-1.0, 0.0])],
            1e-9,
        )
        .unwrap();
        let order: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let (m, alias) = merge_parallel(&vs, &order, &["c".to_string()]);
        assert_eq!(m.labels().cloned().collect::<Vec<_>>(), vec!["b", "c"]);
        assert_eq!(alias["a"], "c");
    }
}
