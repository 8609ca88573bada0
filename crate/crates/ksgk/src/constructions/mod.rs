//! Generators for the explicit vector families: parametric gadgets, generic
//! gadgets on arbitrary vectors, KS proofs, SI-C frames, forbidden-set
//! gadgets and the randomness gadgets.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::orthorep::{merge_parallel, orthogonality_graph_lenient, VectorSet, DEFAULT_TOLERANCE};
use crate::sat::{complete_bases, COMPLETION_PREFIX};

mod forbidden;
mod gadget32;
mod gadget_dd1;
mod generic;
mod ks;
mod randomness;
mod sic;

pub use forbidden::{build_forbidden_gadget, parse_patterns};
pub use gadget32::build_gadget_32;
pub use gadget_dd1::build_gadget_dd1;
pub use generic::{levels_needed, order_gadget, zero_one_gadget, OrderGadgetOptions};
pub use ks::{basis_label, build_ks_proof, default_bases, selection_prefix};
pub use randomness::build_randomness_gadget;
pub use sic::{build_sic_proof, build_sic_vectors, frame_value, sign_exponent, sylvester, SicFrame, SicProof};

/// A generated vector family with its orthogonality graph.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GadgetBlueprint {
    pub vectors: VectorSet,
    pub graph: Graph,
    pub distinguished: Vec<String>,
    pub parameters: BTreeMap<String, f64>,
    /// Labels dropped because their ray coincided with a kept label.
    pub aliases: BTreeMap<String, String>,
    /// Named numerical residuals worth reporting (limiting edges and the like).
    pub residuals: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl GadgetBlueprint {
    /// Normalizes, merges parallel rays (distinguished labels and `prefer`
    /// win, otherwise the first in `vecs` order), then takes the
    /// orthogonality graph.
    pub fn from_real(
        d: usize,
        vecs: Vec<(String, Vec<f64>)>,
        distinguished: Vec<String>,
        parameters: BTreeMap<String, f64>,
        prefer: &[String],
    ) -> Result<Self> {
        let order: Vec<String> = vecs.iter().map(|(l, _)| l.clone()).collect();
        let vs = VectorSet::from_real(d, vecs, DEFAULT_TOLERANCE)?;
        Self::from_vectors(vs, &order, distinguished, parameters, prefer)
    }

    pub fn from_vectors(
        vs: VectorSet,
        order: &[String],
        distinguished: Vec<String>,
        parameters: BTreeMap<String, f64>,
        prefer: &[String],
    ) -> Result<Self> {
        let mut pref: Vec<String> = distinguished.clone();
        pref.extend(prefer.iter().cloned());
        let (merged, aliases) = merge_parallel(&vs, order, &pref);
        for l in &distinguished {
            if let Some(t) = aliases.get(l) {
                return Err(Error::DegenerateParams(format!("distinguished {l} coincides with {t}")));
            }
        }
        let graph = orthogonality_graph_lenient(&merged);
        Ok(GadgetBlueprint {
            vectors: merged,
            graph,
            distinguished,
            parameters,
            aliases,
            residuals: BTreeMap::new(),
            notes: vec![],
        })
    }

    /// Basis-completed copy (added vectors carry the completion prefix).
    pub fn completed(&self) -> GadgetBlueprint {
        let vectors = complete_bases(&self.vectors);
        let graph = orthogonality_graph_lenient(&vectors);
        GadgetBlueprint { vectors, graph, ..self.clone() }
    }

    /// Copy whose vertices split into disjoint bases, as a channel needs.
    /// Each uncovered vertex is grouped with uncovered neighbours into the
    /// largest clique whose completion avoids every existing ray, and the
    /// clique is completed by fresh vectors (random within the complement
    /// when it has room).
    pub fn partitioned(&self, seed: u64) -> Result<GadgetBlueprint> {
        let d = self.dimension();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vecs: Vec<(String, Vec<f64>)> = Vec::new();
        for l in self.vectors.labels() {
            let v = self.vectors.real(l).ok_or_else(|| Error::InvalidVectors(format!("{l} is not real")))?;
            vecs.push((l.clone(), v));
        }
        let n0 = vecs.len();
        let orth = |a: &[f64], b: &[f64]| dot(a, b).abs() <= DEFAULT_TOLERANCE;
        let mut covered = vec![false; n0];
        let mut fresh = 0usize;
        for v in 0..n0 {
            if covered[v] {
                continue;
            }
            let mut clique = vec![v];
            for u in v + 1..n0 {
                if clique.len() < d && !covered[u] && clique.iter().all(|&w| orth(&vecs[w].1, &vecs[u].1)) {
                    clique.push(u);
                }
            }
            let mut placed = false;
            'size: for s in (1..=clique.len()).rev() {
                let base: Vec<Vec<f64>> = clique[..s].iter().map(|&i| vecs[i].1.clone()).collect();
                let comp = complement(&base, d);
                for _ in 0..50 {
                    let new = if comp.len() >= 2 {
                        let mixed: Vec<Vec<f64>> = (0..comp.len())
                            .map(|_| {
                                let terms: Vec<(f64, &[f64])> =
                                    comp.iter().map(|c| (rng.gen_range(-1.0..1.0), c.as_slice())).collect();
                                combo(&terms)
                            })
                            .collect();
                        orthonormalize(&mixed)
                    } else {
                        comp.clone()
                    };
                    if new.len() != comp.len() {
                        continue;
                    }
                    if new.iter().any(|w| vecs.iter().any(|(_, x)| dist_ray(w, x) < 1e-6)) {
                        if comp.len() >= 2 {
                            continue;
                        }
                        continue 'size;
                    }
                    for &i in &clique[..s] {
                        covered[i] = true;
                    }
                    for w in new {
                        fresh += 1;
                        vecs.push((format!("{COMPLETION_PREFIX}p{fresh}"), w));
                    }
                    placed = true;
                    break 'size;
                }
            }
            if !placed {
                return Err(Error::CoverNotFound(format!("no basis through {}", vecs[v].0)));
            }
        }
        let mut bp = GadgetBlueprint::from_real(d, vecs, self.distinguished.clone(), self.parameters.clone(), &[])?;
        bp.residuals = self.residuals.clone();
        bp.notes = self.notes.clone();
        bp.notes.push(format!("{fresh} vectors added to split into bases"));
        Ok(bp)
    }

    pub fn dimension(&self) -> usize {
        self.vectors.dimension()
    }

    /// Vertices of the part built under `prefix`, following aliases of
    /// merged vectors to the label that was kept.
    pub fn part_labels(&self, prefix: &str) -> Vec<String> {
        let mut out: BTreeSet<String> =
            self.graph.labels().iter().filter(|l| l.starts_with(prefix)).cloned().collect();
        out.extend(self.aliases.iter().filter(|(k, _)| k.starts_with(prefix)).map(|(_, v)| v.clone()));
        out.into_iter().collect()
    }
}

/// Assembles parts that share labels (same label, same ray) into one blueprint.
pub(crate) fn union_real(
    d: usize,
    parts: Vec<Vec<(String, Vec<f64>)>>,
    distinguished: Vec<String>,
    parameters: BTreeMap<String, f64>,
) -> Result<GadgetBlueprint> {
    let mut seen: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut all = Vec::new();
    for part in parts {
        for (l, v) in part {
            let v = normalize(&v);
            if let Some(old) = seen.get(&l) {
                if dist_ray(old, &v) > 1e-9 {
                    return Err(Error::DegenerateParams(format!("label {l} used for two different rays")));
                }
                continue;
            }
            seen.insert(l.clone(), v.clone());
            all.push((l, v));
        }
    }
    GadgetBlueprint::from_real(d, all, distinguished, parameters, &[])
}

// Small real linear algebra used by the generators.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn normalize(a: &[f64]) -> Vec<f64> {
    let n = norm2(a);
    a.iter().map(|x| x / n).collect()
}

pub(crate) fn cross3(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn axpy(a: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(p, q)| a * p + q).collect()
}

pub(crate) fn combo(terms: &[(f64, &[f64])]) -> Vec<f64> {
    let d = terms[0].1.len();
    let mut out = vec![0.0; d];
    for (c, v) in terms {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += c * x;
        }
    }
    out
}

/// Sign-blind distance between the rays of two unit vectors.
pub(crate) fn dist_ray(a: &[f64], b: &[f64]) -> f64 {
    let s = if dot(a, b) >= 0.0 { 1.0 } else { -1.0 };
    a.iter().zip(b).map(|(x, y)| (x - s * y).powi(2)).sum::<f64>().sqrt()
}

/// Removes from `v` its components along the orthonormal vectors `basis`.
pub(crate) fn project_out(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut w = v.to_vec();
    for b in basis {
        let c = dot(b, &w);
        w = axpy(-c, b, &w);
    }
    // A second pass keeps the result orthogonal to working precision.
    for b in basis {
        let c = dot(b, &w);
        w = axpy(-c, b, &w);
    }
    w
}

/// Orthonormalizes `vs` (dropping dependent members).
pub(crate) fn orthonormalize(vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let w = project_out(v, &out);
        if norm2(&w) > 1e-9 {
            out.push(normalize(&w));
        }
    }
    out
}

/// Orthonormal basis of the orthogonal complement of `span(vs)` in `R^d`,
/// taken from the standard basis by Gram-Schmidt.
pub(crate) fn complement(vs: &[Vec<f64>], d: usize) -> Vec<Vec<f64>> {
    let mut basis = orthonormalize(vs);
    let k = basis.len();
    for e in 0..d {
        if basis.len() == d {
            break;
        }
        let mut v = vec![0.0; d];
        v[e] = 1.0;
        let w = project_out(&v, &basis);
        if norm2(&w) > 1e-6 {
            basis.push(normalize(&w));
        }
    }
    basis.split_off(k)
}

pub(crate) fn unit(d: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[i] = 1.0;
    v
}

pub(crate) fn params(items: &[(&str, f64)]) -> BTreeMap<String, f64> {
    items.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}
