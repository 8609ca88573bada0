//! One-shot weighted zero-error capacities of confusability channels whose
//! inputs are the vectors of a gadget-type set.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::coloring::{enumerate_patterns, find_coloring_in, Instance, DEFAULT_BUDGET};
use crate::constructions::GadgetBlueprint;
use crate::error::{Error, Result};
use crate::graph::{exact_clique_cover, max_cliques, weighted_independence, CliqueCover, Graph};

/// Confusability graph, its partition into maximum cliques (the messages)
/// and the distinguished inputs with their weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub graph: Graph,
    pub cover: CliqueCover,
    pub v_dist: Vec<String>,
    pub w_star: f64,
}

impl Channel {
    pub fn q(&self) -> usize {
        self.cover.parts.len()
    }

    pub fn d(&self) -> usize {
        self.cover.claimed_size
    }

    /// The graph with weight `w*` on distinguished inputs and 1 elsewhere.
    pub fn weighted(&self) -> Graph {
        let dist: BTreeSet<&str> = self.v_dist.iter().map(String::as_str).collect();
        let w = self.w_star;
        self.graph
            .clone()
            .with_weight_fn(|l| if dist.contains(l) { w } else { 1.0 })
            .expect("weights are positive")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub c_sr: f64,
    pub c_se: f64,
    pub advantage: bool,
    pub optimal_code: Vec<String>,
    pub alpha: usize,
    /// `alpha - 1 + w*`, the closed form for gadget-type weights.
    pub formula_sr: f64,
    pub formula_matches: bool,
    /// `|V_dist| > d`, the sufficient condition for an advantage.
    pub sufficient_condition: bool,
    pub q: usize,
    pub d: usize,
    pub n_dist: usize,
}

fn check_w_star(w: f64) -> Result<()> {
    if w > 1.0 && w < 2.0 {
        Ok(())
    } else {
        Err(Error::WStarOutOfRange(w))
    }
}

/// Distinguished inputs are pairwise non-confusable, so each message holds
/// at most one of them.
pub fn check_feasible(q: usize, n_dist: usize) -> Result<()> {
    if n_dist > q {
        return Err(Error::DistinguishedExceedsCover(n_dist, q));
    }
    Ok(())
}

/// Channel over a basis-completed blueprint, distinguished on its
/// distinguished vectors.
pub fn build_channel(bp: &GadgetBlueprint, w_star: f64) -> Result<Channel> {
    channel_from_graph(&bp.graph, &bp.distinguished, w_star)
}

pub fn channel_from_graph(g: &Graph, v_dist: &[String], w_star: f64) -> Result<Channel> {
    check_w_star(w_star)?;
    let cliques = max_cliques(g);
    let size = cliques.first().map_or(0, Vec::len);
    let parts = exact_clique_cover(g, &cliques)
        .ok_or_else(|| Error::CoverNotFound(format!("{} vertices, {} maximum cliques", g.n(), cliques.len())))?;
    let cover = CliqueCover { parts: parts.iter().map(|p| g.labels_of(p)).collect(), claimed_size: size };
    cover.validate(g)?;
    check_feasible(cover.parts.len(), v_dist.len())?;
    let idx = g.indices(v_dist)?;
    if !g.is_independent(&idx) {
        return Err(Error::InvalidDistinguished(format!("{v_dist:?}")));
    }
    Ok(Channel { graph: g.clone(), cover, v_dist: v_dist.to_vec(), w_star })
}

/// `alpha(G, w)`: the best single-shot code without entanglement.
pub fn capacity_sr(ch: &Channel) -> (f64, Vec<String>) {
    let r = weighted_independence(&ch.weighted());
    (r.value, r.set)
}

/// `q + (w* - 1) |V_dist| / d`: the clique-measurement protocol on a
/// maximally entangled state.
pub fn capacity_se(ch: &Channel) -> f64 {
    ch.q() as f64 + (ch.w_star - 1.0) * ch.v_dist.len() as f64 / ch.d() as f64
}

pub fn capacity_report(ch: &Channel) -> CapacityReport {
    let (c_sr, optimal_code) = capacity_sr(ch);
    let c_se = capacity_se(ch);
    let alpha = weighted_independence(&ch.graph.clone().with_weight_fn(|_| 1.0).expect("unit")).value.round() as usize;
    let formula_sr = alpha as f64 - 1.0 + ch.w_star;
    CapacityReport {
        c_sr,
        c_se,
        advantage: c_se > c_sr + 1e-12,
        optimal_code,
        alpha,
        formula_sr,
        formula_matches: (formula_sr - c_sr).abs() < 1e-9,
        sufficient_condition: ch.v_dist.len() > ch.d(),
        q: ch.q(),
        d: ch.d(),
        n_dist: ch.v_dist.len(),
    }
}

/// Largest number of distinguished inputs valued 1 by one colouring.
pub fn classical_dist_max(ch: &Channel) -> Result<usize> {
    let ps = enumerate_patterns(&ch.graph, &ch.v_dist, DEFAULT_BUDGET)?;
    Ok(ps.patterns().iter().map(|p| p.matches('1').count()).max().unwrap_or(0))
}

/// The 40 rays of `{0,±1}^4` in product order, first nonzero entry positive.
pub fn sign_rays() -> Vec<[i8; 4]> {
    (0..4)
        .map(|_| [-1i8, 0, 1])
        .multi_cartesian_product()
        .filter_map(|v| {
            let first = *v.iter().find(|&&x| x != 0)?;
            (first > 0).then(|| [v[0], v[1], v[2], v[3]])
        })
        .collect()
}

pub fn ray_label(i: usize) -> String {
    format!("r{i:02}")
}

/// A channel found among the sign rays, with its vectors.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RayChannel {
    pub blueprint: GadgetBlueprint,
    pub channel: Channel,
    pub packings_tried: u64,
}

/// Searches packings of `q` disjoint bases among the sign rays, in
/// lexicographic order, for the first colourable one with `alpha = q` whose
/// inputs contain `n_dist` pairwise non-orthogonal rays, no two of them 1 in
/// the same colouring, on which the weighted independence number equals
/// `alpha - 1 + w*`. At most `max_packings` packings are examined.
pub fn search_ray_channel(q: usize, n_dist: usize, w_star: f64, max_packings: u64) -> Result<RayChannel> {
    check_w_star(w_star)?;
    check_feasible(q, n_dist)?;
    let rays = sign_rays();
    let n = rays.len();
    let orth = |a: usize, b: usize| (0..4).map(|i| rays[a][i] as i32 * rays[b][i] as i32).sum::<i32>() == 0;
    let bases: Vec<[usize; 4]> = (0..n)
        .combinations(4)
        .filter(|c| c.iter().tuple_combinations().all(|(&a, &b)| orth(a, b)))
        .map(|c| [c[0], c[1], c[2], c[3]])
        .collect();
    let labels: Vec<String> = (0..n).map(ray_label).collect();
    let full = Graph::new(
        labels.iter().map(String::as_str),
        (0..n).tuple_combinations().filter(|&(a, b)| orth(a, b)).map(|(a, b)| (labels[a].as_str(), labels[b].as_str())),
    )?;

    let mut tried = 0u64;
    let mut chosen: Vec<usize> = Vec::new();
    let mut found = None;
    search_packings(&bases, q, 0, 0u64, &mut chosen, &mut |pack| {
        tried += 1;
        if tried > max_packings {
            return true;
        }
        let verts: Vec<usize> = pack.iter().flat_map(|&b| bases[b]).sorted().collect();
        let g = full.induced(&verts);
        match advantage_set(&g, q, n_dist, w_star) {
            Some(dist) => {
                found = Some((pack.to_vec(), g, dist));
                true
            }
            None => false,
        }
    });
    let (pack, g, dist) = found.ok_or_else(|| {
        Error::NoAdvantage(format!(
            "none of {} packings of {q} bases carries {n_dist} distinguished inputs with an advantage",
            tried.min(max_packings)
        ))
    })?;
    let vecs: Vec<(String, Vec<f64>)> = pack
        .iter()
        .flat_map(|&b| bases[b])
        .sorted()
        .map(|i| (labels[i].clone(), rays[i].iter().map(|&x| x as f64).collect()))
        .collect();
    let mut blueprint = GadgetBlueprint::from_real(
        4,
        vecs,
        dist.clone(),
        crate::constructions::params(&[("q", q as f64), ("n_dist", n_dist as f64)]),
        &[],
    )?;
    blueprint.notes.push(format!("bases {:?}", pack.iter().map(|&b| bases[b]).collect::<Vec<_>>()));
    let cover = CliqueCover {
        parts: pack.iter().map(|&b| bases[b].iter().map(|&i| labels[i].clone()).collect()).collect(),
        claimed_size: 4,
    };
    cover.validate(&g)?;
    let channel = Channel { graph: g, cover, v_dist: dist, w_star };
    Ok(RayChannel { blueprint, channel, packings_tried: tried })
}

fn search_packings(
    bases: &[[usize; 4]],
    q: usize,
    start: usize,
    used: u64,
    chosen: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if chosen.len() == q {
        return visit(chosen);
    }
    for b in start..bases.len() {
        let mask = bases[b].iter().fold(0u64, |m, &i| m | 1 << i);
        if used & mask != 0 {
            continue;
        }
        chosen.push(b);
        if search_packings(bases, q, b + 1, used | mask, chosen, visit) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// A distinguished set of size `n_dist` on which `g` shows the advantage,
/// or `None`.
fn advantage_set(g: &Graph, q: usize, n_dist: usize, w_star: f64) -> Option<Vec<String>> {
    let inst = Instance::new(g);
    find_coloring_in(&inst, &[], u64::MAX).ok()??;
    let unit = g.clone().with_weight_fn(|_| 1.0).ok()?;
    let alpha = weighted_independence(&unit).value.round() as usize;
    if alpha != q {
        return None;
    }
    let n = g.n();
    // Pairs that are non-orthogonal yet never 1 together.
    let mut compat = vec![vec![false; n]; n];
    for (a, b) in (0..n).tuple_combinations() {
        if g.adjacent(a, b) {
            continue;
        }
        if find_coloring_in(&inst, &[(a, 1), (b, 1)], u64::MAX).ok()?.is_none() {
            compat[a][b] = true;
            compat[b][a] = true;
        }
    }
    let target = alpha as f64 - 1.0 + w_star;
    let mut pick = Vec::new();
    let mut out = None;
    cliques_of_size(&compat, n_dist, 0, &mut pick, &mut |set| {
        let labels = g.labels_of(set);
        let ch = Channel {
            graph: g.clone(),
            cover: CliqueCover { parts: vec![], claimed_size: 4 },
            v_dist: labels.clone(),
            w_star,
        };
        if (capacity_sr(&ch).0 - target).abs() < 1e-9 {
            out = Some(labels);
            true
        } else {
            false
        }
    });
    out
}

fn cliques_of_size(
    adj: &[Vec<bool>],
    size: usize,
    start: usize,
    pick: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if pick.len() == size {
        return visit(pick);
    }
    for v in start..adj.len() {
        if pick.iter().all(|&u| adj[u][v]) {
            pick.push(v);
            if cliques_of_size(adj, size, v + 1, pick, visit) {
                return true;
            }
            pick.pop();
        }
    }
    false
}
