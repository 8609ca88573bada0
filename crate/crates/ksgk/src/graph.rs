//! Labelled simple graphs and the exact combinatorial primitives built on them.
//!
//! Vertices are kept sorted by label, so vertex index order *is* label order and
//! every tie-break in the crate is reproducible.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// On-disk graph format.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<String, f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<FixedBitSet>,
    weights: Option<Vec<f64>>,
}

impl TryFrom<GraphFile> for Graph {
    type Error = Error;
    fn try_from(f: GraphFile) -> Result<Self> {
        let mut g = Graph::new(f.vertices, f.edges.iter().map(|[a, b]| (a.as_str(), b.as_str())))?;
        if let Some(w) = f.weights {
            g = g.with_weights(&w)?;
        }
        Ok(g)
    }
}

impl From<Graph> for GraphFile {
    fn from(g: Graph) -> Self {
        g.to_file()
    }
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges, duplicate
    /// labels and undeclared endpoints.
    pub fn new<'a, S, E>(vertices: impl IntoIterator<Item = S>, edges: E) -> Result<Self>
    where
        S: Into<String>,
        E: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut labels: Vec<String> = vertices.into_iter().map(Into::into).collect();
        labels.sort();
        for w in labels.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidGraph(format!("duplicate vertex {}", w[0])));
            }
        }
        let index: HashMap<String, usize> =
            labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        let n = labels.len();
        let mut adj = vec![FixedBitSet::with_capacity(n); n];
        for (a, b) in edges {
            let i = *index
                .get(a)
                .ok_or_else(|| Error::InvalidGraph(format!("edge endpoint {a} is not a vertex")))?;
            let j = *index
                .get(b)
                .ok_or_else(|| Error::InvalidGraph(format!("edge endpoint {b} is not a vertex")))?;
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop on {a}")));
            }
            if adj[i].contains(j) {
                return Err(Error::InvalidGraph(format!("duplicate edge {a}-{b}")));
            }
            adj[i].insert(j);
            adj[j].insert(i);
        }
        Ok(Graph { labels, index, adj, weights: None })
    }

    /// Same as [`Graph::new`] but silently drops repeated edges.
    pub fn from_edge_set<'a, S, E>(vertices: impl IntoIterator<Item = S>, edges: E) -> Result<Self>
    where
        S: Into<String>,
        E: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let set: BTreeSet<(&str, &str)> =
            edges.into_iter().map(|(a, b)| if a <= b { (a, b) } else { (b, a) }).collect();
        Graph::new(vertices, set)
    }

    pub fn empty() -> Self {
        Graph { labels: vec![], index: HashMap::new(), adj: vec![], weights: None }
    }

    /// Attaches weights; every vertex must be covered and weights must be nonnegative.
    pub fn with_weights(mut self, w: &BTreeMap<String, f64>) -> Result<Self> {
        let mut out = vec![0.0; self.n()];
        for (l, &x) in w {
            let i = self
                .idx(l)
                .ok_or_else(|| Error::InvalidGraph(format!("weight for unknown vertex {l}")))?;
            if !(x >= 0.0) || !x.is_finite() {
                return Err(Error::InvalidGraph(format!("weight {x} on {l} is not a nonnegative real")));
            }
            out[i] = x;
        }
        if w.len() != self.n() {
            return Err(Error::InvalidGraph("weights must cover every vertex".into()));
        }
        self.weights = Some(out);
        Ok(self)
    }

    pub fn with_weight_fn(self, f: impl Fn(&str) -> f64) -> Result<Self> {
        let w: BTreeMap<String, f64> = self.labels.iter().map(|l| (l.clone(), f(l))).collect();
        self.with_weights(&w)
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            vertices: self.labels.clone(),
            edges: self
                .edges()
                .into_iter()
                .map(|(i, j)| [self.labels[i].clone(), self.labels[j].clone()])
                .collect(),
            weights: self.weights.as_ref().map(|w| {
                self.labels.iter().cloned().zip(w.iter().copied()).collect()
            }),
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn idx(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Resolves labels to indices, failing on the first unknown one.
    pub fn indices<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|l| {
                self.idx(l.as_ref())
                    .ok_or_else(|| Error::LabelMismatch(format!("unknown vertex {}", l.as_ref())))
            })
            .collect()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(j)
    }

    pub fn neighbors(&self, i: usize) -> &FixedBitSet {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones(..)).sum::<usize>() / 2
    }

    /// Edges as index pairs `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n() {
            for j in self.adj[i].ones() {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    pub fn has_weights(&self) -> bool {
        self.weights.is_some()
    }

    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(a, &i)| set[a + 1..].iter().all(|&j| self.adjacent(i, j)))
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(a, &i)| set[a + 1..].iter().all(|&j| i != j && !self.adjacent(i, j)))
    }

    /// Induced subgraph on the given vertices (weights carried over).
    pub fn induced(&self, set: &[usize]) -> Graph {
        let keep: BTreeSet<usize> = set.iter().copied().collect();
        let edges: Vec<(&str, &str)> = self
            .edges()
            .into_iter()
            .filter(|(i, j)| keep.contains(i) && keep.contains(j))
            .map(|(i, j)| (self.label(i), self.label(j)))
            .collect();
        let mut g = Graph::new(keep.iter().map(|&i| self.labels[i].clone()), edges)
            .expect("induced subgraph of a valid graph is valid");
        if let Some(w) = &self.weights {
            g.weights = Some(keep.iter().map(|&i| w[i]).collect());
        }
        g
    }

    /// Connected components, each sorted, listed by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut k = 0;
            while k < comp.len() {
                let v = comp[k];
                k += 1;
                for u in self.adj[v].ones() {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn labels_of(&self, set: &[usize]) -> Vec<String> {
        set.iter().map(|&i| self.labels[i].clone()).collect()
    }
}

/// Partition of the vertex set into maximum cliques.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliqueCover {
    pub parts: Vec<Vec<String>>,
    pub claimed_size: usize,
}

impl CliqueCover {
    /// Checks disjointness, coverage and that each part is a clique of the claimed size.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let mut seen = BTreeSet::new();
        for part in &self.parts {
            if part.len() != self.claimed_size {
                return Err(Error::CoverNotFound(format!(
                    "part {part:?} has size {}, not {}",
                    part.len(),
                    self.claimed_size
                )));
            }
            let idx = g.indices(part)?;
            if !g.is_clique(&idx) {
                return Err(Error::CoverNotFound(format!("part {part:?} is not a clique")));
            }
            for l in part {
                if !seen.insert(l.clone()) {
                    return Err(Error::CoverNotFound(format!("vertex {l} covered twice")));
                }
            }
        }
        if seen.len() != g.n() {
            return Err(Error::CoverNotFound("parts do not cover every vertex".into()));
        }
        Ok(())
    }
}

/// All cliques of maximum size, each sorted by label, the list sorted
/// lexicographically. The empty graph yields an empty list.
pub fn max_cliques(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    if n == 0 {
        return vec![];
    }
    let omega = clique_number(g);
    let mut out = Vec::new();
    let mut r = Vec::with_capacity(omega);
    for v in 0..n {
        let mut p = g.neighbors(v).clone();
        p.set_range(..v + 1, false);
        r.push(v);
        collect_cliques(g, &mut r, &p, omega, &mut out);
        r.pop();
    }
    out
}

/// Size of a largest clique.
pub fn clique_number(g: &Graph) -> usize {
    let n = g.n();
    if n == 0 {
        return 0;
    }
    let mut best = 1;
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    max_clique_bb(g, 0, &all, &mut best);
    best
}

fn max_clique_bb(g: &Graph, size: usize, p: &FixedBitSet, best: &mut usize) {
    if p.is_clear() {
        *best = (*best).max(size);
        return;
    }
    let (order, colours) = colour_bound(g, p);
    let mut p = p.clone();
    for k in (0..order.len()).rev() {
        if size + colours[k] <= *best {
            return;
        }
        let v = order[k];
        let mut np = p.clone();
        np.intersect_with(g.neighbors(v));
        max_clique_bb(g, size + 1, &np, best);
        p.set(v, false);
    }
}

/// Greedy sequential colouring of the candidate set; returns the vertices in
/// colour order with the running colour count (an upper bound on any clique
/// drawn from the prefix).
fn colour_bound(g: &Graph, p: &FixedBitSet) -> (Vec<usize>, Vec<usize>) {
    let mut uncoloured = p.clone();
    let mut order = Vec::new();
    let mut colours = Vec::new();
    let mut colour = 0;
    while !uncoloured.is_clear() {
        colour += 1;
        let mut avail = uncoloured.clone();
        while let Some(v) = avail.ones().next() {
            avail.set(v, false);
            avail.difference_with(g.neighbors(v));
            uncoloured.set(v, false);
            order.push(v);
            colours.push(colour);
        }
    }
    (order, colours)
}

fn collect_cliques(
    g: &Graph,
    r: &mut Vec<usize>,
    p: &FixedBitSet,
    omega: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if r.len() == omega {
        out.push(r.clone());
        return;
    }
    if r.len() + p.count_ones(..) < omega {
        return;
    }
    for v in p.ones() {
        let mut np = g.neighbors(v).clone();
        np.intersect_with(p);
        np.set_range(..v + 1, false);
        r.push(v);
        collect_cliques(g, r, &np, omega, out);
        r.pop();
    }
}

/// Result of a maximum-weight independent set search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependenceResult {
    pub value: f64,
    pub set: Vec<String>,
}

/// Exact maximum total weight of an independent set (unit weights when the
/// graph carries none), by branch and bound with a clique-partition bound.
pub fn weighted_independence(g: &Graph) -> IndependenceResult {
    let n = g.n();
    let mut cand = FixedBitSet::with_capacity(n);
    for i in 0..n {
        if g.weight(i) > 0.0 {
            cand.insert(i);
        }
    }
    let mut st = MwisState { best: 0.0, best_set: vec![], cur: vec![] };
    mwis(g, cand, 0.0, &mut st);
    let mut set = st.best_set;
    set.sort_unstable();
    IndependenceResult { value: st.best, set: g.labels_of(&set) }
}

struct MwisState {
    best: f64,
    best_set: Vec<usize>,
    cur: Vec<usize>,
}

fn mwis(g: &Graph, cand: FixedBitSet, acc: f64, st: &mut MwisState) {
    if cand.is_clear() {
        if acc > st.best {
            st.best = acc;
            st.best_set = st.cur.clone();
        }
        return;
    }
    if acc + partition_bound(g, &cand) <= st.best {
        return;
    }
    // Branch on the heaviest candidate (lowest label on ties).
    let v = cand
        .ones()
        .max_by(|&a, &b| g.weight(a).total_cmp(&g.weight(b)).then(b.cmp(&a)))
        .expect("nonempty");
    let mut with = cand.clone();
    with.difference_with(g.neighbors(v));
    with.set(v, false);
    st.cur.push(v);
    mwis(g, with, acc + g.weight(v), st);
    st.cur.pop();
    let mut without = cand;
    without.set(v, false);
    mwis(g, without, acc, st);
}

/// Greedily partitions the candidates into cliques; an independent set takes
/// at most one vertex per clique, so the sum of per-clique maxima bounds it.
fn partition_bound(g: &Graph, cand: &FixedBitSet) -> f64 {
    let mut order: Vec<usize> = cand.ones().collect();
    order.sort_by(|&a, &b| g.weight(b).total_cmp(&g.weight(a)).then(a.cmp(&b)));
    let mut left = cand.clone();
    let mut total = 0.0;
    for &v in &order {
        if !left.contains(v) {
            continue;
        }
        total += g.weight(v);
        left.set(v, false);
        let mut common = g.neighbors(v).clone();
        common.intersect_with(&left);
        while let Some(u) = common.ones().next() {
            left.set(u, false);
            common.intersect_with(g.neighbors(u));
        }
    }
    total
}

/// Shrinks `d_set` to a minimal subset that still dominates `clique`.
/// Candidates are dropped from the highest label down, so the
/// lexicographically earliest members survive.
pub fn minimal_dominating_subset(g: &Graph, d_set: &[usize], clique: &[usize]) -> Result<Vec<usize>> {
    let dominates = |d: &[usize]| -> Option<usize> {
        clique.iter().copied().find(|&c| !d.iter().any(|&w| g.adjacent(c, w)))
    };
    let mut d: Vec<usize> = d_set.to_vec();
    d.sort_unstable();
    d.dedup();
    if let Some(c) = dominates(&d) {
        return Err(Error::NotDominating(g.label(c).to_string()));
    }
    for k in (0..d.len()).rev() {
        let mut trial = d.clone();
        trial.remove(k);
        if dominates(&trial).is_none() {
            d = trial;
        }
    }
    Ok(d)
}

/// Exact partition of the vertex set into cliques drawn from `cliques`.
/// Backtracks on the lowest uncovered vertex; returns the first cover found.
pub fn exact_clique_cover(g: &Graph, cliques: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
    let n = g.n();
    let mut by_vertex: Vec<Vec<usize>> = vec![vec![]; n];
    for (k, c) in cliques.iter().enumerate() {
        for &v in c {
            by_vertex[v].push(k);
        }
    }
    let mut covered = vec![false; n];
    let mut chosen = Vec::new();
    fn rec(
        cliques: &[Vec<usize>],
        by_vertex: &[Vec<usize>],
        covered: &mut [bool],
        chosen: &mut Vec<usize>,
    ) -> bool {
        let Some(v) = covered.iter().position(|c| !c) else {
            return true;
        };
        for &k in &by_vertex[v] {
            if cliques[k].iter().any(|&u| covered[u]) {
                continue;
            }
            for &u in &cliques[k] {
                covered[u] = true;
            }
            chosen.push(k);
            if rec(cliques, by_vertex, covered, chosen) {
                return true;
            }
            chosen.pop();
            for &u in &cliques[k] {
                covered[u] = false;
            }
        }
        false
    }
    if rec(cliques, &by_vertex, &mut covered, &mut chosen) {
        Some(chosen.into_iter().map(|k| cliques[k].clone()).collect())
    } else {
        None
    }
}
