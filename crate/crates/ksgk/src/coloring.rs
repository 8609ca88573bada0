//! {0,1}-colourings under Exclusivity and Completeness, gadget verification
//! and gadget extraction from uncolourable graphs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{max_cliques, minimal_dominating_subset, Graph};
use crate::orthorep::{check_faithful, VectorSet};

/// Default node budget for pattern enumeration.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// A vertex assignment into {0,1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub assignment: BTreeMap<String, u8>,
}

impl Coloring {
    fn from_values(g: &Graph, vals: &[i8]) -> Self {
        Coloring {
            assignment: g
                .labels()
                .iter()
                .zip(vals)
                .map(|(l, &v)| (l.clone(), u8::from(v == 1)))
                .collect(),
        }
    }

    pub fn value(&self, label: &str) -> Option<u8> {
        self.assignment.get(label).copied()
    }

    /// Checks both rules against the graph's own maximum cliques.
    pub fn check(&self, g: &Graph) -> std::result::Result<(), String> {
        self.check_with(g, &max_cliques(g))
    }

    pub fn check_with(&self, g: &Graph, cliques: &[Vec<usize>]) -> std::result::Result<(), String> {
        let val = |i: usize| self.assignment.get(g.label(i)).copied().unwrap_or(0);
        for (i, j) in g.edges() {
            if val(i) == 1 && val(j) == 1 {
                return Err(format!("exclusivity broken on {}-{}", g.label(i), g.label(j)));
            }
        }
        for c in cliques {
            let ones = c.iter().filter(|&&v| val(v) == 1).count();
            if ones != 1 {
                return Err(format!("clique {:?} has {ones} ones", g.labels_of(c)));
            }
        }
        Ok(())
    }
}

/// Constraint system: the graph plus the cliques on which Completeness applies.
#[derive(Clone, Debug)]
pub struct Instance<'g> {
    pub graph: &'g Graph,
    pub cliques: Vec<Vec<usize>>,
    by_vertex: Vec<Vec<usize>>,
}

impl<'g> Instance<'g> {
    /// Completeness on the maximum cliques of `g`.
    pub fn new(g: &'g Graph) -> Self {
        Instance::with_cliques(g, max_cliques(g))
    }

    pub fn with_cliques(g: &'g Graph, cliques: Vec<Vec<usize>>) -> Self {
        let mut by_vertex = vec![vec![]; g.n()];
        for (k, c) in cliques.iter().enumerate() {
            for &v in c {
                by_vertex[v].push(k);
            }
        }
        Instance { graph: g, cliques, by_vertex }
    }

    fn restrict(&self, keep: &[usize]) -> Vec<Vec<usize>> {
        let set: BTreeSet<usize> = keep.iter().copied().collect();
        self.cliques.iter().filter(|c| set.contains(&c[0])).cloned().collect()
    }
}

enum Outcome {
    Sat(Vec<i8>),
    Unsat,
}

/// Unit-propagating backtracker over clique choices.
struct Search<'a> {
    inst: &'a Instance<'a>,
    cliques: &'a [usize],
    val: Vec<i8>,
    trail: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance<'a>, cliques: &'a [usize], budget: u64) -> Self {
        Search { inst, cliques, val: vec![-1; inst.graph.n()], trail: vec![], nodes: 0, budget }
    }

    fn set(&mut self, v: usize, b: i8) -> bool {
        let mut queue = vec![(v, b)];
        while let Some((v, b)) = queue.pop() {
            match self.val[v] {
                x if x == b => continue,
                -1 => {}
                _ => return false,
            }
            self.val[v] = b;
            self.trail.push(v);
            if b == 1 {
                for u in self.inst.graph.neighbors(v).ones() {
                    match self.val[u] {
                        1 => return false,
                        -1 => queue.push((u, 0)),
                        _ => {}
                    }
                }
            } else {
                for &k in &self.inst.by_vertex[v] {
                    let c = &self.inst.cliques[k];
                    let mut open = None;
                    let mut n_open = 0;
                    let mut has_one = false;
                    for &u in c {
                        match self.val[u] {
                            1 => has_one = true,
                            -1 => {
                                n_open += 1;
                                open = Some(u);
                            }
                            _ => {}
                        }
                    }
                    if has_one {
                        continue;
                    }
                    match n_open {
                        0 => return false,
                        1 => queue.push((open.expect("one open"), 1)),
                        _ => {}
                    }
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("nonempty");
            self.val[v] = -1;
        }
    }

    /// Most constrained unsatisfied clique (fewest open vertices, lowest index on ties).
    fn pick(&self) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for &k in self.cliques {
            let c = &self.inst.cliques[k];
            if c.iter().any(|&u| self.val[u] == 1) {
                continue;
            }
            let open = c.iter().filter(|&&u| self.val[u] == -1).count();
            if best.is_none_or(|(o, _)| open < o) {
                best = Some((open, k));
            }
        }
        best.map(|(_, k)| k)
    }

    fn run(&mut self) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        let Some(k) = self.pick() else {
            return Ok(true);
        };
        // An unsatisfied clique always has an open vertex, else propagation
        // would have failed.
        let v = *self.inst.cliques[k].iter().find(|&&u| self.val[u] == -1).expect("open vertex");
        let mark = self.trail.len();
        if self.set(v, 1) && self.run()? {
            return Ok(true);
        }
        self.undo(mark);
        // Setting v to 0 may force another member to 1, so recurse rather
        // than walk the remaining members.
        Ok(self.set(v, 0) && self.run()?)
    }

    fn solve(mut self, assume: &[(usize, u8)]) -> Result<(Outcome, u64)> {
        for &(v, b) in assume {
            if !self.set(v, b as i8) {
                return Ok((Outcome::Unsat, self.nodes));
            }
        }
        if self.run()? {
            let vals = self.val.iter().map(|&x| if x == 1 { 1 } else { 0 }).collect();
            Ok((Outcome::Sat(vals), self.nodes))
        } else {
            Ok((Outcome::Unsat, self.nodes))
        }
    }
}

fn solve_instance(inst: &Instance, assume: &[(usize, u8)], budget: u64) -> Result<(Option<Vec<i8>>, u64)> {
    let all: Vec<usize> = (0..inst.cliques.len()).collect();
    let (o, n) = Search::new(inst, &all, budget).solve(assume)?;
    Ok((match o { Outcome::Sat(v) => Some(v), Outcome::Unsat => None }, n))
}

/// Exact colouring search: `Some` colouring or `None` when the graph is
/// uncolourable. Vertices not forced to 1 end up 0.
pub fn find_coloring(g: &Graph) -> Option<Coloring> {
    find_coloring_in(&Instance::new(g), &[], u64::MAX).expect("unbounded search")
}

/// Colouring search with fixed values for some vertices.
pub fn find_coloring_in(inst: &Instance, assume: &[(usize, u8)], budget: u64) -> Result<Option<Coloring>> {
    Ok(solve_instance(inst, assume, budget)?.0.map(|v| Coloring::from_values(inst.graph, &v)))
}

/// Outcome of the literal clique-by-clique greedy procedure.
#[derive(Clone, Debug)]
pub struct GreedyRun {
    pub coloring: Option<Coloring>,
    /// First time a clique was found fully blocked: its index in the clique
    /// list and the 1-valued vertices at that moment.
    pub first_dead_end: Option<(usize, Vec<usize>)>,
    pub steps: u64,
}

/// The chronological greedy procedure over maximum cliques in label order,
/// trying vertices in label order and backing up one clique whenever every
/// vertex of the current clique is blocked.
pub fn greedy_coloring(g: &Graph, step_limit: u64) -> Result<GreedyRun> {
    greedy_run(g, step_limit, false)
}

fn greedy_run(g: &Graph, step_limit: u64, stop_at_dead_end: bool) -> Result<GreedyRun> {
    let cliques = max_cliques(g);
    let l = cliques.len();
    let mut out = GreedyRun { coloring: None, first_dead_end: None, steps: 0 };
    if l == 0 {
        out.coloring = Some(Coloring::from_values(g, &vec![0; g.n()]));
        return Ok(out);
    }
    let mut one = vec![false; g.n()];
    let mut owned: Vec<Option<usize>> = vec![None; l];
    let mut visited: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); l];
    let blocked = |one: &[bool], v: usize| g.neighbors(v).ones().any(|u| one[u]);
    let mut i = 0usize;
    let mut forward = true;
    loop {
        out.steps += 1;
        if out.steps > step_limit {
            return Err(Error::BudgetExceeded(step_limit));
        }
        if forward {
            visited[i].clear();
            owned[i] = None;
            if cliques[i].iter().any(|&v| one[v]) {
                // Already holds a 1 chosen for an earlier clique.
                if i + 1 == l {
                    break;
                }
                i += 1;
                continue;
            }
        } else {
            match owned[i].take() {
                Some(v) => one[v] = false,
                None => {
                    // Its 1 belongs to an earlier clique: nothing to revise here.
                    if i == 0 {
                        return Ok(out);
                    }
                    i -= 1;
                    continue;
                }
            }
        }
        let mut chosen = None;
        for &v in &cliques[i] {
            if visited[i].insert(v) && !blocked(&one, v) {
                chosen = Some(v);
                break;
            }
        }
        match chosen {
            Some(v) => {
                one[v] = true;
                owned[i] = Some(v);
                if i + 1 == l {
                    break;
                }
                i += 1;
                forward = true;
            }
            None => {
                if out.first_dead_end.is_none() {
                    let ones: Vec<usize> = (0..g.n()).filter(|&v| one[v]).collect();
                    out.first_dead_end = Some((i, ones));
                    if stop_at_dead_end {
                        return Ok(out);
                    }
                }
                if i == 0 {
                    return Ok(out);
                }
                visited[i].clear();
                i -= 1;
                forward = false;
            }
        }
    }
    let vals: Vec<i8> = one.iter().map(|&b| i8::from(b)).collect();
    out.coloring = Some(Coloring::from_values(g, &vals));
    Ok(out)
}

/// Achievable patterns on a distinguished list, one witness each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternSet {
    pub distinguished: Vec<String>,
    pub witnesses: BTreeMap<String, Coloring>,
    pub nodes: u64,
}

impl PatternSet {
    pub fn patterns(&self) -> BTreeSet<String> {
        self.witnesses.keys().cloned().collect()
    }
}

pub fn bitstring(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

fn all_patterns(m: usize) -> impl Iterator<Item = Vec<u8>> {
    (0..1u64 << m).map(move |x| (0..m).map(|i| ((x >> (m - 1 - i)) & 1) as u8).collect())
}

/// The exact set of `f(I)` over all valid colourings `f`.
pub fn enumerate_patterns(g: &Graph, distinguished: &[String], budget: u64) -> Result<PatternSet> {
    enumerate_patterns_in(&Instance::new(g), distinguished, budget)
}

/// Pattern enumeration against an explicit clique list. Connected components
/// are solved separately and their pattern sets combined.
pub fn enumerate_patterns_in(inst: &Instance, distinguished: &[String], budget: u64) -> Result<PatternSet> {
    let g = inst.graph;
    let idx = g.indices(distinguished)?;
    if !g.is_independent(&idx) {
        return Err(Error::InvalidDistinguished(format!("{distinguished:?}")));
    }
    let mut nodes = 0u64;
    // Per component: list of (sub-pattern over the component's distinguished positions, witness values).
    let mut parts: Vec<(Vec<usize>, Vec<(Vec<u8>, Vec<i8>)>)> = Vec::new();
    for comp in g.components() {
        let cset: BTreeSet<usize> = comp.iter().copied().collect();
        let pos: Vec<usize> = (0..idx.len()).filter(|&p| cset.contains(&idx[p])).collect();
        let cl = inst.restrict(&comp);
        if cl.is_empty() && pos.is_empty() {
            continue;
        }
        let sub = Instance::with_cliques(g, cl);
        let mut found = Vec::new();
        for bits in all_patterns(pos.len()) {
            let assume: Vec<(usize, u8)> = pos.iter().zip(&bits).map(|(&p, &b)| (idx[p], b)).collect();
            let left = budget.saturating_sub(nodes);
            let (sol, n) = solve_instance(&sub, &assume, left).map_err(|_| Error::BudgetExceeded(budget))?;
            nodes += n;
            if let Some(mut vals) = sol {
                for (v, x) in vals.iter_mut().enumerate() {
                    if !cset.contains(&v) {
                        *x = -1;
                    }
                }
                found.push((bits, vals));
            }
        }
        if found.is_empty() {
            return Ok(PatternSet { distinguished: distinguished.to_vec(), witnesses: BTreeMap::new(), nodes });
        }
        parts.push((pos, found));
    }
    // Cartesian product of component results.
    let m = idx.len();
    let mut acc: Vec<(Vec<u8>, Vec<i8>)> = vec![(vec![0; m], vec![0; g.n()])];
    for (pos, found) in &parts {
        let mut next = Vec::with_capacity(acc.len() * found.len());
        for (bits, vals) in &acc {
            for (sb, sv) in found {
                let mut b = bits.clone();
                for (k, &p) in pos.iter().enumerate() {
                    b[p] = sb[k];
                }
                let mut v = vals.clone();
                for (x, &y) in v.iter_mut().zip(sv) {
                    if y >= 0 {
                        *x = y;
                    }
                }
                next.push((b, v));
            }
        }
        acc = next;
    }
    let witnesses = acc
        .into_iter()
        .map(|(b, v)| (bitstring(&b), Coloring::from_values(g, &v)))
        .collect();
    Ok(PatternSet { distinguished: distinguished.to_vec(), witnesses, nodes })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GadgetKind {
    Order { m: usize, k: usize },
    Forbidden { patterns: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offending: Option<String>,
    pub reason: String,
}

impl Verdict {
    fn pass(reason: impl Into<String>) -> Self {
        Verdict { pass: true, offending: None, reason: reason.into() }
    }
    fn fail(pattern: &str, reason: impl Into<String>) -> Self {
        Verdict { pass: false, offending: Some(pattern.to_string()), reason: reason.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DimensionCheck {
    NotVerified,
    Checked { dimension: usize, omega: usize, faithful: bool, pass: bool },
}

/// Evidence for a gadget claim. `verdict` answers the question that was
/// asked; the two views report the order-style and forbidden-set-style
/// readings separately where both make sense.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetCertificate {
    pub distinguished: Vec<String>,
    pub kind: GadgetKind,
    pub achievable: Vec<String>,
    pub witnesses: BTreeMap<String, Coloring>,
    pub verdict: Verdict,
    pub forbidden_view: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_view: Option<Verdict>,
    pub dimension: DimensionCheck,
}

impl GadgetCertificate {
    pub fn pass(&self) -> bool {
        self.verdict.pass
    }

    /// Checks `d*(G) = omega(G) = d` using a faithful representation.
    pub fn attach_dimension(&mut self, vs: &VectorSet, g: &Graph) -> Result<()> {
        let faithful = check_faithful(vs, g)?.is_faithful();
        let omega = crate::graph::clique_number(g);
        let d = vs.dimension();
        self.dimension = DimensionCheck::Checked { dimension: d, omega, faithful, pass: faithful && omega == d };
        Ok(())
    }
}

fn weight(p: &str) -> usize {
    p.chars().filter(|&c| c == '1').count()
}

fn order_verdict(achievable: &BTreeSet<String>, m: usize, k: usize) -> Verdict {
    if let Some(p) = achievable.iter().find(|p| weight(p) > k) {
        return Verdict::fail(p, format!("pattern {p} puts more than {k} ones on the distinguished set"));
    }
    // Every set of at most k distinguished vertices must be 1 together in
    // some colouring; the rest of the pattern is free.
    for bits in all_patterns(m) {
        let s = bitstring(&bits);
        let covered = achievable.iter().any(|p| s.chars().zip(p.chars()).all(|(a, b)| a == '0' || b == '1'));
        if weight(&s) <= k && !covered {
            return Verdict::fail(&s, format!("no colouring sets all of {s} to 1"));
        }
    }
    Verdict::pass(format!("every set of at most {k} distinguished vertices can be 1 together, no larger set can"))
}

fn forbidden_verdict(achievable: &BTreeSet<String>, h: &BTreeSet<String>) -> Verdict {
    match achievable.iter().find(|p| h.contains(*p)) {
        Some(p) => Verdict::fail(p, format!("forbidden pattern {p} is achievable")),
        None => Verdict::pass("no forbidden pattern is achievable"),
    }
}

/// Order-(m,k) check: all patterns of weight at most k achievable, none heavier.
pub fn verify_order_gadget(g: &Graph, distinguished: &[String], k: usize, budget: u64) -> Result<GadgetCertificate> {
    verify_order_gadget_in(&Instance::new(g), distinguished, k, budget)
}

pub fn verify_order_gadget_in(
    inst: &Instance,
    distinguished: &[String],
    k: usize,
    budget: u64,
) -> Result<GadgetCertificate> {
    let m = distinguished.len();
    if k < 1 || k >= m {
        return Err(Error::Precondition(format!("order needs 1 <= k < m, got k={k}, m={m}")));
    }
    let ps = enumerate_patterns_in(inst, distinguished, budget)?;
    let achievable = ps.patterns();
    let verdict = order_verdict(&achievable, m, k);
    let heavy: BTreeSet<String> = all_patterns(m).map(|b| bitstring(&b)).filter(|p| weight(p) > k).collect();
    Ok(GadgetCertificate {
        distinguished: distinguished.to_vec(),
        kind: GadgetKind::Order { m, k },
        achievable: achievable.iter().cloned().collect(),
        witnesses: ps.witnesses,
        forbidden_view: forbidden_verdict(&achievable, &heavy),
        order_view: Some(verdict.clone()),
        verdict,
        dimension: DimensionCheck::NotVerified,
    })
}

/// Forbidden-set check: no pattern of `h` is achievable. Achievability of the
/// remaining patterns is reported, not required.
pub fn verify_forbidden_gadget(
    g: &Graph,
    distinguished: &[String],
    h: &[String],
    budget: u64,
) -> Result<GadgetCertificate> {
    let m = distinguished.len();
    if h.is_empty() {
        return Err(Error::Precondition("forbidden set must be nonempty".into()));
    }
    for p in h {
        if p.len() != m || !p.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::PatternArityMismatch(p.clone(), p.len(), m));
        }
    }
    let hs: BTreeSet<String> = h.iter().cloned().collect();
    let ps = enumerate_patterns(g, distinguished, budget)?;
    let achievable = ps.patterns();
    let verdict = forbidden_verdict(&achievable, &hs);
    // H reads as an order constraint when it is exactly "more than k ones".
    let order_view = (1..m).find_map(|k| {
        let heavy: BTreeSet<String> =
            all_patterns(m).map(|b| bitstring(&b)).filter(|p| weight(p) > k).collect();
        (heavy == hs).then(|| order_verdict(&achievable, m, k))
    });
    Ok(GadgetCertificate {
        distinguished: distinguished.to_vec(),
        kind: GadgetKind::Forbidden { patterns: hs.iter().cloned().collect() },
        achievable: achievable.iter().cloned().collect(),
        witnesses: ps.witnesses,
        forbidden_view: verdict.clone(),
        verdict,
        order_view,
        dimension: DimensionCheck::NotVerified,
    })
}

/// An order-(k,k-1) gadget found inside an uncolourable graph.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Extraction {
    pub subgraph: Graph,
    pub distinguished: Vec<String>,
    pub clique: Vec<String>,
    pub k: usize,
    pub omega: usize,
    /// Verified with the subgraph's own maximum cliques.
    pub own_view: GadgetCertificate,
    /// Verified with only the cliques inherited from the parent graph.
    pub inherited_view: GadgetCertificate,
}

/// Runs the greedy procedure to its first blocked clique `C`, minimises the
/// blocking 1-set to `D'` and returns the subgraph induced on `D' ∪ C`.
pub fn extract_gadget(g: &Graph, budget: u64) -> Result<Extraction> {
    if find_coloring_in(&Instance::new(g), &[], budget)?.is_some() {
        return Err(Error::NotKS);
    }
    let run = greedy_run(g, budget, true)?;
    let (ci, ones) = run
        .first_dead_end
        .ok_or_else(|| Error::Precondition("greedy run never blocked on an uncolourable graph".into()))?;
    let cliques = max_cliques(g);
    let omega = cliques[0].len();
    let clique = cliques[ci].clone();
    let dprime = minimal_dominating_subset(g, &ones, &clique)?;
    let k = dprime.len();
    let mut keep = dprime.clone();
    keep.extend(&clique);
    keep.sort_unstable();
    let sub = g.induced(&keep);
    let dist = g.labels_of(&dprime);
    let clabels = g.labels_of(&clique);
    let own_view = verify_order_gadget(&sub, &dist, k - 1, budget)?;
    let inherited: Vec<Vec<usize>> = cliques
        .iter()
        .filter(|c| c.iter().all(|v| keep.contains(v)))
        .map(|c| sub.indices(&g.labels_of(c)).expect("present"))
        .collect();
    let inherited_view = verify_order_gadget_in(&Instance::with_cliques(&sub, inherited), &dist, k - 1, budget)?;
    Ok(Extraction { subgraph: sub, distinguished: dist, clique: clabels, k, omega, own_view, inherited_view })
}
