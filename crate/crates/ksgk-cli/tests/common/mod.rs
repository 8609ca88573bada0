//! Independent oracles: a plain Bron-Kerbosch and varisat on a CNF built here.

#![allow(dead_code)]

use std::collections::BTreeSet;

use ksgk::graph::Graph;
use varisat::{ExtendFormula, Lit, Solver};

fn bron_kerbosch(g: &Graph, r: &mut Vec<usize>, p: Vec<usize>, x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    let mut p = p;
    let mut x = x;
    while let Some(v) = p.pop() {
        r.push(v);
        let np = p.iter().copied().filter(|&u| g.adjacent(u, v)).collect();
        let nx = x.iter().copied().filter(|&u| g.adjacent(u, v)).collect();
        bron_kerbosch(g, r, np, nx, out);
        r.pop();
        x.push(v);
    }
}

pub fn maximum_cliques(g: &Graph) -> Vec<Vec<usize>> {
    let mut all = Vec::new();
    bron_kerbosch(g, &mut vec![], (0..g.n()).collect(), vec![], &mut all);
    let w = all.iter().map(Vec::len).max().unwrap_or(0);
    all.into_iter().filter(|c| c.len() == w).collect()
}

fn lit(v: usize, on: bool) -> Lit {
    Lit::from_index(v, on)
}

fn solver(g: &Graph) -> Solver<'static> {
    let mut s = Solver::new();
    for (a, b) in g.edges() {
        s.add_clause(&[lit(a, false), lit(b, false)]);
    }
    for c in maximum_cliques(g) {
        let clause: Vec<Lit> = c.iter().map(|&v| lit(v, true)).collect();
        s.add_clause(&clause);
    }
    s
}

pub fn colourable(g: &Graph) -> bool {
    solver(g).solve().expect("solver")
}

/// Achievable {0,1} patterns on `dist`, one SAT call per candidate pattern.
pub fn patterns(g: &Graph, dist: &[String]) -> BTreeSet<String> {
    let idx = g.indices(dist).expect("labels");
    let mut s = solver(g);
    let m = idx.len();
    (0u32..1 << m)
        .filter_map(|mask| {
            let bits: Vec<bool> = (0..m).map(|i| mask >> (m - 1 - i) & 1 == 1).collect();
            let assume: Vec<Lit> = idx.iter().zip(&bits).map(|(&v, &b)| lit(v, b)).collect();
            s.assume(&assume);
            s.solve()
                .expect("solver")
                .then(|| bits.iter().map(|&b| if b { '1' } else { '0' }).collect())
        })
        .collect()
}
