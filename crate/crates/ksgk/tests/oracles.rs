//! Solvers against exhaustive scans on small random graphs.

use std::collections::BTreeSet;

use itertools::Itertools;
use ksgk::coloring::{enumerate_patterns, find_coloring, DEFAULT_BUDGET};
use ksgk::graph::{clique_number, exact_clique_cover, max_cliques, weighted_independence, Graph};
use ksgk::sat::export_cnf;
use proptest::prelude::*;

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

fn graph_from(n: usize, mask: &[bool]) -> Graph {
    let ls = labels(n);
    let edges: Vec<(&str, &str)> = (0..n)
        .tuple_combinations()
        .zip(mask)
        .filter(|&(_, &on)| on)
        .map(|((a, b), _)| (ls[a].as_str(), ls[b].as_str()))
        .collect();
    Graph::new(ls.iter().map(String::as_str), edges).unwrap()
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (3..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(proptest::bool::weighted(0.45), pairs).prop_map(move |m| graph_from(n, &m))
    })
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
}

fn brute_max_cliques(g: &Graph) -> BTreeSet<Vec<usize>> {
    let all: Vec<Vec<usize>> = subsets(g.n()).filter(|s| g.is_clique(s)).collect();
    let w = all.iter().map(Vec::len).max().unwrap_or(0);
    all.into_iter().filter(|s| s.len() == w).collect()
}

/// Every {0,1} assignment meeting Exclusivity on edges and exactly one 1 on
/// each maximum clique, as bitmasks.
fn brute_colorings(g: &Graph) -> Vec<u32> {
    let cliques = brute_max_cliques(g);
    let edges = g.edges();
    (0u32..1 << g.n())
        .filter(|&m| {
            let on = |v: usize| m >> v & 1 == 1;
            edges.iter().all(|&(a, b)| !(on(a) && on(b)))
                && cliques.iter().all(|c| c.iter().filter(|&&v| on(v)).count() == 1)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn clique_enumeration_matches_scan(g in arb_graph(10)) {
        let got: BTreeSet<Vec<usize>> = max_cliques(&g).into_iter().map(|c| c.into_iter().sorted().collect()).collect();
        let want = brute_max_cliques(&g);
        prop_assert_eq!(clique_number(&g), want.iter().next().map_or(0, Vec::len));
        prop_assert_eq!(got, want);
    }

    #[test]
    fn colourability_matches_scan(g in arb_graph(11)) {
        let want = brute_colorings(&g);
        match find_coloring(&g) {
            Some(c) => {
                prop_assert!(c.check(&g).is_ok());
                prop_assert!(!want.is_empty());
            }
            None => prop_assert!(want.is_empty()),
        }
    }

    #[test]
    fn patterns_match_scan(g in arb_graph(9)) {
        // Distinguished vertices form an independent set.
        prop_assume!(g.is_independent(&[0, 1, 2]));
        let dist: Vec<String> = labels(3);
        let want: BTreeSet<String> = brute_colorings(&g)
            .into_iter()
            .map(|m| (0..3).map(|i| if m >> i & 1 == 1 { '1' } else { '0' }).collect())
            .collect();
        let got = enumerate_patterns(&g, &dist, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(got.patterns(), want);
        for (p, w) in &got.witnesses {
            prop_assert!(w.check(&g).is_ok());
            let bits: String = dist.iter().map(|l| if w.value(l) == Some(1) { '1' } else { '0' }).collect();
            prop_assert_eq!(&bits, p);
        }
    }

    #[test]
    fn cnf_agrees_with_search(g in arb_graph(10)) {
        let cnf = export_cnf(&g);
        let model = cnf.brute_force();
        prop_assert_eq!(model.is_some(), find_coloring(&g).is_some());
        if let Some(m) = model {
            prop_assert!(cnf.satisfied_by(&m));
        }
    }

    #[test]
    fn weighted_independence_matches_scan(
        g in arb_graph(11),
        ws in proptest::collection::vec(1u32..6, 11),
    ) {
        let w: std::collections::BTreeMap<String, f64> =
            labels(g.n()).into_iter().zip(ws.iter().map(|&x| x as f64)).collect();
        let g = g.with_weights(&w).unwrap();
        let best = subsets(g.n())
            .filter(|s| g.is_independent(s))
            .map(|s| s.iter().map(|&v| g.weight(v)).sum::<f64>())
            .fold(0.0, f64::max);
        let r = weighted_independence(&g);
        prop_assert_eq!(r.value, best);
        let idx = g.indices(&r.set).unwrap();
        prop_assert!(g.is_independent(&idx));
        prop_assert_eq!(idx.iter().map(|&v| g.weight(v)).sum::<f64>(), best);
    }

    #[test]
    fn clique_cover_matches_scan(g in arb_graph(9)) {
        let cliques = max_cliques(&g);
        let n = g.n();
        // Exhaustive: some set of pairwise disjoint maximum cliques covering every vertex.
        let exists = (1..=cliques.len()).any(|k| {
            cliques.iter().combinations(k).any(|cs| {
                let mut seen = vec![false; n];
                cs.iter().all(|c| c.iter().all(|&v| !std::mem::replace(&mut seen[v], true)))
                    && seen.iter().all(|&x| x)
            })
        });
        let got = exact_clique_cover(&g, &cliques);
        prop_assert_eq!(got.is_some(), exists);
        if let Some(parts) = got {
            let flat: Vec<usize> = parts.iter().flatten().copied().sorted().collect();
            prop_assert_eq!(flat, (0..n).collect::<Vec<_>>());
        }
    }
}

#[test]
fn five_cycle_has_no_colouring() {
    // Edges are the maximum cliques and an odd cycle has no perfect matching of 1s.
    let g = graph_from(5, &[true, false, false, true, true, false, false, true, false, true]);
    assert_eq!(g.edge_count(), 5);
    assert!(brute_colorings(&g).is_empty());
    assert!(find_coloring(&g).is_none());
}
