mod common;

use std::collections::BTreeSet;

use itertools::Itertools;
use ksgk::binary_box::*;
use ksgk::constructions::*;
use ksgk::graph::Graph;
use ksgk::zero_error::*;
use ksgk::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn graph(vs: &[&str], es: &[(&str, &str)]) -> Graph {
    Graph::new(vs.iter().copied(), es.iter().copied()).unwrap()
}

fn bug(c: f64) -> GadgetBlueprint {
    zero_one_gadget(&[1.0, 0.0, 0.0], &[c, (1.0 - c * c).sqrt(), 0.0], 0).unwrap()
}

/// Exhaustive maximum of `f(a) + f(b)` over half-integral assignments with
/// each context summing to 1 on at most two vertices and edges summing to at
/// most 1.
fn brute_binary_max(g: &Graph, ctx: &ContextSet, targets: &[String]) -> Option<u32> {
    let labels = ctx.support();
    let idx = g.indices(&labels).unwrap();
    let n = labels.len();
    assert!(n <= 13);
    let pos = |l: &String| labels.iter().position(|x| x == l).unwrap();
    let contexts: Vec<Vec<usize>> = ctx.contexts.iter().map(|c| c.iter().map(pos).collect()).collect();
    let tpos: Vec<usize> = targets.iter().map(pos).collect();
    let mut best = None;
    for code in 0..3u32.pow(n as u32) {
        let x: Vec<u32> = (0..n).map(|i| code / 3u32.pow(i as u32) % 3).collect();
        let ok_ctx = contexts
            .iter()
            .all(|c| c.iter().map(|&i| x[i]).sum::<u32>() == 2 && c.iter().filter(|&&i| x[i] > 0).count() <= 2);
        let ok_edges = (0..n).tuple_combinations().all(|(a, b)| !g.adjacent(idx[a], idx[b]) || x[a] + x[b] <= 2);
        if ok_ctx && ok_edges {
            let s = tpos.iter().map(|&i| x[i]).sum::<u32>();
            best = best.max(Some(s));
        }
    }
    best
}

#[test]
fn extended_gadgets_reach_three_halves() {
    for c in [0.3, 0.5] {
        let bp = bug(c).completed();
        let ctx = ContextSet::all(&bp.graph);
        assert_eq!(binary_max_sum(&bp.graph, &ctx, &bp.distinguished).unwrap(), Some(1.5));
        if ctx.support().len() <= 13 {
            assert_eq!(brute_binary_max(&bp.graph, &ctx, &bp.distinguished), Some(3));
        }
    }
    for d in [4, 5] {
        let bp = build_randomness_gadget(d).unwrap().completed();
        let ctx = ContextSet::all(&bp.graph);
        assert_eq!(binary_max_sum(&bp.graph, &ctx, &bp.distinguished).unwrap(), Some(1.5));
    }
}

#[test]
fn every_enumerated_box_is_consistent_and_binary() {
    let bp = bug(0.3).completed();
    let boxes = enumerate_binary_vertices(&bp.graph, &ContextSet::all(&bp.graph), DEFAULT_BOX_BUDGET).unwrap();
    assert!(!boxes.is_empty());
    for b in &boxes {
        b.check().unwrap();
        let s: f64 = bp.distinguished.iter().map(|l| b.values[l]).sum();
        assert!(s <= 1.5);
    }
}

const DEFAULT_BOX_BUDGET: u64 = 1_000_000;

#[test]
fn two_vertices_of_one_context() {
    let g = graph(&["a", "b", "c"], &[("a", "b"), ("a", "c"), ("b", "c")]);
    let ctx = ContextSet::all(&g);
    assert_eq!(binary_max_sum(&g, &ctx, &["a".into(), "b".into()]).unwrap(), Some(1.0));
}

#[test]
fn quantum_value_on_a_gadget_representation() {
    let bp = bug(0.5);
    let u = bp.vectors.get("u").unwrap();
    let v = bp.vectors.get("v").unwrap();
    let cos = bp.vectors.overlap("u", "v").unwrap().re;
    let theta = cos.acos();
    let psi = xgad_state(u, v);
    assert!((xgad_value(&psi, u, v) - quantum_xgad_value(theta)).abs() < 1e-12);
    assert!((quantum_xgad_value(theta) - 1.5).abs() < 1e-12);
    let e1 = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let e2 = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    assert!((xgad_value(&xgad_state(&e1, &e2), &e1, &e2) - 1.0).abs() < 1e-12);
}

#[test]
fn crossover_at_sixty_degrees() {
    for i in 0..=100 {
        let t = std::f64::consts::FRAC_PI_2 * i as f64 / 100.0;
        assert!((quantum_xgad_value(t) - (1.0 + t.cos())).abs() < 1e-15);
        let above = quantum_xgad_value(t) > 1.5;
        assert_eq!(above, t < std::f64::consts::FRAC_PI_3, "theta = {t}");
    }
}

fn random_graph(n: usize, mask: &[bool]) -> Graph {
    let ls: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let es: Vec<(&str, &str)> = (0..n)
        .tuple_combinations()
        .zip(mask)
        .filter(|&(_, &b)| b)
        .map(|((a, b), _)| (ls[a].as_str(), ls[b].as_str()))
        .collect();
    Graph::new(ls.iter().map(String::as_str), es).unwrap()
}

#[test]
fn half_integrality_on_named_instances() {
    let k3 = graph(&["a", "b", "c"], &[("a", "b"), ("a", "c"), ("b", "c")]);
    let c5 = graph(&["a", "b", "c", "d", "e"], &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")]);
    let bowtie = graph(&["a", "b", "c", "d", "e"], &[("a", "b"), ("a", "c"), ("b", "c"), ("c", "d"), ("c", "e"), ("d", "e")]);
    let prism = graph(
        &["a", "b", "c", "x", "y", "z"],
        &[("a", "b"), ("a", "c"), ("b", "c"), ("x", "y"), ("x", "z"), ("y", "z"), ("a", "x"), ("b", "y"), ("c", "z")],
    );
    let gadget = bug(0.3).graph;
    assert_eq!(gadget.n(), 8);
    let edgeless = graph(&["a", "b", "c", "d"], &[]);
    for g in [k3, c5, bowtie, prism, gadget, edgeless] {
        let r = half_integrality_check(&g, &ContextSet::all(&g)).unwrap();
        assert!(r.agree, "{r:?}");
    }
    // The all-halves point is the only box on the pentagon.
    let c5 = graph(&["a", "b", "c", "d", "e"], &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")]);
    let boxes = enumerate_binary_vertices(&c5, &ContextSet::all(&c5), 1000).unwrap();
    assert_eq!(boxes.len(), 1);
    assert!(boxes[0].values.values().all(|&x| x == 0.5));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn half_integrality_on_random_graphs(n in 4usize..=8, mask in proptest::collection::vec(proptest::bool::weighted(0.5), 28)) {
        let g = random_graph(n, &mask[..n * (n - 1) / 2]);
        let r = half_integrality_check(&g, &ContextSet::all(&g)).unwrap();
        prop_assert!(r.agree, "{:?}", r);
    }
}

#[test]
fn csw_gaps() {
    let single = graph(&["a", "b", "c"], &[("a", "b"), ("a", "c"), ("b", "c")]);
    let r = csw_gap(&single, &["a".into()]).unwrap();
    assert_eq!((r.alpha_w, r.classical_completeness), (1.0, Some(1.0)));

    let b = bug(0.5);
    let r = csw_gap(&b.graph, &b.distinguished).unwrap();
    assert_eq!((r.alpha_w, r.classical_completeness), (2.0, Some(1.0)));

    let g32 = build_gadget_32(1.2, 1, 1).unwrap();
    let r = csw_gap(&g32.graph, &g32.distinguished).unwrap();
    assert_eq!((r.alpha_w, r.classical_completeness), (3.0, Some(2.0)));

    for d in [4, 5] {
        let bp = build_randomness_gadget(d).unwrap();
        let r = csw_gap(&bp.graph, &bp.distinguished).unwrap();
        assert!(r.classical_completeness.unwrap() < r.alpha_w);
    }
}

#[test]
fn channel_preconditions() {
    let b = bug(0.5).partitioned(0).unwrap();
    assert_eq!(build_channel(&b, 2.5).unwrap_err(), Error::WStarOutOfRange(2.5));
    let path = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
    assert!(matches!(channel_from_graph(&path, &[], 1.5), Err(Error::CoverNotFound(_))));
    // Distinguished inputs are independent, so a cover of q cliques holds at most q of them.
    assert_eq!(check_feasible(6, 8), Err(Error::DistinguishedExceedsCover(8, 6)));
}

/// Exhaustive weighted independence.
fn brute_alpha(g: &Graph) -> f64 {
    (0u32..1 << g.n())
        .map(|m| (0..g.n()).filter(|&i| m >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|s| g.is_independent(s))
        .map(|s| s.iter().map(|&i| g.weight(i)).sum::<f64>())
        .fold(0.0, f64::max)
}

#[test]
fn completed_gadget_channels() {
    // Clique completion alone leaves no partition into bases.
    assert!(matches!(build_channel(&bug(0.3).completed(), 1.5), Err(Error::CoverNotFound(_))));
    for c in [0.3, 0.5] {
        let b = bug(c).partitioned(0).unwrap();
        let ch = build_channel(&b, 1.5).unwrap();
        assert_eq!(ch.q() * ch.d(), ch.graph.n());
        let r = capacity_report(&ch);
        assert_eq!(r.c_sr, brute_alpha(&ch.weighted()));
        assert!(r.formula_matches);
        assert_eq!(r.c_se, ch.q() as f64 + 0.5 * 2.0 / 3.0);
        assert!(r.c_se < r.c_sr + 1e-12 || r.advantage);
        // Total weight mass of the protocol's inputs.
        let mass: f64 = (0..ch.graph.n()).map(|i| ch.weighted().weight(i)).sum();
        assert_eq!(mass, (ch.q() * ch.d() - 2) as f64 + 2.0 * 1.5);
        // At most one distinguished input is 1 in a colouring.
        assert_eq!(classical_dist_max(&ch).unwrap(), 1);
        let lo = capacity_sr(&Channel { w_star: 1.2, ..ch.clone() }).0;
        let hi = capacity_sr(&Channel { w_star: 1.8, ..ch.clone() }).0;
        assert!(lo <= hi);
    }
}

#[test]
fn parametric_channel_breaks_the_closed_form() {
    // A code of size alpha holds all three distinguished inputs.
    let b = build_gadget_32(1.2, 1, 1).unwrap().partitioned(0).unwrap();
    let r = capacity_report(&build_channel(&b, 1.5).unwrap());
    assert_eq!((r.q, r.alpha, r.c_sr), (8, 8, 9.5));
    assert!(!r.formula_matches && !r.advantage);
}

#[test]
fn sign_ray_channels_show_no_advantage() {
    // Exhaustive over every packing of nine bases.
    let e = search_ray_channel(9, 5, 1.5, u64::MAX).unwrap_err();
    assert!(matches!(e, Error::NoAdvantage(_)));
}

#[test]
fn distinguished_patterns_by_sat() {
    let b = bug(0.5).completed();
    let got = common::patterns(&b.graph, &b.distinguished);
    assert_eq!(got, BTreeSet::from(["00".to_string(), "01".into(), "10".into()]));
}
