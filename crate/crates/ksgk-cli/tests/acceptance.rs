//! One PASS/FAIL line per acceptance criterion. Oracles are computed here,
//! independently of the library code under test. The process always exits 0:
//! a FAIL line is a finding, not a harness error.

mod common;

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use itertools::Itertools;
use ksgk::binary_box::*;
use ksgk::coloring::{enumerate_patterns, extract_gadget, find_coloring, verify_forbidden_gadget, verify_order_gadget, DEFAULT_BUDGET};
use ksgk::constructions::*;
use ksgk::orthorep::{check_faithful, frame_residual, VectorSet};
use ksgk::sat::{export_cnf, run_external_solver};
use ksgk::zero_error::{check_feasible, search_ray_channel};
use ksgk::Graph;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: ksgk::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn overlap(vs: &VectorSet, a: &str, b: &str) -> f64 {
    dot(vs.get(a).expect("label"), vs.get(b).expect("label")).norm()
}

fn graph(vs: &[&str], es: &[(&str, &str)]) -> Graph {
    Graph::new(vs.iter().copied(), es.iter().copied()).unwrap()
}

fn weight_at_most(m: usize, k: usize) -> BTreeSet<String> {
    (0u32..1 << m).map(|x| format!("{x:0m$b}")).filter(|p| p.matches('1').count() <= k).collect()
}

fn bug(c: f64) -> GadgetBlueprint {
    zero_one_gadget(&[1.0, 0.0, 0.0], &[c, (1.0 - c * c).sqrt(), 0.0], 0).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

fn c1_frame_identity() -> Check {
    for d in 3..=6 {
        for r in [8, 12] {
            let f = lib(build_sic_vectors(d, r))?;
            // sum |u><u| against (r/d) I, entrywise.
            let mut worst: f64 = 0.0;
            for i in 0..d {
                for j in 0..d {
                    let s: Complex64 = f.vectors.iter().map(|(_, v)| v[i] * v[j].conj()).sum();
                    let want = if i == j { f.vectors.len() as f64 / d as f64 } else { 0.0 };
                    worst = worst.max((s - want).norm());
                }
            }
            ensure(worst < 1e-9 && frame_residual(&f.vectors) < 1e-9, || format!("d={d} r={r}: residual {worst:e}"))?;
            ensure((f.q - (2.0 / d as f64).sqrt()).abs() < 1e-12, || format!("d={d} r={r}: q = {}", f.q))?;
        }
    }
    Ok("8 frames, residual < 1e-9, q = sqrt(2/d)".into())
}

fn c2_state_independent() -> Check {
    let p = lib(build_sic_proof(3, 2, 8, 0))?;
    let g = &p.blueprint.graph;
    for (prefix, members) in &p.gadgets {
        let mut labels = p.blueprint.part_labels(prefix);
        labels.extend(members.iter().cloned());
        let sub = g.induced(&lib(g.indices(&labels))?);
        let got = common::patterns(&sub, members);
        ensure(!got.contains("11"), || format!("gadget {prefix} allows 11"))?;
        let lib_set = lib(enumerate_patterns(&sub, members, DEFAULT_BUDGET))?.patterns();
        ensure(lib_set == got, || format!("gadget {prefix}: enumeration disagrees with SAT"))?;
    }
    let linked: BTreeSet<(String, String)> = p.gadgets.iter().map(|(_, m)| (m[0].clone(), m[1].clone())).collect();
    for (a, b) in p.frame.iter().tuple_combinations() {
        let orth = g.adjacent(g.idx(a).unwrap(), g.idx(b).unwrap());
        ensure(orth || linked.contains(&(a.clone(), b.clone())), || format!("pair {a},{b} is unconstrained"))?;
    }
    ensure(p.classical_bound == 1, || format!("classical bound {}", p.classical_bound))?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let psi = random_state(&mut rng, 3);
        let tr: f64 = p.frame.iter().map(|l| dot(p.blueprint.vectors.get(l).unwrap(), &psi).norm_sqr()).sum();
        worst = worst.max((tr - 8.0 / 3.0).abs());
    }
    ensure(worst < 1e-9, || format!("trace deviates by {worst:e}"))?;
    Ok(format!("{} gadgets forbid 11, bound 1 vs 8/3 (max dev {worst:.1e}), n = {}", p.gadgets.len(), g.n()))
}

fn ks_proof() -> Result<GadgetBlueprint, String> {
    lib(build_ks_proof(3, 2, &default_bases(3, 2, 0), 0))
}

fn c3_ks_dual_oracle() -> Check {
    let ks = ks_proof()?;
    ensure(find_coloring(&ks.graph).is_none(), || "search found a colouring".into())?;
    let v = lib(run_external_solver(env!("CARGO_BIN_EXE_ksgk-sat"), &export_cnf(&ks.graph)))?;
    ensure(!v.satisfiable, || "external solver says SAT".into())?;
    ensure(!common::colourable(&ks.graph), || "in-process SAT oracle says SAT".into())?;
    Ok(format!("n = {}, e = {}, UNCOLORABLE by search and external solver", ks.graph.n(), ks.graph.edge_count()))
}

fn c4_extraction() -> Check {
    let ks = ks_proof()?;
    let ex = lib(extract_gadget(&ks.graph, DEFAULT_BUDGET))?;
    let k = ex.k;
    ensure((2..=3).contains(&k), || format!("k = {k}"))?;
    ensure(ex.distinguished.len() == k, || format!("{} distinguished for k = {k}", ex.distinguished.len()))?;
    let idx = lib(ks.graph.indices(ex.subgraph.labels()))?;
    ensure(ks.graph.induced(&idx) == ex.subgraph, || "subgraph is not induced".into())?;
    ensure(lib(verify_order_gadget(&ex.subgraph, &ex.distinguished, k - 1, DEFAULT_BUDGET))?.pass(), || "order check FAIL".into())?;
    let got = common::patterns(&ex.subgraph, &ex.distinguished);
    ensure(got == weight_at_most(k, k - 1), || format!("SAT oracle patterns {got:?}"))?;
    Ok(format!("order ({k},{}) on {} vertices", k - 1, ex.subgraph.n()))
}

fn c5_parametric_family() -> Check {
    for theta in [0.9, 1.2, 1.5] {
        for t in 1..=4 {
            let start = Instant::now();
            let bp = lib(build_gadget_32(theta, t, t))?;
            let tag = format!("theta={theta} t=s={t}");
            ensure(lib(check_faithful(&bp.vectors, &bp.graph))?.is_faithful(), || format!("{tag}: not faithful"))?;
            let d = &bp.distinguished;
            ensure(lib(verify_order_gadget(&bp.graph, d, 2, DEFAULT_BUDGET))?.pass(), || format!("{tag}: (3,2) FAIL"))?;
            ensure(!lib(verify_order_gadget(&bp.graph, d, 1, DEFAULT_BUDGET))?.pass(), || format!("{tag}: (3,1) PASS"))?;
            ensure(common::patterns(&bp.graph, d) == weight_at_most(3, 2), || format!("{tag}: SAT oracle disagrees"))?;
            ensure(start.elapsed() < Duration::from_secs(30), || format!("{tag}: {:?}", start.elapsed()))?;
        }
    }
    let bp = lib(build_gadget_32(1.55, 4, 4))?;
    let o = |a: &str, b: &str| overlap(&bp.vectors, a, b);
    let (o12, o13, o23) = (o("m1", "m2"), o("m1", "m3"), o("m2", "m3"));
    ensure(o12 > 0.99 && o13 > 0.99 && o23 > 0.99, || {
        format!("12 instances pass; at theta=1.55 t=s=4 overlaps are m1m2 {o12:.5}, m1m3 {o13:.1e}, m2m3 {o23:.1e}")
    })?;
    Ok(format!("12 instances pass, limit overlaps {o12:.4} {o13:.4} {o23:.4}"))
}

fn c6_randomness() -> Check {
    let five = lib(build_randomness_gadget(5))?;
    let o = overlap(&five.vectors, "u1", "u13");
    ensure((o - 1.0 / 5f64.sqrt()).abs() < 1e-9, || format!("d=5 overlap {o}"))?;
    let r78 = overlap(&five.vectors, "u7", "u8");
    ensure(r78 < 1e-12, || format!("u7-u8 residual {r78:e}"))?;
    let four = lib(build_randomness_gadget(4))?;
    let o4 = overlap(&four.vectors, "u", "v");
    ensure((o4 - 0.5).abs() < 1e-9, || format!("d=4 overlap {o4}"))?;
    for bp in [&four, &five] {
        ensure(common::patterns(&bp.graph, &bp.distinguished) == weight_at_most(2, 1), || "11 is achievable".into())?;
    }
    Ok(format!("d=5 overlap {o:.12}, u7-u8 {r78:.1e}; d=4 overlap {o4:.12}"))
}

fn c7_zero_error() -> Check {
    let (q, n_dist, d, w) = (6usize, 8usize, 4usize, 1.5);
    let c_se = q as f64 + (w - 1.0) * n_dist as f64 / d as f64;
    // Eight pairwise non-orthogonal inputs cannot sit in six bases without two sharing one.
    let why = match (check_feasible(q, n_dist), search_ray_channel(q, n_dist, w, 10_000)) {
        (Err(e), Err(_)) => e.to_string(),
        (_, Ok(rc)) => return Ok(format!("found channel after {} packings", rc.packings_tried)),
        (Ok(()), Err(e)) => e.to_string(),
    };
    Err(format!("no such channel: {why} (closed-form c_se would be {c_se})"))
}

/// Exhaustive maximum of `2 (f(a) + f(b))` over half-integral boxes.
fn brute_binary_max(g: &Graph, ctx: &ContextSet, targets: &[String]) -> Option<u32> {
    let labels = ctx.support();
    let idx = g.indices(&labels).unwrap();
    let n = labels.len();
    let pos = |l: &String| labels.iter().position(|x| x == l).unwrap();
    let contexts: Vec<Vec<usize>> = ctx.contexts.iter().map(|c| c.iter().map(pos).collect()).collect();
    let tpos: Vec<usize> = targets.iter().map(pos).collect();
    (0..3u32.pow(n as u32))
        .filter_map(|code| {
            let x: Vec<u32> = (0..n).map(|i| code / 3u32.pow(i as u32) % 3).collect();
            let ok_ctx = contexts.iter().all(|c| c.iter().map(|&i| x[i]).sum::<u32>() == 2);
            let ok_edges = (0..n).tuple_combinations().all(|(a, b)| !g.adjacent(idx[a], idx[b]) || x[a] + x[b] <= 2);
            (ok_ctx && ok_edges).then(|| tpos.iter().map(|&i| x[i]).sum())
        })
        .max()
}

fn petersen() -> Graph {
    let vs: Vec<String> = (0..10).map(|i| format!("p{i}")).collect();
    let mut es = vec![];
    for i in 0..5 {
        es.push((i, (i + 1) % 5));
        es.push((i, i + 5));
        es.push((i + 5, (i + 2) % 5 + 5));
    }
    Graph::new(vs.iter().map(String::as_str), es.iter().map(|&(a, b)| (vs[a].as_str(), vs[b].as_str()))).unwrap()
}

fn c8_binary_boxes() -> Check {
    let mut checked = 0;
    let mut family = vec![bug(0.3).completed(), bug(0.5).completed()];
    for d in [4, 5] {
        family.push(lib(build_randomness_gadget(d))?.completed());
    }
    for bp in &family {
        let ctx = ContextSet::all(&bp.graph);
        let got = lib(binary_max_sum(&bp.graph, &ctx, &bp.distinguished))?;
        ensure(got == Some(1.5), || format!("binary max {got:?}"))?;
        if ctx.support().len() <= 13 {
            let b = brute_binary_max(&bp.graph, &ctx, &bp.distinguished);
            ensure(b == Some(3), || format!("brute force gives {b:?} halves"))?;
            checked += 1;
        }
    }
    for i in 0..=200 {
        let t = FRAC_PI_2 * i as f64 / 200.0;
        let v1 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let v2 = [Complex64::new(t.cos(), 0.0), Complex64::new(t.sin(), 0.0)];
        let n = (2.0 * (1.0 + t.cos())).sqrt();
        let psi: Vec<Complex64> = (0..2).map(|k| (v1[k] + v2[k]) / n).collect();
        let direct = dot(&psi, &v1).norm_sqr() + dot(&psi, &v2).norm_sqr();
        let q = quantum_xgad_value(t);
        ensure((q - (1.0 + t.cos())).abs() < 1e-12 && (direct - q).abs() < 1e-12, || format!("theta {t}: {q} vs {direct}"))?;
        ensure((q > 1.5) == (t < FRAC_PI_3 - 1e-12) || (t - FRAC_PI_3).abs() < 1e-12, || format!("crossover wrong at {t}"))?;
    }
    ensure((quantum_xgad_value(FRAC_PI_3) - 1.5).abs() < 1e-12, || "value at pi/3".into())?;
    let mut instances = vec![
        graph(&["a", "b", "c"], &[("a", "b"), ("a", "c"), ("b", "c")]),
        graph(&["a", "b", "c", "d", "e"], &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")]),
        graph(&["a", "b", "c", "d", "e"], &[("a", "b"), ("a", "c"), ("b", "c"), ("c", "d"), ("c", "e"), ("d", "e")]),
        bug(0.3).graph,
        petersen(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let n = rng.gen_range(4..=8);
        let vs: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let es: Vec<(&str, &str)> =
            (0..n).tuple_combinations().filter(|_| rng.gen_bool(0.5)).map(|(a, b)| (vs[a].as_str(), vs[b].as_str())).collect();
        instances.push(Graph::new(vs.iter().map(String::as_str), es).unwrap());
    }
    for g in &instances {
        ensure(g.n() <= 10, || "instance too large".into())?;
        let r = lib(half_integrality_check(g, &ContextSet::all(g)))?;
        ensure(r.agree, || format!("disagreement on {:?}: {r:?}", g.to_file()))?;
    }
    Ok(format!("max 3/2 on {} gadgets ({checked} brute-forced), crossover pi/3, {} LP instances agree", family.len(), instances.len()))
}

/// Largest independent subset of `dist`, by scanning subsets.
fn alpha_on(g: &Graph, dist: &[String]) -> usize {
    let idx = g.indices(dist).unwrap();
    (0u32..1 << idx.len())
        .map(|m| idx.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &v)| v).collect::<Vec<_>>())
        .filter(|s| g.is_independent(s))
        .map(|s| s.len())
        .max()
        .unwrap_or(0)
}

fn c9_csw() -> Check {
    let ms = vec![vec![1.0, 0.0, 0.0], vec![0.6, 0.8, 0.0], vec![0.5, 0.5, 0.5f64.sqrt()]];
    let mut family = vec![bug(0.5), lib(order_gadget(&ms, &OrderGadgetOptions::default()))?];
    for theta in [0.9, 1.2, 1.5] {
        family.push(lib(build_gadget_32(theta, 1, 1))?);
    }
    family.push(lib(build_gadget_dd1(5, 1.3, 1.3, 1, 1))?);
    for d in [4, 5] {
        family.push(lib(build_randomness_gadget(d))?);
    }
    for h in ["111", "110,111"] {
        family.push(lib(build_forbidden_gadget(&lib(parse_patterns(h, 3))?, 3, None, 0))?);
    }
    for bp in &family {
        let r = lib(csw_gap(&bp.graph, &bp.distinguished))?;
        let cc = common::patterns(&bp.graph, &bp.distinguished).iter().map(|p| p.matches('1').count()).max();
        let alpha = alpha_on(&bp.graph, &bp.distinguished);
        ensure(r.alpha_w == alpha as f64 && r.classical_completeness == cc.map(|c| c as f64), || format!("{r:?} vs oracle {alpha}, {cc:?}"))?;
        ensure(r.classical_completeness.is_some_and(|c| c < r.alpha_w), || format!("no gap: {r:?}"))?;
    }
    let basis = graph(&["a", "b", "c"], &[("a", "b"), ("a", "c"), ("b", "c")]);
    for v in ["a", "b", "c"] {
        let r = lib(csw_gap(&basis, &[v.to_string()]))?;
        ensure(r.classical_completeness == Some(r.alpha_w), || format!("basis: {r:?}"))?;
    }
    Ok(format!("{} gadget blueprints show a gap, the plain basis none", family.len()))
}

fn c10_forbidden() -> Check {
    let mut sets: Vec<String> = (0..8u32).map(|x| format!("{x:03b}")).collect();
    sets.extend(["110,111".to_string(), "000,011,101".into()]);
    let all = weight_at_most(3, 3);
    let mut sizes = vec![];
    for text in &sets {
        let h = lib(parse_patterns(text, 3))?;
        let bp = lib(build_forbidden_gadget(&h, 3, None, 0))?;
        ensure(lib(verify_forbidden_gadget(&bp.graph, &bp.distinguished, &h, DEFAULT_BUDGET))?.pass(), || format!("H = {text}: FAIL"))?;
        let hs: BTreeSet<String> = h.into_iter().collect();
        let want: BTreeSet<String> = all.difference(&hs).cloned().collect();
        ensure(common::patterns(&bp.graph, &bp.distinguished) == want, || format!("H = {text}: SAT oracle disagrees"))?;
        sizes.push(bp.graph.n());
    }
    Ok(format!("{} forbidden sets pass, sizes {}..{}", sets.len(), sizes.iter().min().unwrap(), sizes.iter().max().unwrap()))
}

fn main() {
    let criteria: [(u32, u64, fn() -> Check); 10] = [
        (1, 1, c1_frame_identity),
        (2, 60, c2_state_independent),
        (3, 120, c3_ks_dual_oracle),
        (4, 60, c4_extraction),
        (5, 30 * 13, c5_parametric_family),
        (6, 5, c6_randomness),
        (7, 60, c7_zero_error),
        (8, 60, c8_binary_boxes),
        (9, 30, c9_csw),
        (10, 120, c10_forbidden),
    ];
    let mut passed = 0;
    for (n, limit, f) in criteria {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        let out = out.and_then(|s| if secs < limit as f64 { Ok(s) } else { Err(format!("{s}; took {secs:.1} s, limit {limit} s")) });
        match out {
            Ok(s) => {
                passed += 1;
                println!("criterion {n:>2}: PASS ({secs:.2} s) {s}");
            }
            Err(s) => println!("criterion {n:>2}: FAIL ({secs:.2} s) {s}"),
        }
    }
    println!("acceptance: {passed}/10 criteria pass");
}
