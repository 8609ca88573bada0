//! One function per subcommand, each a thin wrapper over the library.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use ksgk::binary_box::{binary_max_sum, csw_gap, enumerate_binary_vertices, half_integrality_check, ContextSet};
use ksgk::coloring::{
    extract_gadget, find_coloring_in, greedy_coloring, verify_forbidden_gadget, verify_order_gadget, DimensionCheck,
    Instance,
};
use ksgk::constructions::*;
use ksgk::manifest::RunManifest;
use ksgk::orthorep::{check_faithful, frame_residual, orthogonality_graph_lenient, parallel_pairs, VectorFile};
use ksgk::sat::{export_cnf, export_one_in_three, run_external_solver, solver_from_env, SOLVER_ENV};
use ksgk::zero_error::{build_channel, capacity_report, channel_from_graph, classical_dist_max, search_ray_channel};
use ksgk::{Graph, VectorSet};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::*;

pub type CmdResult<T> = Result<T, String>;

/// What a command produced, before the manifest is attached.
pub struct Outcome {
    pub result: Value,
    /// `Some(pass)` for commands that reach a verdict.
    pub verdict: Option<bool>,
}

impl Outcome {
    fn plain(result: Value) -> Self {
        Outcome { result, verdict: None }
    }
}

/// Per-run state: the manifest under construction and pending output files.
pub struct Ctx {
    pub tol: Option<f64>,
    pub manifest: RunManifest,
    pub files: Vec<(PathBuf, String)>,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> CmdResult<String> {
        self.manifest.inputs.push(path.display().to_string());
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
    }

    fn graph(&mut self, path: &Path) -> CmdResult<Graph> {
        let text = self.read(path)?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// The `--tol` flag wins over the file's tolerance.
    fn vectors(&mut self, path: &Path) -> CmdResult<VectorSet> {
        let text = self.read(path)?;
        let mut f: VectorFile = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if let Some(t) = self.tol {
            f.tolerance = t;
        }
        self.manifest.tolerance = Some(f.tolerance);
        VectorSet::from_file(&f).map_err(|e| format!("{}: {e}", path.display()))
    }

    fn emit(&mut self, path: &Option<PathBuf>, value: &impl Serialize) -> CmdResult<()> {
        if let Some(p) = path {
            let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())? + "\n";
            self.emit_text(p, text);
        }
        Ok(())
    }

    fn emit_text(&mut self, path: &Path, text: String) {
        self.manifest.outputs.push(path.display().to_string());
        self.files.push((path.to_path_buf(), text));
    }
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("library types serialize")
}

fn lib<T>(r: ksgk::Result<T>) -> CmdResult<T> {
    r.map_err(|e| e.to_string())
}

/// Resolves `--external`: an explicit path, else the environment.
fn solver_path(a: &SolverArgs) -> CmdResult<Option<String>> {
    match a.external.as_deref() {
        None => Ok(None),
        Some("") => solver_from_env().map(Some).ok_or_else(|| format!("--external given without a path and {SOLVER_ENV} is unset")),
        Some(p) => Ok(Some(p.to_string())),
    }
}

pub fn run(cmd: &Command, ctx: &mut Ctx) -> CmdResult<Outcome> {
    match cmd {
        Command::Color(a) => color(a, ctx),
        Command::CheckGadget(a) => check_gadget(a, ctx),
        Command::ExtractGadget(a) => extract(a, ctx),
        Command::Build(a) => build(a, ctx),
        Command::Channel(a) => channel(a, ctx),
        Command::BinaryBox(a) => binary_box(a, ctx),
        Command::CswGap(a) => {
            let g = ctx.graph(&a.graph)?;
            Ok(Outcome::plain(to_value(&lib(csw_gap(&g, &a.distinguished))?)))
        }
        Command::ExportSat(a) => export_sat(a, ctx),
        Command::VerifyRep(a) => verify_rep(a, ctx),
        Command::Replay(_) => Err("replay cannot be nested".into()),
    }
}

fn color(a: &ColorArgs, ctx: &mut Ctx) -> CmdResult<Outcome> {
    let g = ctx.graph(&a.graph)?;
    let (coloring, mut result) = if a.greedy {
        let run = lib(greedy_coloring(&g, a.budget))?;
        let r = json!({ "method": "greedy", "steps": run.steps });
        (run.coloring, r)
    } else {
        let c = lib(find_coloring_in(&Instance::new(&g), &[], a.budget))?;
        (c, json!({ "method": "search" }))
    };
    let colorable = coloring.is_some();
    result["colorable"] = json!(colorable);
    result["coloring"] = to_value(&coloring.map(|c| c.assignment));
    let mut verdict = None;
    if let Some(prog) = solver_path(&a.solver)? {
        let v = lib(run_external_solver(&prog, &export_cnf(&g)))?;
        let agree = v.satisfiable == colorable;
        result["external"] = json!({ "solver": prog, "satisfiable": v.satisfiable, "agree": agree });
        verdict = Some(agree);
    }
    Ok(Outcome { result, verdict })
}

fn check_gadget(a: &CheckGadgetArgs, ctx: &mut Ctx) -> CmdResult<Outcome> {
    let g = ctx.graph(&a.graph)?;
    let dist = &a.distinguished;
    let mut cert = match (&a.order, &a.forbidden) {
        (Some((m, k)), _) => {
            if *m != dist.len() {
                return Err(format!("order m = {m} but {} distinguished labels given", dist.len()));
            }
            lib(verify_order_gadget(&g, dist, *k, a.budget))?
        }
        (None, Some(text)) => {
            let h = lib(parse_patterns(text, dist.len()))?;
            lib(verify_forbidden_gadget(&g, dist, &h, a.budget))?
        }
        (None, None) => unreachable!("clap requires one of them"),
    };
    if let Some(p) = &a.vectors {
        let vs = ctx.vectors(p)?;
        lib(cert.attach_dimension(&vs, &g))?;
    }
    let dim_ok = !matches!(cert.dimension, DimensionCheck::Checked { pass: false, .. });
    Ok(Outcome { verdict: Some(cert.pass() && dim_ok), result: to_value(&cert) })
}

fn extract(a: &ExtractArgs, ctx: &mut Ctx) -> CmdResult<Outcome> {
    let g = ctx.graph(&a.graph)?;
    let ex = lib(extract_gadget(&g, a.budget))?;
    ctx.emit(&a.graph_out, &ex.subgraph)?;
    Ok(Outcome { verdict: Some(ex.own_view.pass()), result: to_value(&ex) })
}

fn complete(bp: GadgetBlueprint, how: Completion) -> CmdResult<GadgetBlueprint> {
    match how {
        Completion::None => Ok(bp),
        Completion::Cliques => Ok(bp.completed()),
        Completion::Bases => lib(bp.partitioned(0)),
    }
}

fn build(a: &BuildArgs, ctx: &mut Ctx) -> CmdResult<Outcome> {
    let bp = match &a.kind {
        BuildKind::Gadget32 { theta, t, s } => lib(build_gadget_32(*theta, *t, *s))?,
        BuildKind::GadgetDd1 { d, theta, phi, t, s } => lib(build_gadget_dd1(*d, *theta, *phi, *t, *s))?,
        BuildKind::Ks { d, k, seed } => lib(build_ks_proof(*d, *k, &default_bases(*d, *k, *seed), *seed))?,
        BuildKind::Randomness { d } => lib(build_randomness_gadget(*d))?,
        BuildKind::Forbidden { patterns, m, seed_vectors, seed } => {
            let h = lib(parse_patterns(patterns, *m))?;
            let seeds = match seed_vectors {
                Some(p) => {
                    let vs = ctx.vectors(p)?;
                    let real: Option<Vec<Vec<f64>>> = vs.labels().map(|l| vs.real(l)).collect();
                    Some(real.ok_or("seed vectors must be real")?)
                }
                None => None,
            };
            lib(build_forbidden_gadget(&h, *m, seeds, *seed))?
        }
        BuildKind::SicVectors { d, r } => {
            if a.complete != Completion::None {
                return Err("completion applies to gadget families, not frames".into());
            }
            let f = lib(build_sic_vectors(*d, *r))?;
            ctx.emit(&a.vectors_out, &f.vectors)?;
            ctx.emit(&a.graph_out, &orthogonality_graph_lenient(&f.vectors))?;
            return Ok(Outcome::plain(to_value(&f)));
        }
        BuildKind::SicProof { d, k, r, seed } => {
            let mut p = lib(build_sic_proof(*d, *k, *r, *seed))?;
            p.blueprint = complete(p.blueprint, a.complete)?;
            ctx.emit(&a.vectors_out, &p.blueprint.vectors)?;
            ctx.emit(&a.graph_out, &p.blueprint.graph)?;
            return Ok(Outcome::plain(to_value(&p)));
        }
    };
    let bp = complete(bp, a.complete)?;
    ctx.emit(&a.vectors_out, &bp.vectors)?;
    ctx.emit(&a.graph_out, &bp.graph)?;
    Ok(Outcome::plain(to_value(&bp)))
}

fn channel(a: &ChannelArgs, ctx: &mut Ctx) -> CmdResult<Outcome> {
    let (ch, extra) = if let Some((q, n)) = a.search_rays {
        let rc = lib(search_ray_channel(q, n, a.w_star, a.max_packings))?;
        let extra = json!({ "packings_tried": rc.packings_tried, "vectors": rc.blueprint.vectors });
        (rc.channel, extra)
    } else if let Some(p) = &a.vectors {
        let vs = ctx.vectors(p)?;
        let order: Vec<String> = vs.labels().cloned().collect();
        let bp = lib(GadgetBlueprint::from_vectors(vs, &order, a.distinguished.clone(), BTreeMap::new(), &[]))?;
        let bp = lib(bp.partitioned(a.seed))?;
        let extra = json!({ "vectors": bp.vectors });
        (lib(build_channel(&bp, a.w_star))?, extra)
    } else {
        let g = ctx.graph(a.graph.as_ref().expect("clap requires a source"))?;
        (lib(channel_from_graph(&g, &a.distinguished, a.w_star))?, Value::Null)
    };
    let report = capacity_report(&ch);
    let mut result = json!({
        "report": report,
        "cover": ch.cover,
        "v_dist": ch.v_dist,
        "w_star": ch.w_star,
        "classical_dist_max": lib(classical_dist_max(&ch))?,
    });
    if let Value::Object(m) = extra {
        result.as_object_mut().expect("object").extend(m);
    }
    Ok(Outcome::plain(result))
}

fn binary_box(a: &BinaryBoxArgs, ctx: &mut Ctx) -> CmdResult<Outcome> {
    let g = ctx.graph(&a.graph)?;
    let cs = match &a.contexts {
        Some(p) => {
            let text = ctx.read(p)?;
            serde_json::from_str::<ContextSet>(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => ContextSet::all(&g),
    };
    lib(cs.validate(&g))?;
    let boxes = lib(enumerate_binary_vertices(&g, &cs, a.budget))?;
    let mut result = json!({ "contexts": cs.contexts.len(), "support": cs.support().len(), "boxes": boxes.len() });
    if !a.targets.is_empty() {
        result["targets"] = json!(a.targets);
        result["max_sum"] = json!(lib(binary_max_sum(&g, &cs, &a.targets))?);
    }
    if a.list {
        result["box_list"] = json!(boxes.iter().map(|b| &b.values).collect::<Vec<_>>());
    }
    let mut verdict = None;
    if a.half_integrality {
        let h = lib(half_integrality_check(&g, &cs))?;
        verdict = Some(h.agree);
        result["half_integrality"] = to_value(&h);
    }
    Ok(Outcome { result, verdict })
}

fn parse_unit(s: &str) -> CmdResult<(&str, bool)> {
    match s.rsplit_once('=') {
        Some((l, "1")) => Ok((l, true)),
        Some((l, "0")) => Ok((l, false)),
        _ => Err(format!("unit {s:?} is not label=0 or label=1")),
    }
}

fn export_sat(a: &ExportSatArgs, ctx: &mut Ctx) -> CmdResult<Outcome> {
    let vs = a.vectors.as_ref().map(|p| ctx.vectors(p)).transpose()?;
    let g = match (&a.graph, &vs) {
        (Some(p), _) => ctx.graph(p)?,
        (None, Some(vs)) => orthogonality_graph_lenient(vs),
        (None, None) => unreachable!("clap requires an input"),
    };
    let cnf = if a.one_in_three {
        lib(export_one_in_three(&g, vs.as_ref().expect("clap requires vectors")))?
    } else {
        export_cnf(&g)
    };
    let units = a.units.iter().map(|s| parse_unit(s)).collect::<CmdResult<Vec<_>>>()?;
    let cnf = lib(cnf.with_units(&units))?;
    let dimacs = cnf.to_dimacs();
    let mut result = json!({
        "variables": cnf.num_vars(),
        "clauses": cnf.clauses.len(),
        "semantics": cnf.semantics,
    });
    match &a.out {
        Some(p) => ctx.emit_text(p, dimacs),
        None => result["dimacs"] = json!(dimacs),
    }
    if let Some(prog) = solver_path(&a.solver)? {
        let v = lib(run_external_solver(&prog, &cnf))?;
        result["external"] = json!({ "solver": prog, "satisfiable": v.satisfiable, "model": v.model });
    }
    Ok(Outcome::plain(result))
}

fn verify_rep(a: &VerifyRepArgs, ctx: &mut Ctx) -> CmdResult<Outcome> {
    let vs = ctx.vectors(&a.vectors)?;
    let residual = frame_residual(&vs);
    let mut result = json!({
        "dimension": vs.dimension(),
        "tolerance": vs.tolerance(),
        "vectors": vs.len(),
        "real": vs.is_real(),
        "parallel_pairs": parallel_pairs(&vs),
        "frame_residual": residual,
    });
    let mut verdict = None;
    if let Some(max) = a.max_residual {
        verdict = Some(residual <= max);
    }
    if let Some(p) = &a.graph {
        let g = ctx.graph(p)?;
        let rep = lib(check_faithful(&vs, &g))?;
        verdict = Some(verdict.unwrap_or(true) && rep.is_faithful());
        result["faithfulness"] = to_value(&rep);
    }
    Ok(Outcome { result, verdict })
}
