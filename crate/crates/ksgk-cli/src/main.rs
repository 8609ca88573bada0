mod cli;
mod commands;
mod render;

use std::fs;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};
use ksgk::manifest::RunManifest;
use serde_json::{json, Value};

use cli::{BuildKind, Cli, Command, Format};
use commands::{Ctx, Outcome};

const EXIT_FAIL: u8 = 2;
const EXIT_ERROR: u8 = 1;
const EXIT_USAGE: u8 = 64;

fn subcommand_name(c: &Command) -> String {
    let kind = |k: &BuildKind| match k {
        BuildKind::Gadget32 { .. } => "gadget32",
        BuildKind::GadgetDd1 { .. } => "gadget-dd1",
        BuildKind::Ks { .. } => "ks",
        BuildKind::SicVectors { .. } => "sic-vectors",
        BuildKind::SicProof { .. } => "sic-proof",
        BuildKind::Forbidden { .. } => "forbidden",
        BuildKind::Randomness { .. } => "randomness",
    };
    match c {
        Command::Color(_) => "color".into(),
        Command::CheckGadget(_) => "check-gadget".into(),
        Command::ExtractGadget(_) => "extract-gadget".into(),
        Command::Build(b) => format!("build {}", kind(&b.kind)),
        Command::Channel(_) => "channel".into(),
        Command::BinaryBox(_) => "binary-box".into(),
        Command::CswGap(_) => "csw-gap".into(),
        Command::ExportSat(_) => "export-sat".into(),
        Command::VerifyRep(_) => "verify-rep".into(),
        Command::Replay(_) => "replay".into(),
    }
}

fn usage_error(e: clap::Error) -> ExitCode {
    if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
        let _ = e.print();
        return ExitCode::SUCCESS;
    }
    let _ = e.print();
    eprintln!("\n{}", Cli::command().render_long_help());
    ExitCode::from(EXIT_USAGE)
}

fn error(msg: &str, format: Format) -> ExitCode {
    log::error!("{msg}");
    match format {
        Format::Json => println!("{}", json!({ "error": msg })),
        Format::Table => println!("error  {msg}"),
    }
    ExitCode::from(EXIT_ERROR)
}

/// Loads a manifest and re-parses the argument list it recorded.
fn replay_target(path: &std::path::Path) -> Result<(Cli, Vec<String>), String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let m: RunManifest = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let argv: Vec<String> = m
        .parameters
        .get("argv")
        .and_then(|v| serde_json::from_value(v.clone()).ok())
        .ok_or_else(|| format!("{}: manifest records no argv", path.display()))?;
    let cli = Cli::try_parse_from(std::iter::once("ksgk".to_string()).chain(argv.iter().cloned()))
        .map_err(|e| format!("recorded arguments no longer parse: {e}"))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err("replay cannot be nested".into());
    }
    Ok((cli, argv))
}

fn execute(cli: Cli, argv: Vec<String>) -> ExitCode {
    if let Command::Replay(r) = &cli.command {
        return match replay_target(&r.manifest) {
            Ok((inner, argv)) => execute(inner, argv),
            Err(e) => error(&e, cli.format),
        };
    }
    if cli.threads == 0 {
        return error("--threads must be at least 1", cli.format);
    }
    let mut manifest = RunManifest::new(subcommand_name(&cli.command)).param("argv", &argv);
    manifest.threads = cli.threads;
    manifest.tolerance = cli.tol;
    let mut ctx = Ctx { tol: cli.tol, manifest, files: vec![] };
    let Outcome { result, verdict } = match commands::run(&cli.command, &mut ctx) {
        Ok(o) => o,
        Err(e) => return error(&e, cli.format),
    };
    for (path, text) in &ctx.files {
        if let Err(e) = fs::write(path, text) {
            return error(&format!("{}: {e}", path.display()), cli.format);
        }
    }
    if let Some(p) = &cli.manifest_out {
        let text = serde_json::to_string_pretty(&ctx.manifest).expect("manifest serializes") + "\n";
        if let Err(e) = fs::write(p, text) {
            return error(&format!("{}: {e}", p.display()), cli.format);
        }
    }
    let mut doc = json!({ "result": result, "manifest": ctx.manifest });
    if let Some(pass) = verdict {
        doc["verdict"] = Value::from(if pass { "PASS" } else { "FAIL" });
    }
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&doc).expect("document serializes")),
        Format::Table => print!("{}", render::table(&doc)),
    }
    match verdict {
        Some(false) => ExitCode::from(EXIT_FAIL),
        _ => ExitCode::SUCCESS,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv: Vec<String> = std::env::args().collect();
    match Cli::try_parse_from(&argv) {
        Ok(cli) => execute(cli, argv[1..].to_vec()),
        Err(e) => usage_error(e),
    }
}
