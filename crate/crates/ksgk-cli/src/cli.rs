use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ksgk::coloring::DEFAULT_BUDGET;

/// Build, verify and analyse Kochen-Specker sets and gadgets.
///
/// Every command prints one JSON document on stdout: `result`, an optional
/// `verdict` and the run `manifest`. Exit status is 0 on success or PASS,
/// 2 on a FAIL verdict, 1 on errors and 64 on usage errors.
#[derive(Parser, Debug)]
#[command(name = "ksgk", author, version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format; JSON is the machine contract.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Tolerance for loaded vector files. Takes precedence over the file's
    /// own `tolerance`, which takes precedence over the 1e-9 default.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Worker threads. Results do not depend on it.
    #[arg(long, default_value_t = 1, global = true)]
    pub threads: usize,

    /// Also write the run manifest to this path.
    #[arg(long, global = true)]
    pub manifest_out: Option<PathBuf>,
}

/// Parses `a,b`.
fn pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected two comma-separated integers")?;
    let n = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((n(a)?, n(b)?))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Find a {0,1}-colouring or prove there is none.
    Color(ColorArgs),
    /// Verify an order-(m,k) or forbidden-set gadget by enumeration.
    CheckGadget(CheckGadgetArgs),
    /// Extract an order-(k,k-1) gadget from an uncolourable graph.
    ExtractGadget(ExtractArgs),
    /// Generate a vector family and its orthogonality graph.
    Build(BuildArgs),
    /// Zero-error capacities of a gadget-type channel.
    Channel(ChannelArgs),
    /// Half-integral consistent boxes on the maximum cliques.
    BinaryBox(BinaryBoxArgs),
    /// Weighted independence against the classical value on a vertex set.
    CswGap(CswArgs),
    /// Write the colouring problem as DIMACS CNF.
    ExportSat(ExportSatArgs),
    /// Check a vector representation: norms, parallels, frame residual, faithfulness.
    VerifyRep(VerifyRepArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
pub struct SolverArgs {
    /// Cross-check with an external DIMACS solver (path). Without a path the
    /// solver named by KSGK_SAT_SOLVER is used.
    #[arg(long, num_args = 0..=1, default_missing_value = "")]
    pub external: Option<String>,
}

#[derive(Args, Debug)]
pub struct ColorArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Use the literal clique-by-clique greedy procedure instead of the exact search.
    #[arg(long)]
    pub greedy: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("kind").required(true).args(["order", "forbidden"])))]
pub struct CheckGadgetArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Faithful representation, enabling the dimension check.
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Comma-separated distinguished labels.
    #[arg(long, value_delimiter = ',', required = true)]
    pub distinguished: Vec<String>,
    /// Order as `m,k`.
    #[arg(long, value_parser = pair)]
    pub order: Option<(usize, usize)>,
    /// Comma-separated forbidden patterns, e.g. `110,111`.
    #[arg(long)]
    pub forbidden: Option<String>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Write the extracted subgraph here.
    #[arg(long)]
    pub graph_out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Completion {
    /// Leave the family as built.
    None,
    /// Complete every maximal clique to a basis.
    Cliques,
    /// Add vectors until the family splits into disjoint bases.
    Bases,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[command(subcommand)]
    pub kind: BuildKind,
    /// Write the graph file here.
    #[arg(long, global = true)]
    pub graph_out: Option<PathBuf>,
    /// Write the vector file here.
    #[arg(long, global = true)]
    pub vectors_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Completion::None, global = true)]
    pub complete: Completion,
}

#[derive(Subcommand, Debug)]
pub enum BuildKind {
    /// Parametric order-(3,2) gadget in dimension 3.
    Gadget32 {
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 1)]
        t: u32,
        #[arg(long, default_value_t = 1)]
        s: u32,
    },
    /// Order-(d,d-1) gadget in dimension d.
    GadgetDd1 {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        phi: f64,
        #[arg(long, default_value_t = 1)]
        t: u32,
        #[arg(long, default_value_t = 1)]
        s: u32,
    },
    /// KS proof from k bases in dimension d joined by selection gadgets.
    Ks {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Frame vectors from Hadamard sign patterns.
    SicVectors {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r: usize,
    },
    /// State-independent proof on a frame.
    SicProof {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Gadget forbidding a set of patterns.
    Forbidden {
        /// Comma-separated patterns.
        #[arg(long)]
        patterns: String,
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Vector file whose vectors, in label order, become m1..mm.
        #[arg(long)]
        seed_vectors: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Gadget certifying randomness between two vectors.
    Randomness {
        #[arg(long)]
        d: usize,
    },
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["graph", "vectors", "search_rays"])))]
pub struct ChannelArgs {
    /// Confusability graph, already split into bases.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Vectors to split into bases first.
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub distinguished: Vec<String>,
    #[arg(long, default_value_t = 1.5)]
    pub w_star: f64,
    /// Seed for the basis split of `--vectors`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Search the sign rays of R^4 for `q,n_dist` instead.
    #[arg(long, value_parser = pair)]
    pub search_rays: Option<(usize, usize)>,
    #[arg(long, default_value_t = u64::MAX)]
    pub max_packings: u64,
}

#[derive(Args, Debug)]
pub struct BinaryBoxArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Context file `{"contexts": [[..], ..]}`; all maximum cliques by default.
    #[arg(long)]
    pub contexts: Option<PathBuf>,
    /// Labels whose summed value is maximised.
    #[arg(long, value_delimiter = ',')]
    pub targets: Vec<String>,
    /// List every box.
    #[arg(long)]
    pub list: bool,
    /// Compare with exact vertex enumeration of the polytope.
    #[arg(long)]
    pub half_integrality: bool,
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: u64,
}

#[derive(Args, Debug)]
pub struct CswArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub distinguished: Vec<String>,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("input").required(true).multiple(true).args(["graph", "vectors"])))]
pub struct ExportSatArgs {
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Vectors; the graph defaults to their orthogonality graph.
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Emit 1-in-3 clauses on triangles (dimension 3, completed bases).
    #[arg(long, requires = "vectors")]
    pub one_in_three: bool,
    /// Unit clauses, e.g. `a=1,b=0`.
    #[arg(long, value_delimiter = ',')]
    pub units: Vec<String>,
    /// DIMACS destination; without it the text is part of the JSON result.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug)]
pub struct VerifyRepArgs {
    #[arg(long)]
    pub vectors: PathBuf,
    /// Graph the vectors should represent faithfully.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// FAIL when the frame residual exceeds this.
    #[arg(long)]
    pub max_residual: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}
