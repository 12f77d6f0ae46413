//! `cqed-net` command-line front end.
//!
//! Exit codes: 0 success, 2 usage or parameter error, 3 internal failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::iomodel::{flip_probability_sweep_with_step, log_spaced, write_sweep_csv};
use crate::schemes::{self, GraphKind, Num, RetryWalkParams, Scheme};
use crate::verify::Graph;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "cqed-net",
    version,
    about = "Cavity-QED entanglement network simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scheme and print its outcome report as JSON.
    RunScheme(RunSchemeArgs),
    /// Flip probability of one cavity-atom block over (g/κ, κτ), as CSV.
    FlipSweep(FlipSweepArgs),
    /// Success statistics of the back-and-forth retry walk, as JSON.
    RetryWalk(RetryWalkArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeName {
    GhzAtoms,
    W,
    W3Prob,
    W3Det,
    Cluster,
    GhzFields,
    FieldCz,
    Graph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Star,
    Linear,
    Ring,
}

#[derive(Debug, Args)]
pub struct RunSchemeArgs {
    #[arg(value_enum)]
    pub scheme: SchemeName,
    /// Number of atoms or fields.
    #[arg(long)]
    pub n: Option<usize>,
    /// Graph family for the `graph` scheme.
    #[arg(long, value_enum, conflicts_with = "graph")]
    pub kind: Option<KindArg>,
    /// JSON file `{"vertices": n, "edges": [[u, v], ...]}` for the `graph` scheme.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("taus").required(true).args(["tau", "tau_range"]))]
pub struct FlipSweepArgs {
    /// Comma-separated g/κ values.
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_negative_numbers = true
    )]
    pub g: Vec<f64>,
    /// Comma-separated κτ values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub tau: Vec<f64>,
    /// `a:b:n`, n log-spaced κτ values from a to b.
    #[arg(long, value_parser = parse_range)]
    pub tau_range: Option<(f64, f64, usize)>,
    /// Fixed RK4 step in units of 1/κ instead of the per-point default.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RetryWalkArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub p: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub max_steps: usize,
    #[arg(long)]
    pub mc_trajectories: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("expected a:b:n, got {s:?}"));
    };
    let a: f64 = a.parse().map_err(|e| format!("bad start {a:?}: {e}"))?;
    let b: f64 = b.parse().map_err(|e| format!("bad end {b:?}: {e}"))?;
    let n: usize = n.parse().map_err(|e| format!("bad count {n:?}: {e}"))?;
    Ok((a, b, n))
}

/// Command failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_INTERNAL
            },
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn require_n(n: Option<usize>, scheme: &str) -> Result<usize, Failure> {
    n.ok_or_else(|| usage(format!("scheme {scheme} needs --n")))
}

fn build_scheme(args: &RunSchemeArgs) -> Result<Scheme, Failure> {
    let parameter = |r: crate::Result<Scheme>| r.map_err(Failure::from);
    Ok(match args.scheme {
        SchemeName::GhzAtoms => {
            parameter(schemes::build_ghz_atoms(require_n(args.n, "ghz-atoms")?))?
        }
        SchemeName::W => parameter(schemes::build_w_pow2(require_n(args.n, "w")?))?,
        SchemeName::W3Prob => parameter(schemes::build_w3_probabilistic())?,
        SchemeName::W3Det => parameter(schemes::build_w3_deterministic())?,
        SchemeName::Cluster => {
            parameter(schemes::build_cluster_atoms(require_n(args.n, "cluster")?))?
        }
        SchemeName::GhzFields => {
            parameter(schemes::build_ghz_fields(require_n(args.n, "ghz-fields")?))?
        }
        SchemeName::FieldCz => parameter(schemes::build_field_cz_pair())?,
        SchemeName::Graph => match (&args.graph, args.kind) {
            (Some(path), _) => {
                let graph = read_graph(path)?;
                if args.n.is_some_and(|n| n != graph.vertices()) {
                    return Err(usage("--n disagrees with the graph file"));
                }
                parameter(schemes::build_field_graph(&graph))?
            }
            (None, Some(kind)) => {
                let kind = match kind {
                    KindArg::Star => GraphKind::Star,
                    KindArg::Linear => GraphKind::Linear,
                    KindArg::Ring => GraphKind::Ring,
                };
                parameter(schemes::build_field_graph_kind(
                    kind,
                    require_n(args.n, "graph")?,
                ))?
            }
            (None, None) => return Err(usage("scheme graph needs --kind or --graph")),
        },
    })
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("invalid graph file: {e}")))
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure {
            code: EXIT_INTERNAL,
            message: format!("write failed: {e}"),
        }),
    }
}

fn cmd_run_scheme(args: &RunSchemeArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let scheme = build_scheme(args)?;
    let outcomes = schemes::run(&scheme)?;
    let mut text = schemes::report_json(&scheme, &outcomes)?;
    text.push('\n');
    emit(&args.out, &text, stdout)
}

fn cmd_flip_sweep(args: &FlipSweepArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let taus = match args.tau_range {
        Some((a, b, n)) => log_spaced(a, b, n)?,
        None => args.tau.clone(),
    };
    let rows = flip_probability_sweep_with_step(&args.g, &taus, args.step)?;
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf).map_err(|e| Failure {
        code: EXIT_INTERNAL,
        message: e.to_string(),
    })?;
    let text = String::from_utf8(buf).expect("CSV is ASCII");
    emit(&args.out, &text, stdout)
}

#[derive(Serialize)]
struct RetryJson {
    p_flip: Num,
    n_cavities: usize,
    max_steps: usize,
    success_prob: Num,
    conditional_fidelity: Num,
    expected_steps: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<MonteCarloJson>,
}

#[derive(Serialize)]
struct MonteCarloJson {
    trajectories: u64,
    seed: u64,
    success_prob: Num,
    mean_steps: Num,
    abs_difference: Num,
}

fn cmd_retry_walk(args: &RetryWalkArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let params = RetryWalkParams {
        p_flip: args.p,
        n_cavities: args.n,
        max_steps: args.max_steps,
    };
    let r = schemes::retry_walk(&params)?;
    let monte_carlo = match args.mc_trajectories {
        Some(t) => {
            let mc = schemes::retry_walk_monte_carlo(&params, t, args.seed)?;
            Some(MonteCarloJson {
                trajectories: mc.trajectories,
                seed: mc.seed,
                success_prob: Num(mc.success_prob),
                mean_steps: Num(mc.mean_steps),
                abs_difference: Num((mc.success_prob - r.success_prob).abs()),
            })
        }
        None => None,
    };
    let report = RetryJson {
        p_flip: Num(args.p),
        n_cavities: args.n,
        max_steps: args.max_steps,
        success_prob: Num(r.success_prob),
        conditional_fidelity: Num(r.conditional_fidelity),
        expected_steps: Num(r.expected_steps),
        monte_carlo,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| Failure {
        code: EXIT_INTERNAL,
        message: e.to_string(),
    })?;
    text.push('\n');
    emit(&args.out, &text, stdout)
}

/// Parse `args` (including the program name) and run the command.
pub fn main_with<S: AsRef<str>>(args: &[S], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args.iter().map(|s| s.as_ref())) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::RunScheme(a) => cmd_run_scheme(a, stdout),
        Command::FlipSweep(a) => cmd_flip_sweep(a, stdout),
        Command::RetryWalk(a) => cmd_retry_walk(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
