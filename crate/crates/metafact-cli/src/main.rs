//! `metafact` — build a = f·g·hᵀ by many routes, approximate with random
//! sketches, and verify the projector algebra holding it together.
//!
//! One run prints one JSON report on stdout (`--pretty` for a table).
//! Exit codes: 0 success, 1 a verify check failed, 2 validation error,
//! 3 numerical breakdown. Errors print `{"error":{"kind","message"}}` on
//! stdout and a one-line diagnostic on stderr.

mod commands;
mod report;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{
    cmd_factorize, cmd_lowrank, cmd_verify, CheckKind, CurModeArg, FactorizeMethod, GeneratorArg,
    InputSource, LowrankMethod, LowrankOpts, VerifyOpts,
};

#[derive(Parser)]
#[command(name = "metafact", version, about = "Meta-factorization toolbox", max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a deterministic factorization and report its quality
    Factorize(FactorizeArgs),
    /// Sketch-based low-rank approximation with seeded trial statistics
    Lowrank(LowrankArgs),
    /// Run invariant checks; exit 1 if any check fails
    Verify(VerifyArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Matrix file to load (.mtx/.mm Matrix Market, .csv)
    #[arg(long, value_name = "PATH", conflicts_with = "synthetic", required_unless_present = "synthetic")]
    input: Option<PathBuf>,

    /// Synthetic input, e.g. rank_k:20x15:k=5:seed=7 — kinds: rank_k (k=),
    /// decaying_geometric (decay= in (0,1)), decaying_polynomial (decay= > 0),
    /// identity_like; seed= defaults to the run seed
    #[arg(long, value_name = "SPEC")]
    synthetic: Option<String>,

    /// Master seed for sketching and synthetic inputs [default: METAFACT_SEED, then 0]
    #[arg(long)]
    seed: Option<u64>,

    /// Emit the machine-readable JSON report (already the default)
    #[arg(long, conflicts_with = "pretty")]
    json: bool,

    /// Render the report as a table for humans instead of JSON
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct FactorizeArgs {
    #[command(flatten)]
    input: InputArgs,

    #[arg(long, value_enum)]
    method: FactorizeMethod,

    /// Target rank k (all methods except pinv-meta, which detects it)
    #[arg(long)]
    rank: Option<usize>,

    /// Directory to dump the factors into (f/g/h.mtx, or u/t/v.mtx for UTV)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LowrankArgs {
    #[command(flatten)]
    input: InputArgs,

    #[arg(long, value_enum)]
    method: LowrankMethod,

    /// Target rank k
    #[arg(long)]
    rank: Option<usize>,

    /// Extra rows in the row sketch (nystrom methods) [default: rank]
    #[arg(long)]
    oversample: Option<usize>,

    /// Repeat with split seeds and report median/min/max residual
    #[arg(long, default_value_t = 1)]
    trials: usize,

    /// Row indices for cur, comma-separated, e.g. 0,3,7
    #[arg(long, value_name = "I,J,...")]
    rows: Option<String>,

    /// Column indices for cur, comma-separated
    #[arg(long, value_name = "I,J,...")]
    cols: Option<String>,

    /// Mixing-matrix mode for cur [default: orthogonal]
    #[arg(long, value_enum)]
    mode: Option<CurModeArg>,

    /// Step budget for wedderburn [default: rank, else min(m,n)]
    #[arg(long)]
    max_steps: Option<usize>,

    /// Pivot breakdown tolerance for wedderburn, relative to max|a|
    #[arg(long, default_value_t = 1e-10)]
    pivot_tol_rel: f64,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Check to run; repeat the flag to run several
    #[arg(long = "check", value_enum, required = true)]
    checks: Vec<CheckKind>,

    /// Rank for rank-dependent checks [default: numerical rank of the input]
    #[arg(long)]
    rank: Option<usize>,

    /// Generator period N for the periodicity check
    #[arg(long, default_value_t = 2)]
    period: usize,

    /// Generator family for the periodicity check
    #[arg(long, value_enum, default_value_t = GeneratorArg::Shift)]
    generator: GeneratorArg,

    /// Highest period multiple the periodicity check walks to
    #[arg(long, default_value_t = 3)]
    pmax: usize,

    /// Factor directory for the reconstruction check
    #[arg(long, value_name = "DIR")]
    factors: Option<PathBuf>,
}

fn resolve_seed(flag: Option<u64>) -> metafact::Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("METAFACT_SEED") {
        Ok(text) => text.trim().parse().map_err(|_| {
            metafact::Error::InvalidSpec(format!(
                "METAFACT_SEED must be an unsigned integer, got `{text}`"
            ))
        }),
        Err(_) => Ok(0),
    }
}

fn input_source(args: &InputArgs) -> metafact::Result<InputSource> {
    Ok(InputSource {
        path: args.input.clone(),
        synthetic: args.synthetic.clone(),
        seed: resolve_seed(args.seed)?,
        // --json is the default view; it exists so scripts can say so explicitly
        pretty: args.pretty && !args.json,
    })
}

fn run(cli: Cli) -> metafact::Result<i32> {
    match cli.command {
        Command::Factorize(args) => {
            let src = input_source(&args.input)?;
            cmd_factorize(&src, args.method, args.rank, args.out.as_deref())
        }
        Command::Lowrank(args) => {
            let src = input_source(&args.input)?;
            let opts = LowrankOpts {
                method: args.method,
                rank: args.rank,
                oversample: args.oversample,
                trials: args.trials,
                rows: args.rows,
                cols: args.cols,
                mode: args.mode,
                max_steps: args.max_steps,
                pivot_tol_rel: args.pivot_tol_rel,
            };
            cmd_lowrank(&src, &opts)
        }
        Command::Verify(args) => {
            let src = input_source(&args.input)?;
            let opts = VerifyOpts {
                checks: args.checks,
                rank: args.rank,
                period: args.period,
                generator: args.generator,
                p_max: args.pmax,
                factors: args.factors,
            };
            cmd_verify(&src, &opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version are successful exits; anything else is usage
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            let kind = err.kind();
            let payload =
                serde_json::json!({ "error": { "kind": kind, "message": err.to_string() } });
            println!("{}", serde_json::to_string_pretty(&payload).expect("error serializes"));
            eprintln!("error[{kind}]: {err}");
            ExitCode::from(if err.is_numerical() { 3 } else { 2 })
        }
    }
}
