//! `tzl`: spectra, zero ensembles, and statistics experiments.
//!
//! Exit codes: 0 success, 1 precondition error (bad flags, bad config,
//! degree cap, or a failed selftest criterion), 2 numerical-convergence
//! error.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use tzl::config::{parse_seed, resolve_threads, CommandKind, ExperimentConfig, OutputFormat};
use tzl::manifest::{load_config, write_and_verify, RunManifest, Versions};
use tzl::{runner, CliError};

#[derive(Parser)]
#[command(
    name = "tzl",
    version,
    about = "Toeplitz spectra and random section zeros"
)]
struct Cli {
    /// Replay a saved config (a config JSON or a run.json manifest).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (default "."; overrides the directory saved in
    /// --config).
    #[arg(long, global = true)]
    out: Option<String>,

    #[command(subcommand)]
    command: Option<CommandArg>,
}

#[derive(Args)]
struct CommonArgs {
    /// Symbol: const:C, power:K, expinv, or disc:R.
    #[arg(long, default_value = "const:1")]
    symbol: String,

    /// Degree of the line bundle power.
    #[arg(long)]
    p: Option<usize>,

    /// Comma-separated degree list (hole and kernel-check only).
    #[arg(long, value_delimiter = ',')]
    p_list: Option<Vec<usize>>,

    /// Monte Carlo trial count.
    #[arg(long)]
    trials: Option<usize>,

    /// Repetition count; alias of --trials.
    #[arg(long)]
    rn: Option<usize>,

    /// Total zero budget; must be a multiple of p.
    #[arg(long)]
    total_zeros: Option<usize>,

    /// 64-bit integer, or 'random' to draw once from OS entropy.
    #[arg(long, default_value = "0")]
    seed: String,

    /// Histogram bin count.
    #[arg(long, default_value_t = 50)]
    bins: usize,

    /// Test function: bump[:RHO0[:AMP]], log, or const:C.
    #[arg(long, default_value = "bump:1:1")]
    phi: String,

    /// Chart disc radius for hole counting.
    #[arg(long)]
    chart_radius: Option<f64>,

    /// Kernel probe base point as "re,im".
    #[arg(long)]
    base: Option<String>,

    /// Kernel near-diagonal offsets c (probe at c/sqrt(p)), comma separated.
    #[arg(long)]
    offsets: Option<String>,

    /// Artifact format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,

    /// Worker threads for the trial pool; results are identical at any
    /// count. Defaults to TZL_THREADS, then 1.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum CommandArg {
    /// Eigenvalues of the Toeplitz operator for one symbol and degree.
    Spectrum(CommonArgs),
    /// Zeros of independent random sections.
    SampleZeros(CommonArgs),
    /// Zeros plus a binned radial density against the invariant law.
    Histogram(CommonArgs),
    /// Standardized linear statistic over many trials.
    Clt(CommonArgs),
    /// Monte Carlo vs quadrature vs limiting variance.
    Variance(CommonArgs),
    /// Exact expectation of the linear statistic vs Monte Carlo.
    Expectation(CommonArgs),
    /// Frequency of zero-free chart discs across degrees.
    Hole(CommonArgs),
    /// Mass law of large numbers, one trial per degree.
    Mass(CommonArgs),
    /// Near-diagonal Gaussian decay and far-field bound of the kernel.
    KernelCheck(CommonArgs),
    /// Run the full acceptance suite; nonzero exit on any failure.
    Selftest(CommonArgs),
}

impl CommandArg {
    fn split(self) -> (CommandKind, CommonArgs) {
        match self {
            CommandArg::Spectrum(a) => (CommandKind::Spectrum, a),
            CommandArg::SampleZeros(a) => (CommandKind::SampleZeros, a),
            CommandArg::Histogram(a) => (CommandKind::Histogram, a),
            CommandArg::Clt(a) => (CommandKind::Clt, a),
            CommandArg::Variance(a) => (CommandKind::Variance, a),
            CommandArg::Expectation(a) => (CommandKind::Expectation, a),
            CommandArg::Hole(a) => (CommandKind::Hole, a),
            CommandArg::Mass(a) => (CommandKind::Mass, a),
            CommandArg::KernelCheck(a) => (CommandKind::KernelCheck, a),
            CommandArg::Selftest(a) => (CommandKind::Selftest, a),
        }
    }
}

fn build_config(kind: CommandKind, args: CommonArgs) -> Result<ExperimentConfig, CliError> {
    let seed = parse_seed(&args.seed).map_err(CliError::Precondition)?;
    let threads = resolve_threads(args.threads).map_err(CliError::Precondition)?;
    Ok(ExperimentConfig {
        command: kind,
        symbol: args.symbol,
        p: args.p,
        p_list: args.p_list,
        trials: args.trials,
        rn: args.rn,
        total_zeros: args.total_zeros,
        seed,
        bins: args.bins,
        phi: args.phi,
        chart_radius: args.chart_radius,
        base: args.base,
        offsets: args.offsets,
        out: ".".into(),
        format: args.format,
        threads,
    })
}

fn real_main() -> Result<usize, CliError> {
    let cli = Cli::parse();
    let mut config = match (cli.config, cli.command) {
        (Some(path), None) => load_config(&path)?,
        (None, Some(command)) => {
            let (kind, args) = command.split();
            build_config(kind, args)?
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Precondition(
                "give a subcommand or --config, not both".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Precondition(
                "give a subcommand or --config (see --help)".into(),
            ))
        }
    };
    if let Some(out) = cli.out {
        config.out = out;
    }

    let dir = PathBuf::from(&config.out);
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Precondition(format!("cannot create {}: {e}", dir.display())))?;

    let t0 = Instant::now();
    let output = runner::run(&config, &dir)?;
    let manifest = RunManifest {
        seed: config.seed,
        config,
        versions: Versions::current(),
        wall_seconds: t0.elapsed().as_secs_f64(),
        artifacts: output.artifacts,
        summary: output.summary,
    };
    write_and_verify(&dir, &manifest)?;
    Ok(output.failed_criteria)
}

fn main() {
    match real_main() {
        Ok(0) => {}
        Ok(failed) => {
            eprintln!("selftest: {failed} criteria failed");
            std::process::exit(1);
        }
        Err(e) => {
            eprintln!("tzl: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
