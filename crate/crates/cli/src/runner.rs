//! Command dispatch: each subcommand resolves its inputs, runs the core
//! routines (Monte Carlo loops through the deterministic trial pool), and
//! writes schema-checked artifacts.

use std::path::Path;

use serde_json::json;

use tzl_core::geometry::{self, ChartPoint};
use tzl_core::roots::{section_zeros, RootError, ZeroSet};
use tzl_core::sampling::{kernel_gaussian_decay_check, sample_section, SampleError};
use tzl_core::spectra::{spectrum, SpectrumError, ToeplitzSpectrum};
use tzl_core::stats::{
    collect_fs_radii, expectation_exact, fs_histogram, ks_vs_fs, linear_statistic, mass_lln_report,
    mass_moments, monte_carlo_report, variance_bipotential, variance_leading_term, StatsError,
    TestFunction,
};

use crate::artifacts::{write_table, Cell, ColKind, Schema};
use crate::checks;
use crate::config::{resolve, CommandKind, ExperimentConfig, ResolvedInputs};
use crate::parallel::map_trials;
use crate::CliError;

pub struct RunOutput {
    pub artifacts: Vec<String>,
    pub summary: serde_json::Value,
    pub failed_criteria: usize,
}

pub fn run(config: &ExperimentConfig, dir: &Path) -> Result<RunOutput, CliError> {
    let inputs = resolve(config).map_err(CliError::Precondition)?;
    let (artifacts, summary, failed) = match config.command {
        CommandKind::Spectrum => cmd_spectrum(config, &inputs, dir)?,
        CommandKind::SampleZeros => cmd_sample_zeros(config, &inputs, dir, false)?,
        CommandKind::Histogram => cmd_sample_zeros(config, &inputs, dir, true)?,
        CommandKind::Clt => cmd_clt(config, &inputs, dir)?,
        CommandKind::Variance => cmd_variance(config, &inputs, dir)?,
        CommandKind::Expectation => cmd_expectation(config, &inputs, dir)?,
        CommandKind::Hole => cmd_hole(config, &inputs, dir)?,
        CommandKind::Mass => cmd_mass(config, &inputs, dir)?,
        CommandKind::KernelCheck => cmd_kernel_check(config, &inputs, dir)?,
        CommandKind::Selftest => cmd_selftest(config, dir)?,
    };
    Ok(RunOutput {
        artifacts,
        summary,
        failed_criteria: failed,
    })
}

type CmdResult = Result<(Vec<String>, serde_json::Value, usize), CliError>;

fn spectrum_err(e: SpectrumError) -> CliError {
    match e {
        SpectrumError::QuadratureFailed { .. } | SpectrumError::EigensolveStalled { .. } => {
            CliError::Numerical(e.to_string())
        }
        _ => CliError::Precondition(e.to_string()),
    }
}

fn sample_err(e: SampleError) -> CliError {
    CliError::Numerical(e.to_string())
}

fn root_err(e: RootError) -> CliError {
    CliError::Numerical(e.to_string())
}

fn stats_err(e: StatsError) -> CliError {
    match e {
        StatsError::InvalidTestFunction(_) | StatsError::EmptyInput => {
            CliError::Precondition(e.to_string())
        }
        StatsError::Spectrum(inner) => spectrum_err(inner),
        _ => CliError::Numerical(e.to_string()),
    }
}

const SPECTRUM_COLS: Schema = &[
    ("j", ColKind::Int),
    ("lambda", ColKind::Float),
    ("log_lambda", ColKind::Float),
];

fn cmd_spectrum(config: &ExperimentConfig, inputs: &ResolvedInputs, dir: &Path) -> CmdResult {
    let p = inputs.degrees[0];
    let spec = spectrum(&inputs.symbol, p).map_err(spectrum_err)?;
    let rows: Vec<Vec<Cell>> = (0..=p)
        .map(|j| {
            vec![
                Cell::Int(j as i64),
                Cell::Float(spec.lambdas[j]),
                Cell::Float(spec.log_lambdas[j]),
            ]
        })
        .collect();
    let file = write_table(dir, "spectrum", SPECTRUM_COLS, &rows, config.format)?;
    let summary = json!({
        "p": p,
        "lambda_min": spec.lambda_min(),
        "lambda_max": spec.lambda_max(),
        "trace": spec.trace(),
        "underflow": spec.underflow,
        "method": format!("{:?}", spec.method),
    });
    Ok((vec![file], summary, 0))
}

const ZEROS_COLS: Schema = &[
    ("trial", ColKind::Int),
    ("re", ColKind::Float),
    ("im", ColKind::Float),
    ("r_fs", ColKind::Float),
];

const HIST_COLS: Schema = &[
    ("bin_lo", ColKind::Float),
    ("bin_hi", ColKind::Float),
    ("count", ColKind::Int),
    ("density", ColKind::Float),
    ("psi_mid", ColKind::Float),
];

fn draw_zerosets(
    spec: &ToeplitzSpectrum,
    trials: usize,
    seed: u64,
    threads: usize,
) -> Result<Vec<ZeroSet>, CliError> {
    map_trials(trials, threads, |t| {
        let s = sample_section(spec, seed, t as u64).map_err(sample_err)?;
        section_zeros(&s).map_err(root_err)
    })
}

/// sample-zeros writes every zero; histogram additionally bins the geodesic
/// radii against the limiting density. Pole zeros appear as rows with
/// infinite chart coordinates and r_fs at the antipodal distance.
fn cmd_sample_zeros(
    config: &ExperimentConfig,
    inputs: &ResolvedInputs,
    dir: &Path,
    with_histogram: bool,
) -> CmdResult {
    let p = inputs.degrees[0];
    let trials = inputs.trials.expect("validated");
    let spec = spectrum(&inputs.symbol, p).map_err(spectrum_err)?;
    let zerosets = draw_zerosets(&spec, trials, config.seed, config.threads)?;

    let mut rows = Vec::new();
    let mut at_infinity = 0usize;
    let mut max_residual = 0.0f64;
    for (t, zs) in zerosets.iter().enumerate() {
        for r in &zs.roots {
            rows.push(vec![
                Cell::Int(t as i64),
                Cell::Float(r.re),
                Cell::Float(r.im),
                Cell::Float(geometry::fs_norm(ChartPoint::from_complex(*r))),
            ]);
        }
        for _ in 0..zs.zeros_at_infinity {
            rows.push(vec![
                Cell::Int(t as i64),
                Cell::Float(f64::INFINITY),
                Cell::Float(f64::INFINITY),
                Cell::Float(geometry::MAX_RADIUS),
            ]);
        }
        at_infinity += zs.zeros_at_infinity;
        max_residual = max_residual.max(zs.max_residual);
    }
    let mut artifacts = vec![write_table(dir, "zeros", ZEROS_COLS, &rows, config.format)?];

    let mut summary = json!({
        "p": p,
        "trials": trials,
        "total_zeros": rows.len(),
        "zeros_at_infinity": at_infinity,
        "max_residual": max_residual,
    });
    if with_histogram {
        let radii = collect_fs_radii(&zerosets);
        let hist = fs_histogram(&radii, config.bins).map_err(stats_err)?;
        let hist_rows: Vec<Vec<Cell>> = (0..hist.counts.len())
            .map(|i| {
                vec![
                    Cell::Float(hist.bin_edges[i]),
                    Cell::Float(hist.bin_edges[i + 1]),
                    Cell::Int(hist.counts[i] as i64),
                    Cell::Float(hist.density[i]),
                    Cell::Float(hist.psi_mid[i]),
                ]
            })
            .collect();
        artifacts.push(write_table(
            dir,
            "hist",
            HIST_COLS,
            &hist_rows,
            config.format,
        )?);
        summary["ks_vs_limit"] = json!(ks_vs_fs(&radii).map_err(stats_err)?);
        summary["bins"] = json!(config.bins);
    }
    Ok((artifacts, summary, 0))
}

fn statistic_trials(
    spec: &ToeplitzSpectrum,
    phi: &TestFunction,
    trials: usize,
    seed: u64,
    threads: usize,
) -> Result<Vec<f64>, CliError> {
    map_trials(trials, threads, |t| {
        let s = sample_section(spec, seed, t as u64).map_err(sample_err)?;
        let zs = section_zeros(&s).map_err(root_err)?;
        Ok(linear_statistic(&zs, phi))
    })
}

const CLT_COLS: Schema = &[
    ("trial", ColKind::Int),
    ("z", ColKind::Float),
    ("z_standardized", ColKind::Float),
];

fn cmd_clt(config: &ExperimentConfig, inputs: &ResolvedInputs, dir: &Path) -> CmdResult {
    let p = inputs.degrees[0];
    let spec = spectrum(&inputs.symbol, p).map_err(spectrum_err)?;
    let values = statistic_trials(
        &spec,
        &inputs.phi,
        inputs.trials.expect("validated"),
        config.seed,
        config.threads,
    )?;
    let report = monte_carlo_report(&values, false).map_err(stats_err)?;
    let n = values.len() as f64;
    // Standardize with the biased moments, matching the KS computation.
    let sd = (report.variance * (n - 1.0) / n).sqrt();
    let rows: Vec<Vec<Cell>> = values
        .iter()
        .enumerate()
        .map(|(t, &z)| {
            vec![
                Cell::Int(t as i64),
                Cell::Float(z),
                Cell::Float((z - report.mean) / sd),
            ]
        })
        .collect();
    let file = write_table(dir, "clt", CLT_COLS, &rows, config.format)?;
    let summary = json!({
        "p": p,
        "trials": report.trials,
        "mean": report.mean,
        "variance": report.variance,
        "skewness": report.skewness,
        "excess_kurtosis": report.excess_kurtosis,
        "ks_vs_normal": report.ks_vs_normal,
    });
    Ok((vec![file], summary, 0))
}

const VARIANCE_COLS: Schema = &[
    ("p", ColKind::Int),
    ("trials", ColKind::Int),
    ("var_mc", ColKind::Float),
    ("var_quadrature", ColKind::Float),
    ("var_leading", ColKind::Float),
];

fn cmd_variance(config: &ExperimentConfig, inputs: &ResolvedInputs, dir: &Path) -> CmdResult {
    let p = inputs.degrees[0];
    let spec = spectrum(&inputs.symbol, p).map_err(spectrum_err)?;
    let values = statistic_trials(
        &spec,
        &inputs.phi,
        inputs.trials.expect("validated"),
        config.seed,
        config.threads,
    )?;
    let report = monte_carlo_report(&values, false).map_err(stats_err)?;
    let var_quad = variance_bipotential(&spec, &inputs.phi).map_err(stats_err)?;
    let leading = variance_leading_term(&inputs.phi).map_err(stats_err)?;
    let rows = vec![vec![
        Cell::Int(p as i64),
        Cell::Int(report.trials as i64),
        Cell::Float(report.variance),
        Cell::Float(var_quad),
        Cell::Float(leading),
    ]];
    let file = write_table(dir, "variance", VARIANCE_COLS, &rows, config.format)?;
    let summary = json!({
        "p": p,
        "trials": report.trials,
        "var_mc": report.variance,
        "var_quadrature": var_quad,
        "var_leading_over_p": leading / p as f64,
        "p_var_mc": p as f64 * report.variance,
    });
    Ok((vec![file], summary, 0))
}

const EXPECTATION_COLS: Schema = &[
    ("p", ColKind::Int),
    ("trials", ColKind::Int),
    ("exact", ColKind::Float),
    ("geometric_term", ColKind::Float),
    ("correction_term", ColKind::Float),
    ("mc_mean", ColKind::Float),
    ("mc_se", ColKind::Float),
];

fn cmd_expectation(config: &ExperimentConfig, inputs: &ResolvedInputs, dir: &Path) -> CmdResult {
    let p = inputs.degrees[0];
    let spec = spectrum(&inputs.symbol, p).map_err(spectrum_err)?;
    let exact = expectation_exact(&spec, &inputs.phi).map_err(stats_err)?;
    let values = statistic_trials(
        &spec,
        &inputs.phi,
        inputs.trials.expect("validated"),
        config.seed,
        config.threads,
    )?;
    let report = monte_carlo_report(&values, false).map_err(stats_err)?;
    let se = (report.variance / report.trials as f64).sqrt();
    let rows = vec![vec![
        Cell::Int(p as i64),
        Cell::Int(report.trials as i64),
        Cell::Float(exact.value),
        Cell::Float(exact.geometric_term),
        Cell::Float(exact.correction_term),
        Cell::Float(report.mean),
        Cell::Float(se),
    ]];
    let file = write_table(dir, "expectation", EXPECTATION_COLS, &rows, config.format)?;
    let summary = json!({
        "p": p,
        "trials": report.trials,
        "exact": exact.value,
        "mc_mean": report.mean,
        "mc_se": se,
        "gap_in_se": (report.mean - exact.value).abs() / se,
    });
    Ok((vec![file], summary, 0))
}

const HOLE_COLS: Schema = &[
    ("p", ColKind::Int),
    ("trials", ColKind::Int),
    ("holes", ColKind::Int),
    ("frequency", ColKind::Float),
];

fn cmd_hole(config: &ExperimentConfig, inputs: &ResolvedInputs, dir: &Path) -> CmdResult {
    let trials = inputs.trials.expect("validated");
    let radius = inputs.chart_radius;
    let mut rows = Vec::new();
    let mut freqs = Vec::new();
    for &p in &inputs.degrees {
        let holes = if p == 0 {
            // Constant sections never vanish.
            trials
        } else {
            let spec = spectrum(&inputs.symbol, p).map_err(spectrum_err)?;
            let hits = map_trials(trials, config.threads, |t| {
                let s = sample_section(&spec, config.seed, t as u64).map_err(sample_err)?;
                let zs = section_zeros(&s).map_err(root_err)?;
                let mut hit = zs.roots.iter().any(|r| r.norm() <= radius);
                if radius.is_infinite() && zs.zeros_at_infinity > 0 {
                    hit = true;
                }
                Ok::<bool, CliError>(hit)
            })?;
            hits.iter().filter(|&&h| !h).count()
        };
        let frequency = holes as f64 / trials as f64;
        freqs.push(frequency);
        rows.push(vec![
            Cell::Int(p as i64),
            Cell::Int(trials as i64),
            Cell::Int(holes as i64),
            Cell::Float(frequency),
        ]);
    }
    let file = write_table(dir, "hole", HOLE_COLS, &rows, config.format)?;
    let summary = json!({
        "chart_radius": radius,
        "trials": trials,
        "frequencies": freqs,
        "nonincreasing": freqs.windows(2).all(|w| w[1] <= w[0]),
    });
    Ok((vec![file], summary, 0))
}

const MASS_COLS: Schema = &[
    ("p", ColKind::Int),
    ("y", ColKind::Float),
    ("running_avg", ColKind::Float),
];

/// One mass trial per degree 1..=p with the running average; the weight
/// function is taken from --phi. Degrees are dependent on nothing but the
/// seed, so the loop stays serial.
fn cmd_mass(config: &ExperimentConfig, inputs: &ResolvedInputs, dir: &Path) -> CmdResult {
    let n_max = inputs.degrees[0];
    let report =
        mass_lln_report(&inputs.symbol, &inputs.phi, n_max, config.seed).map_err(stats_err)?;
    let rows: Vec<Vec<Cell>> = (0..n_max)
        .map(|i| {
            vec![
                Cell::Int((i + 1) as i64),
                Cell::Float(report.per_degree[i]),
                Cell::Float(report.running_average[i]),
            ]
        })
        .collect();
    let file = write_table(dir, "mass", MASS_COLS, &rows, config.format)?;
    let spec = spectrum(&inputs.symbol, n_max).map_err(spectrum_err)?;
    let moments = mass_moments(&spec, &inputs.phi).map_err(stats_err)?;
    let summary = json!({
        "n_max": n_max,
        "final_average": report.final_average,
        "limit": report.limit,
        "expectation_at_n_max": moments.expectation,
        "variance_at_n_max": moments.variance,
    });
    Ok((vec![file], summary, 0))
}

const KERNEL_NEAR_COLS: Schema = &[
    ("p", ColKind::Int),
    ("c", ColKind::Float),
    ("dist", ColKind::Float),
    ("log_n", ColKind::Float),
    ("ratio", ColKind::Float),
];

const KERNEL_FAR_COLS: Schema = &[
    ("p", ColKind::Int),
    ("dist", ColKind::Float),
    ("log_n", ColKind::Float),
    ("log_bound", ColKind::Float),
    ("ok", ColKind::Int),
];

fn cmd_kernel_check(config: &ExperimentConfig, inputs: &ResolvedInputs, dir: &Path) -> CmdResult {
    if inputs.symbol.sup() <= 0.0 {
        return Err(CliError::Precondition(
            "kernel probes need a symbol with positive sup".into(),
        ));
    }
    let report = kernel_gaussian_decay_check(
        &inputs.symbol,
        inputs.base,
        &inputs.degrees,
        &inputs.offsets,
    )
    .map_err(spectrum_err)?;
    let near_rows: Vec<Vec<Cell>> = report
        .near
        .iter()
        .map(|r| {
            vec![
                Cell::Int(r.p as i64),
                Cell::Float(r.c),
                Cell::Float(r.dist),
                Cell::Float(r.log_n),
                Cell::Float(r.ratio),
            ]
        })
        .collect();
    let far_rows: Vec<Vec<Cell>> = report
        .far
        .iter()
        .map(|r| {
            vec![
                Cell::Int(r.p as i64),
                Cell::Float(r.dist),
                Cell::Float(r.log_n),
                Cell::Float(r.log_bound),
                Cell::Int(r.ok as i64),
            ]
        })
        .collect();
    let artifacts = vec![
        write_table(
            dir,
            "kernel_near",
            KERNEL_NEAR_COLS,
            &near_rows,
            config.format,
        )?,
        write_table(dir, "kernel_far", KERNEL_FAR_COLS, &far_rows, config.format)?,
    ];
    let summary = json!({
        "degrees": inputs.degrees,
        "offsets": inputs.offsets,
        "far_all_ok": report.far.iter().all(|r| r.ok),
        "worst_near_ratio_gap": report
            .near
            .iter()
            .map(|r| (r.ratio - 1.0).abs())
            .fold(0.0f64, f64::max),
    });
    Ok((artifacts, summary, 0))
}

fn cmd_selftest(config: &ExperimentConfig, dir: &Path) -> CmdResult {
    let bin = std::env::current_exe().ok();
    let results = checks::run_all(bin.as_deref());
    checks::print_table(&results);
    let rows: Vec<serde_json::Value> = results
        .iter()
        .map(|r| {
            json!({
                "criterion": r.index,
                "name": r.name,
                "passed": r.passed,
                "supported": r.supported,
                "seconds": r.seconds,
                "detail": r.detail,
            })
        })
        .collect();
    let path = dir.join("selftest.json");
    let mut text = serde_json::to_string_pretty(&rows)
        .map_err(|e| CliError::Numerical(format!("cannot serialize selftest report: {e}")))?;
    text.push('\n');
    std::fs::write(&path, &text)
        .map_err(|e| CliError::Precondition(format!("cannot write {}: {e}", path.display())))?;
    serde_json::from_str::<serde_json::Value>(
        &std::fs::read_to_string(&path)
            .map_err(|e| CliError::Numerical(format!("cannot re-read {}: {e}", path.display())))?,
    )
    .map_err(|e| CliError::Numerical(format!("selftest report does not parse back: {e}")))?;

    let failed = results.iter().filter(|r| !r.passed).count();
    let summary = json!({
        "criteria": results.len(),
        "failed": failed,
        "format": format!("{:?}", config.format),
    });
    Ok((vec!["selftest.json".into()], summary, failed))
}
