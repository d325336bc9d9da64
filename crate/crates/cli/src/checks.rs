//! The acceptance suite: fourteen end-to-end checks over the whole stack,
//! shared by `tzl selftest` and the `acceptance` integration test.
//!
//! Each criterion is scored twice. `passed` is the check exactly as stated
//! in the project's acceptance list. `supported` is the strongest form the
//! mathematics actually backs: for three clauses the stated numbers are
//! unattainable (a sign slip in a first-order expansion, a window that the
//! converged quadrature values sit below at small degrees, and a
//! finite-degree boundary layer that floors a restricted KS distance), and
//! for those the checks pin the measured values instead so any drift still
//! fails loudly. Everywhere else `supported == passed`.

use std::path::Path;
use std::time::Instant;

use tzl_core::geometry::ChartPoint;
use tzl_core::rng::Stream;
use tzl_core::roots::{residual_check, section_zeros, ZeroSet};
use tzl_core::sampling::{kernel_gaussian_decay_check, normalized_kernel, sample_section};
use tzl_core::spectra::{
    min_eig_asymptotics, spectrum, spectrum_constant, spectrum_indicator, spectrum_power,
    spectrum_quadrature, weyl_monotonicity_check, RadialTable, Symbol, ToeplitzSpectrum,
};
use tzl_core::stats::{
    clt_report, collect_fs_radii, expectation_exact, hole_frequency, ks_vs_fs, ks_vs_fs_restricted,
    linear_statistic, linear_statistic_trials, mass_lln_report, mass_moments, monte_carlo_report,
    variance_bipotential, variance_leading_term, TestFunction,
};

// Fixed seeds. Every Monte Carlo band asserted below was measured once at
// these seeds and frozen; sampler or hash changes are meant to break them.
const SEED_EXPECTATION_BASE: u64 = 0x5eed_0001; // + p
const SEED_VARIANCE_P50: u64 = 0x5eed_0003;
const SEED_CLT: u64 = 0x5eed_0004;
const SEED_EQUIDIST_SMOOTH: u64 = 0x5eed_0005;
const SEED_EQUIDIST_DISC: u64 = 0x5eed_0006;
const SEED_HOLE: u64 = 0x5eed_0007;
const SEED_MASS: u64 = 0x5eed_0009;
const SEED_VARIANCE_P100: u64 = 0x5eed_0011;
const SEED_ROOTS_BASE: u64 = 0x5eed_0020; // + cell
const SEED_WEYL: u64 = 0xacc5_0005;

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub index: usize,
    pub name: &'static str,
    /// The check exactly as stated.
    pub passed: bool,
    /// The strongest form the mathematics backs (frozen measured values for
    /// the unattainable clauses; identical to `passed` elsewhere).
    pub supported: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = (bool, bool, String);

fn timed<F: FnOnce() -> Check>(
    index: usize,
    name: &'static str,
    budget_seconds: Option<f64>,
    f: F,
) -> CriterionResult {
    let t0 = Instant::now();
    let (mut passed, mut supported, mut detail) = f();
    let seconds = t0.elapsed().as_secs_f64();
    if let Some(budget) = budget_seconds {
        if seconds >= budget {
            passed = false;
            supported = false;
            detail.push_str(&format!("; overran the {budget:.0}s budget"));
        }
    }
    CriterionResult {
        index,
        name,
        passed,
        supported,
        detail,
        seconds,
    }
}

pub fn run_all(bin: Option<&Path>) -> Vec<CriterionResult> {
    vec![
        timed(1, "spectrum-exactness", Some(10.0), spectrum_exactness),
        timed(2, "trace-identity", None, trace_identity),
        timed(
            3,
            "power-min-eig-expansion",
            Some(1.0),
            power_min_eig_expansion,
        ),
        timed(4, "flat-min-eig-decay", Some(30.0), flat_min_eig_decay),
        timed(5, "weyl-monotonicity", None, weyl_monotonicity),
        timed(6, "kernel-gaussian-decay", Some(1.0), kernel_gaussian_decay),
        timed(
            7,
            "radial-equidistribution",
            Some(60.0),
            radial_equidistribution,
        ),
        timed(8, "number-variance", None, number_variance),
        timed(9, "clt-normality", Some(300.0), clt_normality),
        timed(10, "expectation-current", None, expectation_current),
        timed(11, "hole-monotonicity", None, hole_monotonicity),
        timed(12, "mass-lln", None, mass_lln),
        timed(13, "root-finder-integrity", None, root_finder_integrity),
        timed(14, "determinism", None, || determinism(bin)),
    ]
}

pub fn print_table(results: &[CriterionResult]) {
    let passed = results.iter().filter(|r| r.passed).count();
    println!(
        "acceptance suite: {passed}/{} criteria pass as stated",
        results.len()
    );
    for r in results {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        println!(
            "{:>2} {:<24} {verdict} [{:7.2}s] {}",
            r.index, r.name, r.seconds, r.detail
        );
    }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn closed_form_families() -> Vec<Symbol> {
    vec![
        Symbol::PowerVanish(1),
        Symbol::PowerVanish(2),
        Symbol::PowerVanish(3),
        Symbol::DiscIndicator(0.5),
        Symbol::DiscIndicator(1.0),
        Symbol::DiscIndicator(2.0),
    ]
}

/// 1: closed-form spectra match the adaptive quadrature oracle for every
/// p <= 100, with pinned small-case values.
fn spectrum_exactness() -> Check {
    let mut max_gap = 0.0f64;
    let mut worst = String::from("none");
    let mut ok = true;
    for p in 0..=100usize {
        for symbol in closed_form_families() {
            let closed = match spectrum(&symbol, p) {
                Ok(s) => s,
                Err(e) => return (false, false, format!("{symbol} p={p}: {e}")),
            };
            let oracle = match spectrum_quadrature(&symbol, p, 1e-12) {
                Ok(s) => s,
                Err(e) => return (false, false, format!("{symbol} p={p} oracle: {e}")),
            };
            // The indicator's deep binomial tail at the cap degree is the
            // one place the oracle is only good to ~1e-8.
            let tol = if matches!(symbol, Symbol::DiscIndicator(_)) && p == 100 {
                1e-8
            } else {
                1e-10
            };
            for j in 0..=p {
                let gap = rel_gap(closed.lambdas[j], oracle.lambdas[j]);
                if gap > max_gap {
                    max_gap = gap;
                    worst = format!("{symbol} p={p} j={j}");
                }
                ok &= gap <= tol;
            }
        }
    }

    let s = spectrum_indicator(1, 1.0).expect("valid symbol");
    ok &= rel_gap(s.lambdas[0], 0.75) <= 1e-14 && rel_gap(s.lambdas[1], 0.25) <= 1e-14;
    let s = spectrum_indicator(3, 1.0).expect("valid symbol");
    ok &= rel_gap(s.lambda_min(), 1.0 / 16.0) <= 1e-13;
    let s = spectrum_power(1, 1).expect("valid symbol");
    ok &= rel_gap(s.lambda_min(), 1.0 / 3.0) <= 1e-14;

    let detail = format!("max closed-vs-quadrature gap {max_gap:.2e} at {worst}");
    (ok, ok, detail)
}

/// 2: sum of eigenvalues equals (p+1) times the symbol's mean, every
/// built-in radial symbol, every p <= 200.
fn trace_identity() -> Check {
    let mut symbols = vec![
        Symbol::Constant(1.0),
        Symbol::Constant(0.7),
        Symbol::ExpInverse,
    ];
    symbols.extend(closed_form_families());
    symbols.push(Symbol::RadialTabulated(RadialTable {
        radii: vec![0.0, 0.5, 1.0, 2.0, 4.0],
        values: vec![1.0, 0.8, 0.5, 0.2, 0.1],
    }));
    let mut max_rel = 0.0f64;
    let mut worst = String::from("none");
    for symbol in &symbols {
        let mean = match symbol.integral_dv() {
            Ok(v) => v,
            Err(e) => return (false, false, format!("{symbol}: {e}")),
        };
        for p in 0..=200usize {
            let spec = match spectrum(symbol, p) {
                Ok(s) => s,
                Err(e) => return (false, false, format!("{symbol} p={p}: {e}")),
            };
            let want = (p + 1) as f64 * mean;
            let gap = rel_gap(spec.trace(), want);
            if gap > max_rel {
                max_rel = gap;
                worst = format!("{symbol} p={p}");
            }
        }
    }
    let ok = max_rel <= 1e-10;
    (
        ok,
        ok,
        format!(
            "max trace gap {max_rel:.2e} at {worst} over {} symbols",
            symbols.len()
        ),
    )
}

/// 3: the first-order expansion of the smallest eigenvalue of the
/// power-vanishing symbols. As printed, the target 1 + k(k+3)/(2p) has the
/// wrong sign: lambda_min * p^k / k! = p^k / prod_{i=2}^{k+1}(p+i) < 1 for
/// every p, and equals 1 - k(k+3)/(2p) + O(p^-2). The stated |.| <= 5/p^2
/// band therefore misses by ~k(k+3)/p everywhere; the sign-corrected band
/// (<= 60/p^2 covers the exact second-order coefficient, max 55 at k=3)
/// holds at every pair.
fn power_min_eig_expansion() -> Check {
    let factorial = [1.0f64, 1.0, 2.0, 6.0];
    let mut stated_any_pass = false;
    let mut corrected_all = true;
    let mut below_one = true;
    let mut min_excess = f64::INFINITY;
    let mut max_corrected_p2 = 0.0f64;
    for k in 1u32..=3 {
        for p in 50usize..=400 {
            let spec = match spectrum(&Symbol::PowerVanish(k), p) {
                Ok(s) => s,
                Err(e) => return (false, false, format!("power:{k} p={p}: {e}")),
            };
            let pf = p as f64;
            let scaled = spec.lambda_min() * pf.powi(k as i32) / factorial[k as usize];
            let first_order = k as f64 * (k as f64 + 3.0) / (2.0 * pf);
            let budget = 5.0 / (pf * pf);
            let stated = (scaled - (1.0 + first_order)).abs() <= budget;
            stated_any_pass |= stated;
            min_excess = min_excess.min((scaled - (1.0 + first_order)).abs() / budget);
            below_one &= scaled < 1.0;
            let corrected = (scaled - (1.0 - first_order)).abs();
            max_corrected_p2 = max_corrected_p2.max(corrected * pf * pf);
            corrected_all &= corrected <= 60.0 / (pf * pf);
        }
    }
    let passed = stated_any_pass; // false: the stated band never holds
    let supported = !stated_any_pass && below_one && corrected_all && min_excess > 20.0;
    let detail = format!(
        "scaled min eigenvalue sits below 1 at all 1053 (k,p) pairs, so the \
         1 + k(k+3)/(2p) target misses its 5/p^2 band by at least {min_excess:.0}x; \
         the sign-corrected 1 - k(k+3)/(2p) target holds with max residual*p^2 = \
         {max_corrected_p2:.1} <= 60"
    );
    (passed, supported, detail)
}

/// 4: decay of the smallest eigenvalue for the flat-at-origin symbol
/// exp(-1/|z|^2). The lower bound exp(-2 sqrt(p) - 1/sqrt(p)) <= lambda_min
/// holds at all four degrees. The converged quadrature values of
/// -log(lambda_min)/sqrt(p) are frozen below to 1e-9; they increase slowly
/// toward 2 and sit under the [1.8, 2.2] window at p = 64 and p = 100
/// (subleading log corrections), while the 2 +/- 0.35 band holds everywhere.
fn flat_min_eig_decay() -> Check {
    const FROZEN: [(usize, f64); 4] = [
        (64, 1.749_660_725_065_292_3),
        (100, 1.786_430_851_031_307_6),
        (196, 1.833_664_267_133_410_1),
        (400, 1.873_709_122_165_96),
    ];
    let degrees: Vec<usize> = FROZEN.iter().map(|(p, _)| *p).collect();
    let report = match min_eig_asymptotics(&Symbol::ExpInverse, &degrees) {
        Ok(r) => r,
        Err(e) => return (false, false, format!("{e}")),
    };
    let mut lower_ok = true;
    let mut window_ok = true;
    let mut frozen_ok = true;
    let mut wide_ok = true;
    let mut shown = Vec::new();
    for (row, (p, frozen)) in report.rows.iter().zip(FROZEN) {
        debug_assert_eq!(row.p, p);
        let pf = p as f64;
        lower_ok &= row.log_lambda_min >= -2.0 * pf.sqrt() - 1.0 / pf.sqrt();
        window_ok &= (1.8..=2.2).contains(&row.scaled);
        wide_ok &= (1.65..=2.35).contains(&row.scaled);
        frozen_ok &= (row.scaled - frozen).abs() <= 1e-9;
        shown.push(format!("p={p}: {:.6}", row.scaled));
    }
    let expected_pattern = report.rows[0].scaled < 1.8
        && report.rows[1].scaled < 1.8
        && (1.8..=2.2).contains(&report.rows[2].scaled)
        && (1.8..=2.2).contains(&report.rows[3].scaled);
    let passed = lower_ok && window_ok;
    let supported = lower_ok && frozen_ok && expected_pattern && wide_ok;
    let detail = format!(
        "-log(lambda_min)/sqrt(p): {}; lower bound holds at every degree; the \
         [1.8, 2.2] window misses at p=64 and p=100 while 2 +/- 0.35 holds, \
         values frozen to 1e-9",
        shown.join(", ")
    );
    (passed, supported, detail)
}

/// 5: 200 randomized pointwise-ordered symbol pairs; sorted spectra must
/// dominate with 1e-12 slack.
fn weyl_monotonicity() -> Check {
    let mut stream = Stream::from_seed(SEED_WEYL);
    let mut max_violation = f64::NEG_INFINITY;
    for i in 0..200 {
        let p = 2 + (stream.next_u64() % 59) as usize;
        let (lo, hi) = match stream.next_u64() % 5 {
            0 => {
                let mut r1 = 0.2 + 2.3 * stream.uniform01();
                let mut r2 = 0.2 + 2.3 * stream.uniform01();
                if r1 > r2 {
                    std::mem::swap(&mut r1, &mut r2);
                }
                (Symbol::DiscIndicator(r1), Symbol::DiscIndicator(r2))
            }
            1 => {
                let k_lo = 1 + (stream.next_u64() % 3) as u32;
                let k_hi = k_lo + 1 + (stream.next_u64() % 2) as u32;
                (Symbol::PowerVanish(k_hi), Symbol::PowerVanish(k_lo))
            }
            2 => {
                let a = stream.uniform01();
                let b = a + stream.uniform01();
                (Symbol::Constant(a), Symbol::Constant(b))
            }
            3 => {
                let k = 1 + (stream.next_u64() % 3) as u32;
                (
                    Symbol::PowerVanish(k),
                    Symbol::Constant(1.0 + stream.uniform01()),
                )
            }
            _ => (
                Symbol::ExpInverse,
                Symbol::Constant(1.0 + stream.uniform01()),
            ),
        };
        match weyl_monotonicity_check(&lo, &hi, p) {
            Ok(r) => max_violation = max_violation.max(r.max_violation),
            Err(e) => return (false, false, format!("pair {i} ({lo} <= {hi}, p={p}): {e}")),
        }
    }
    let ok = max_violation <= 1e-12;
    (
        ok,
        ok,
        format!("200 ordered pairs, max sorted-eigenvalue violation {max_violation:.2e}"),
    )
}

/// 6: for the constant symbol the normalized two-point kernel is exactly
/// (1+|w|^2)^(-p/2) against the origin; near-diagonal probes match the
/// Gaussian model within 1% at p = 400, and the far-field probe at
/// 2 sqrt(log p / p) sits below p^-2.
fn kernel_gaussian_decay() -> Check {
    let p = 400usize;
    let spec = spectrum_constant(p, 1.0);
    let origin = ChartPoint::new(0.0, 0.0);
    let mut exact_gap = 0.0f64;
    for w in [0.05, 0.2, 1.0, 3.0] {
        let kv = match normalized_kernel(&spec, origin, ChartPoint::new(w, 0.0)) {
            Ok(k) => k,
            Err(e) => return (false, false, format!("kernel at |w|={w}: {e:?}")),
        };
        let want = -(p as f64) / 2.0 * (1.0 + w * w).ln();
        exact_gap = exact_gap.max(rel_gap(kv.log_normalized, want));
    }
    let report = match kernel_gaussian_decay_check(&Symbol::Constant(1.0), origin, &[p], &[1.0]) {
        Ok(r) => r,
        Err(e) => return (false, false, format!("{e}")),
    };
    let ratio = report.near[0].ratio;
    let far = &report.far[0];
    let ok = exact_gap <= 1e-12 && (ratio - 1.0).abs() <= 0.01 && far.ok;
    let detail = format!(
        "closed-form log-kernel gap {exact_gap:.1e}; near ratio at |w|=p^(-1/2): \
         {ratio:.6}; far field log N = {:.1} <= {:.1}",
        far.log_n, far.log_bound
    );
    (ok, ok, detail)
}

fn draw_zerosets(
    spec: &ToeplitzSpectrum,
    trials: usize,
    seed: u64,
) -> Result<Vec<ZeroSet>, String> {
    (0..trials)
        .map(|t| {
            let s = sample_section(spec, seed, t as u64).map_err(|e| e.to_string())?;
            section_zeros(&s).map_err(|e| e.to_string())
        })
        .collect()
}

/// 7: 20000 zeros of the unit symbol at p = 50 follow the invariant radial
/// law (KS <= 0.02). For the disc indicator at p = 20 the zeros fit the law
/// inside the support but not globally: the global KS must exceed 0.05,
/// while the stated <= 0.03 bound for the restricted KS on [0, sqrt(pi)/4]
/// is unattainable at this degree: the exact expected fraction of zeros
/// inside that radius is 0.4055 against the limiting 0.5 (a boundary
/// depletion layer of width ~1/sqrt(p)), flooring the restricted KS near
/// 0.095. The measured value is frozen to the [0.07, 0.12] band.
fn radial_equidistribution() -> Check {
    let spec = spectrum_constant(50, 1.0);
    let smooth = match draw_zerosets(&spec, 400, SEED_EQUIDIST_SMOOTH) {
        Ok(z) => z,
        Err(e) => return (false, false, e),
    };
    let radii = collect_fs_radii(&smooth);
    let ks_smooth = match ks_vs_fs(&radii) {
        Ok(k) => k,
        Err(e) => return (false, false, e.to_string()),
    };

    let spec = match spectrum(&Symbol::DiscIndicator(1.0), 20) {
        Ok(s) => s,
        Err(e) => return (false, false, e.to_string()),
    };
    let disc = match draw_zerosets(&spec, 1000, SEED_EQUIDIST_DISC) {
        Ok(z) => z,
        Err(e) => return (false, false, e),
    };
    let radii = collect_fs_radii(&disc);
    let b = std::f64::consts::PI.sqrt() / 4.0;
    let (ks_restricted, ks_global) = match (ks_vs_fs_restricted(&radii, b), ks_vs_fs(&radii)) {
        (Ok(r), Ok(g)) => (r, g),
        _ => return (false, false, "KS computation failed".into()),
    };

    let smooth_ok = ks_smooth <= 0.02;
    let global_ok = ks_global > 0.05;
    let passed = smooth_ok && global_ok && ks_restricted <= 0.03;
    let supported = smooth_ok && global_ok && (0.07..=0.12).contains(&ks_restricted);
    let detail = format!(
        "unit symbol p=50 KS {ks_smooth:.4} <= 0.02; disc p=20 global KS \
         {ks_global:.4} > 0.05; restricted KS {ks_restricted:.4} over [0, sqrt(pi)/4] \
         floors near 0.095 at this degree (exact inside-fraction 0.4055 vs \
         limiting 0.5, depletion layer ~1/sqrt(p)), above the stated 0.03"
    );
    (passed, supported, detail)
}

/// 8: scaled Monte Carlo variance of the linear statistic matches the
/// large-p limit within 20% at p = 100, and the two-radius quadrature
/// matches the Monte Carlo variance within 10% at p = 50.
fn number_variance() -> Check {
    let phi = TestFunction::RadialBump {
        rho0: 1.0,
        amplitude: 1.0,
    };
    let leading = match variance_leading_term(&phi) {
        Ok(v) => v,
        Err(e) => return (false, false, e.to_string()),
    };

    let spec = spectrum_constant(100, 1.0);
    let values = match linear_statistic_trials(&spec, &phi, 2000, SEED_VARIANCE_P100) {
        Ok(v) => v,
        Err(e) => return (false, false, e.to_string()),
    };
    let var100 = match monte_carlo_report(&values, false) {
        Ok(r) => r.variance,
        Err(e) => return (false, false, e.to_string()),
    };
    let gap_leading = (100.0 * var100 - leading).abs() / leading;

    let spec = spectrum_constant(50, 1.0);
    let values = match linear_statistic_trials(&spec, &phi, 5000, SEED_VARIANCE_P50) {
        Ok(v) => v,
        Err(e) => return (false, false, e.to_string()),
    };
    let var50 = match monte_carlo_report(&values, false) {
        Ok(r) => r.variance,
        Err(e) => return (false, false, e.to_string()),
    };
    let quad = match variance_bipotential(&spec, &phi) {
        Ok(v) => v,
        Err(e) => return (false, false, e.to_string()),
    };
    let gap_quad = (var50 - quad).abs() / quad;

    let ok = gap_leading <= 0.20 && gap_quad <= 0.10;
    let detail = format!(
        "p*Var at p=100: {:.5} vs limit {leading:.5} (gap {:.1}%); quadrature at \
         p=50: {quad:.6} vs MC {var50:.6} (gap {:.1}%)",
        100.0 * var100,
        100.0 * gap_leading,
        100.0 * gap_quad
    );
    (ok, ok, detail)
}

/// 9: the standardized linear statistic at p = 100 over 2000 trials is
/// normal by KS, skewness, and excess kurtosis.
fn clt_normality() -> Check {
    let spec = spectrum_constant(100, 1.0);
    let phi = TestFunction::RadialBump {
        rho0: 1.0,
        amplitude: 1.0,
    };
    let r = match clt_report(&spec, &phi, 2000, SEED_CLT) {
        Ok(r) => r,
        Err(e) => return (false, false, e.to_string()),
    };
    let ok = r.ks_vs_normal <= 0.05 && r.skewness.abs() <= 0.15 && r.excess_kurtosis.abs() <= 0.3;
    let detail = format!(
        "KS {:.4} <= 0.05, skewness {:.4} (|.| <= 0.15), excess kurtosis {:.4} (|.| <= 0.3)",
        r.ks_vs_normal, r.skewness, r.excess_kurtosis
    );
    (ok, ok, detail)
}

/// 10: the exact expectation of the linear statistic against the Monte
/// Carlo mean, within 4 standard errors, on a 3 x 3 grid of symbols and
/// test functions at p in {10, 20, 50}.
fn expectation_current() -> Check {
    let symbols = [
        Symbol::Constant(1.0),
        Symbol::PowerVanish(1),
        Symbol::DiscIndicator(1.0),
    ];
    let phis = [
        TestFunction::RadialBump {
            rho0: 1.0,
            amplitude: 1.0,
        },
        TestFunction::Constant(0.7),
        TestFunction::LogProfile,
    ];
    let mut worst_se = 0.0f64;
    let mut worst = String::from("none");
    for (p, trials) in [(10usize, 3000usize), (20, 2500), (50, 1500)] {
        for symbol in &symbols {
            let spec = match spectrum(symbol, p) {
                Ok(s) => s,
                Err(e) => return (false, false, format!("{symbol} p={p}: {e}")),
            };
            let zerosets = match draw_zerosets(&spec, trials, SEED_EXPECTATION_BASE + p as u64) {
                Ok(z) => z,
                Err(e) => return (false, false, e),
            };
            for phi in &phis {
                let exact = match expectation_exact(&spec, phi) {
                    Ok(r) => r.value,
                    Err(e) => return (false, false, e.to_string()),
                };
                let values: Vec<f64> = zerosets
                    .iter()
                    .map(|zs| linear_statistic(zs, phi))
                    .collect();
                let (mean, se) = match monte_carlo_report(&values, false) {
                    Ok(r) => (r.mean, (r.variance / r.trials as f64).sqrt()),
                    // Constant test functions count every zero: one value.
                    Err(_) => (values.iter().sum::<f64>() / values.len() as f64, 0.0),
                };
                let gap = (mean - exact).abs();
                let band = 4.0 * se + 1e-9 * (1.0 + exact.abs());
                if band > 0.0 && gap / band > worst_se {
                    worst_se = gap / band;
                    worst = format!("{symbol} p={p}");
                }
                if gap > band {
                    return (
                        false,
                        false,
                        format!("{symbol} p={p}: mean {mean} vs exact {exact} (se {se})"),
                    );
                }
            }
        }
    }
    (
        true,
        true,
        format!("27 grid cells within 4 SE; tightest margin {worst_se:.2} of band at {worst}"),
    )
}

/// 11: the frequency of zero-free chart discs strictly decreases across
/// p in {5, 10, 20, 40} at 5000 trials, within the pooled binomial guard.
fn hole_monotonicity() -> Check {
    let report = match hole_frequency(
        &Symbol::Constant(1.0),
        0.3,
        &[5, 10, 20, 40],
        5000,
        SEED_HOLE,
    ) {
        Ok(r) => r,
        Err(e) => return (false, false, e.to_string()),
    };
    let freqs: Vec<f64> = report.rows.iter().map(|r| r.frequency).collect();
    let strict = freqs.windows(2).all(|w| w[1] < w[0]);
    // The guard needs resolvable frequencies at the smallest degree.
    let resolvable = report.rows[0].holes >= 10;
    let ok = report.decreasing_within_guard && strict && resolvable;
    let detail = format!(
        "hole frequencies {:?} at chart radius 0.3, strictly decreasing within \
         two pooled binomial SE",
        freqs
    );
    (ok, ok, detail)
}

/// 12: exact mass moments for the identity data, E[Y] = (p+1)/p and
/// Var[Y] = (p+1)/p^2 to 1e-12 (so p Var -> 1 in rescaled form), plus the
/// one-trial-per-degree running average landing in 1 +/- 0.05.
fn mass_lln() -> Check {
    let g = TestFunction::Constant(1.0);
    let mut max_gap = 0.0f64;
    for p in [1usize, 2, 5, 10, 50, 100, 200] {
        let spec = spectrum_constant(p, 1.0);
        let m = match mass_moments(&spec, &g) {
            Ok(m) => m,
            Err(e) => return (false, false, e.to_string()),
        };
        let pf = p as f64;
        max_gap = max_gap.max(rel_gap(m.expectation, (pf + 1.0) / pf));
        max_gap = max_gap.max(rel_gap(m.variance, (pf + 1.0) / (pf * pf)));
        max_gap = max_gap.max(rel_gap(pf * m.variance, (pf + 1.0) / pf));
    }
    let moments_ok = max_gap <= 1e-12;

    let report = match mass_lln_report(&Symbol::Constant(1.0), &g, 200, SEED_MASS) {
        Ok(r) => r,
        Err(e) => return (false, false, e.to_string()),
    };
    let limit_ok = (report.limit - 1.0).abs() <= 1e-9;
    let average_ok = (report.final_average - 1.0).abs() <= 0.05;
    let ok = moments_ok && limit_ok && average_ok;
    let detail = format!(
        "max moment gap {max_gap:.1e} over p <= 200; running average {:.4} in 1 +/- 0.05",
        report.final_average
    );
    (ok, ok, detail)
}

/// 13: across 10^4 sampled sections the zero count is conserved (p zeros on
/// the sphere) and the recomputed backward residual stays below 1e-8.
fn root_finder_integrity() -> Check {
    let symbols = [
        Symbol::Constant(1.0),
        Symbol::PowerVanish(3),
        Symbol::DiscIndicator(1.0),
        Symbol::ExpInverse,
    ];
    let degrees = [5usize, 20, 50, 100, 200];
    let per_cell = 500usize; // 4 * 5 * 500 = 10^4
    let mut max_residual = 0.0f64;
    for (si, symbol) in symbols.iter().enumerate() {
        for (di, &p) in degrees.iter().enumerate() {
            let spec = match spectrum(symbol, p) {
                Ok(s) => s,
                Err(e) => return (false, false, format!("{symbol} p={p}: {e}")),
            };
            let seed = SEED_ROOTS_BASE + (si * degrees.len() + di) as u64;
            for t in 0..per_cell {
                let s = match sample_section(&spec, seed, t as u64) {
                    Ok(s) => s,
                    Err(e) => return (false, false, format!("{symbol} p={p} t={t}: {e}")),
                };
                let zs = match section_zeros(&s) {
                    Ok(z) => z,
                    Err(e) => return (false, false, format!("{symbol} p={p} t={t}: {e}")),
                };
                if zs.total() != p {
                    return (
                        false,
                        false,
                        format!("{symbol} p={p} t={t}: {} zeros", zs.total()),
                    );
                }
                let res = match residual_check(&s.coeffs, &zs) {
                    Ok(r) => r.max(zs.max_residual),
                    Err(e) => return (false, false, format!("{symbol} p={p} t={t}: {e}")),
                };
                max_residual = max_residual.max(res);
            }
        }
    }
    let ok = max_residual <= 1e-8;
    (
        ok,
        ok,
        format!("10000 sections, zero counts conserved, max backward residual {max_residual:.1e}"),
    )
}

/// 14: rerunning any command with the same seed and --threads 1 is byte
/// identical (run.json aside, which carries wall time), and the trial pool
/// makes the outputs thread-count independent as well.
fn determinism(bin: Option<&Path>) -> Check {
    let bin = match bin {
        Some(b) => b,
        None => return (false, false, "no binary path provided".into()),
    };
    let root = std::env::temp_dir().join(format!("tzl-det-{}", std::process::id()));
    let result = determinism_inner(bin, &root);
    std::fs::remove_dir_all(&root).ok();
    result
}

fn determinism_inner(bin: &Path, root: &Path) -> Check {
    let cases: [&[&str]; 3] = [
        &[
            "histogram",
            "--symbol",
            "disc:1",
            "--p",
            "20",
            "--rn",
            "60",
            "--seed",
            "7",
            "--bins",
            "50",
        ],
        &["spectrum", "--symbol", "expinv", "--p", "40"],
        &[
            "clt", "--symbol", "const:1", "--p", "30", "--trials", "80", "--phi", "bump:1:1",
            "--seed", "11",
        ],
    ];
    for (i, case) in cases.iter().enumerate() {
        let dir_a = root.join(format!("case{i}-a"));
        let dir_b = root.join(format!("case{i}-b"));
        for (dir, threads) in [(&dir_a, "1"), (&dir_b, "1")] {
            if let Err(e) = run_command(bin, case, dir, threads) {
                return (false, false, format!("case {i}: {e}"));
            }
        }
        if let Err(e) = compare_artifacts(&dir_a, &dir_b) {
            return (
                false,
                false,
                format!("case {i} ({}) reruns differ: {e}", case[0]),
            );
        }
        // Stronger than required: the index-ordered trial pool makes any
        // thread count match the serial bytes.
        let dir_c = root.join(format!("case{i}-c"));
        if let Err(e) = run_command(bin, case, &dir_c, "3") {
            return (false, false, format!("case {i} threads=3: {e}"));
        }
        if let Err(e) = compare_artifacts(&dir_a, &dir_c) {
            return (
                false,
                false,
                format!("case {i} ({}) thread counts differ: {e}", case[0]),
            );
        }
    }
    (
        true,
        true,
        "histogram, spectrum, and clt reruns byte-identical; threads 3 matches threads 1".into(),
    )
}

fn run_command(bin: &Path, args: &[&str], dir: &Path, threads: &str) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let output = std::process::Command::new(bin)
        .args(args)
        .arg("--threads")
        .arg(threads)
        .arg("--out")
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if !output.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            output.status.code(),
            String::from_utf8_lossy(&output.stderr)
        ));
    }
    Ok(())
}

/// Byte equality of every artifact except run.json.
fn compare_artifacts(a: &Path, b: &Path) -> Result<(), String> {
    let list = |dir: &Path| -> Result<Vec<String>, String> {
        let mut names: Vec<String> = std::fs::read_dir(dir)
            .map_err(|e| e.to_string())?
            .filter_map(|e| e.ok())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .filter(|n| n != "run.json")
            .collect();
        names.sort();
        Ok(names)
    };
    let names_a = list(a)?;
    let names_b = list(b)?;
    if names_a != names_b {
        return Err(format!("file sets differ: {names_a:?} vs {names_b:?}"));
    }
    for name in &names_a {
        let bytes_a = std::fs::read(a.join(name)).map_err(|e| e.to_string())?;
        let bytes_b = std::fs::read(b.join(name)).map_err(|e| e.to_string())?;
        if bytes_a != bytes_b {
            return Err(format!("{name} differs"));
        }
    }
    Ok(())
}
