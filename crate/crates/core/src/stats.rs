//! Statistics of zero divisors: linear statistics with exact expectation
//! and variance oracles, CLT reports, radial histograms against the
//! invariant profile, hole frequencies, and the mass distribution.

use alloc::vec::Vec;

use crate::basis;
use crate::geometry::{self, ChartPoint};
use crate::math;
use crate::quad::{Domain, QuadratureSpec, Rule};
use crate::roots::{section_zeros, RootError, ZeroSet};
use crate::sampling::{sample_section, SampleError};
use crate::spectra::{spectrum, SpectrumError, Symbol, ToeplitzSpectrum};

/// Radial test functions φ(ρ) paired with the curvature-normalized
/// Laplacian L(φ) = (π/2)(1+ρ²)²(φ″ + φ′/ρ), the density of i∂∂̄φ against
/// the volume form.
#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    /// φ = A(1 − (ρ/ρ₀)²)⁴ for ρ < ρ₀, else 0. C³ across the boundary.
    RadialBump { rho0: f64, amplitude: f64 },
    /// φ = ln(1+ρ²): L ≡ 2π identically. Chart-local derivative test only;
    /// not smooth at the pole, so global integral identities do not apply.
    LogProfile,
    /// φ ≡ c: L ≡ 0.
    Constant(f64),
    /// Uniformly spaced radial samples of a C² function; derivatives by
    /// five-point stencils at the nodes, linear interpolation between.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub enum StatsError {
    InvalidTestFunction(&'static str),
    /// Quadrature self-check disagreement; carries the achieved relative gap.
    QuadratureFailed {
        achieved: f64,
    },
    /// All Monte Carlo values equal: nothing to standardize.
    DegenerateVariance,
    EmptyInput,
    Sample(SampleError),
    Root(RootError),
    Spectrum(SpectrumError),
}

impl core::fmt::Display for StatsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            StatsError::InvalidTestFunction(m) => write!(f, "invalid test function: {m}"),
            StatsError::QuadratureFailed { achieved } => {
                write!(f, "quadrature self-check failed (achieved {achieved:e})")
            }
            StatsError::DegenerateVariance => write!(f, "degenerate Monte Carlo variance"),
            StatsError::EmptyInput => write!(f, "empty input"),
            StatsError::Sample(e) => write!(f, "{e}"),
            StatsError::Root(e) => write!(f, "{e}"),
            StatsError::Spectrum(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for StatsError {}

impl From<SampleError> for StatsError {
    fn from(e: SampleError) -> Self {
        StatsError::Sample(e)
    }
}
impl From<RootError> for StatsError {
    fn from(e: RootError) -> Self {
        StatsError::Root(e)
    }
}
impl From<SpectrumError> for StatsError {
    fn from(e: SpectrumError) -> Self {
        StatsError::Spectrum(e)
    }
}

impl TestFunction {
    pub fn validate(&self) -> Result<(), StatsError> {
        match self {
            TestFunction::RadialBump { rho0, amplitude } => {
                if !(rho0.is_finite() && *rho0 > 0.0 && amplitude.is_finite()) {
                    return Err(StatsError::InvalidTestFunction("bump needs rho0 > 0"));
                }
            }
            TestFunction::LogProfile | TestFunction::Constant(_) => {}
            TestFunction::Tabulated { radii, values } => {
                if radii.len() < 5 || radii.len() != values.len() {
                    return Err(StatsError::InvalidTestFunction(
                        "tabulated needs ≥ 5 matching samples",
                    ));
                }
                let h = radii[1] - radii[0];
                if h <= 0.0 {
                    return Err(StatsError::InvalidTestFunction("radii must increase"));
                }
                for w in radii.windows(2) {
                    if math::abs(w[1] - w[0] - h) > 1e-9 * (1.0 + h) {
                        return Err(StatsError::InvalidTestFunction("radii must be uniform"));
                    }
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(StatsError::InvalidTestFunction("non-finite sample"));
                }
            }
        }
        Ok(())
    }

    /// φ(ρ). Beyond its last node a table continues with its final value.
    pub fn eval(&self, rho: f64) -> f64 {
        debug_assert!(rho >= 0.0);
        match self {
            TestFunction::RadialBump { rho0, amplitude } => {
                let u = rho / rho0;
                if u >= 1.0 {
                    0.0
                } else {
                    let s = 1.0 - u * u;
                    amplitude * s * s * s * s
                }
            }
            TestFunction::LogProfile => math::ln_1p(rho * rho),
            TestFunction::Constant(c) => *c,
            TestFunction::Tabulated { radii, values } => interp_table(radii, values, rho),
        }
    }

    /// Value at the pole of the chart; the compactly supported variants
    /// vanish there.
    pub fn eval_at_infinity(&self) -> f64 {
        match self {
            TestFunction::RadialBump { .. } => 0.0,
            TestFunction::Constant(c) => *c,
            // Unbounded at the pole; callers must keep divisors finite.
            TestFunction::LogProfile => f64::INFINITY,
            TestFunction::Tabulated { values, .. } => *values.last().unwrap(),
        }
    }

    /// Chart radius beyond which both φ and L(φ) vanish, when one exists.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            TestFunction::RadialBump { rho0, .. } => Some(*rho0),
            TestFunction::Constant(_) | TestFunction::LogProfile => None,
            TestFunction::Tabulated { radii, .. } => Some(*radii.last().unwrap()),
        }
    }

    /// L(φ)(ρ) = (π/2)(1+ρ²)²(φ″ + φ′/ρ), the ρ → 0 limit (π)(φ″(0))·…
    /// folded analytically into each closed form.
    pub fn l_of_phi(&self, rho: f64) -> f64 {
        debug_assert!(rho >= 0.0);
        match self {
            TestFunction::Constant(_) => 0.0,
            TestFunction::RadialBump { rho0, amplitude } => {
                let u = rho / rho0;
                if u >= 1.0 {
                    return 0.0;
                }
                // φ″ + φ′/ρ = −(16A/ρ₀²)(1−u²)²(1−4u²), finite at ρ = 0.
                let s = 1.0 - u * u;
                let radial = -16.0 * amplitude / (rho0 * rho0) * s * s * (1.0 - 4.0 * u * u);
                let g = 1.0 + rho * rho;
                math::PI / 2.0 * g * g * radial
            }
            TestFunction::LogProfile => {
                // φ″ + φ′/ρ = 4/(1+ρ²)², so the curvature factor cancels.
                let g = 1.0 + rho * rho;
                math::PI / 2.0 * g * g * (4.0 / (g * g))
            }
            TestFunction::Tabulated { radii, values } => {
                let h = radii[1] - radii[0];
                let n = radii.len();
                // Five-point derivatives at the nodes, then linear
                // interpolation of L itself.
                let node_l = |i: usize| -> f64 {
                    let i = i.clamp(2, n - 3);
                    let f = |k: usize| values[k];
                    let d1 = (-f(i + 2) + 8.0 * f(i + 1) - 8.0 * f(i - 1) + f(i - 2)) / (12.0 * h);
                    let d2 = (-f(i + 2) + 16.0 * f(i + 1) - 30.0 * f(i) + 16.0 * f(i - 1)
                        - f(i - 2))
                        / (12.0 * h * h);
                    let r = radii[i];
                    let radial = if r == 0.0 { 2.0 * d2 } else { d2 + d1 / r };
                    let g = 1.0 + r * r;
                    math::PI / 2.0 * g * g * radial
                };
                if rho <= radii[0] {
                    return node_l(0);
                }
                if rho >= radii[n - 1] {
                    return 0.0;
                }
                let x = (rho - radii[0]) / h;
                let i = (math::floor(x) as usize).min(n - 2);
                let frac = x - i as f64;
                node_l(i) * (1.0 - frac) + node_l(i + 1) * frac
            }
        }
    }
}

fn interp_table(radii: &[f64], values: &[f64], rho: f64) -> f64 {
    let n = radii.len();
    if rho <= radii[0] {
        return values[0];
    }
    if rho >= radii[n - 1] {
        return values[n - 1];
    }
    let h = radii[1] - radii[0];
    let x = (rho - radii[0]) / h;
    let i = (math::floor(x) as usize).min(n - 2);
    let frac = x - i as f64;
    values[i] * (1.0 - frac) + values[i + 1] * frac
}

/// Σ φ(zero) over the divisor. Zeros at the pole contribute φ(∞), which is
/// zero for every compactly supported φ.
pub fn linear_statistic(zeros: &ZeroSet, phi: &TestFunction) -> f64 {
    let mut acc = math::KahanSum::new();
    for r in &zeros.roots {
        acc.add(phi.eval(r.norm()));
    }
    if zeros.zeros_at_infinity > 0 {
        let at_inf = phi.eval_at_infinity();
        debug_assert!(
            at_inf.is_finite(),
            "divisor reaches the pole of an unbounded φ"
        );
        acc.add(zeros.zeros_at_infinity as f64 * at_inf);
    }
    acc.value()
}

/// Map u ∈ [0,1) to the chart radius with Vol(𝔻(0,ρ)) = u.
fn rho_of_u(u: f64) -> f64 {
    math::sqrt(u / (1.0 - u))
}

fn integrate_dv<F: Fn(f64) -> f64>(f: F, u_max: f64, rel_tol: f64) -> Result<f64, StatsError> {
    let spec = QuadratureSpec {
        rule: Rule::CompositeAdaptive {
            rel_tol,
            max_depth: 60,
        },
        domain: Domain::Interval { a: 0.0, b: u_max },
        breakpoints: Vec::new(),
    };
    let g = |u: f64| f(rho_of_u(u.min(1.0 - 1e-16)));
    let r = crate::quad::Quadrature::new(spec).integrate(&g);
    if !r.converged {
        return Err(StatsError::QuadratureFailed {
            achieved: r.achieved_tol,
        });
    }
    Ok(r.value)
}

/// Breakdown of the expectation of a linear statistic: the equidistribution
/// term p·∫φ dV and the spectral correction (1/2π)∫ ln T²(z,z)·L(φ) dV.
#[derive(Clone, Debug)]
pub struct ExpectationReport {
    pub p: usize,
    pub geometric_term: f64,
    pub correction_term: f64,
    pub value: f64,
}

/// Exact E[Z_φ] for a radial symbol and radial φ by one-dimensional
/// quadrature in the volume coordinate.
///
/// The correction term pairs log T²(z,z) with the curvature of φ. On the
/// closed surface that curvature must have zero total mass; profiles that
/// grow like log at the pole carry the balance as a point mass there
/// (∫L(φ) dV = 2π for the log profile), so the pairing picks up
/// −(∫L(φ)dV/2π)·log T²(∞). Compactly supported φ have ∫L(φ) dV = 0 and
/// the atom vanishes.
pub fn expectation_exact(
    spec: &ToeplitzSpectrum,
    phi: &TestFunction,
) -> Result<ExpectationReport, StatsError> {
    phi.validate()?;
    let u_max = match phi.support_radius() {
        Some(r) => r * r / (1.0 + r * r),
        None => 1.0,
    };
    let phi_int = integrate_dv(|rho| phi.eval(rho), u_max, 1e-11)?;
    let bulk = integrate_dv(
        |rho| {
            let l = phi.l_of_phi(rho);
            if l == 0.0 {
                0.0
            } else {
                crate::sampling::t2_log_diag(spec, ChartPoint::new(rho, 0.0)) * l
            }
        },
        u_max,
        1e-10,
    )? / (2.0 * math::PI);
    let l_int = integrate_dv(|rho| phi.l_of_phi(rho), u_max, 1e-10)?;
    let atom =
        l_int / (2.0 * math::PI) * crate::sampling::t2_log_diag(spec, ChartPoint::infinity());
    let corr = bulk - atom;
    let geometric = spec.p as f64 * phi_int;
    Ok(ExpectationReport {
        p: spec.p,
        geometric_term: geometric,
        correction_term: corr,
        value: geometric + corr,
    })
}

/// Variance bipotential G̃(t) = Σ_{j≥1} t^{2j}/(4π²j²) = Li₂(t²)/(4π²),
/// with G̃(1) = ζ(2)/(4π²) = 1/24.
pub fn bipotential(t: f64) -> f64 {
    debug_assert!((-1e-12..=1.0 + 1e-12).contains(&t));
    let t = t.clamp(0.0, 1.0);
    math::li2(t * t) / (4.0 * math::PI * math::PI)
}

/// Large-p limit p·Var[Z_φ] → ζ(3)/(4π²)·∫|L(φ)|² dV.
pub fn variance_leading_term(phi: &TestFunction) -> Result<f64, StatsError> {
    phi.validate()?;
    let u_max = match phi.support_radius() {
        Some(r) => r * r / (1.0 + r * r),
        None => return Err(StatsError::InvalidTestFunction("needs compact support")),
    };
    let l2 = integrate_dv(
        |rho| {
            let l = phi.l_of_phi(rho);
            l * l
        },
        u_max,
        1e-11,
    )?;
    Ok(math::zeta3() / (4.0 * math::PI * math::PI) * l2)
}

/// ln N(ρ1, ρ2, Δθ) evaluator for one radial pair, amortizing everything
/// Δθ-independent. Holds per-mode magnitudes scaled so the largest is 1.
struct PairKernel {
    a: Vec<f64>,
    log_shift: f64,
}

impl PairKernel {
    fn new(spec: &ToeplitzSpectrum, rho1: f64, rho2: f64, diag1: f64, diag2: f64) -> Self {
        let p = spec.p;
        let log_r = math::ln(rho1 * rho2);
        let mut logs = Vec::with_capacity(p + 1);
        let mut m = f64::NEG_INFINITY;
        for j in 0..=p {
            let l = if spec.log_lambdas[j] == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                2.0 * spec.log_lambdas[j] + 2.0 * basis::ln_norm_coeff(p, j) + j as f64 * log_r
            };
            m = m.max(l);
            logs.push(l);
        }
        let a = logs
            .iter()
            .map(|&l| {
                if l == f64::NEG_INFINITY {
                    0.0
                } else {
                    math::exp(l - m)
                }
            })
            .collect();
        let half_p = p as f64 / 2.0;
        let log_shift = m
            - half_p * (math::ln_1p(rho1 * rho1) + math::ln_1p(rho2 * rho2))
            - 0.5 * (diag1 + diag2);
        PairKernel { a, log_shift }
    }

    /// N at relative angle Δθ, via phase-rotation recurrence over modes.
    fn normalized(&self, cos_d: f64, sin_d: f64) -> f64 {
        let mut re = 0.0f64;
        let mut im = 0.0f64;
        let mut pr = 1.0f64;
        let mut pi = 0.0f64;
        for &aj in &self.a {
            re += aj * pr;
            im += aj * pi;
            let nr = pr * cos_d - pi * sin_d;
            pi = pr * sin_d + pi * cos_d;
            pr = nr;
        }
        let mag = math::sqrt(re * re + im * im);
        if mag == 0.0 {
            return 0.0;
        }
        math::exp(self.log_shift + math::ln(mag)).min(1.0)
    }
}

/// Composite Gauss–Legendre nodes and weights for ∫₀^{ρmax} · 2ρ(1+ρ²)⁻² dρ
/// (the radial part of the volume form), panel width tied to the 1/√p
/// near-diagonal kernel scale.
fn radial_dv_nodes(rho_max: f64, p: usize, extra: usize) -> (Vec<f64>, Vec<f64>) {
    let panels = (8 + extra).max(math::sqrt(p as f64) as usize + 1);
    let gl = crate::quad::GaussLegendre::new(16);
    let mut nodes = Vec::with_capacity(panels * 16);
    let mut weights = Vec::with_capacity(panels * 16);
    for k in 0..panels {
        let a = rho_max * k as f64 / panels as f64;
        let b = rho_max * (k + 1) as f64 / panels as f64;
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for i in 0..16 {
            let (x, w) = gl.node(i);
            let rho = mid + half * x;
            let g = 1.0 + rho * rho;
            nodes.push(rho);
            weights.push(w * half * 2.0 * rho / (g * g));
        }
    }
    (nodes, weights)
}

fn variance_pass(
    spec: &ToeplitzSpectrum,
    phi: &TestFunction,
    rho_max: f64,
    extra_panels: usize,
    n_angle: usize,
) -> f64 {
    let (nodes, weights) = radial_dv_nodes(rho_max, spec.p, extra_panels);
    let n = nodes.len();
    let l_vals: Vec<f64> = nodes.iter().map(|&r| phi.l_of_phi(r)).collect();
    let diags: Vec<f64> = nodes
        .iter()
        .map(|&r| crate::sampling::t2_log_diag(spec, ChartPoint::new(r, 0.0)))
        .collect();
    let dtheta = 2.0 * math::PI / n_angle as f64;
    let cos_d = math::cos(dtheta);
    let sin_d = math::sin(dtheta);
    let constant = matches!(spec.symbol, Symbol::Constant(_));
    let mut total = math::KahanSum::new();
    for i in 0..n {
        if l_vals[i] == 0.0 {
            continue;
        }
        for k in i..n {
            if l_vals[k] == 0.0 {
                continue;
            }
            // Angular mean of G̃(N) at this radial pair.
            let mut ang = math::KahanSum::new();
            if constant {
                // N = |1 + ρ1ρ2 e^{iΔ}|^p / ((1+ρ1²)(1+ρ2²))^{p/2}: the
                // eigenvalue scale cancels in the normalization.
                let rr = nodes[i] * nodes[k];
                let half_p = spec.p as f64 / 2.0;
                let log_den =
                    half_p * (math::ln_1p(nodes[i] * nodes[i]) + math::ln_1p(nodes[k] * nodes[k]));
                let mut c = 1.0f64;
                let mut s = 0.0f64;
                for _ in 0..n_angle {
                    let m2 = 1.0 + 2.0 * rr * c + rr * rr;
                    let n_val = math::exp(half_p * math::ln(m2) - log_den).min(1.0);
                    ang.add(bipotential(n_val));
                    let nc = c * cos_d - s * sin_d;
                    s = c * sin_d + s * cos_d;
                    c = nc;
                }
            } else {
                let pk = PairKernel::new(spec, nodes[i], nodes[k], diags[i], diags[k]);
                let mut c = 1.0f64;
                let mut s = 0.0f64;
                for _ in 0..n_angle {
                    ang.add(bipotential(pk.normalized(c, s)));
                    let nc = c * cos_d - s * sin_d;
                    s = c * sin_d + s * cos_d;
                    c = nc;
                }
            }
            let sym = if k == i { 1.0 } else { 2.0 };
            total.add(
                sym * weights[i] * weights[k] * l_vals[i] * l_vals[k] * ang.value()
                    / n_angle as f64,
            );
        }
    }
    total.value()
}

/// Var[Z_φ] = ∫∫ L(φ)(z) L(φ)(w) G̃(N(z,w)) dV(z) dV(w) by tensor
/// quadrature (two radii × relative angle), validated by a refined pass.
pub fn variance_bipotential(
    spec: &ToeplitzSpectrum,
    phi: &TestFunction,
) -> Result<f64, StatsError> {
    phi.validate()?;
    if !spec.symbol.is_radial() {
        return Err(StatsError::Spectrum(SpectrumError::NonRadial));
    }
    let rho_max = phi
        .support_radius()
        .ok_or(StatsError::InvalidTestFunction("needs compact support"))?;
    let n_angle = (32 * (math::sqrt(spec.p as f64) as usize + 1)).clamp(96, 512);
    let coarse = variance_pass(spec, phi, rho_max, 0, n_angle);
    let fine = variance_pass(spec, phi, rho_max, 4, n_angle + n_angle / 2);
    let gap = math::abs(fine - coarse) / math::abs(fine).max(1e-300);
    if gap > 5e-3 {
        return Err(StatsError::QuadratureFailed { achieved: gap });
    }
    Ok(fine)
}

/// Monte Carlo summary of a scalar statistic.
#[derive(Clone, Debug)]
pub struct MonteCarloReport {
    pub trials: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub ks_vs_normal: f64,
    pub per_trial: Option<Vec<f64>>,
}

/// Moments and the KS distance of the standardized sample against N(0,1).
pub fn monte_carlo_report(values: &[f64], keep: bool) -> Result<MonteCarloReport, StatsError> {
    let n = values.len();
    if n < 2 {
        return Err(StatsError::EmptyInput);
    }
    let mean = math::pairwise_sum(values) / n as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let m2 = math::pairwise_sum(&centered.iter().map(|c| c * c).collect::<Vec<_>>()) / n as f64;
    if m2 == 0.0 {
        return Err(StatsError::DegenerateVariance);
    }
    let m3 = math::pairwise_sum(&centered.iter().map(|c| c * c * c).collect::<Vec<_>>()) / n as f64;
    let m4 =
        math::pairwise_sum(&centered.iter().map(|c| c * c * c * c).collect::<Vec<_>>()) / n as f64;
    let sd = math::sqrt(m2);
    let mut standardized: Vec<f64> = centered.iter().map(|c| c / sd).collect();
    standardized.sort_by(f64::total_cmp);
    let mut ks = 0.0f64;
    for (i, &x) in standardized.iter().enumerate() {
        let cdf = math::normal_cdf(x);
        ks = ks.max(math::abs(cdf - i as f64 / n as f64));
        ks = ks.max(math::abs((i + 1) as f64 / n as f64 - cdf));
    }
    Ok(MonteCarloReport {
        trials: n,
        mean,
        variance: m2 * n as f64 / (n as f64 - 1.0),
        skewness: m3 / (sd * sd * sd),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
        ks_vs_normal: ks,
        per_trial: if keep { Some(standardized) } else { None },
    })
}

/// Sample Z_φ over independent trials and report its standardized law.
pub fn clt_report(
    spec: &ToeplitzSpectrum,
    phi: &TestFunction,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloReport, StatsError> {
    let values = linear_statistic_trials(spec, phi, trials, seed)?;
    monte_carlo_report(&values, false)
}

/// Per-trial values of Z_φ, trial index t drawing stream (seed, t).
pub fn linear_statistic_trials(
    spec: &ToeplitzSpectrum,
    phi: &TestFunction,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>, StatsError> {
    phi.validate()?;
    let mut out = Vec::with_capacity(trials);
    for t in 0..trials {
        let s = sample_section(spec, seed, t as u64)?;
        let zs = section_zeros(&s)?;
        out.push(linear_statistic(&zs, phi));
    }
    Ok(out)
}

/// Histogram of geodesic radii over [0, √π/2] with the limiting profile at
/// bin midpoints.
#[derive(Clone, Debug)]
pub struct FsHistogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Normalized to unit mass: counts / (total · bin width).
    pub density: Vec<f64>,
    pub psi_mid: Vec<f64>,
    pub total: u64,
}

/// Geodesic radii of a batch of divisors, pole zeros included at √π/2.
pub fn collect_fs_radii(zerosets: &[ZeroSet]) -> Vec<f64> {
    let mut out = Vec::new();
    for zs in zerosets {
        for r in &zs.roots {
            out.push(geometry::fs_norm(ChartPoint::from_complex(*r)));
        }
        for _ in 0..zs.zeros_at_infinity {
            out.push(geometry::MAX_RADIUS);
        }
    }
    out
}

pub fn fs_histogram(radii: &[f64], bins: usize) -> Result<FsHistogram, StatsError> {
    if radii.is_empty() || bins == 0 {
        return Err(StatsError::EmptyInput);
    }
    let width = geometry::MAX_RADIUS / bins as f64;
    let mut counts = alloc::vec![0u64; bins];
    for &r in radii {
        let idx = ((r / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let total = radii.len() as u64;
    let density: Vec<f64> = counts
        .iter()
        .map(|&c| c as f64 / (total as f64 * width))
        .collect();
    let mut bin_edges = Vec::with_capacity(bins + 1);
    for i in 0..=bins {
        bin_edges.push(i as f64 * width);
    }
    let psi_mid: Vec<f64> = (0..bins)
        .map(|i| geometry::fs_density((i as f64 + 0.5) * width).unwrap())
        .collect();
    Ok(FsHistogram {
        bin_edges,
        counts,
        density,
        psi_mid,
        total,
    })
}

/// KS distance of the radii against the invariant CDF Ψ(r) = sin²(√π r).
pub fn ks_vs_fs(radii: &[f64]) -> Result<f64, StatsError> {
    ks_vs_fs_restricted(radii, geometry::MAX_RADIUS)
}

/// sup_{r ≤ b} |F̂(r) − Ψ(r)| with the global empirical CDF: measures how
/// well the profile fits inside [0, b] at its own absolute height.
pub fn ks_vs_fs_restricted(radii: &[f64], b: f64) -> Result<f64, StatsError> {
    if radii.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let mut sorted: Vec<f64> = radii
        .iter()
        .map(|&r| r.clamp(0.0, geometry::MAX_RADIUS))
        .collect();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut ks = 0.0f64;
    let mut below = 0usize;
    for (i, &r) in sorted.iter().enumerate() {
        if r > b {
            break;
        }
        below = i + 1;
        let cdf = geometry::fs_cdf(r).map_err(|_| StatsError::EmptyInput)?;
        ks = ks.max(math::abs(cdf - i as f64 / n));
        ks = ks.max(math::abs((i + 1) as f64 / n - cdf));
    }
    // The endpoint itself: F̂(b) against Ψ(b).
    let cdf_b =
        geometry::fs_cdf(b.min(geometry::MAX_RADIUS)).map_err(|_| StatsError::EmptyInput)?;
    ks = ks.max(math::abs(below as f64 / n - cdf_b));
    Ok(ks)
}

#[derive(Clone, Debug)]
pub struct HoleRow {
    pub p: usize,
    pub trials: usize,
    pub holes: usize,
    pub frequency: f64,
}

#[derive(Clone, Debug)]
pub struct HoleReport {
    pub chart_radius: f64,
    pub rows: Vec<HoleRow>,
    /// Each successive frequency drops, allowing two pooled binomial
    /// standard errors of slack.
    pub decreasing_within_guard: bool,
}

/// Empirical probability that the divisor misses the chart disc of the
/// given radius (the whole sphere when the radius is infinite).
pub fn hole_frequency(
    symbol: &Symbol,
    chart_radius: f64,
    p_list: &[usize],
    trials: usize,
    seed: u64,
) -> Result<HoleReport, StatsError> {
    let mut rows = Vec::with_capacity(p_list.len());
    for &p in p_list {
        let holes = if p == 0 {
            // Constant sections never vanish.
            trials
        } else {
            let spec = spectrum(symbol, p)?;
            let mut holes = 0usize;
            for t in 0..trials {
                let s = sample_section(&spec, seed, t as u64)?;
                let zs = section_zeros(&s)?;
                let mut hit = zs.roots.iter().any(|r| r.norm() <= chart_radius);
                if chart_radius.is_infinite() && zs.zeros_at_infinity > 0 {
                    hit = true;
                }
                if !hit {
                    holes += 1;
                }
            }
            holes
        };
        rows.push(HoleRow {
            p,
            trials,
            holes,
            frequency: holes as f64 / trials as f64,
        });
    }
    let mut ok = true;
    for w in rows.windows(2) {
        let (f1, f2) = (w[0].frequency, w[1].frequency);
        let n = trials as f64;
        let se = math::sqrt((f1 * (1.0 - f1) + f2 * (1.0 - f2)) / n);
        if f2 >= f1 + 2.0 * se.max(1.0 / n) {
            ok = false;
        }
    }
    Ok(HoleReport {
        chart_radius,
        rows,
        decreasing_within_guard: ok,
    })
}

/// Y = p⁻¹ ∫ g·|𝑺|²_{h_p} dV for one sample. The angular integral of the
/// squared polynomial is exactly Σ_j |c_j|² t^j by orthogonality, leaving a
/// one-dimensional integral in the volume coordinate, taken in the log
/// domain so rescaled deep-tail coefficients cannot overflow.
pub fn mass_statistic(
    sample: &crate::sampling::SectionSample,
    g: &TestFunction,
) -> Result<f64, StatsError> {
    g.validate()?;
    let p = sample.p;
    let log_c2: Vec<f64> = sample
        .coeffs
        .iter()
        .map(|c| {
            let n2 = c.norm_sqr();
            if n2 == 0.0 {
                f64::NEG_INFINITY
            } else {
                math::ln(n2)
            }
        })
        .collect();
    let unscale = -2.0 * sample.scale_exponent as f64 * math::LN_2;
    let term_log = |j: usize, u: f64, lu: f64, l1u: f64| -> f64 {
        if log_c2[j] == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else if u == 0.0 {
            if j == 0 {
                log_c2[0]
            } else {
                f64::NEG_INFINITY
            }
        } else if u == 1.0 {
            if j == p {
                log_c2[p]
            } else {
                f64::NEG_INFINITY
            }
        } else {
            log_c2[j] + j as f64 * lu + (p - j) as f64 * l1u
        }
    };
    let integrand = |u: f64| {
        let gv = g.eval(rho_of_u(u.min(1.0 - 1e-16)));
        if gv == 0.0 {
            return 0.0;
        }
        let (lu, l1u) = (math::ln(u), math::ln_1p(-u));
        let mut m = f64::NEG_INFINITY;
        for j in 0..=p {
            m = m.max(term_log(j, u, lu, l1u));
        }
        if m == f64::NEG_INFINITY {
            return 0.0;
        }
        let mut acc = math::KahanSum::new();
        for j in 0..=p {
            let l = term_log(j, u, lu, l1u);
            if l > f64::NEG_INFINITY {
                acc.add(math::exp(l - m));
            }
        }
        gv * math::exp(m + unscale + math::ln(acc.value()))
    };
    let spec = QuadratureSpec {
        rule: Rule::CompositeAdaptive {
            rel_tol: 1e-11,
            max_depth: 60,
        },
        domain: Domain::unit_interval(),
        breakpoints: Vec::new(),
    };
    let r = crate::quad::Quadrature::new(spec).integrate(&integrand);
    if !r.converged {
        return Err(StatsError::QuadratureFailed {
            achieved: r.achieved_tol,
        });
    }
    Ok(r.value / p as f64)
}

/// Mode weights m_j(g) = (p+1)C(p,j)∫ g·u^j(1−u)^{p−j} du, the same Bernstein
/// averages that define a spectrum with symbol g.
pub fn mass_mode_weights(g: &TestFunction, p: usize) -> Result<Vec<f64>, StatsError> {
    g.validate()?;
    let mut out = Vec::with_capacity(p + 1);
    for j in 0..=p {
        let ln_pref = math::ln(p as f64 + 1.0) + math::ln_binomial(p, j);
        let integrand = |u: f64| {
            let gv = g.eval(rho_of_u(u.min(1.0 - 1e-16)));
            if gv == 0.0 {
                return 0.0;
            }
            let log_w = if u == 0.0 {
                if j == 0 {
                    0.0
                } else {
                    return 0.0;
                }
            } else if u == 1.0 {
                if j == p {
                    0.0
                } else {
                    return 0.0;
                }
            } else {
                j as f64 * math::ln(u) + (p - j) as f64 * math::ln_1p(-u)
            };
            gv * math::exp(ln_pref + log_w)
        };
        let spec = QuadratureSpec {
            domain: Domain::unit_interval(),
            rule: Rule::CompositeAdaptive {
                rel_tol: 1e-12,
                max_depth: 60,
            },
            breakpoints: Vec::new(),
        };
        let r = crate::quad::Quadrature::new(spec).integrate(&integrand);
        if !r.converged {
            return Err(StatsError::QuadratureFailed {
                achieved: r.achieved_tol,
            });
        }
        out.push(r.value);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct MassMoments {
    pub expectation: f64,
    pub variance: f64,
}

/// Exact moments of Y from the diagonal representation:
/// E[Y] = p⁻¹ Σ λ_j² m_j(g), Var[Y] = p⁻² Σ λ_j⁴ m_j(g)².
pub fn mass_moments(spec: &ToeplitzSpectrum, g: &TestFunction) -> Result<MassMoments, StatsError> {
    let m = mass_mode_weights(g, spec.p)?;
    let mut e = math::KahanSum::new();
    let mut v = math::KahanSum::new();
    for j in 0..=spec.p {
        let l2 = spec.lambdas[j] * spec.lambdas[j];
        e.add(l2 * m[j]);
        v.add(l2 * l2 * m[j] * m[j]);
    }
    let p = spec.p as f64;
    Ok(MassMoments {
        expectation: e.value() / p,
        variance: v.value() / (p * p),
    })
}

#[derive(Clone, Debug)]
pub struct MassLlnReport {
    pub n_max: usize,
    pub per_degree: Vec<f64>,
    pub running_average: Vec<f64>,
    pub final_average: f64,
    /// ∫ g f² dV, the law-of-large-numbers limit.
    pub limit: f64,
}

/// One trial of Y at each degree p = 1..n_max; the running average tends to
/// ∫ g f² dV.
pub fn mass_lln_report(
    symbol: &Symbol,
    g: &TestFunction,
    n_max: usize,
    seed: u64,
) -> Result<MassLlnReport, StatsError> {
    if n_max == 0 {
        return Err(StatsError::EmptyInput);
    }
    let mut per_degree = Vec::with_capacity(n_max);
    let mut running = Vec::with_capacity(n_max);
    let mut acc = math::KahanSum::new();
    for p in 1..=n_max {
        let spec = spectrum(symbol, p)?;
        let s = sample_section(&spec, seed, p as u64)?;
        let y = mass_statistic(&s, g)?;
        per_degree.push(y);
        acc.add(y);
        running.push(acc.value() / p as f64);
    }
    let limit = integrate_dv(
        |rho| {
            let f = symbol.eval_radial(rho).expect("radial symbol");
            g.eval(rho) * f * f
        },
        1.0,
        1e-10,
    )?;
    Ok(MassLlnReport {
        n_max,
        per_degree,
        running_average: running,
        final_average: acc.value() / n_max as f64,
        limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use crate::spectra::{spectrum_constant, spectrum_indicator};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    #[test]
    fn curvature_operator_closed_forms() {
        // Constants are harmonic.
        let c = TestFunction::Constant(3.5);
        for rho in [0.0, 0.4, 2.0] {
            assert_eq!(c.l_of_phi(rho), 0.0);
        }
        // The log profile is the potential of the volume form: L ≡ 2π.
        let lp = TestFunction::LogProfile;
        for rho in [0.0, 0.3, 1.0, 2.7, 10.0] {
            assert_relative_eq!(lp.l_of_phi(rho), 2.0 * math::PI, max_relative = 1e-10);
        }
    }

    #[test]
    fn bump_l_matches_finite_differences() {
        let phi = TestFunction::RadialBump {
            rho0: 1.3,
            amplitude: 0.8,
        };
        let h = 1e-5;
        for rho in [0.1, 0.33, 0.74, 1.1] {
            let d1 = (phi.eval(rho + h) - phi.eval(rho - h)) / (2.0 * h);
            let d2 = (phi.eval(rho + h) - 2.0 * phi.eval(rho) + phi.eval(rho - h)) / (h * h);
            let g = 1.0 + rho * rho;
            let want = math::PI / 2.0 * g * g * (d2 + d1 / rho);
            assert_relative_eq!(phi.l_of_phi(rho), want, max_relative = 1e-5, epsilon = 1e-7);
        }
        // ρ → 0 limit equals π·2φ″(0)/2·… continuity check.
        let near = phi.l_of_phi(1e-9);
        assert_relative_eq!(phi.l_of_phi(0.0), near, max_relative = 1e-9);
    }

    #[test]
    fn tabulated_l_tracks_smooth_source() {
        // Table sampled from the log profile: L should come out near 2π.
        let n = 2001;
        let radii: Vec<f64> = (0..n).map(|i| i as f64 * 3.0 / (n - 1) as f64).collect();
        let values: Vec<f64> = radii.iter().map(|&r| math::ln_1p(r * r)).collect();
        let tf = TestFunction::Tabulated { radii, values };
        tf.validate().unwrap();
        for rho in [0.2, 0.8, 1.9] {
            assert_relative_eq!(tf.l_of_phi(rho), 2.0 * math::PI, max_relative = 1e-3);
        }
    }

    #[test]
    fn linear_statistic_direct_sum() {
        let phi = TestFunction::RadialBump {
            rho0: 10.0,
            amplitude: 1.0,
        };
        let zs = ZeroSet {
            p: 2,
            roots: alloc::vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
            zeros_at_infinity: 0,
            residuals: alloc::vec![0.0, 0.0],
            max_residual: 0.0,
            vieta_gap: 0.0,
            sweeps: 0,
            near_infinity: 0,
            truncated_tail: false,
        };
        assert_relative_eq!(
            linear_statistic(&zs, &phi),
            phi.eval(1.0) + phi.eval(2.0),
            max_relative = 1e-15
        );
        // Outside the support everything vanishes.
        let narrow = TestFunction::RadialBump {
            rho0: 0.5,
            amplitude: 1.0,
        };
        assert_eq!(linear_statistic(&zs, &narrow), 0.0);
    }

    #[test]
    fn expectation_constant_symbol_is_geometric() {
        // ln T² is constant, ∫L(φ)dV = 0 by Stokes, so E[Z] = p∫φ dV.
        let spec = spectrum_constant(40, 1.0);
        let phi = TestFunction::RadialBump {
            rho0: 1.0,
            amplitude: 1.0,
        };
        let rep = expectation_exact(&spec, &phi).unwrap();
        assert!(
            math::abs(rep.correction_term) < 1e-8,
            "corr {}",
            rep.correction_term
        );
        let stokes = integrate_dv(|rho| phi.l_of_phi(rho), 0.5, 1e-11).unwrap();
        assert!(math::abs(stokes) < 1e-8, "stokes {stokes}");
        // φ ≡ 0 gives zero.
        let rep0 = expectation_exact(&spec, &TestFunction::Constant(0.0)).unwrap();
        assert_eq!(rep0.value, 0.0);
    }

    #[test]
    fn bipotential_reference_values() {
        assert_eq!(bipotential(0.0), 0.0);
        assert_relative_eq!(bipotential(1.0), 1.0 / 24.0, max_relative = 1e-14);
        // Monotone increasing on a grid.
        let mut prev = -1.0;
        for i in 0..=100 {
            let v = bipotential(i as f64 / 100.0);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn leading_term_scaling_and_positivity() {
        let phi = TestFunction::RadialBump {
            rho0: 1.0,
            amplitude: 1.0,
        };
        let v1 = variance_leading_term(&phi).unwrap();
        assert!(v1 > 0.0);
        let phi2 = TestFunction::RadialBump {
            rho0: 1.0,
            amplitude: 2.0,
        };
        let v2 = variance_leading_term(&phi2).unwrap();
        assert_relative_eq!(v2, 4.0 * v1, max_relative = 1e-11);
        assert_eq!(
            variance_leading_term(&TestFunction::Constant(2.0)).unwrap_err(),
            StatsError::InvalidTestFunction("needs compact support")
        );
    }

    #[test]
    fn histogram_conserves_counts() {
        let radii = [0.0, 0.1, 0.5, 0.88, geometry::MAX_RADIUS];
        let h = fs_histogram(&radii, 7).unwrap();
        assert_eq!(h.counts.iter().sum::<u64>(), 5);
        assert_eq!(h.total, 5);
        // Density integrates to one.
        let width = geometry::MAX_RADIUS / 7.0;
        let mass: f64 = h.density.iter().map(|d| d * width).sum();
        assert_relative_eq!(mass, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn synthetic_radii_match_their_own_cdf() {
        // Inverse-CDF draws: r = arcsin(√v)/√π with v uniform.
        let mut st = Stream::for_trial(2024, 0);
        let radii: Vec<f64> = (0..20_000)
            .map(|_| math::asin(math::sqrt(st.uniform01())) / math::SQRT_PI)
            .collect();
        let ks = ks_vs_fs(&radii).unwrap();
        assert!(ks <= 0.015, "ks {ks}");
    }

    #[test]
    fn hole_frequency_degenerate_cases() {
        // Degree zero: constant sections never vanish.
        let rep = hole_frequency(&Symbol::Constant(1.0), 0.3, &[0], 10, 1).unwrap();
        assert_eq!(rep.rows[0].frequency, 1.0);
        // Whole sphere: a degree-p ≥ 1 divisor is never empty.
        let rep = hole_frequency(&Symbol::Constant(1.0), f64::INFINITY, &[2], 40, 1).unwrap();
        assert_eq!(rep.rows[0].frequency, 0.0);
    }

    #[test]
    fn mass_moments_constant_symbol_closed_form() {
        for p in [3usize, 10, 25] {
            let spec = spectrum_constant(p, 1.0);
            let m = mass_moments(&spec, &TestFunction::Constant(1.0)).unwrap();
            let pf = p as f64;
            assert_relative_eq!(m.expectation, (pf + 1.0) / pf, max_relative = 1e-10);
            assert_relative_eq!(m.variance, (pf + 1.0) / (pf * pf), max_relative = 1e-10);
        }
    }

    #[test]
    fn mass_statistic_zero_weight_and_determinism() {
        let spec = spectrum_indicator(12, 1.0).unwrap();
        let s = sample_section(&spec, 3, 0).unwrap();
        assert_eq!(
            mass_statistic(&s, &TestFunction::Constant(0.0)).unwrap(),
            0.0
        );
        let y1 = mass_statistic(&s, &TestFunction::Constant(1.0)).unwrap();
        let y2 = mass_statistic(&s, &TestFunction::Constant(1.0)).unwrap();
        assert_eq!(y1.to_bits(), y2.to_bits());
        assert!(y1 > 0.0);
    }

    #[test]
    fn clt_report_deterministic() {
        let spec = spectrum_constant(20, 1.0);
        let phi = TestFunction::RadialBump {
            rho0: 1.0,
            amplitude: 1.0,
        };
        let a = clt_report(&spec, &phi, 200, 5).unwrap();
        let b = clt_report(&spec, &phi, 200, 5).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.ks_vs_normal.to_bits(), b.ks_vs_normal.to_bits());
        assert!(a.ks_vs_normal >= 0.0 && a.ks_vs_normal <= 1.0);
    }

    #[test]
    fn degenerate_mc_rejected() {
        assert_eq!(
            monte_carlo_report(&[1.0, 1.0, 1.0], false).unwrap_err(),
            StatsError::DegenerateVariance
        );
        assert_eq!(
            monte_carlo_report(&[1.0], false).unwrap_err(),
            StatsError::EmptyInput
        );
    }
}
