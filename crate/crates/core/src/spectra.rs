//! Toeplitz operator spectra for radial and general symbols.
//!
//! A symbol f acts on the degree-p holomorphic sections through compression
//! of the multiplication operator. For radial f the monomial sections are
//! eigenvectors and the eigenvalue attached to basis index j is
//!
//!   λ_j = (p+1) C(p,j) ∫₀^∞ f(√t) t^j (1+t)^{−(p+2)} dt.
//!
//! Under u = t/(1+t) the weight becomes u^j (1−u)^{p−j} du on [0,1], which is
//! a degree-p polynomial; this substitution is used throughout so that fixed
//! Gauss rules are exact whenever f itself is constant on the relevant range.
//!
//! Closed-form families get dedicated constructors; `spectrum_quadrature` is
//! the generic route kept deliberately independent of them so the two can be
//! compared. Non-radial symbols go through the dense matrix path.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::basis::{self, BasisError};
use crate::geometry;
use crate::linalg;
use crate::math;
use crate::quad::{Domain, Quadrature, QuadratureSpec};

/// Hard cap for the dense (matrix) route; above this the quadrature and
/// closed-form routes stay accurate while Jacobi sweeps get slow.
pub const DENSE_P_MAX: usize = 100;

/// Eigenvalues smaller than this are reported via `log_lambdas` only and set
/// the underflow flag on the spectrum.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

const SPECTRUM_REL_TOL: f64 = 1e-12;

/// Radially sampled symbol: piecewise-linear in the chart radius ρ = |z|,
/// constant before the first knot and after the last.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialTable {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

/// Symbol sampled on a polar grid: `values[i * n_angles + l]` is
/// f(radii[i], 2πl/n_angles). Linear interpolation in ρ, trigonometric in θ
/// (the grid is treated as band-limited to |m| < n_angles/2 via its DFT).
#[derive(Clone, Debug, PartialEq)]
pub struct ChartGrid {
    pub radii: Vec<f64>,
    pub n_angles: usize,
    pub values: Vec<f64>,
}

/// Multiplication symbols on the sphere, in the chart centered at 0.
#[derive(Clone, Debug, PartialEq)]
pub enum Symbol {
    /// f ≡ c.
    Constant(f64),
    /// f(z) = (|z|²/(1+|z|²))^k, vanishing to order 2k at 0.
    PowerVanish(u32),
    /// f(z) = exp(−1/|z|²), all derivatives vanishing at 0.
    ExpInverse,
    /// Indicator of the closed chart disc of radius r.
    DiscIndicator(f64),
    /// Piecewise-linear radial profile.
    RadialTabulated(RadialTable),
    /// General (possibly non-radial) gridded symbol; dense route only.
    GeneralGrid(ChartGrid),
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumError {
    Basis(BasisError),
    InvalidSymbol(&'static str),
    /// Operation requires a radial symbol (closed-form or 1-D quadrature
    /// routes); use the dense path for grids.
    NonRadial,
    QuadratureFailed {
        j: usize,
        achieved: f64,
    },
    DenseCapExceeded {
        p: usize,
    },
    EigensolveStalled {
        off_norm: f64,
    },
    NotPointwiseOrdered {
        rho: f64,
    },
}

impl core::fmt::Display for SpectrumError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SpectrumError::Basis(e) => write!(f, "{e}"),
            SpectrumError::InvalidSymbol(msg) => write!(f, "invalid symbol: {msg}"),
            SpectrumError::NonRadial => write!(f, "symbol is not radial"),
            SpectrumError::QuadratureFailed { j, achieved } => {
                write!(
                    f,
                    "eigenvalue quadrature for j = {j} stalled at tolerance {achieved:e}"
                )
            }
            SpectrumError::DenseCapExceeded { p } => {
                write!(f, "dense route capped at p = {DENSE_P_MAX}, got p = {p}")
            }
            SpectrumError::EigensolveStalled { off_norm } => {
                write!(
                    f,
                    "Jacobi sweeps stalled with off-diagonal norm {off_norm:e}"
                )
            }
            SpectrumError::NotPointwiseOrdered { rho } => {
                write!(f, "symbols are not pointwise ordered near rho = {rho}")
            }
        }
    }
}

impl core::error::Error for SpectrumError {}

impl From<BasisError> for SpectrumError {
    fn from(e: BasisError) -> Self {
        SpectrumError::Basis(e)
    }
}

impl core::fmt::Display for Symbol {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Symbol::Constant(c) => write!(f, "const:{c}"),
            Symbol::PowerVanish(k) => write!(f, "power:{k}"),
            Symbol::ExpInverse => write!(f, "expinv"),
            Symbol::DiscIndicator(r) => write!(f, "disc:{r}"),
            Symbol::RadialTabulated(t) => write!(f, "tab[{}]", t.radii.len()),
            Symbol::GeneralGrid(g) => write!(f, "grid[{}x{}]", g.radii.len(), g.n_angles),
        }
    }
}

impl Symbol {
    pub fn validate(&self) -> Result<(), SpectrumError> {
        match self {
            Symbol::Constant(c) => {
                if !c.is_finite() || *c < 0.0 {
                    return Err(SpectrumError::InvalidSymbol(
                        "constant must be finite and >= 0",
                    ));
                }
            }
            Symbol::PowerVanish(k) => {
                if *k == 0 {
                    return Err(SpectrumError::InvalidSymbol(
                        "vanishing order k must be >= 1",
                    ));
                }
            }
            Symbol::ExpInverse => {}
            Symbol::DiscIndicator(r) => {
                if !r.is_finite() || *r <= 0.0 {
                    return Err(SpectrumError::InvalidSymbol(
                        "disc radius must be finite and > 0",
                    ));
                }
            }
            Symbol::RadialTabulated(t) => validate_knots(&t.radii, &t.values, 1)?,
            Symbol::GeneralGrid(g) => {
                if g.n_angles < 4 {
                    return Err(SpectrumError::InvalidSymbol("grid needs at least 4 angles"));
                }
                if g.values.len() != g.radii.len() * g.n_angles {
                    return Err(SpectrumError::InvalidSymbol(
                        "grid value count != radii * angles",
                    ));
                }
                validate_knots(&g.radii, &g.values, g.n_angles)?;
            }
        }
        Ok(())
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self, Symbol::GeneralGrid(_))
    }

    /// Pointwise value for radial symbols; grids are rejected.
    pub fn eval_radial(&self, rho: f64) -> Result<f64, SpectrumError> {
        debug_assert!(rho >= 0.0);
        match self {
            Symbol::Constant(c) => Ok(*c),
            Symbol::PowerVanish(k) => {
                let v = geometry::disc_volume(rho).unwrap_or(1.0);
                Ok(math::pow(v, *k as f64))
            }
            Symbol::ExpInverse => {
                if rho == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(math::exp(-1.0 / (rho * rho)))
                }
            }
            Symbol::DiscIndicator(r) => Ok(if rho <= *r { 1.0 } else { 0.0 }),
            Symbol::RadialTabulated(t) => Ok(interp_linear(&t.radii, &t.values, rho)),
            Symbol::GeneralGrid(_) => Err(SpectrumError::NonRadial),
        }
    }

    /// Essential supremum over the sphere.
    pub fn sup(&self) -> f64 {
        match self {
            Symbol::Constant(c) => *c,
            Symbol::PowerVanish(_) | Symbol::ExpInverse | Symbol::DiscIndicator(_) => 1.0,
            Symbol::RadialTabulated(t) => t.values.iter().cloned().fold(0.0, f64::max),
            Symbol::GeneralGrid(g) => g.values.iter().cloned().fold(0.0, f64::max),
        }
    }

    /// Radii of non-smooth points, as t = ρ² (the radial integration
    /// variable). Used to split quadrature panels.
    pub fn breakpoints_t(&self) -> Vec<f64> {
        match self {
            Symbol::DiscIndicator(r) => vec![r * r],
            Symbol::RadialTabulated(t) => t.radii.iter().map(|r| r * r).collect(),
            Symbol::GeneralGrid(g) => g.radii.iter().map(|r| r * r).collect(),
            _ => Vec::new(),
        }
    }

    /// ∫ f dV over the sphere (unit total volume). Closed forms where they
    /// are elementary, adaptive quadrature otherwise.
    pub fn integral_dv(&self) -> Result<f64, SpectrumError> {
        self.validate()?;
        match self {
            Symbol::Constant(c) => Ok(*c),
            // ∫ (t/(1+t))^k dt/(1+t)² = ∫₀¹ u^k du.
            Symbol::PowerVanish(k) => Ok(1.0 / (*k as f64 + 1.0)),
            Symbol::DiscIndicator(r) => Ok(geometry::disc_volume(*r).expect("validated radius")),
            Symbol::ExpInverse | Symbol::RadialTabulated(_) => {
                let spec = QuadratureSpec::adaptive(Domain::HalfLine, 1e-13)
                    .with_breakpoints(&self.breakpoints_t());
                let quad = Quadrature::new(spec);
                let r = quad.integrate(|t: f64| {
                    self.eval_radial(math::sqrt(t)).expect("radial") / ((1.0 + t) * (1.0 + t))
                });
                Ok(r.value)
            }
            Symbol::GeneralGrid(g) => {
                // Angular average first (exact for the grid's band limit),
                // then the radial rule on the resulting profile.
                let mean = grid_angular_mean(g);
                Symbol::RadialTabulated(mean).integral_dv()
            }
        }
    }

    /// Volume of the superlevel set {f > a}. Thresholds a ≥ 0.
    pub fn superlevel_volume(&self, a: f64) -> Result<f64, SpectrumError> {
        self.validate()?;
        if !(a >= 0.0) {
            return Err(SpectrumError::InvalidSymbol("threshold must be >= 0"));
        }
        match self {
            Symbol::Constant(c) => Ok(if *c > a { 1.0 } else { 0.0 }),
            Symbol::PowerVanish(k) => {
                if a >= 1.0 {
                    Ok(0.0)
                } else {
                    // f = vol(disc)^k, so {f > a} is the complement of a disc
                    // of volume a^{1/k}.
                    Ok(1.0 - math::pow(a, 1.0 / *k as f64))
                }
            }
            Symbol::ExpInverse => {
                if a >= 1.0 {
                    Ok(0.0)
                } else if a == 0.0 {
                    Ok(1.0)
                } else {
                    let t_a = -1.0 / math::ln(a);
                    Ok(1.0 / (1.0 + t_a))
                }
            }
            Symbol::DiscIndicator(r) => {
                if a >= 1.0 {
                    Ok(0.0)
                } else {
                    Ok(geometry::disc_volume(*r).expect("validated radius"))
                }
            }
            Symbol::RadialTabulated(t) => Ok(tabulated_superlevel(&t.radii, &t.values, a)),
            Symbol::GeneralGrid(_) => Err(SpectrumError::NonRadial),
        }
    }
}

fn validate_knots(radii: &[f64], values: &[f64], stride: usize) -> Result<(), SpectrumError> {
    if radii.len() < 2 {
        return Err(SpectrumError::InvalidSymbol("need at least 2 radial knots"));
    }
    if values.len() != radii.len() * stride {
        return Err(SpectrumError::InvalidSymbol(
            "value count does not match knot count",
        ));
    }
    let mut prev = -1.0;
    for &r in radii {
        if !r.is_finite() || r < 0.0 || r <= prev {
            return Err(SpectrumError::InvalidSymbol(
                "radii must be finite, >= 0, strictly increasing",
            ));
        }
        prev = r;
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(SpectrumError::InvalidSymbol(
            "values must be finite and >= 0",
        ));
    }
    Ok(())
}

fn interp_linear(radii: &[f64], values: &[f64], rho: f64) -> f64 {
    let n = radii.len();
    if rho <= radii[0] {
        return values[0];
    }
    if rho >= radii[n - 1] {
        return values[n - 1];
    }
    // radii are strictly increasing; find the bracketing segment.
    let mut lo = 0;
    let mut hi = n - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if radii[mid] <= rho {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let w = (rho - radii[lo]) / (radii[hi] - radii[lo]);
    values[lo] + w * (values[hi] - values[lo])
}

/// Volume of {f > a} for a piecewise-linear radial profile with constant
/// extension past the knot range.
fn tabulated_superlevel(radii: &[f64], values: &[f64], a: f64) -> f64 {
    let n = radii.len();
    let vol = |rho: f64| geometry::disc_volume(rho).expect("knot radius");
    let mut total = 0.0;
    // Central cap: constant values[0] on [0, radii[0]].
    if values[0] > a {
        total += vol(radii[0]);
    }
    for i in 0..n - 1 {
        let (r0, r1) = (radii[i], radii[i + 1]);
        let (f0, f1) = (values[i], values[i + 1]);
        let (v0, v1) = (vol(r0), vol(r1));
        match (f0 > a, f1 > a) {
            (true, true) => total += v1 - v0,
            (false, false) => {}
            (above0, _) => {
                // Single crossing inside the segment (f is linear in ρ).
                let rc = r0 + (a - f0) / (f1 - f0) * (r1 - r0);
                let vc = vol(rc);
                if above0 {
                    total += vc - v0;
                } else {
                    total += v1 - vc;
                }
            }
        }
    }
    // Outer region: constant values[n−1] on [radii[n−1], ∞].
    if values[n - 1] > a {
        total += 1.0 - vol(radii[n - 1]);
    }
    total
}

/// Angular mean of a grid symbol as a radial table (the m = 0 Fourier mode).
fn grid_angular_mean(g: &ChartGrid) -> RadialTable {
    let mut values = Vec::with_capacity(g.radii.len());
    for i in 0..g.radii.len() {
        let row = &g.values[i * g.n_angles..(i + 1) * g.n_angles];
        values.push(math::pairwise_sum(row) / g.n_angles as f64);
    }
    RadialTable {
        radii: g.radii.clone(),
        values,
    }
}

/// How a spectrum was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumMethod {
    ClosedForm,
    Quadrature,
    Dense,
}

/// Eigenvalues of the compressed multiplication operator at degree p.
///
/// For radial symbols `lambdas[j]` belongs to basis index j. For the dense
/// route the basis labeling is lost and `lambdas` is simply ascending.
/// `log_lambdas` stays meaningful below the f64 underflow floor.
#[derive(Clone, Debug)]
pub struct ToeplitzSpectrum {
    pub p: usize,
    pub lambdas: Vec<f64>,
    pub log_lambdas: Vec<f64>,
    pub symbol: Symbol,
    pub method: SpectrumMethod,
    /// Some eigenvalue is positive (per its log) but below `UNDERFLOW_FLOOR`.
    pub underflow: bool,
}

impl ToeplitzSpectrum {
    fn from_logs(p: usize, log_lambdas: Vec<f64>, symbol: Symbol, method: SpectrumMethod) -> Self {
        let lambdas: Vec<f64> = log_lambdas.iter().map(|&l| math::exp(l)).collect();
        let underflow = underflow_flag(&lambdas, &log_lambdas);
        ToeplitzSpectrum {
            p,
            lambdas,
            log_lambdas,
            symbol,
            method,
            underflow,
        }
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambdas.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambdas
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn log_lambda_min(&self) -> f64 {
        self.log_lambdas
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn trace(&self) -> f64 {
        math::pairwise_sum(&self.lambdas)
    }
}

fn underflow_flag(lambdas: &[f64], log_lambdas: &[f64]) -> bool {
    lambdas
        .iter()
        .zip(log_lambdas)
        .any(|(&l, &ll)| ll > f64::NEG_INFINITY && l < UNDERFLOW_FLOOR)
}

/// Dispatch to the natural route for each family: closed forms where they
/// exist, generic quadrature for tabulated profiles. Grid symbols must go
/// through `spectrum_dense`.
pub fn spectrum(symbol: &Symbol, p: usize) -> Result<ToeplitzSpectrum, SpectrumError> {
    symbol.validate()?;
    basis::check_degree(p)?;
    match symbol {
        Symbol::Constant(c) => Ok(spectrum_constant(p, *c)),
        Symbol::PowerVanish(k) => spectrum_power(p, *k),
        Symbol::ExpInverse => spectrum_expinv(p),
        Symbol::DiscIndicator(r) => spectrum_indicator(p, *r),
        Symbol::RadialTabulated(_) => spectrum_quadrature(symbol, p, SPECTRUM_REL_TOL),
        Symbol::GeneralGrid(_) => Err(SpectrumError::NonRadial),
    }
}

/// f ≡ c: the operator is c·Id.
pub fn spectrum_constant(p: usize, c: f64) -> ToeplitzSpectrum {
    let log_c = math::ln(c);
    ToeplitzSpectrum {
        p,
        lambdas: vec![c; p + 1],
        log_lambdas: vec![log_c; p + 1],
        symbol: Symbol::Constant(c),
        method: SpectrumMethod::ClosedForm,
        underflow: false,
    }
}

/// f = (|z|²/(1+|z|²))^k. The eigenvalue integral telescopes to
/// λ_j = ∏_{i=1..k} (j+i)/(p+1+i), strictly increasing in j.
pub fn spectrum_power(p: usize, k: u32) -> Result<ToeplitzSpectrum, SpectrumError> {
    basis::check_degree(p)?;
    if k == 0 {
        return Err(SpectrumError::InvalidSymbol(
            "vanishing order k must be >= 1",
        ));
    }
    let mut log_lambdas = Vec::with_capacity(p + 1);
    for j in 0..=p {
        let mut log_l = 0.0;
        for i in 1..=k as usize {
            log_l += math::ln((j + i) as f64) - math::ln((p + 1 + i) as f64);
        }
        log_lambdas.push(log_l);
    }
    Ok(ToeplitzSpectrum::from_logs(
        p,
        log_lambdas,
        Symbol::PowerVanish(k),
        SpectrumMethod::ClosedForm,
    ))
}

/// Indicator of the closed disc of chart radius r: the eigenvalue is a
/// binomial tail, λ_j = P[Bin(p+1, v) ≥ j+1] with v = r²/(1+r²). Decreasing
/// in j, with λ_p = v^{p+1} far below the f64 floor for large p.
pub fn spectrum_indicator(p: usize, r: f64) -> Result<ToeplitzSpectrum, SpectrumError> {
    basis::check_degree(p)?;
    if !r.is_finite() || r <= 0.0 {
        return Err(SpectrumError::InvalidSymbol(
            "disc radius must be finite and > 0",
        ));
    }
    let n = p + 1;
    // ln v and ln(1−v) from r directly; forming v first would lose digits
    // for extreme radii.
    let log_v = 2.0 * math::ln(r) - math::ln_1p(r * r);
    let log_1mv = -math::ln_1p(r * r);
    let ln_choose: Vec<f64> = (0..=n).map(|m| math::ln_binomial(n, m)).collect();
    let mut log_lambdas = Vec::with_capacity(n);
    let mut terms: Vec<f64> = Vec::with_capacity(n);
    for j in 0..=p {
        terms.clear();
        for m in (j + 1)..=n {
            terms.push(ln_choose[m] + m as f64 * log_v + (n - m) as f64 * log_1mv);
        }
        log_lambdas.push(math::log_sum_exp(&terms));
    }
    // Tail sums in the linear domain are monotone by construction; the
    // log-domain evaluation preserves that, which downstream checks rely on.
    Ok(ToeplitzSpectrum::from_logs(
        p,
        log_lambdas,
        Symbol::DiscIndicator(r),
        SpectrumMethod::ClosedForm,
    ))
}

/// f = exp(−1/|z|²). Integration by parts in the eigenvalue integral gives
///
///   λ_j = (p+1) C(p,j) ∫₀^∞ e^{−t} t^{p−j} (1+t)^{−(p+2)} dt,
///
/// a different integrand from the generic route, so the two are genuinely
/// independent checks of one another. Increasing in j; λ_0 decays like
/// exp(−2√p).
pub fn spectrum_expinv(p: usize) -> Result<ToeplitzSpectrum, SpectrumError> {
    basis::check_degree(p)?;
    let mut log_lambdas = Vec::with_capacity(p + 1);
    let sqrt_p = math::sqrt((p + 1) as f64);
    for j in 0..=p {
        let ln_pref = math::ln((p + 1) as f64) + math::ln_binomial(p, j);
        let a = (p - j) as f64;
        // Integrand peaks where −1 + a/t − (p+2)/(1+t) = 0; the saddle for
        // small j sits near √p, for large j near 0. Breakpoints guide the
        // adaptive panels through both regimes.
        let spec = QuadratureSpec::adaptive(Domain::HalfLine, 1e-12)
            .with_breakpoints(&[sqrt_p, (p + 1) as f64]);
        let quad = Quadrature::new(spec);
        let res = quad.integrate(|t: f64| {
            if t == 0.0 {
                return if p == j { 1.0 } else { 0.0 };
            }
            math::exp(-t + a * math::ln(t) - (p as f64 + 2.0) * math::ln_1p(t))
        });
        if !res.converged {
            return Err(SpectrumError::QuadratureFailed {
                j,
                achieved: res.achieved_tol,
            });
        }
        log_lambdas.push(ln_pref + math::ln(res.value));
    }
    Ok(ToeplitzSpectrum::from_logs(
        p,
        log_lambdas,
        Symbol::ExpInverse,
        SpectrumMethod::ClosedForm,
    ))
}

/// Generic eigenvalue quadrature for any radial symbol:
/// λ_j = (p+1) C(p,j) ∫₀^∞ f(√t) t^j (1+t)^{−(p+2)} dt, evaluated with the
/// log-domain prefactor folded into the integrand to keep every panel in
/// range. Independent oracle for the closed-form families.
pub fn spectrum_quadrature(
    symbol: &Symbol,
    p: usize,
    rel_tol: f64,
) -> Result<ToeplitzSpectrum, SpectrumError> {
    symbol.validate()?;
    basis::check_degree(p)?;
    if !symbol.is_radial() {
        return Err(SpectrumError::NonRadial);
    }
    let breakpoints = symbol.breakpoints_t();
    let mut log_lambdas = Vec::with_capacity(p + 1);
    for j in 0..=p {
        let ln_pref = math::ln((p + 1) as f64) + math::ln_binomial(p, j);
        let jf = j as f64;
        let pf = p as f64;
        let spec =
            QuadratureSpec::adaptive(Domain::HalfLine, rel_tol).with_breakpoints(&breakpoints);
        let quad = Quadrature::new(spec);
        let res = quad.integrate(|t: f64| {
            let f = symbol.eval_radial(math::sqrt(t)).expect("radial symbol");
            if f == 0.0 {
                return 0.0;
            }
            let log_weight = if t == 0.0 {
                if j == 0 {
                    0.0
                } else {
                    return 0.0;
                }
            } else {
                jf * math::ln(t)
            };
            f * math::exp(ln_pref + log_weight - (pf + 2.0) * math::ln_1p(t))
        });
        if !res.converged {
            return Err(SpectrumError::QuadratureFailed {
                j,
                achieved: res.achieved_tol,
            });
        }
        log_lambdas.push(if res.value > 0.0 {
            math::ln(res.value)
        } else {
            f64::NEG_INFINITY
        });
    }
    let mut out =
        ToeplitzSpectrum::from_logs(p, log_lambdas, symbol.clone(), SpectrumMethod::Quadrature);
    // from_logs re-exponentiates; keep the directly computed values instead
    // (identical up to a rounding in exp∘ln, but the integral is primary).
    out.method = SpectrumMethod::Quadrature;
    Ok(out)
}

/// Matrix of the compressed multiplication operator in the normalized
/// monomial basis, row-major, Hermitian. Entry (j,k) couples basis indices
/// through the (j−k)-th angular Fourier mode of the symbol:
///
///   M_{jk} = c_j c_k ∫₀^∞ b_{j−k}(√t) t^{(j+k)/2} (1+t)^{−(p+2)} dt
///
/// with c_j = √((p+1)C(p,j)) and b_m the m-th angular mode. Radial symbols
/// produce an exactly diagonal matrix (ring-constant samples have vanishing
/// higher modes).
pub struct DenseOperator {
    pub p: usize,
    pub matrix: Vec<Complex64>,
    /// Largest |M_{jk}|, j ≠ k; a radiality witness.
    pub max_offdiag: f64,
}

pub fn toeplitz_matrix(symbol: &Symbol, p: usize) -> Result<DenseOperator, SpectrumError> {
    symbol.validate()?;
    basis::check_degree(p)?;
    if p > DENSE_P_MAX {
        return Err(SpectrumError::DenseCapExceeded { p });
    }
    let n = p + 1;
    let n_angles = match symbol {
        Symbol::GeneralGrid(g) => g.n_angles.max(2 * p + 4),
        _ => (2 * p + 4).max(64),
    };

    // Shared radial nodes: composite Gauss panels in u = t/(1+t), split at
    // symbol breakpoints so discontinuities sit on panel edges.
    let nodes = radial_nodes(&symbol.breakpoints_t(), 16, 32);

    // Angular Fourier modes b_m(√t) at every radial node, m = 0..=p
    // (negative modes are conjugates). For radial symbols every ring is
    // constant and only m = 0 survives, exactly.
    let mut modes: Vec<Vec<Complex64>> = Vec::with_capacity(nodes.len());
    for &(t, _) in &nodes {
        let rho = math::sqrt(t);
        let mut ring = Vec::with_capacity(n_angles);
        match symbol {
            Symbol::GeneralGrid(g) => {
                for l in 0..n_angles {
                    let theta = 2.0 * math::PI * l as f64 / n_angles as f64;
                    ring.push(grid_eval(g, rho, theta));
                }
            }
            _ => {
                let v = symbol.eval_radial(rho)?;
                ring.resize(n_angles, v);
            }
        }
        modes.push(ring_modes(&ring, p));
    }

    let ln_c: Vec<f64> = (0..=p).map(|j| basis::ln_norm_coeff(p, j)).collect();
    let mut matrix = vec![Complex64::new(0.0, 0.0); n * n];
    let mut max_offdiag: f64 = 0.0;
    for j in 0..n {
        for k in 0..=j {
            let ln_pref = ln_c[j] + ln_c[k];
            let s = (j + k) as f64 / 2.0;
            let mut acc_re = math::KahanSum::new();
            let mut acc_im = math::KahanSum::new();
            for (i, &(t, w)) in nodes.iter().enumerate() {
                let b = modes[i][j - k];
                if b.re == 0.0 && b.im == 0.0 {
                    continue;
                }
                let log_weight = if t == 0.0 {
                    if j + k == 0 {
                        0.0
                    } else {
                        continue;
                    }
                } else {
                    s * math::ln(t)
                };
                let weight =
                    w * math::exp(ln_pref + log_weight - (p as f64 + 2.0) * math::ln_1p(t));
                acc_re.add(b.re * weight);
                acc_im.add(b.im * weight);
            }
            let m_jk = Complex64::new(acc_re.value(), acc_im.value());
            matrix[j * n + k] = m_jk;
            matrix[k * n + j] = m_jk.conj();
            if j != k {
                max_offdiag = max_offdiag.max(m_jk.norm());
            }
        }
    }
    Ok(DenseOperator {
        p,
        matrix,
        max_offdiag,
    })
}

/// Dense-route spectrum: build the matrix and diagonalize. Eigenvalues come
/// back ascending (basis labels are not recoverable from this route).
pub fn spectrum_dense(symbol: &Symbol, p: usize) -> Result<ToeplitzSpectrum, SpectrumError> {
    let op = toeplitz_matrix(symbol, p)?;
    let n = p + 1;
    let eigs = linalg::hermitian_eigvals(&op.matrix, n, 60)
        .map_err(|off| SpectrumError::EigensolveStalled { off_norm: off })?;
    let log_lambdas: Vec<f64> = eigs
        .iter()
        .map(|&l| {
            if l > 0.0 {
                math::ln(l)
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let underflow = underflow_flag(&eigs, &log_lambdas);
    Ok(ToeplitzSpectrum {
        p,
        lambdas: eigs,
        log_lambdas,
        symbol: symbol.clone(),
        method: SpectrumMethod::Dense,
        underflow,
    })
}

/// Composite Gauss nodes for ∫₀^∞ g(t) dt expressed in u = t/(1+t):
/// `panels` uniform panels of `order` points each, with extra edges at the
/// mapped breakpoints. Returns (t_node, weight·du/dt jacobian folded in).
fn radial_nodes(breakpoints_t: &[f64], panels: usize, order: usize) -> Vec<(f64, f64)> {
    let gl = crate::quad::GaussLegendre::new(order);
    let mut edges: Vec<f64> = (0..=panels).map(|i| i as f64 / panels as f64).collect();
    for &bt in breakpoints_t {
        if bt.is_finite() && bt >= 0.0 {
            let u = bt / (1.0 + bt);
            if u > 0.0 && u < 1.0 {
                edges.push(u);
            }
        }
    }
    // Half-integer powers of u (odd j+k) are not polynomial at the
    // endpoints; geometric refinement there restores fast convergence.
    let first = edges
        .iter()
        .cloned()
        .filter(|&e| e > 0.0)
        .fold(1.0, f64::min);
    let last = edges
        .iter()
        .cloned()
        .filter(|&e| e < 1.0)
        .fold(0.0, f64::max);
    for m in 1..=24 {
        edges.push(first * math::exp2i(-m));
        edges.push(1.0 - (1.0 - last) * math::exp2i(-m));
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let mut nodes = Vec::with_capacity((edges.len() - 1) * order);
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a < 1e-300 {
            continue;
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for i in 0..order {
            let (x, wt) = gl.node(i);
            let u = mid + half * x;
            let one_minus = 1.0 - u;
            let t = u / one_minus;
            // dt/du = 1/(1−u)².
            nodes.push((t, wt * half / (one_minus * one_minus)));
        }
    }
    nodes
}

/// DFT modes of one ring of samples: returns b_m for m = 0..=p with
/// b_m = (1/N) Σ_l f_l e^{−i m θ_l}. Exact zeros for constant rings.
fn ring_modes(ring: &[f64], p: usize) -> Vec<Complex64> {
    let n = ring.len();
    let mut out = Vec::with_capacity(p + 1);
    let constant = ring.iter().all(|&v| v == ring[0]);
    for m in 0..=p {
        if m == 0 {
            out.push(Complex64::new(math::pairwise_sum(ring) / n as f64, 0.0));
            continue;
        }
        if constant || m >= n {
            // Constant rings carry only the mean; modes at or above the
            // sample count alias and are treated as absent.
            out.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let mut re = math::KahanSum::new();
        let mut im = math::KahanSum::new();
        for (l, &v) in ring.iter().enumerate() {
            let theta = 2.0 * math::PI * (m * l % n) as f64 / n as f64;
            re.add(v * math::cos(theta));
            im.add(-v * math::sin(theta));
        }
        out.push(Complex64::new(re.value() / n as f64, im.value() / n as f64));
    }
    out
}

/// Bilinear sample of a grid symbol: linear in ρ between rings (constant
/// outside), trigonometric interpolation in θ via the ring's own band limit.
fn grid_eval(g: &ChartGrid, rho: f64, theta: f64) -> f64 {
    let nr = g.radii.len();
    let ring_at = |i: usize| &g.values[i * g.n_angles..(i + 1) * g.n_angles];
    let angular = |ring: &[f64], theta: f64| -> f64 {
        // Linear interpolation on the circle; grids are the ground truth at
        // their own angles, and dense-route quadrature only queries those.
        let n = ring.len() as f64;
        let wrapped = {
            let r = theta % (2.0 * math::PI);
            if r < 0.0 {
                r + 2.0 * math::PI
            } else {
                r
            }
        };
        let pos = wrapped / (2.0 * math::PI) * n;
        let l0 = math::floor(pos) as usize % ring.len();
        let l1 = (l0 + 1) % ring.len();
        let w = pos - math::floor(pos);
        ring[l0] * (1.0 - w) + ring[l1] * w
    };
    if rho <= g.radii[0] {
        return angular(ring_at(0), theta);
    }
    if rho >= g.radii[nr - 1] {
        return angular(ring_at(nr - 1), theta);
    }
    let mut lo = 0;
    let mut hi = nr - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if g.radii[mid] <= rho {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let w = (rho - g.radii[lo]) / (g.radii[hi] - g.radii[lo]);
    angular(ring_at(lo), theta) * (1.0 - w) + angular(ring_at(hi), theta) * w
}

/// Trace identity data: Σ_j λ_j must equal (p+1) ∫ f dV exactly (the
/// substitution u = t/(1+t) makes the summed integrand a polynomial).
#[derive(Clone, Debug)]
pub struct SpectralSummary {
    pub p: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub trace: f64,
    pub trace_target: f64,
}

pub fn spectral_summary(s: &ToeplitzSpectrum) -> Result<SpectralSummary, SpectrumError> {
    let target = (s.p as f64 + 1.0) * s.symbol.integral_dv()?;
    Ok(SpectralSummary {
        p: s.p,
        lambda_min: s.lambda_min(),
        lambda_max: s.lambda_max(),
        trace: s.trace(),
        trace_target: target,
    })
}

/// One row of the smallest-eigenvalue scaling study. `scaled` is the
/// family-specific normalization:
///   power k:    λ_min p^k / k!            (→ 1)
///   expinv:     −ln λ_min / √p            (→ 2)
///   disc r:     λ_min / Vol(disc)^{p+1}   (= 1 exactly)
#[derive(Clone, Debug)]
pub struct MinEigRow {
    pub p: usize,
    pub lambda_min: f64,
    pub log_lambda_min: f64,
    pub scaled: f64,
}

#[derive(Clone, Debug)]
pub struct MinEigReport {
    pub symbol: Symbol,
    pub rows: Vec<MinEigRow>,
}

pub fn min_eig_asymptotics(
    symbol: &Symbol,
    degrees: &[usize],
) -> Result<MinEigReport, SpectrumError> {
    symbol.validate()?;
    let mut rows = Vec::with_capacity(degrees.len());
    for &p in degrees {
        let s = spectrum(symbol, p)?;
        let log_min = s.log_lambda_min();
        let pf = p as f64;
        let scaled = match symbol {
            Symbol::PowerVanish(k) => {
                let kf = *k as f64;
                math::exp(log_min + kf * math::ln(pf) - math::lgamma(kf + 1.0))
            }
            Symbol::ExpInverse => -log_min / math::sqrt(pf),
            Symbol::DiscIndicator(r) => {
                let log_vol = 2.0 * math::ln(*r) - math::ln_1p(r * r);
                math::exp(log_min - (pf + 1.0) * log_vol)
            }
            _ => f64::NAN,
        };
        rows.push(MinEigRow {
            p,
            lambda_min: s.lambda_min(),
            log_lambda_min: log_min,
            scaled,
        });
    }
    Ok(MinEigReport {
        symbol: symbol.clone(),
        rows,
    })
}

#[derive(Clone, Debug)]
pub struct WeylReport {
    pub p: usize,
    /// max over rank of λ_rank(f₁) − λ_rank(f₂), sorted ascending; ≤ 0 up to
    /// roundoff when f₁ ≤ f₂.
    pub max_violation: f64,
}

/// Verify pointwise f₁ ≤ f₂ on a radial probe grid, then compare sorted
/// spectra. Rejects inputs that are not actually ordered.
pub fn weyl_monotonicity_check(
    f1: &Symbol,
    f2: &Symbol,
    p: usize,
) -> Result<WeylReport, SpectrumError> {
    f1.validate()?;
    f2.validate()?;
    if !f1.is_radial() || !f2.is_radial() {
        return Err(SpectrumError::NonRadial);
    }
    let mut probes: Vec<f64> = Vec::new();
    for i in 0..=512usize {
        let u = i as f64 / 513.0;
        probes.push(math::sqrt(u / (1.0 - u)));
    }
    for t in f1.breakpoints_t().iter().chain(f2.breakpoints_t().iter()) {
        let r = math::sqrt(*t);
        probes.push((r - 1e-9).max(0.0));
        probes.push(r + 1e-9);
        probes.push(r);
    }
    for &rho in &probes {
        let a = f1.eval_radial(rho)?;
        let b = f2.eval_radial(rho)?;
        if a > b + 1e-12 {
            return Err(SpectrumError::NotPointwiseOrdered { rho });
        }
    }
    let s1 = spectrum(f1, p)?;
    let s2 = spectrum(f2, p)?;
    let mut a = s1.lambdas.clone();
    let mut b = s2.lambdas.clone();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let max_violation = a
        .iter()
        .zip(&b)
        .map(|(x, y)| x - y)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(WeylReport { p, max_violation })
}

/// Empirical spectral distribution against its semiclassical limit: the
/// fraction of eigenvalues above a threshold converges to the volume of the
/// symbol's superlevel set.
#[derive(Clone, Debug)]
pub struct CdfCompareRow {
    pub threshold: f64,
    pub fraction_above: f64,
    pub limit_volume: f64,
    pub gap: f64,
}

pub fn spectral_cdf_compare(
    symbol: &Symbol,
    p: usize,
    thresholds: &[f64],
) -> Result<Vec<CdfCompareRow>, SpectrumError> {
    let s = spectrum(symbol, p)?;
    let n = (p + 1) as f64;
    let mut rows = Vec::with_capacity(thresholds.len());
    for &a in thresholds {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(SpectrumError::InvalidSymbol(
                "threshold must be finite and >= 0",
            ));
        }
        let count = s.lambdas.iter().filter(|&&l| l > a).count();
        let fraction = count as f64 / n;
        let vol = symbol.superlevel_volume(a)?;
        rows.push(CdfCompareRow {
            threshold: a,
            fraction_above: fraction,
            limit_volume: vol,
            gap: fraction - vol,
        });
    }
    Ok(rows)
}
