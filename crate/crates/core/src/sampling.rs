//! Gaussian random sections and the two-point kernel.
//!
//! A random section attached to a spectrum is the random polynomial
//!
//!   𝑺(z) = Σ_j η_j λ_j √((p+1)C(p,j)) z^j,   η_j i.i.d. standard complex
//!
//! stored with a global power-of-two rescaling so the largest coefficient
//! magnitude sits in [1/2, 1): roots are exactly invariant under the scaling
//! and the dynamic range of deep-tail spectra (λ_p down to 17^{−201}) stays
//! representable via `scale_exponent`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::basis;
use crate::geometry::{fs_distance, ChartPoint};
use crate::math;
use crate::rng::{sample_complex_gaussian, Stream};
use crate::spectra::{spectrum, SpectrumError, Symbol, ToeplitzSpectrum};

/// Coefficients at or below this magnitude after rescaling are recorded as a
/// truncated tail; downstream statistics can exclude such trials.
pub const TRUNCATION_THRESHOLD: f64 = 1e-300;

const RESAMPLE_CAP: u32 = 8;

#[derive(Clone, Debug, PartialEq)]
pub enum SampleError {
    /// Every eigenvalue of the spectrum is exactly zero.
    AllModesVanish,
    /// The all-zero draw persisted through the resample cap (probability
    /// ~2^{−53(p+1)} per attempt; practically unreachable).
    ResampleCapExceeded,
    Spectrum(SpectrumError),
}

impl core::fmt::Display for SampleError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SampleError::AllModesVanish => write!(f, "spectrum has no nonzero eigenvalue"),
            SampleError::ResampleCapExceeded => write!(f, "resample cap exceeded"),
            SampleError::Spectrum(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SampleError {}

impl From<SpectrumError> for SampleError {
    fn from(e: SpectrumError) -> Self {
        SampleError::Spectrum(e)
    }
}

/// One realization of the random section, as a polynomial in the chart
/// coordinate. True coefficients are `coeffs[j] · 2^{−scale_exponent}`.
#[derive(Clone, Debug)]
pub struct SectionSample {
    pub p: usize,
    pub coeffs: Vec<Complex64>,
    pub scale_exponent: i32,
    pub seed: u64,
    pub trial_index: u64,
    /// All-zero draws rejected before this sample was produced.
    pub resamples: u32,
    /// Some positive-λ coefficient still fell below the threshold after
    /// rescaling (deep spectral tails truncate at double precision).
    pub truncated_tail: bool,
    pub truncation_threshold: f64,
}

/// Internal assembly: raw log-magnitudes, rescale, flags. `None` when every
/// coefficient is exactly zero.
fn assemble(spec: &ToeplitzSpectrum, etas: &[Complex64]) -> Option<(Vec<Complex64>, i32, bool)> {
    let p = spec.p;
    debug_assert_eq!(etas.len(), p + 1);
    let mut log_mag = Vec::with_capacity(p + 1);
    let mut max_log = f64::NEG_INFINITY;
    for j in 0..=p {
        let eta_abs = etas[j].norm();
        let l = if eta_abs == 0.0 || spec.log_lambdas[j] == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            math::ln(eta_abs) + spec.log_lambdas[j] + basis::ln_norm_coeff(p, j)
        };
        max_log = max_log.max(l);
        log_mag.push(l);
    }
    if max_log == f64::NEG_INFINITY {
        return None;
    }
    let exponent = -(math::floor(max_log / math::LN_2) as i32 + 1);
    let mut coeffs = Vec::with_capacity(p + 1);
    let mut truncated = false;
    for j in 0..=p {
        if log_mag[j] == f64::NEG_INFINITY {
            if spec.log_lambdas[j] > f64::NEG_INFINITY && etas[j].norm() > 0.0 {
                truncated = true;
            }
            coeffs.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let factor = math::exp(
            spec.log_lambdas[j] + basis::ln_norm_coeff(p, j) + exponent as f64 * math::LN_2,
        );
        let c = etas[j] * factor;
        if c.norm() <= TRUNCATION_THRESHOLD && spec.log_lambdas[j] > f64::NEG_INFINITY {
            truncated = true;
        }
        debug_assert!(c.re.is_finite() && c.im.is_finite());
        coeffs.push(c);
    }
    Some((coeffs, exponent, truncated))
}

/// Draw the section for (seed, trial_index): a pure function of its
/// arguments, identical across runs, platforms, and thread layouts.
pub fn sample_section(
    spec: &ToeplitzSpectrum,
    seed: u64,
    trial_index: u64,
) -> Result<SectionSample, SampleError> {
    if spec.log_lambdas.iter().all(|&l| l == f64::NEG_INFINITY) {
        return Err(SampleError::AllModesVanish);
    }
    let mut stream = Stream::for_trial(seed, trial_index);
    let mut etas = Vec::with_capacity(spec.p + 1);
    for attempt in 0..RESAMPLE_CAP {
        etas.clear();
        for _ in 0..=spec.p {
            etas.push(sample_complex_gaussian(&mut stream));
        }
        if let Some((coeffs, scale_exponent, truncated_tail)) = assemble(spec, &etas) {
            return Ok(SectionSample {
                p: spec.p,
                coeffs,
                scale_exponent,
                seed,
                trial_index,
                resamples: attempt,
                truncated_tail,
                truncation_threshold: TRUNCATION_THRESHOLD,
            });
        }
    }
    Err(SampleError::ResampleCapExceeded)
}

/// Test hook: same assembly with caller-supplied η_j instead of draws.
pub fn sample_section_with_etas(
    spec: &ToeplitzSpectrum,
    etas: &[Complex64],
) -> Result<SectionSample, SampleError> {
    let (coeffs, scale_exponent, truncated_tail) =
        assemble(spec, etas).ok_or(SampleError::AllModesVanish)?;
    Ok(SectionSample {
        p: spec.p,
        coeffs,
        scale_exponent,
        seed: 0,
        trial_index: 0,
        resamples: 0,
        truncated_tail,
        truncation_threshold: TRUNCATION_THRESHOLD,
    })
}

/// ln |𝑺(z)|_{h_p} at true scale (the stored power-of-two shift undone).
/// −∞ exactly at zeros of the section.
pub fn log_hp_norm(sample: &SectionSample, z: ChartPoint) -> f64 {
    let weighted = basis::pointwise_hp_norm(&sample.coeffs, z);
    math::ln(weighted) - sample.scale_exponent as f64 * math::LN_2
}

/// Two-point kernel data at (z, w): the diagonal values, the off-diagonal
/// modulus, and the normalized kernel N = |T²(z,w)|/√(T²(z,z)·T²(w,w)).
#[derive(Clone, Debug)]
pub struct KernelValue {
    pub z: ChartPoint,
    pub w: ChartPoint,
    pub t2_diag_z: f64,
    pub t2_diag_w: f64,
    pub t2_offdiag_abs: f64,
    /// In [0,1]; exactly 1 when z and w are the same point.
    pub normalized: f64,
    /// ln of `normalized`: stays finite long after the linear value
    /// underflows (far-field values at large p reach e^{−600}).
    pub log_normalized: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum KernelError {
    /// T²(z,z) = 0 at a query point: the symbol annihilates every mode the
    /// point can see (impossible for the built-in families).
    ZeroDiagonal,
}

impl core::fmt::Display for KernelError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            KernelError::ZeroDiagonal => write!(f, "kernel diagonal vanishes at a query point"),
        }
    }
}

impl core::error::Error for KernelError {}

/// ln T²(z,z) = ln Σ_j λ_j² (p+1)C(p,j) t^j/(1+t)^p, in the log domain so
/// deep spectral tails cannot underflow the sum.
pub fn t2_log_diag(spec: &ToeplitzSpectrum, z: ChartPoint) -> f64 {
    let p = spec.p;
    if z.is_infinity() {
        return 2.0 * spec.log_lambdas[p] + math::ln(p as f64 + 1.0);
    }
    let t = z.abs() * z.abs();
    let mut terms = Vec::with_capacity(p + 1);
    for j in 0..=p {
        if spec.log_lambdas[j] == f64::NEG_INFINITY {
            continue;
        }
        let log_weight = if t == 0.0 {
            if j == 0 {
                0.0
            } else {
                continue;
            }
        } else {
            j as f64 * math::ln(t)
        };
        terms.push(
            2.0 * spec.log_lambdas[j] + 2.0 * basis::ln_norm_coeff(p, j) + log_weight
                - p as f64 * math::ln_1p(t),
        );
    }
    math::log_sum_exp(&terms)
}

/// T²(z,z): expected squared h_p-norm of the random section at z.
pub fn t2_diag(spec: &ToeplitzSpectrum, z: ChartPoint) -> f64 {
    math::exp(t2_log_diag(spec, z))
}

/// ln |T²(z,w)|. Phase cancellations between modes are honored by a scaled
/// complex sum around the dominant log-magnitude.
fn t2_log_offdiag_abs(spec: &ToeplitzSpectrum, z: ChartPoint, w: ChartPoint) -> f64 {
    let p = spec.p;
    match (z.to_complex(), w.to_complex()) {
        (None, None) => 2.0 * spec.log_lambdas[p] + math::ln(p as f64 + 1.0),
        (None, Some(b)) => {
            // Only j = p survives; |T²(∞,w)| = λ_p²(p+1)|w|^p/(1+|w|²)^{p/2}.
            let t = b.norm_sqr();
            if t == 0.0 && p > 0 {
                return f64::NEG_INFINITY;
            }
            let log_weight = if p == 0 {
                0.0
            } else {
                (p as f64 / 2.0) * math::ln(t)
            };
            2.0 * spec.log_lambdas[p] + math::ln(p as f64 + 1.0) + log_weight
                - (p as f64 / 2.0) * math::ln_1p(t)
        }
        (Some(_), None) => t2_log_offdiag_abs(spec, w, z),
        (Some(a), Some(b)) => {
            let x = a * b.conj();
            let r = x.norm();
            let theta = math::atan2(x.im, x.re);
            let half_p = p as f64 / 2.0;
            let log_denom = half_p * (math::ln_1p(a.norm_sqr()) + math::ln_1p(b.norm_sqr()));
            let mut logs = Vec::with_capacity(p + 1);
            for j in 0..=p {
                if spec.log_lambdas[j] == f64::NEG_INFINITY {
                    logs.push(f64::NEG_INFINITY);
                    continue;
                }
                let log_weight = if r == 0.0 {
                    if j == 0 {
                        0.0
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    j as f64 * math::ln(r)
                };
                logs.push(
                    2.0 * spec.log_lambdas[j] + 2.0 * basis::ln_norm_coeff(p, j) + log_weight
                        - log_denom,
                );
            }
            let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if m == f64::NEG_INFINITY {
                return f64::NEG_INFINITY;
            }
            let mut re = math::KahanSum::new();
            let mut im = math::KahanSum::new();
            for (j, &l) in logs.iter().enumerate() {
                if l == f64::NEG_INFINITY {
                    continue;
                }
                let mag = math::exp(l - m);
                let phase = j as f64 * theta;
                re.add(mag * math::cos(phase));
                im.add(mag * math::sin(phase));
            }
            m + 0.5 * math::ln(re.value() * re.value() + im.value() * im.value())
        }
    }
}

/// Normalized two-point kernel with its ingredients. Symmetric in (z, w);
/// N ∈ [0,1] by Cauchy–Schwarz, clamped against last-ulp excursions.
pub fn normalized_kernel(
    spec: &ToeplitzSpectrum,
    z: ChartPoint,
    w: ChartPoint,
) -> Result<KernelValue, KernelError> {
    let log_zz = t2_log_diag(spec, z);
    let log_ww = t2_log_diag(spec, w);
    if log_zz == f64::NEG_INFINITY || log_ww == f64::NEG_INFINITY {
        return Err(KernelError::ZeroDiagonal);
    }
    let same = z == w;
    let log_zw = if same {
        log_zz
    } else {
        t2_log_offdiag_abs(spec, z, w)
    };
    let log_normalized = if same {
        0.0
    } else {
        (log_zw - 0.5 * log_zz - 0.5 * log_ww).min(0.0)
    };
    Ok(KernelValue {
        z,
        w,
        t2_diag_z: math::exp(log_zz),
        t2_diag_w: math::exp(log_ww),
        t2_offdiag_abs: math::exp(log_zw),
        normalized: math::exp(log_normalized),
        log_normalized,
    })
}

/// One near-diagonal probe: offset |w − base| = c/√p, compared against the
/// Gaussian model N ≈ exp(−(pπ/2)·dist²).
#[derive(Clone, Debug)]
pub struct KernelDecayRow {
    pub p: usize,
    pub c: f64,
    pub dist: f64,
    pub log_n: f64,
    /// −log N / ((pπ/2)·dist²); → 1 under the near-diagonal asymptotics.
    pub ratio: f64,
}

/// One far-field probe at dist = 2√(ln p / p), with the polynomial bound
/// N ≤ p^{−2} it must satisfy.
#[derive(Clone, Debug)]
pub struct KernelFarRow {
    pub p: usize,
    pub dist: f64,
    pub log_n: f64,
    pub log_bound: f64,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct KernelDecayReport {
    pub base: ChartPoint,
    pub near: Vec<KernelDecayRow>,
    pub far: Vec<KernelFarRow>,
}

/// Probe the normalized kernel around a base point where the symbol does not
/// vanish: near-diagonal offsets c/√p for each c, plus one far-field probe
/// per degree. Offsets are taken along the positive real chart direction.
pub fn kernel_gaussian_decay_check(
    symbol: &Symbol,
    base: ChartPoint,
    p_list: &[usize],
    offsets: &[f64],
) -> Result<KernelDecayReport, SpectrumError> {
    let base_c = base.to_complex().expect("finite base point");
    let mut near = Vec::new();
    let mut far = Vec::new();
    for &p in p_list {
        let spec = spectrum(symbol, p)?;
        for &c in offsets {
            let w = ChartPoint::new(base_c.re + c / math::sqrt(p as f64), base_c.im);
            let kv = normalized_kernel(&spec, base, w).expect("nonvanishing diagonal");
            let dist = fs_distance(base, w);
            let model = (p as f64) * math::PI / 2.0 * dist * dist;
            near.push(KernelDecayRow {
                p,
                c,
                dist,
                log_n: kv.log_normalized,
                ratio: -kv.log_normalized / model,
            });
        }
        let target = 2.0 * math::sqrt(math::ln(p as f64) / p as f64);
        let w = offset_at_distance(base_c, target);
        let kv = normalized_kernel(&spec, base, w).expect("nonvanishing diagonal");
        let log_bound = -2.0 * math::ln(p as f64);
        far.push(KernelFarRow {
            p,
            dist: fs_distance(base, w),
            log_n: kv.log_normalized,
            log_bound,
            ok: kv.log_normalized <= log_bound,
        });
    }
    Ok(KernelDecayReport { base, near, far })
}

/// Point at the given spherical distance from `base`, along the positive
/// real chart direction, found by bisection (the distance is monotone in the
/// offset until the antipode).
fn offset_at_distance(base: Complex64, target: f64) -> ChartPoint {
    let dist_of = |d: f64| {
        fs_distance(
            ChartPoint::from_complex(base),
            ChartPoint::new(base.re + d, base.im),
        )
    };
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while dist_of(hi) < target && hi < 1e12 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dist_of(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ChartPoint::new(base.re + 0.5 * (lo + hi), base.im)
}
