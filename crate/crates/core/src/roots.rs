//! Simultaneous root finding for section polynomials.
//!
//! Aberth–Ehrlich iteration with Newton-polygon initial radii. Points
//! outside the unit disk are handled through the reversed polynomial in
//! u = 1/z, so no |z|^k power is ever formed for |z| > 1 and roots near
//! infinity stay well conditioned in their own chart.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math;
use crate::sampling::SectionSample;

/// Roots beyond this magnitude are counted in `near_infinity`: in the round
/// sphere metric they are within ~1e−8 of the pole.
pub const NEAR_INFINITY: f64 = 1e8;

/// Freeze threshold: an Aberth correction below tol·(1+|z|) stops moving its
/// point.
const FREEZE_TOL: f64 = 1e-13;

const MAX_SWEEPS: u32 = 500;

#[derive(Clone, Debug, PartialEq)]
pub enum RootError {
    EmptyCoefficients,
    NonFiniteCoefficient,
    /// Every coefficient is zero: the zero polynomial has no zero set.
    ZeroPolynomial,
    NotConverged {
        sweeps: u32,
        max_correction: f64,
    },
}

impl core::fmt::Display for RootError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RootError::EmptyCoefficients => write!(f, "no coefficients"),
            RootError::NonFiniteCoefficient => write!(f, "non-finite coefficient"),
            RootError::ZeroPolynomial => write!(f, "zero polynomial has no zero set"),
            RootError::NotConverged {
                sweeps,
                max_correction,
            } => {
                write!(
                    f,
                    "no convergence after {sweeps} sweeps (max correction {max_correction:e})"
                )
            }
        }
    }
}

impl core::error::Error for RootError {}

/// The zero set of a degree-p section: finite roots with multiplicity
/// listed, plus the count at the pole (vanishing leading coefficients).
#[derive(Clone, Debug)]
pub struct ZeroSet {
    pub p: usize,
    pub roots: Vec<Complex64>,
    pub zeros_at_infinity: usize,
    /// Backward error per root: |P(z)| / Σ_k |c_k||z|^k, evaluated in the
    /// chart where |z| ≤ 1. Exact origin zeros report 0.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// |Σ roots + c_{d−1}/c_d| / (1 + |c_{d−1}/c_d| + Σ|roots|) over the
    /// nonzero finite part; 0 when that part is constant.
    pub vieta_gap: f64,
    pub sweeps: u32,
    pub near_infinity: usize,
    pub truncated_tail: bool,
}

impl ZeroSet {
    /// Total zero count on the sphere; equals p for a nonzero section.
    pub fn total(&self) -> usize {
        self.roots.len() + self.zeros_at_infinity
    }

    /// Greedy clustering of the root list at the given absolute tolerance,
    /// for reporting multiplicities. Does not alter the stored roots.
    pub fn clusters(&self, tol: f64) -> Vec<(Complex64, usize)> {
        let mut out: Vec<(Complex64, usize)> = Vec::new();
        for &r in &self.roots {
            match out.iter_mut().find(|(c, _)| (*c - r).norm() <= tol) {
                Some((c, m)) => {
                    *c = (*c * *m as f64 + r) / (*m as f64 + 1.0);
                    *m += 1;
                }
                None => out.push((r, 1)),
            }
        }
        out
    }
}

/// Newton correction P/P′ in the frame appropriate to |z|, paired with the
/// backward error |P(z)|/Σ|c_k||z|^k from the same Horner pass.
fn newton_correction(coeffs: &[Complex64], z: Complex64) -> (Complex64, f64) {
    let d = coeffs.len() - 1;
    if z.norm() <= 1.0 {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        let mut s = 0.0f64;
        for k in (0..=d).rev() {
            dp = dp * z + p;
            p = p * z + coeffs[k];
            s = s * z.norm() + coeffs[k].norm();
        }
        let res = if s == 0.0 { 0.0 } else { p.norm() / s };
        if p == Complex64::new(0.0, 0.0) {
            return (Complex64::new(0.0, 0.0), 0.0);
        }
        if dp == Complex64::new(0.0, 0.0) {
            // Critical point exactly between roots: nudge off it.
            return (Complex64::new(0.1 * (1.0 + z.norm()), 0.0), res);
        }
        (p / dp, res)
    } else {
        // P(z) = z^d Q(u), u = 1/z, Q(u) = Σ c_{d−i} u^i;
        // P′(z) = z^{d−1}(d·Q(u) − u·Q′(u)).
        let u = z.inv();
        let mut q = Complex64::new(0.0, 0.0);
        let mut dq = Complex64::new(0.0, 0.0);
        let mut s = 0.0f64;
        // Q's u^i coefficient is c_{d−i}, so Horner visits c_0, c_1, …, c_d.
        for k in 0..=d {
            dq = dq * u + q;
            q = q * u + coeffs[k];
            s = s * u.norm() + coeffs[k].norm();
        }
        let res = if s == 0.0 { 0.0 } else { q.norm() / s };
        if q == Complex64::new(0.0, 0.0) {
            return (Complex64::new(0.0, 0.0), 0.0);
        }
        let denom = q * d as f64 - u * dq;
        if denom == Complex64::new(0.0, 0.0) {
            return (Complex64::new(0.1 * (1.0 + z.norm()), 0.0), res);
        }
        (z * q / denom, res)
    }
}

/// Backward error |P(z)| / Σ|c_k||z|^k, computed in the frame where every
/// power is bounded by one.
fn backward_residual(coeffs: &[Complex64], z: Complex64) -> f64 {
    let d = coeffs.len() - 1;
    let (val, scale) = if z.norm() <= 1.0 {
        let mut p = Complex64::new(0.0, 0.0);
        let mut s = 0.0f64;
        for k in (0..=d).rev() {
            p = p * z + coeffs[k];
            s = s * z.norm() + coeffs[k].norm();
        }
        (p.norm(), s)
    } else {
        let u = z.inv();
        let mut q = Complex64::new(0.0, 0.0);
        let mut s = 0.0f64;
        for k in 0..=d {
            q = q * u + coeffs[k];
            s = s * u.norm() + coeffs[k].norm();
        }
        (q.norm(), s)
    };
    if scale == 0.0 {
        0.0
    } else {
        val / scale
    }
}

/// Initial points: one circle per upper-convex-hull segment of
/// (i, ln|c_i|), radius from the segment slope, equispaced phases with a
/// per-circle twist so no start lies on a symmetry axis of the polynomial.
fn initial_points(coeffs: &[Complex64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    let pts: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(i, c)| (i, math::ln(c.norm())))
        .collect();
    // Upper convex hull by monotone scan (indices ascending).
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &(x, y) in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // Remove middle points at or below the chord.
            if (y2 - y1) * (x as f64 - x1 as f64) <= (y - y1) * (x2 as f64 - x1 as f64) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    let mut out = Vec::with_capacity(d);
    let mut ring = 0usize;
    for seg in hull.windows(2) {
        let (i0, y0) = seg[0];
        let (i1, y1) = seg[1];
        let m = i1 - i0;
        // |roots| on this ring ≈ exp(−slope) of the hull segment.
        let radius = math::exp(-(y1 - y0) / m as f64).min(1e10).max(1e-10);
        for v in 0..m {
            let angle = 2.0 * math::PI * (v as f64 + 0.5) / m as f64 + 0.4 + ring as f64;
            out.push(Complex64::new(
                radius * math::cos(angle),
                radius * math::sin(angle),
            ));
        }
        ring += 1;
    }
    debug_assert_eq!(out.len(), d);
    out
}

fn aberth_sweeps(coeffs: &[Complex64], z: &mut [Complex64]) -> Result<u32, f64> {
    let n = z.len();
    let d = coeffs.len() - 1;
    // Horner's own rounding bound: a point whose value sits below it is a
    // root of a polynomial within machine distance of the input, and extra
    // sweeps only churn noise (multiple roots never reach the step test).
    let residual_floor = (2 * d + 4) as f64 * f64::EPSILON;
    let mut frozen = vec![false; n];
    for sweep in 1..=MAX_SWEEPS {
        let mut max_step = 0.0f64;
        for i in 0..n {
            if frozen[i] {
                continue;
            }
            let (nc, res) = newton_correction(coeffs, z[i]);
            if res <= residual_floor {
                frozen[i] = true;
                continue;
            }
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let mut diff = z[i] - z[j];
                if diff == Complex64::new(0.0, 0.0) {
                    diff = Complex64::new(1e-12 * (1.0 + z[i].norm()), 1e-12);
                }
                s += diff.inv();
            }
            let denom = Complex64::new(1.0, 0.0) - nc * s;
            let w = if denom == Complex64::new(0.0, 0.0) {
                nc
            } else {
                nc / denom
            };
            z[i] -= w;
            let step = w.norm();
            max_step = max_step.max(step);
            if step <= FREEZE_TOL * (1.0 + z[i].norm()) {
                frozen[i] = true;
            }
        }
        if frozen.iter().all(|&f| f) {
            return Ok(sweep);
        }
        if max_step == 0.0 {
            return Ok(sweep);
        }
    }
    Err(z
        .iter()
        .map(|&zi| newton_correction(coeffs, zi).0.norm())
        .fold(0.0, f64::max))
}

/// All roots of Σ c_k z^k with multiplicity; exact zero coefficients at the
/// ends become origin roots and pole zeros.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<ZeroSet, RootError> {
    if coeffs.is_empty() {
        return Err(RootError::EmptyCoefficients);
    }
    if coeffs
        .iter()
        .any(|c| !c.re.is_finite() || !c.im.is_finite())
    {
        return Err(RootError::NonFiniteCoefficient);
    }
    let p = coeffs.len() - 1;
    let lo = match coeffs.iter().position(|c| c.norm() > 0.0) {
        Some(i) => i,
        None => return Err(RootError::ZeroPolynomial),
    };
    let hi = coeffs.iter().rposition(|c| c.norm() > 0.0).unwrap();
    let zeros_at_infinity = p - hi;
    let inner = &coeffs[lo..=hi];
    let d = hi - lo;

    let mut roots: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); lo];
    let mut residuals: Vec<f64> = vec![0.0; lo];
    let mut sweeps = 0;
    let mut vieta_gap = 0.0;
    if d > 0 {
        let mut z = initial_points(inner);
        let used = match aberth_sweeps(inner, &mut z) {
            Ok(s) => s,
            Err(_) => {
                // Retry from conjugated starts; symmetric configurations can
                // cycle from the first seeding.
                let mut z2: Vec<Complex64> = initial_points(inner)
                    .iter()
                    .map(|w| w.conj() * 1.0001)
                    .collect();
                match aberth_sweeps(inner, &mut z2) {
                    Ok(s) => {
                        z = z2;
                        s + MAX_SWEEPS
                    }
                    Err(max_correction) => {
                        return Err(RootError::NotConverged {
                            sweeps: 2 * MAX_SWEEPS,
                            max_correction,
                        })
                    }
                }
            }
        };
        sweeps = used;
        let target = -(inner[d - 1] / inner[d]);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        for &r in &z {
            sum += r;
            abs_sum += r.norm();
            roots.push(r);
            residuals.push(backward_residual(inner, r));
        }
        vieta_gap = (sum - target).norm() / (1.0 + target.norm() + abs_sum);
    }
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    let near_infinity = roots.iter().filter(|r| r.norm() > NEAR_INFINITY).count();
    Ok(ZeroSet {
        p,
        roots,
        zeros_at_infinity,
        residuals,
        max_residual,
        vieta_gap,
        sweeps,
        near_infinity,
        truncated_tail: false,
    })
}

/// Zero set of a sampled section. Roots are invariant under the stored
/// power-of-two rescaling, so the scaled coefficients are used directly.
pub fn section_zeros(sample: &SectionSample) -> Result<ZeroSet, RootError> {
    let mut zs = polynomial_roots(&sample.coeffs)?;
    zs.truncated_tail = sample.truncated_tail;
    Ok(zs)
}

/// Independent re-verification of a zero set against its coefficients:
/// recomputed max backward error, plus the Vieta sum check (roots against
/// −c_{d−1}/c_d to 1e−8 relative) when no zero sits at the pole.
pub fn residual_check(coeffs: &[Complex64], zeros: &ZeroSet) -> Result<f64, RootError> {
    if coeffs.is_empty() {
        return Err(RootError::EmptyCoefficients);
    }
    let hi = coeffs
        .iter()
        .rposition(|c| c.norm() > 0.0)
        .ok_or(RootError::ZeroPolynomial)?;
    let lo = coeffs.iter().position(|c| c.norm() > 0.0).unwrap();
    let inner = &coeffs[lo..=hi];
    let mut max_res = 0.0f64;
    for r in &zeros.roots {
        if r.norm() == 0.0 {
            continue;
        }
        max_res = max_res.max(backward_residual(inner, *r));
    }
    if zeros.zeros_at_infinity == 0 && hi > 0 {
        let target = -(coeffs[hi - 1] / coeffs[hi]);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        for r in &zeros.roots {
            sum += r;
            abs_sum += r.norm();
        }
        let gap = (sum - target).norm() / (1.0 + target.norm() + abs_sum);
        if gap > 1e-8 {
            return Err(RootError::NotConverged {
                sweeps: zeros.sweeps,
                max_correction: gap,
            });
        }
    }
    Ok(max_res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use crate::sampling::sample_section;
    use crate::spectra::spectrum_indicator;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic_exact() {
        // (z − 1)(z + 2) = z² + z − 2.
        let zs = polynomial_roots(&[c(-2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(zs.total(), 2);
        let mut rs: Vec<f64> = zs.roots.iter().map(|r| r.re).collect();
        rs.sort_by(f64::total_cmp);
        assert_relative_eq!(rs[0], -2.0, max_relative = 1e-13);
        assert_relative_eq!(rs[1], 1.0, max_relative = 1e-13);
        assert!(zs.roots.iter().all(|r| math::abs(r.im) < 1e-13));
        assert!(zs.max_residual < 1e-14);
    }

    #[test]
    fn roots_of_unity() {
        let n = 12;
        let mut coeffs = vec![c(0.0, 0.0); n + 1];
        coeffs[0] = c(-1.0, 0.0);
        coeffs[n] = c(1.0, 0.0);
        let zs = polynomial_roots(&coeffs).unwrap();
        assert_eq!(zs.total(), n);
        for r in &zs.roots {
            assert_relative_eq!(r.norm(), 1.0, max_relative = 1e-12);
            let k = math::atan2(r.im, r.re) * n as f64 / (2.0 * math::PI);
            let nearest = math::floor(k + 0.5);
            assert!(math::abs(k - nearest) < 1e-10);
        }
        assert!(zs.max_residual < 1e-14);
        assert!(zs.vieta_gap < 1e-13);
    }

    #[test]
    fn factored_quadratics_and_pole_deflation() {
        // z² − 3z + 2 = (z−1)(z−2).
        let zs = polynomial_roots(&[c(2.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]).unwrap();
        let mut rs: Vec<f64> = zs.roots.iter().map(|r| r.re).collect();
        rs.sort_by(f64::total_cmp);
        assert_relative_eq!(rs[0], 1.0, max_relative = 1e-13);
        assert_relative_eq!(rs[1], 2.0, max_relative = 1e-13);
        assert_eq!(zs.zeros_at_infinity, 0);
        // Vieta: 1 + 2 = −(−3)/1; re-verification passes.
        let res = residual_check(&[c(2.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)], &zs).unwrap();
        assert!(res < 1e-14);
        // z² − 1 = (z−1)(z+1).
        let zs = polynomial_roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let mut rs: Vec<f64> = zs.roots.iter().map(|r| r.re).collect();
        rs.sort_by(f64::total_cmp);
        assert_relative_eq!(rs[0], -1.0, max_relative = 1e-13);
        assert_relative_eq!(rs[1], 1.0, max_relative = 1e-13);
        // Same quadratic at p = 3 with an exact-zero leading coefficient:
        // one zero moves to the pole.
        let zs = polynomial_roots(&[c(2.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(zs.zeros_at_infinity, 1);
        assert_eq!(zs.roots.len(), 2);
        assert_eq!(zs.total(), 3);
    }

    #[test]
    fn origin_and_pole_multiplicities() {
        // z²(1 + 2z) with p = 4: two roots at 0, one at −1/2, one at ∞.
        let zs = polynomial_roots(&[
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(2.0, 0.0),
            c(0.0, 0.0),
        ])
        .unwrap();
        assert_eq!(zs.p, 4);
        assert_eq!(zs.zeros_at_infinity, 1);
        assert_eq!(zs.roots.len(), 3);
        assert_eq!(zs.total(), 4);
        let mut rs: Vec<f64> = zs.roots.iter().map(|r| r.norm()).collect();
        rs.sort_by(f64::total_cmp);
        assert_eq!(rs[0], 0.0);
        assert_eq!(rs[1], 0.0);
        assert_relative_eq!(rs[2], 0.5, max_relative = 1e-13);
    }

    #[test]
    fn well_separated_real_roots_recovered() {
        // Π (z − k/10), k = 1..12, coefficients by convolution.
        let mut coeffs = vec![c(1.0, 0.0)];
        for k in 1..=12 {
            let r = k as f64 / 10.0;
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (i, &a) in coeffs.iter().enumerate() {
                next[i] -= a * r;
                next[i + 1] += a;
            }
            coeffs = next;
        }
        let zs = polynomial_roots(&coeffs).unwrap();
        assert_eq!(zs.total(), 12);
        let mut rs: Vec<f64> = zs.roots.iter().map(|r| r.re).collect();
        rs.sort_by(f64::total_cmp);
        for (i, &r) in rs.iter().enumerate() {
            assert_relative_eq!(r, (i as f64 + 1.0) / 10.0, max_relative = 1e-6);
        }
        assert!(zs.max_residual < 1e-12);
    }

    #[test]
    fn multiple_root_cluster() {
        // (z − 1/2)^4: the cluster spreads at machine scale but count,
        // backward error, and the Vieta sum stay exact.
        let mut coeffs = vec![c(1.0, 0.0)];
        for _ in 0..4 {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (i, &a) in coeffs.iter().enumerate() {
                next[i] -= a * 0.5;
                next[i + 1] += a;
            }
            coeffs = next;
        }
        let zs = polynomial_roots(&coeffs).unwrap();
        assert_eq!(zs.total(), 4);
        for r in &zs.roots {
            assert!((r - c(0.5, 0.0)).norm() < 1e-3);
        }
        assert!(zs.max_residual < 1e-12);
        // The cluster points carry the attainable eps^{1/4} spread, so the
        // root sum is only good to that asymmetry, not machine precision.
        assert!(zs.vieta_gap < 1e-4);
        let cl = zs.clusters(1e-2);
        assert_eq!(cl.len(), 1);
        assert_eq!(cl[0].1, 4);
    }

    #[test]
    fn sampled_section_count_and_residual() {
        let spec = spectrum_indicator(60, 1.0).unwrap();
        for trial in 0..5 {
            let s = sample_section(&spec, 7, trial).unwrap();
            let zs = section_zeros(&s).unwrap();
            assert_eq!(zs.total(), 60);
            assert!(zs.max_residual < 1e-10, "residual {}", zs.max_residual);
            assert!(zs.vieta_gap < 1e-10, "vieta {}", zs.vieta_gap);
        }
    }

    #[test]
    fn conjugation_sends_roots_to_conjugates() {
        let mut st = Stream::for_trial(42, 0);
        let coeffs: Vec<Complex64> = (0..16)
            .map(|_| crate::rng::sample_complex_gaussian(&mut st))
            .collect();
        let conj: Vec<Complex64> = coeffs.iter().map(|x| x.conj()).collect();
        let a = polynomial_roots(&coeffs).unwrap();
        let b = polynomial_roots(&conj).unwrap();
        let mut ar: Vec<(f64, f64)> = a.roots.iter().map(|r| (r.re, -r.im)).collect();
        let mut br: Vec<(f64, f64)> = b.roots.iter().map(|r| (r.re, r.im)).collect();
        ar.sort_by(|x, y| x.partial_cmp(y).unwrap());
        br.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (x, y) in ar.iter().zip(&br) {
            assert_relative_eq!(x.0, y.0, max_relative = 1e-9, epsilon = 1e-11);
            assert_relative_eq!(x.1, y.1, max_relative = 1e-9, epsilon = 1e-11);
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            polynomial_roots(&[]),
            Err(RootError::EmptyCoefficients)
        ));
        assert!(matches!(
            polynomial_roots(&[c(0.0, 0.0), c(0.0, 0.0)]),
            Err(RootError::ZeroPolynomial)
        ));
        assert!(matches!(
            polynomial_roots(&[c(f64::NAN, 0.0)]),
            Err(RootError::NonFiniteCoefficient)
        ));
        // Constant nonzero polynomial: empty zero set on the chart, all p
        // zeros at the pole.
        let zs = polynomial_roots(&[c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(zs.roots.len(), 0);
        assert_eq!(zs.zeros_at_infinity, 2);
    }
}
