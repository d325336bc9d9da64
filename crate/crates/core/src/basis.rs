//! Orthonormal monomial basis of the degree-p holomorphic sections over the
//! sphere: S_j(z) = √((p+1)·C(p,j))·z^j, pointwise weighted norms, and the
//! reproducing-kernel diagonal.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::geometry::ChartPoint;
use crate::math;

/// Hard degree cap: beyond this the coefficient dynamic range leaves double
/// precision even after the sampler's power-of-two rescaling.
pub const P_MAX: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BasisError {
    PMaxExceeded { p: usize },
    IndexOutOfRange { p: usize, j: usize },
}

impl fmt::Display for BasisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisError::PMaxExceeded { p } => write!(f, "degree {p} exceeds cap {P_MAX}"),
            BasisError::IndexOutOfRange { p, j } => write!(f, "basis index {j} > degree {p}"),
        }
    }
}

impl core::error::Error for BasisError {}

pub fn check_degree(p: usize) -> Result<(), BasisError> {
    if p > P_MAX {
        return Err(BasisError::PMaxExceeded { p });
    }
    Ok(())
}

/// ln √((p+1)·C(p,j)).
pub fn ln_norm_coeff(p: usize, j: usize) -> f64 {
    debug_assert!(j <= p);
    0.5 * (math::ln(p as f64 + 1.0) + math::ln_binomial(p, j))
}

/// √((p+1)·C(p,j)); exact integer path when the binomial fits.
pub fn norm_coeff(p: usize, j: usize) -> Result<f64, BasisError> {
    check_degree(p)?;
    if j > p {
        return Err(BasisError::IndexOutOfRange { p, j });
    }
    if let Some(c) = math::binomial_exact_u128(p, j) {
        Ok(math::sqrt((p as f64 + 1.0) * c as f64))
    } else {
        Ok(math::exp(ln_norm_coeff(p, j)))
    }
}

/// Pointwise weighted norm |s(z)|·(1+|z|²)^{−p/2} of the section with the
/// given monomial coefficients (degree p = len−1).
///
/// For |z| > 1 the reversed polynomial at 1/z is used, so the result stays
/// finite over the whole chart; at ∞ the convention is the leading
/// coefficient magnitude |c_p|.
pub fn pointwise_hp_norm(coeffs: &[Complex64], z: ChartPoint) -> f64 {
    assert!(!coeffs.is_empty());
    let p = coeffs.len() - 1;
    let zc = match z.to_complex() {
        None => return coeffs[p].norm(),
        Some(zc) => zc,
    };
    if zc.norm_sqr() <= 1.0 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            acc = acc * zc + c;
        }
        acc.norm() * math::exp(-(p as f64 / 2.0) * math::ln_1p(zc.norm_sqr()))
    } else {
        // |Σ c_j z^j|·(1+|z|²)^{−p/2} = |Σ c_{p−m} u^m|·(1+|u|²)^{−p/2}, u = 1/z.
        let u = 1.0 / zc;
        let mut acc = Complex64::new(0.0, 0.0);
        for c in coeffs.iter() {
            acc = acc * u + c;
        }
        acc.norm() * math::exp(-(p as f64 / 2.0) * math::ln_1p(u.norm_sqr()))
    }
}

/// Reproducing-kernel diagonal Σ_j (p+1)·C(p,j)·|z|^{2j}·(1+|z|²)^{−p},
/// summed explicitly in log domain. Identically p+1 on the sphere; the
/// explicit sum is kept as a consistency oracle.
pub fn bergman_diag(p: usize, z: ChartPoint) -> f64 {
    if z.is_infinity() {
        return p as f64 + 1.0;
    }
    let t = z.abs() * z.abs();
    let lnt = if t > 0.0 {
        math::ln(t)
    } else {
        f64::NEG_INFINITY
    };
    let ln1pt = math::ln_1p(t);
    let lp1 = math::ln(p as f64 + 1.0);
    let mut terms: Vec<f64> = Vec::with_capacity(p + 1);
    for j in 0..=p {
        let lt = if j == 0 && t == 0.0 {
            lp1 - (p as f64) * ln1pt
        } else {
            lp1 + math::ln_binomial(p, j) + (j as f64) * lnt - (p as f64) * ln1pt
        };
        terms.push(math::exp(lt));
    }
    math::pairwise_sum(&terms)
}
