//! Fubini–Study geometry of the sphere in the standard affine chart,
//! normalized to total volume 1: distances, disc volumes, and the limiting
//! radial density of equidistributed zeros.
//!
//! All radial profiles use the geodesic distance from the origin
//! r = (1/√π)·arctan|z| ∈ [0, √π/2].

use core::fmt;

use num_complex::Complex64;

use crate::math;

/// Maximal geodesic distance on the sphere, √π/2.
pub const MAX_RADIUS: f64 = math::FS_MAX_RADIUS;

/// A point of the sphere: either a finite chart coordinate or the point at
/// infinity. Divisors on the sphere include ∞ with multiplicity, so infinity
/// is a tagged variant rather than a large float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartPoint {
    re: f64,
    im: f64,
    at_infinity: bool,
}

impl ChartPoint {
    /// Finite chart point. Coordinates must be finite reals.
    pub fn new(re: f64, im: f64) -> Self {
        debug_assert!(re.is_finite() && im.is_finite());
        ChartPoint {
            re,
            im,
            at_infinity: false,
        }
    }

    pub fn infinity() -> Self {
        ChartPoint {
            re: 0.0,
            im: 0.0,
            at_infinity: true,
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }

    pub fn is_infinity(&self) -> bool {
        self.at_infinity
    }

    /// Finite coordinate, if any.
    pub fn to_complex(&self) -> Option<Complex64> {
        if self.at_infinity {
            None
        } else {
            Some(Complex64::new(self.re, self.im))
        }
    }

    /// |z|; ∞ maps to +∞.
    pub fn abs(&self) -> f64 {
        if self.at_infinity {
            f64::INFINITY
        } else {
            math::hypot(self.re, self.im)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeometryError {
    /// Radius outside the domain of the requested profile.
    RadiusOutOfRange { r: f64, max: f64 },
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::RadiusOutOfRange { r, max } => {
                write!(f, "radius {r} outside [0, {max}]")
            }
        }
    }
}

impl core::error::Error for GeometryError {}

/// Geodesic distance from the chart origin: (1/√π)·arctan|z|.
pub fn fs_norm(z: ChartPoint) -> f64 {
    if z.is_infinity() {
        MAX_RADIUS
    } else {
        math::atan(z.abs()) / math::SQRT_PI
    }
}

/// Two-point geodesic distance (1/√π)·arctan(|z−w| / |1+z̄w|).
///
/// Verified against direct integration of the line element along great
/// circles (see the geometry integration tests).
pub fn fs_distance(z: ChartPoint, w: ChartPoint) -> f64 {
    match (z.to_complex(), w.to_complex()) {
        (None, None) => 0.0,
        (Some(a), None) | (None, Some(a)) => math::atan(1.0 / a.norm()) / math::SQRT_PI,
        (Some(a), Some(b)) => {
            let num = (a - b).norm();
            let den = (Complex64::new(1.0, 0.0) + a.conj() * b).norm();
            if den == 0.0 {
                // Antipodal pair.
                return MAX_RADIUS;
            }
            math::atan(num / den) / math::SQRT_PI
        }
    }
}

/// Limiting radial density ψ(r) = √π · sin(2√π r) of zeros of the invariant
/// ensemble, as a density in the geodesic radius r.
pub fn fs_density(r: f64) -> Result<f64, GeometryError> {
    check_radius(r)?;
    Ok(math::SQRT_PI * math::sin(2.0 * math::SQRT_PI * r))
}

/// CDF of `fs_density`: Ψ(r) = sin²(√π r).
pub fn fs_cdf(r: f64) -> Result<f64, GeometryError> {
    check_radius(r)?;
    let s = math::sin(math::SQRT_PI * r);
    Ok(s * s)
}

fn check_radius(r: f64) -> Result<(), GeometryError> {
    // Tiny slack absorbs rounding at the closed endpoint.
    if !(0.0..=MAX_RADIUS * (1.0 + 1e-14)).contains(&r) {
        return Err(GeometryError::RadiusOutOfRange { r, max: MAX_RADIUS });
    }
    Ok(())
}

/// Volume of the chart disc of radius ρ: ρ²/(1+ρ²) under the unit-volume
/// normalization.
pub fn disc_volume(rho: f64) -> Result<f64, GeometryError> {
    if !(rho >= 0.0) {
        return Err(GeometryError::RadiusOutOfRange {
            r: rho,
            max: f64::INFINITY,
        });
    }
    let t = rho * rho;
    Ok(t / (1.0 + t))
}
