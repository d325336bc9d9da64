//! Scalar math kernels: `libm` wrappers, stable summation, log-domain
//! binomials, and the few special functions the statistics need.
//!
//! Every transcendental call in the crate goes through this module so that
//! results do not depend on the platform's libm.

use alloc::vec::Vec;

pub const PI: f64 = core::f64::consts::PI;
pub const LN_2: f64 = core::f64::consts::LN_2;
/// √π.
pub const SQRT_PI: f64 = 1.772_453_850_905_515_9;
/// √π / 2, the maximal Fubini–Study distance (half the sphere circumference).
pub const FS_MAX_RADIUS: f64 = SQRT_PI / 2.0;

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}
#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}
#[inline]
pub fn log10(x: f64) -> f64 {
    libm::log10(x)
}
#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}
#[inline]
pub fn tan(x: f64) -> f64 {
    libm::tan(x)
}
#[inline]
pub fn atan(x: f64) -> f64 {
    libm::atan(x)
}
#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}
#[inline]
pub fn asin(x: f64) -> f64 {
    libm::asin(x)
}

pub fn acos(x: f64) -> f64 {
    libm::acos(x)
}
#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}
#[inline]
pub fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}
#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}
#[inline]
pub fn lgamma(x: f64) -> f64 {
    libm::lgamma(x)
}
/// Exact 2^e as a double (scale-by-power-of-two, no rounding).
#[inline]
pub fn exp2i(e: i32) -> f64 {
    libm::scalbn(1.0, e)
}

/// ln Γ(n+1) = ln n! for integer n.
#[inline]
pub fn ln_factorial(n: usize) -> f64 {
    lgamma(n as f64 + 1.0)
}

/// ln C(n,k) via log-gamma. Caller guarantees k ≤ n.
#[inline]
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Exact C(n,k) in 128-bit integers; `None` on overflow.
/// The running product c·(n−k+i)/i stays integral at every step.
pub fn binomial_exact_u128(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return None;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k {
        c = c.checked_mul((n - k + i) as u128)? / i as u128;
    }
    Some(c)
}

/// Neumaier-compensated accumulator: error of the sum is O(ε)·Σ|xᵢ|
/// independent of the term count.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if abs(self.sum) >= abs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Pairwise (cascade) summation; order-independent for a fixed slice layout.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut k = KahanSum::new();
        for &x in xs {
            k.add(x);
        }
        return k.value();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// log(Σ exp(Lᵢ)) over possibly very negative logs; −∞ entries are ignored.
/// Returns −∞ for an empty or all-(−∞) input.
pub fn log_sum_exp(logs: &[f64]) -> f64 {
    let mut m = f64::NEG_INFINITY;
    for &l in logs {
        if l > m {
            m = l;
        }
    }
    if m == f64::NEG_INFINITY {
        return m;
    }
    let mut acc = KahanSum::new();
    for &l in logs {
        if l > f64::NEG_INFINITY {
            acc.add(exp(l - m));
        }
    }
    m + ln(acc.value())
}

/// ζ(3) by direct series plus an Euler–Maclaurin tail; error far below 1e−14.
pub fn zeta3() -> f64 {
    const N: usize = 20_000;
    let mut terms: Vec<f64> = (1..=N)
        .map(|k| {
            let x = k as f64;
            1.0 / (x * x * x)
        })
        .collect();
    terms.reverse(); // ascending magnitude
    let head = pairwise_sum(&terms);
    let n = N as f64;
    let tail = 0.5 / (n * n) - 0.5 / (n * n * n) + 0.25 / (n * n * n * n);
    head + tail
}

/// Dilogarithm Li₂(x) on [0,1]: direct series for x ≤ 1/2, the standard
/// reflection Li₂(x) + Li₂(1−x) = π²/6 − ln x·ln(1−x) above, so the series
/// argument never exceeds 1/2 and the tail is below 1e−16.
pub fn li2(x: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&x));
    if x == 1.0 {
        return PI * PI / 6.0;
    }
    if x > 0.5 {
        return PI * PI / 6.0 - ln(x) * ln_1p(-x) - li2_series(1.0 - x);
    }
    li2_series(x)
}

fn li2_series(x: f64) -> f64 {
    let mut acc = KahanSum::new();
    let mut pow = x;
    let mut k = 1u32;
    while pow > 1e-18 * (k as f64) * (k as f64) && k < 200 {
        acc.add(pow / ((k as f64) * (k as f64)));
        pow *= x;
        k += 1;
    }
    acc.value()
}

/// Standard normal CDF.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / sqrt(2.0))
}
