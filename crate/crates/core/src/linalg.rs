//! Dense symmetric/Hermitian eigenvalues by cyclic Jacobi rotations.
//! Oracle-grade code path: small matrices, accuracy over speed.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math;

/// Eigenvalues of a real symmetric n×n matrix (row-major, fully stored),
/// ascending. Errors with the residual off-diagonal norm if the sweep cap is
/// hit before convergence.
pub(crate) fn sym_eigvals(a: &mut [f64], n: usize, max_sweeps: usize) -> Result<Vec<f64>, f64> {
    debug_assert_eq!(a.len(), n * n);
    let fro: f64 = math::sqrt(a.iter().map(|x| x * x).sum());
    let tol = 1e-14 * fro.max(1e-300);
    for _ in 0..max_sweeps {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        let off = math::sqrt(2.0 * off);
        if off <= tol {
            let mut eigs: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
            eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
            return Ok(eigs);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if math::abs(apq) <= 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + math::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + math::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                let tau = s / (1.0 + c);
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[i * n + p];
                    let aiq = a[i * n + q];
                    a[i * n + p] = aip - s * (aiq + tau * aip);
                    a[i * n + q] = aiq + s * (aip - tau * aiq);
                    a[p * n + i] = a[i * n + p];
                    a[q * n + i] = a[i * n + q];
                }
            }
        }
    }
    let mut off = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            off += a[i * n + j] * a[i * n + j];
        }
    }
    Err(math::sqrt(2.0 * off))
}

/// Eigenvalues of a Hermitian n×n complex matrix, ascending.
///
/// Uses the real embedding H = X + iY ↦ [[X, −Y], [Y, X]], whose spectrum is
/// that of H with every eigenvalue doubled; the doubled pairs are adjacent
/// after sorting and are collapsed by taking every second entry.
pub(crate) fn hermitian_eigvals(
    h: &[Complex64],
    n: usize,
    max_sweeps: usize,
) -> Result<Vec<f64>, f64> {
    debug_assert_eq!(h.len(), n * n);
    let m = 2 * n;
    let mut b = vec![0.0f64; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h[i * n + j];
            b[i * m + j] = z.re;
            b[(i + n) * m + (j + n)] = z.re;
            b[i * m + (j + n)] = -z.im;
            b[(i + n) * m + j] = z.im;
        }
    }
    let all = sym_eigvals(&mut b, m, max_sweeps)?;
    Ok(all.into_iter().step_by(2).collect())
}
