//! Spectral radius computations backing the expander-mixing certificates.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;

use crate::math;

/// Largest absolute eigenvalue of a symmetric row-major `n x n` matrix,
/// padded upward by a backward-error allowance so it can be used as an
/// upper bound on the spectral norm.
pub fn symmetric_spectral_radius(m: &[f64], n: usize) -> f64 {
    assert_eq!(m.len(), n * n);
    if n == 0 {
        return 0.0;
    }
    let frob = math::sqrt(m.iter().map(|x| x * x).sum::<f64>());
    if frob == 0.0 {
        return 0.0;
    }
    let mat = DMatrix::from_row_slice(n, n, m);
    let eig = mat.symmetric_eigenvalues();
    let radius = eig.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    radius + eigen_padding(n, frob)
}

/// Eigenvalues of the symmetric circulant matrix with first row `c`
/// (`c[j] == c[n - j]`): `λ_k = Σ_j c_j cos(2πjk/n)`.
pub fn symmetric_circulant_eigenvalues(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    (0..n)
        .map(|k| {
            math::sum_compensated(c.iter().enumerate().map(|(j, &cj)| {
                // Reduce jk mod n first so the cosine argument stays in [0, 2π).
                let r = ((j * k) % n) as f64;
                cj * math::cos(2.0 * PI * r / n as f64)
            }))
        })
        .collect()
}

/// Upper bound on the spectral radius of a symmetric circulant matrix.
pub fn symmetric_circulant_spectral_radius(c: &[f64]) -> f64 {
    let n = c.len();
    if n == 0 {
        return 0.0;
    }
    let radius = symmetric_circulant_eigenvalues(c).iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    let l1: f64 = c.iter().map(|x| x.abs()).sum();
    radius + 16.0 * f64::EPSILON * n as f64 * l1
}

fn eigen_padding(n: usize, frob: f64) -> f64 {
    16.0 * f64::EPSILON * n as f64 * frob
}
