#![allow(dead_code)]

use qstiefel::stiefel::{gaussian_quaternion, sample_sp};
use qstiefel::{QMatrix, Quaternion};
use rand::Rng;

pub fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> QMatrix {
    QMatrix::from_fn(rows, cols, |_, _| gaussian_quaternion(rng))
}

/// `U diag(s) V*` with Haar `U, V`.
pub fn with_singular_values(s: &[f64], rng: &mut impl Rng) -> QMatrix {
    let k = s.len();
    let u = sample_sp(k, rng);
    let v = sample_sp(k, rng);
    &(&u * &QMatrix::diag_real(s)) * &v.adjoint()
}

/// Upper triangular with Gaussian entries.
pub fn upper_triangular(n: usize, rng: &mut impl Rng) -> QMatrix {
    QMatrix::from_fn(n, n, |i, j| {
        if i <= j {
            gaussian_quaternion(rng)
        } else {
            Quaternion::ZERO
        }
    })
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn col_norm(m: &QMatrix, j: usize) -> f64 {
    qstiefel::quatcore::matrix::vec_norm(&m.col(j))
}
