//! Study determinant and invertibility margins.

use crate::error::{Error, Result};
use crate::quatcore::complex::LogDet;
use crate::quatcore::matrix::QMatrix;
use crate::spectral::golub_kahan;

/// `det chi(M)` in log/phase form. The value is real and nonnegative in exact
/// arithmetic; the phase carries only rounding noise.
pub fn chi_det(m: &QMatrix) -> Result<LogDet> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(m.chi().log_det())
}

/// Natural log of the Study determinant, `0.5 ln |det chi(M)|`.
pub fn log_sdet(m: &QMatrix) -> Result<f64> {
    let d = chi_det(m)?;
    // the phase is only meaningful away from singularity: compare against
    // Hadamard's bound on |det|
    debug_assert!(
        d.is_zero() || d.log_abs < log_hadamard(m) - 18.0 || d.phase.im.abs() < 1e-6,
        "det chi(M) has a non-negligible imaginary part: phase {}",
        d.phase
    );
    Ok(0.5 * d.log_abs)
}

fn log_hadamard(m: &QMatrix) -> f64 {
    // each quaternion column gives two chi columns of the same norm
    (0..m.cols())
        .map(|j| 2.0 * crate::quatcore::matrix::vec_norm(&m.col(j)).ln())
        .sum()
}

/// Study determinant `Sdet(M) = sqrt(|det chi(M)|)`.
pub fn sdet(m: &QMatrix) -> Result<f64> {
    Ok(log_sdet(m)?.exp())
}

/// Result of an invertibility test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Invertibility {
    pub invertible: bool,
    /// `sigma_min / sigma_max` of `chi(M)`, 0 for the zero matrix.
    pub margin: f64,
}

/// Invertibility through the scale-free margin `sigma_min / sigma_max`.
/// Non-square inputs are reported as not invertible with margin 0.
pub fn is_invertible(m: &QMatrix, tol: f64) -> Invertibility {
    if !m.is_square() {
        return Invertibility {
            invertible: false,
            margin: 0.0,
        };
    }
    let margin = invertibility_margin(m);
    Invertibility {
        invertible: margin > tol,
        margin,
    }
}

pub(crate) fn invertibility_margin(m: &QMatrix) -> f64 {
    if m.rows() == 0 {
        return 1.0;
    }
    let sv = match golub_kahan::singular_values(&m.chi()) {
        Ok(sv) => sv,
        Err(_) => return 0.0,
    };
    let max = sv.first().copied().unwrap_or(0.0);
    let min = sv.last().copied().unwrap_or(0.0);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quatcore::quaternion::Quaternion;

    #[test]
    fn identity_has_unit_sdet() {
        for n in 1..6 {
            assert!((sdet(&QMatrix::identity(n)).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn one_by_one_is_the_norm() {
        let m = QMatrix::diag(&[Quaternion::J.scale(2.0)]);
        assert!((sdet(&m).unwrap() - 2.0).abs() < 1e-14);
        let q = Quaternion::new(1.0, 2.0, -2.0, 4.0);
        assert!((sdet(&QMatrix::diag(&[q])).unwrap() - 5.0).abs() < 1e-13);
    }

    #[test]
    fn triangular_is_product_of_diagonal_norms() {
        let mut m = QMatrix::zeros(3, 3);
        let d = [
            Quaternion::new(1.0, 1.0, 0.0, 0.0),
            Quaternion::new(0.0, 0.0, 3.0, 0.0),
            Quaternion::new(0.5, 0.0, 0.0, -0.5),
        ];
        for i in 0..3 {
            m[(i, i)] = d[i];
            for j in (i + 1)..3 {
                m[(i, j)] = Quaternion::new(0.7, -0.2, 0.4, 1.1);
            }
        }
        let expected: f64 = d.iter().map(|q| q.norm()).product();
        assert!((sdet(&m).unwrap() - expected).abs() < 1e-13);
    }

    #[test]
    fn zero_and_rank_deficient() {
        assert_eq!(sdet(&QMatrix::zeros(2, 2)).unwrap(), 0.0);
        let inv = is_invertible(&QMatrix::diag_real(&[2.0, 0.0]), 1e-12);
        assert!(!inv.invertible);
        assert_eq!(inv.margin, 0.0);
        assert_eq!(is_invertible(&QMatrix::zeros(3, 3), 1e-12).margin, 0.0);
    }

    #[test]
    fn invertibility_examples() {
        let inv = is_invertible(&QMatrix::identity(3), 1e-12);
        assert!(inv.invertible);
        assert!((inv.margin - 1.0).abs() < 1e-14);
        let p = QMatrix::diag_real(&[1.0, -1.0]);
        let inv = is_invertible(&(&p + &p), 1e-12);
        assert!(inv.invertible);
        assert!((inv.margin - 1.0).abs() < 1e-14);
        let inv = is_invertible(&QMatrix::diag_real(&[4.0, 1.0]), 1e-12);
        assert!((inv.margin - 0.25).abs() < 1e-14);
    }

    #[test]
    fn non_square_is_an_error() {
        assert!(matches!(
            sdet(&QMatrix::zeros(2, 3)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
        assert!(!is_invertible(&QMatrix::zeros(2, 3), 1e-12).invertible);
    }
}
