//! Frames in the quaternionic Stiefel manifold `X_{n,k}` written as
//! `x = [T; P]` with `P` the bottom `k x k` block, together with the
//! admissibility test for `P`, the canonical completion, the projection
//! `Sp(n) -> X_{n,k}`, the inclusion `Sp(k) -> X_{n,k}`, and Haar sampling.

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::quatcore::householder;
use crate::quatcore::{QMatrix, Quaternion};
use crate::spectral::{self, SingularClasses};

/// Default tolerance for frame and group-membership checks.
pub const FRAME_TOL: f64 = 1e-9;

/// Orthonormal `k`-frame in `H^n`, split as `x = [T; P]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StiefelFrame {
    n: usize,
    k: usize,
    t: QMatrix,
    p: QMatrix,
}

impl StiefelFrame {
    /// Checks `T*T + P*P = I_k` within `tol` (Frobenius).
    pub fn new(t: QMatrix, p: QMatrix, tol: f64) -> Result<Self> {
        let frame = Self::from_blocks_unchecked(t, p)?;
        let defect = frame.defect();
        if defect > tol {
            return Err(Error::Consistency(format!(
                "not an orthonormal frame: ||x*x - I||_F = {defect:e}"
            )));
        }
        Ok(frame)
    }

    /// Shape-checked construction without the orthonormality test.
    pub fn from_blocks_unchecked(t: QMatrix, p: QMatrix) -> Result<Self> {
        let k = p.rows();
        if !p.is_square() || t.cols() != k {
            return Err(Error::DimensionMismatch(format!(
                "frame blocks T {}x{} and P {}x{}",
                t.rows(),
                t.cols(),
                p.rows(),
                p.cols()
            )));
        }
        Ok(Self {
            n: t.rows() + k,
            k,
            t,
            p,
        })
    }

    /// Splits an `n x k` matrix into `[T; P]`.
    pub fn from_stacked(x: &QMatrix, tol: f64) -> Result<Self> {
        let (n, k) = x.shape();
        if k > n {
            return Err(Error::InvalidDimensions(format!("{n}x{k} frame has k > n")));
        }
        Self::new(x.block(0, 0, n - k, k), x.block(n - k, 0, k, k), tol)
    }

    /// The base point `x_0 = [0; I_k]`.
    pub fn base_point(n: usize, k: usize) -> Result<Self> {
        check_dims(n, k)?;
        Ok(Self {
            n,
            k,
            t: QMatrix::zeros(n - k, k),
            p: QMatrix::identity(k),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> &QMatrix {
        &self.t
    }

    pub fn p(&self) -> &QMatrix {
        &self.p
    }

    /// `x = [T; P]` as one `n x k` matrix.
    pub fn stacked(&self) -> QMatrix {
        QMatrix::vstack(&self.t, &self.p).expect("consistent blocks")
    }

    /// `||x*x - I_k||_F`.
    pub fn defect(&self) -> f64 {
        self.stacked().orthonormality_defect()
    }
}

/// Why a block fails (or passes) the admissibility test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdmissibilityReason {
    Ok,
    EigenvalueAboveOne,
    MultiplicityBelowExcess,
}

impl fmt::Display for AdmissibilityReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ok => "ok",
            Self::EigenvalueAboveOne => "eigenvalue_above_one",
            Self::MultiplicityBelowExcess => "multiplicity_below_excess",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub n: usize,
    pub k: usize,
    /// `e = 2k - n`.
    pub excess: i64,
    /// Singular values of `P`, descending.
    pub sigma: Vec<f64>,
    /// Classes of the singular values clamped to `[0, 1]`.
    pub classes: SingularClasses,
    pub reason: AdmissibilityReason,
}

/// Whether `[T; P]` can be an element of `X_{n,k}` for some `T`: every
/// singular value of `P` is at most 1 and the value 1 occurs at least
/// `2k - n` times.
pub fn is_admissible(p: &QMatrix, n: usize, tol: f64) -> Result<AdmissibilityReport> {
    if !p.is_square() {
        return Err(Error::NotSquare {
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    let k = p.rows();
    check_dims(n, k)?;
    let f = spectral::qsvd(p)?;
    admissibility_from_sigma(f.sigma, n, k, tol)
}

fn admissibility_from_sigma(
    sigma: Vec<f64>,
    n: usize,
    k: usize,
    tol: f64,
) -> Result<AdmissibilityReport> {
    let excess = 2 * k as i64 - n as i64;
    let above = sigma.iter().any(|&s| s > 1.0 + tol);
    let clamped: Vec<f64> = sigma.iter().map(|&s| s.min(1.0)).collect();
    let classes = spectral::classify_singular(&clamped, tol, tol)?;
    let reason = if above {
        AdmissibilityReason::EigenvalueAboveOne
    } else if (classes.p as i64) < excess.max(0) {
        AdmissibilityReason::MultiplicityBelowExcess
    } else {
        AdmissibilityReason::Ok
    };
    Ok(AdmissibilityReport {
        admissible: reason == AdmissibilityReason::Ok,
        n,
        k,
        excess,
        sigma,
        classes,
        reason,
    })
}

/// Canonical companion of an admissible `P = U diag(I_p, t_i, 0_r) V*`:
/// `T = [0_{p' x p}, 0, 0; 0, diag(s_i), 0; 0, 0, I_r] V*` with
/// `s_i = sqrt(1 - t_i^2)` and `p' = n - k - q - r` zero rows on top.
pub fn complete(p: &QMatrix, n: usize, tol: f64) -> Result<StiefelFrame> {
    if !p.is_square() {
        return Err(Error::NotSquare {
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    let k = p.rows();
    check_dims(n, k)?;
    let f = spectral::qsvd(p)?;
    let report = admissibility_from_sigma(f.sigma.clone(), n, k, tol)?;
    if !report.admissible {
        return Err(Error::Inadmissible(Box::new(report)));
    }
    let SingularClasses { p: ones, q, r, .. } = report.classes;
    let rows = n - k;
    let p_prime = rows - q - r;
    let mut middle = QMatrix::zeros(rows, k);
    for (i, &t) in report.classes.interior.iter().enumerate() {
        let s = ((1.0 - t) * (1.0 + t)).sqrt();
        middle[(p_prime + i, ones + i)] = Quaternion::real(s);
    }
    for i in 0..r {
        middle[(p_prime + q + i, ones + q + i)] = Quaternion::ONE;
    }
    let t = &middle * &f.v.adjoint();
    StiefelFrame::from_blocks_unchecked(t, p.clone())
}

/// Projection `Sp(n) -> X_{n,k}` onto the last `k` columns.
pub fn rho(a: &QMatrix, k: usize, tol: f64) -> Result<StiefelFrame> {
    check_symplectic(a, tol)?;
    let n = a.rows();
    check_dims(n, k)?;
    StiefelFrame::from_blocks_unchecked(a.block(0, n - k, n - k, k), a.block(n - k, n - k, k, k))
}

/// Canonical inclusion `Sp(k) -> X_{n,k}`, `P -> [0; P]`.
pub fn iota(p: &QMatrix, n: usize, tol: f64) -> Result<StiefelFrame> {
    check_symplectic(p, tol)?;
    let k = p.rows();
    check_dims(n, k)?;
    StiefelFrame::from_blocks_unchecked(QMatrix::zeros(n - k, k), p.clone())
}

/// `||A A* - I||_F`, erroring above `tol` or on a non-square input.
pub fn check_symplectic(a: &QMatrix, tol: f64) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let defect = a.co_orthonormality_defect();
    if !(defect <= tol) {
        return Err(Error::NotSymplectic { defect });
    }
    Ok(defect)
}

fn check_dims(n: usize, k: usize) -> Result<()> {
    if k > n {
        return Err(Error::InvalidDimensions(format!("k = {k} exceeds n = {n}")));
    }
    Ok(())
}

/// Quaternion with four independent standard normal components.
pub fn gaussian_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    Quaternion::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    )
}

/// Haar-distributed element of `Sp(n)`: the `Q` factor of a Gaussian matrix
/// with the diagonal of `R` made positive real.
pub fn sample_sp<R: Rng + ?Sized>(n: usize, rng: &mut R) -> QMatrix {
    let g = QMatrix::from_fn(n, n, |_, _| gaussian_quaternion(rng));
    householder::qr(&g).q
}

/// Uniform frame on `X_{n,k}` as `rho(sample_sp(n), k)`.
pub fn sample_stiefel<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<StiefelFrame> {
    check_dims(n, k)?;
    let a = sample_sp(n, rng);
    StiefelFrame::from_blocks_unchecked(a.block(0, n - k, n - k, k), a.block(n - k, n - k, k, k))
}

/// The generator behind all seeded entry points.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quat_diag(entries: &[f64]) -> QMatrix {
        QMatrix::diag_real(entries)
    }

    #[test]
    fn zero_block_is_admissible_at_twice_the_size() {
        for k in 1..5 {
            let r = is_admissible(&QMatrix::zeros(k, k), 2 * k, FRAME_TOL).unwrap();
            assert!(r.admissible);
            assert_eq!(r.excess, 0);
            // one row short and the zero block fails
            let r = is_admissible(&QMatrix::zeros(k, k), 2 * k - 1, FRAME_TOL).unwrap();
            assert!(!r.admissible);
            assert_eq!(r.reason, AdmissibilityReason::MultiplicityBelowExcess);
        }
    }

    #[test]
    fn signed_diagonal_admissibility() {
        // diag(0_s, -I_t, I_r) is n-admissible iff r + t >= 2k - n
        for s in 0..3 {
            for t in 0..3 {
                for r in 0..3 {
                    let k = s + t + r;
                    if k == 0 {
                        continue;
                    }
                    let mut d = vec![0.0; s];
                    d.extend(std::iter::repeat_n(-1.0, t));
                    d.extend(std::iter::repeat_n(1.0, r));
                    for n in k..=2 * k + 1 {
                        let rep = is_admissible(&quat_diag(&d), n, FRAME_TOL).unwrap();
                        let expect = (r + t) as i64 >= 2 * k as i64 - n as i64;
                        assert_eq!(rep.admissible, expect, "s={s} t={t} r={r} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn above_one_is_rejected() {
        let r = is_admissible(&quat_diag(&[2.0]), 2, FRAME_TOL).unwrap();
        assert!(!r.admissible);
        assert_eq!(r.reason, AdmissibilityReason::EigenvalueAboveOne);
        assert!(matches!(
            complete(&quat_diag(&[2.0]), 2, FRAME_TOL),
            Err(Error::Inadmissible(_))
        ));
        assert!(is_admissible(&QMatrix::zeros(3, 3), 2, FRAME_TOL).is_err());
    }

    #[test]
    fn completion_of_one_half() {
        let f = complete(&quat_diag(&[0.5]), 2, FRAME_TOL).unwrap();
        let t = f.t()[(0, 0)];
        assert!((t.w - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(t.x == 0.0 && t.y == 0.0 && t.z == 0.0);
        assert!(f.defect() < 1e-15);
    }

    #[test]
    fn completion_of_unitary_is_empty() {
        let mut rng = seeded_rng(3);
        let p = sample_sp(3, &mut rng);
        let f = complete(&p, 3, FRAME_TOL).unwrap();
        assert_eq!(f.t().shape(), (0, 3));
    }

    #[test]
    fn completion_of_zero_block() {
        let f = complete(&QMatrix::zeros(3, 3), 6, FRAME_TOL).unwrap();
        assert!(f.defect() < 1e-14);
        assert_eq!(f.t().shape(), (3, 3));
        // T = I_3 V*, unitary
        assert!(f.t().orthonormality_defect() < 1e-14);
    }

    #[test]
    fn rho_and_iota_examples() {
        let x0 = rho(&QMatrix::identity(4), 2, FRAME_TOL).unwrap();
        assert_eq!(x0, StiefelFrame::base_point(4, 2).unwrap());
        let mut rng = seeded_rng(5);
        let a = sample_sp(5, &mut rng);
        assert_eq!(rho(&a, 5, FRAME_TOL).unwrap().stacked(), a);
        let f = rho(&a, 2, FRAME_TOL).unwrap();
        assert!(f.defect() < 1e-12);
        assert!(matches!(
            rho(&a.scale(2.0), 2, FRAME_TOL),
            Err(Error::NotSymplectic { .. })
        ));

        assert_eq!(
            iota(&QMatrix::identity(2), 4, FRAME_TOL).unwrap(),
            StiefelFrame::base_point(4, 2).unwrap()
        );
        let f = iota(&QMatrix::diag(&[Quaternion::J]), 3, FRAME_TOL).unwrap();
        assert_eq!(f.t(), &QMatrix::zeros(2, 1));
        assert_eq!(f.p(), &QMatrix::diag(&[Quaternion::J]));
        assert!(iota(&quat_diag(&[0.5]), 2, FRAME_TOL).is_err());
    }

    #[test]
    fn sampling_is_unitary_and_deterministic() {
        let a = sample_sp(6, &mut seeded_rng(42));
        let b = sample_sp(6, &mut seeded_rng(42));
        assert_eq!(a, b);
        assert!(a.co_orthonormality_defect() < 1e-10);
        let f = sample_stiefel(6, 2, &mut seeded_rng(1)).unwrap();
        assert!(f.defect() < 1e-12);
        assert!(sample_stiefel(2, 3, &mut seeded_rng(1)).is_err());
    }
}
