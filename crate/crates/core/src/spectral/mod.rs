//! Quaternionic SVD and Hermitian eigendecomposition.
//!
//! Both go through the complex adjoint `chi(M)`, whose singular values come
//! in equal pairs: the complex right singular vector `z = [x; y]` and its
//! partner `J conj(z) = [-conj(y); conj(x)]` span the same quaternionic line
//! `x + j y`. Clusters of (numerically) equal complex singular values are
//! collapsed back to quaternionic columns by a pivoted Gram-Schmidt over
//! that line representation.

pub mod golub_kahan;

use crate::error::{Error, Result};
use crate::quatcore::householder::complete_basis;
use crate::quatcore::matrix::{inner, vec_norm, QMatrix};
use crate::quatcore::quaternion::Quaternion;

/// Default classification tolerance for singular values near 0 and 1.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative gap below which complex singular values are treated as one
/// cluster. Paired values agree to a few ulps of `sigma_max`.
const CLUSTER_TOL: f64 = 1e-12;

/// Quaternionic SVD `M = U diag(sigma) V*`.
#[derive(Clone, Debug)]
pub struct QSvd {
    /// `m x m`, unitary.
    pub u: QMatrix,
    /// Length `min(m, n)`, descending, nonnegative.
    pub sigma: Vec<f64>,
    /// `n x n`, unitary.
    pub v: QMatrix,
}

impl QSvd {
    /// `U diag(sigma) V*` with the rectangular diagonal.
    pub fn reconstruct(&self) -> QMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut s = QMatrix::zeros(m, n);
        for (i, &x) in self.sigma.iter().enumerate() {
            s[(i, i)] = Quaternion::real(x);
        }
        &(&self.u * &s) * &self.v.adjoint()
    }
}

pub fn qsvd(m: &QMatrix) -> Result<QSvd> {
    if m.rows() < m.cols() {
        let t = qsvd(&m.adjoint())?;
        return Ok(QSvd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    let (rows, n) = m.shape();
    if n == 0 {
        return Ok(QSvd {
            u: QMatrix::identity(rows),
            sigma: Vec::new(),
            v: QMatrix::identity(0),
        });
    }

    let c = golub_kahan::svd(&m.chi())?;
    let csigma = &c.sigma;
    let smax = csigma[0];
    let gap = CLUSTER_TOL * smax.max(f64::MIN_POSITIVE);

    // quaternionic lines of the complex right singular vectors
    let lines: Vec<Vec<Quaternion>> = (0..2 * n)
        .map(|j| {
            (0..n)
                .map(|t| Quaternion::from_complex_pair(c.v[(t, j)], c.v[(n + t, j)]))
                .collect()
        })
        .collect();

    let mut vcols: Vec<Vec<Quaternion>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < 2 * n {
        let mut end = start + 1;
        while end < 2 * n && csigma[end - 1] - csigma[end] <= gap {
            end += 1;
        }
        // complex columns seen so far fix how many quaternionic ones we owe
        let target = (end / 2).min(n);
        let want = target.saturating_sub(vcols.len());
        if want > 0 {
            let picked = pivoted_orthonormal(&lines[start..end], &vcols, want);
            vcols.extend(picked);
        }
        start = end;
    }
    if vcols.len() < n {
        // unreachable with a consistent spectrum; complete deterministically
        let partial = columns_to_matrix(n, &vcols);
        let ext = complete_basis(&partial);
        for j in 0..ext.cols() {
            vcols.push(ext.col(j));
        }
    }
    for v in vcols.iter_mut() {
        normalize_phase(v);
    }

    let sigma: Vec<f64> = (0..n)
        .map(|i| 0.5 * (csigma[2 * i] + csigma[2 * i + 1]))
        .collect();

    // U columns from M v_i, re-orthonormalized in descending order
    let floor = smax * 64.0 * f64::EPSILON * (rows.max(n) as f64);
    let mut ucols: Vec<Vec<Quaternion>> = Vec::with_capacity(rows);
    for (i, v) in vcols.iter().enumerate() {
        if sigma[i] <= floor {
            break;
        }
        let mut w = m.mul_vec(v);
        for _ in 0..2 {
            project_out(&mut w, &ucols);
        }
        let norm = vec_norm(&w);
        if norm <= floor {
            break;
        }
        ucols.push(w.iter().map(|q| q.scale(1.0 / norm)).collect());
    }
    let mut u = columns_to_matrix(rows, &ucols);
    if ucols.len() < rows {
        let ext = complete_basis(&u);
        u = QMatrix::hstack(&u, &ext)?;
    }

    Ok(QSvd {
        u,
        sigma,
        v: columns_to_matrix(n, &vcols),
    })
}

/// Right eigenvalues and eigenvectors of a Hermitian quaternionic matrix.
#[derive(Clone, Debug)]
pub struct HermEig {
    /// Descending.
    pub evals: Vec<f64>,
    /// Unitary; column `i` satisfies `H q_i = q_i evals[i]`.
    pub q: QMatrix,
}

/// Eigendecomposition of Hermitian `H` (within `tol` relative), via the SVD of
/// the positive semidefinite shift `H + ||H||_F I`. Eigenvalues are the
/// Rayleigh quotients of the resulting orthonormal basis.
pub fn herm_eig(h: &QMatrix, tol: f64) -> Result<HermEig> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let scale = h.frobenius_norm();
    let defect = (h - &h.adjoint()).frobenius_norm();
    if defect > tol * scale.max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    let n = h.rows();
    let shifted = h + &QMatrix::identity(n).scale(scale);
    let f = qsvd(&shifted)?;
    let mut pairs: Vec<(f64, Vec<Quaternion>)> = (0..n)
        .map(|j| {
            let v = f.v.col(j);
            let hv = h.mul_vec(&v);
            (inner(&v, &hv).w, v)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let evals = pairs.iter().map(|p| p.0).collect();
    let cols: Vec<Vec<Quaternion>> = pairs.into_iter().map(|p| p.1).collect();
    Ok(HermEig {
        evals,
        q: columns_to_matrix(n, &cols),
    })
}

/// Partition of singular values of a sub-block into `1`, interior, and `0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularClasses {
    /// Count of values equal to 1 within `tol_one`.
    pub p: usize,
    /// Count strictly inside `(0, 1)`.
    pub q: usize,
    /// Count equal to 0 within `tol_zero`.
    pub r: usize,
    /// The `q` interior values, descending.
    pub interior: Vec<f64>,
    pub tol_one: f64,
    pub tol_zero: f64,
}

/// Sorts descending singular values into the `I_p`, `diag(t_i)`, `0_r`
/// blocks. A value above `1 + tol_one` cannot come from a block of a Stiefel
/// frame and is rejected.
pub fn classify_singular(sigma: &[f64], tol_one: f64, tol_zero: f64) -> Result<SingularClasses> {
    if let Some(&bad) = sigma.iter().find(|&&s| s > 1.0 + tol_one) {
        return Err(Error::SingularValueAboveOne {
            value: bad,
            tol: tol_one,
        });
    }
    let mut sorted: Vec<f64> = sigma.iter().map(|&s| s.clamp(0.0, 1.0)).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut out = SingularClasses {
        p: 0,
        q: 0,
        r: 0,
        interior: Vec::new(),
        tol_one,
        tol_zero,
    };
    for s in sorted {
        if s >= 1.0 - tol_one {
            out.p += 1;
        } else if s <= tol_zero {
            out.r += 1;
        } else {
            out.q += 1;
            out.interior.push(s);
        }
    }
    Ok(out)
}

/// Number of singular values above `tol * sigma_max`.
pub fn numerical_rank(m: &QMatrix, tol: f64) -> Result<usize> {
    let sv = golub_kahan::singular_values(&m.chi())?;
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(0);
    }
    // each quaternionic value appears twice in chi(M)
    let complex_rank = sv.iter().filter(|&&s| s > tol * smax).count();
    Ok(complex_rank.div_ceil(2))
}

fn columns_to_matrix(rows: usize, cols: &[Vec<Quaternion>]) -> QMatrix {
    QMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// `w <- w - sum_b b <b, w>`.
fn project_out(w: &mut [Quaternion], basis: &[Vec<Quaternion>]) {
    for b in basis {
        let c = inner(b, w);
        for (x, bi) in w.iter_mut().zip(b) {
            *x -= *bi * c;
        }
    }
}

/// Picks `want` orthonormal vectors from `candidates`, each time taking the
/// candidate with the largest residual against what is already accepted.
fn pivoted_orthonormal(
    candidates: &[Vec<Quaternion>],
    accepted: &[Vec<Quaternion>],
    want: usize,
) -> Vec<Vec<Quaternion>> {
    let mut work: Vec<Vec<Quaternion>> = candidates.to_vec();
    for w in work.iter_mut() {
        project_out(w, accepted);
        project_out(w, accepted);
    }
    let mut out: Vec<Vec<Quaternion>> = Vec::with_capacity(want);
    for _ in 0..want {
        let Some((best, norm)) = work
            .iter()
            .enumerate()
            .map(|(i, w)| (i, vec_norm(w)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            break;
        };
        if norm == 0.0 {
            break;
        }
        let mut pick = work.swap_remove(best);
        // a second pass against everything accepted restores orthogonality
        project_out(&mut pick, accepted);
        project_out(&mut pick, &out);
        let norm = vec_norm(&pick);
        for x in pick.iter_mut() {
            *x = x.scale(1.0 / norm);
        }
        for w in work.iter_mut() {
            project_out(w, std::slice::from_ref(&pick));
            project_out(w, std::slice::from_ref(&pick));
        }
        out.push(pick);
    }
    out
}

/// Right-multiplies `v` by a unit quaternion so that its first entry of
/// non-negligible size becomes positive real.
fn normalize_phase(v: &mut [Quaternion]) {
    let norm = vec_norm(v);
    let threshold = 1e-8 * norm;
    if let Some(lead) = v.iter().find(|q| q.norm() > threshold) {
        let ph = lead.unit().expect("nonzero").conj();
        for x in v.iter_mut() {
            *x *= ph;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn filler(rows: usize, cols: usize, seed: u64) -> QMatrix {
        let mut s = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(3);
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        QMatrix::from_fn(rows, cols, |_, _| {
            Quaternion::new(next(), next(), next(), next())
        })
    }

    fn unitary(n: usize, seed: u64) -> QMatrix {
        crate::quatcore::householder::qr(&filler(n, n, seed)).q
    }

    #[test]
    fn reconstructs_random_matrices() {
        for (m, n) in [(1, 1), (4, 4), (5, 3), (3, 5), (6, 6), (2, 1)] {
            let a = filler(m, n, (m * 7 + n) as u64);
            let f = qsvd(&a).unwrap();
            assert_eq!(f.sigma.len(), m.min(n));
            assert!(f.u.orthonormality_defect() < 1e-12, "{m}x{n} U");
            assert!(f.v.orthonormality_defect() < 1e-12, "{m}x{n} V");
            let err = (&f.reconstruct() - &a).frobenius_norm();
            assert!(err <= 1e-10 * a.frobenius_norm(), "{m}x{n}: {err}");
            assert!(f.sigma.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn zero_matrix() {
        let f = qsvd(&QMatrix::zeros(3, 3)).unwrap();
        assert_eq!(f.sigma, vec![0.0; 3]);
        assert!(f.u.orthonormality_defect() < 1e-14);
        assert!(f.v.orthonormality_defect() < 1e-14);
    }

    #[test]
    fn diagonal_input_gives_identity_factors() {
        let f = qsvd(&QMatrix::diag_real(&[3.0, 1.0])).unwrap();
        assert!((f.sigma[0] - 3.0).abs() < 1e-14 && (f.sigma[1] - 1.0).abs() < 1e-14);
        assert!((&f.u - &QMatrix::identity(2)).frobenius_norm() < 1e-13);
        assert!((&f.v - &QMatrix::identity(2)).frobenius_norm() < 1e-13);
    }

    #[test]
    fn repeated_values_keep_the_subspace() {
        let u = unitary(4, 1);
        let v = unitary(4, 2);
        let a = &(&u * &QMatrix::diag_real(&[2.0, 2.0, 2.0, 0.5])) * &v.adjoint();
        let f = qsvd(&a).unwrap();
        for (s, e) in f.sigma.iter().zip([2.0, 2.0, 2.0, 0.5]) {
            assert!((s - e).abs() < 1e-12);
        }
        assert!((&f.reconstruct() - &a).frobenius_norm() < 1e-12);
    }

    #[test]
    fn unitary_has_unit_singular_values() {
        let f = qsvd(&unitary(5, 9)).unwrap();
        assert!(f.sigma.iter().all(|s| (s - 1.0).abs() < 1e-12));
    }

    #[test]
    fn herm_eig_recovers_spectrum() {
        let v = unitary(2, 4);
        let h = &(&v * &QMatrix::diag_real(&[0.25, 0.04])) * &v.adjoint();
        let e = herm_eig(&h, 1e-9).unwrap();
        assert!((e.evals[0] - 0.25).abs() < 1e-12);
        assert!((e.evals[1] - 0.04).abs() < 1e-12);
        let ident = herm_eig(&QMatrix::identity(3), 1e-9).unwrap();
        assert!(ident.evals.iter().all(|x| (x - 1.0).abs() < 1e-14));
        // indefinite spectrum
        let w = unitary(3, 5);
        let h = &(&w * &QMatrix::diag_real(&[2.0, -1.0, -3.0])) * &w.adjoint();
        let e = herm_eig(&h, 1e-9).unwrap();
        for (x, y) in e.evals.iter().zip([2.0, -1.0, -3.0]) {
            assert!((x - y).abs() < 1e-12);
        }
        for j in 0..3 {
            let q = e.q.col(j);
            let hq = h.mul_vec(&q);
            let ql: Vec<Quaternion> = q.iter().map(|x| x.scale(e.evals[j])).collect();
            let diff: Vec<Quaternion> = hq.iter().zip(&ql).map(|(a, b)| *a - *b).collect();
            assert!(vec_norm(&diff) < 1e-12);
        }
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let m = filler(3, 3, 1);
        assert!(matches!(
            herm_eig(&m, 1e-9),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn classification_examples() {
        let c = classify_singular(&[1.0, 1.0, 1.0], 1e-9, 1e-9).unwrap();
        assert_eq!((c.p, c.q, c.r), (3, 0, 0));
        let c = classify_singular(&[1.0, 0.6, 0.0], 1e-9, 1e-9).unwrap();
        assert_eq!((c.p, c.q, c.r), (1, 1, 1));
        assert_eq!(c.interior, vec![0.6]);
        let c = classify_singular(&[1.0 - 1e-12, 0.5], 1e-9, 1e-9).unwrap();
        assert_eq!((c.p, c.q, c.r), (1, 1, 0));
        assert!(matches!(
            classify_singular(&[1.1], 1e-9, 1e-9),
            Err(Error::SingularValueAboveOne { .. })
        ));
        // slightly above one but inside the tolerance is clamped
        let c = classify_singular(&[1.0 + 1e-12], 1e-9, 1e-9).unwrap();
        assert_eq!(c.p, 1);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&QMatrix::identity(3), 1e-10).unwrap(), 3);
        assert_eq!(numerical_rank(&QMatrix::zeros(3, 3), 1e-10).unwrap(), 0);
        let a = &filler(5, 2, 3) * &filler(2, 4, 4);
        assert_eq!(numerical_rank(&a, 1e-10).unwrap(), 2);
        let g = a.adjoint_mul(&a).unwrap();
        assert_eq!(numerical_rank(&g, 1e-10).unwrap(), 2);
    }
}
