//! Quaternionic Householder QR and deterministic orthonormal completion.
//!
//! The reflector `H = I - 2 v v* / (v* v)` with `v = x + u |x| e_1`, where
//! `u = x_1 / |x_1|`, maps `x` to `-u |x| e_1`; the coefficient
//! `2 v* x / v* v` is exactly 1, which is what makes the construction carry
//! over from the complex case unchanged.

use crate::quatcore::matrix::QMatrix;
use crate::quatcore::quaternion::Quaternion;

/// Full QR factorization `W = Q R` of an `m x c` matrix.
#[derive(Clone, Debug)]
pub struct HouseholderQr {
    /// `m x m`, unitary.
    pub q: QMatrix,
    /// `m x c`, upper triangular with a real nonnegative diagonal.
    pub r: QMatrix,
}

/// Householder QR with the diagonal of `R` made real and nonnegative by
/// right-multiplying the columns of `Q` with unit quaternions.
pub fn qr(w: &QMatrix) -> HouseholderQr {
    let (m, c) = w.shape();
    let mut a = w.clone();
    let mut q = QMatrix::identity(m);
    let steps = c.min(m);
    for j in 0..steps {
        let x: Vec<Quaternion> = (j..m).map(|i| a[(i, j)]).collect();
        let norm = crate::quatcore::matrix::vec_norm(&x);
        if norm == 0.0 {
            continue;
        }
        let x0 = x[0];
        let x0_abs = x0.norm();
        let u = x0.unit().unwrap_or(Quaternion::ONE);
        let mut v = x;
        v[0] = u.scale(x0_abs + norm);
        let beta = 2.0 / (2.0 * norm * (norm + x0_abs));

        // A <- H A on rows j.., columns j..
        for col in j..c {
            let mut dot = Quaternion::ZERO;
            for (t, vt) in v.iter().enumerate() {
                dot += vt.conj() * a[(j + t, col)];
            }
            let dot = dot.scale(beta);
            for (t, vt) in v.iter().enumerate() {
                let upd = *vt * dot;
                a[(j + t, col)] -= upd;
            }
        }
        // Q <- Q H on columns j..
        for row in 0..m {
            let mut dot = Quaternion::ZERO;
            for (t, vt) in v.iter().enumerate() {
                dot += q[(row, j + t)] * *vt;
            }
            let dot = dot.scale(beta);
            for (t, vt) in v.iter().enumerate() {
                let upd = dot * vt.conj();
                q[(row, j + t)] -= upd;
            }
        }
        // exact zeros below the diagonal
        for i in (j + 1)..m {
            a[(i, j)] = Quaternion::ZERO;
        }
    }

    // sign fix: R_jj -> |R_jj|
    for j in 0..steps {
        let rjj = a[(j, j)];
        let Some(d) = rjj.unit() else { continue };
        for row in 0..m {
            q[(row, j)] *= d;
        }
        let dc = d.conj();
        for col in j..c {
            a[(j, col)] = dc * a[(j, col)];
        }
        a[(j, j)] = Quaternion::real(rjj.norm());
    }

    HouseholderQr { q, r: a }
}

/// Orthonormal basis of the column span of a full-column-rank `W`, as the
/// leading `c` columns of the Householder `Q`.
pub fn orthonormalize(w: &QMatrix) -> QMatrix {
    let c = w.cols();
    qr(w).q.columns(0, c)
}

/// Columns completing the orthonormal `m x c` matrix `W` to a basis of
/// `H^m`: `Q e_c, ..., Q e_{m-1}` for the Householder `Q` of `W`. The result
/// is a deterministic function of `W`.
pub fn complete_basis(w: &QMatrix) -> QMatrix {
    let (m, c) = w.shape();
    assert!(c <= m, "cannot complete {c} columns in dimension {m}");
    qr(w).q.columns(c, m - c)
}
