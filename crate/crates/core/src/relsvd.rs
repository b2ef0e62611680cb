//! Relative singular value decomposition of `A in Sp(n)` with respect to
//! its bottom-right `k x k` block `P`:
//!
//! ```text
//!     A = [ m D11 l*   m D12 b* ]
//!         [ a D21 l*   a D22 b* ]
//!
//!     D11 = diag(I_p', cos t_i, 0_r)        D12 = [0_{p' x p}, -diag(sin t_i), -I_r]
//!     D21 = [0_{p x p'}, diag(sin t_i), I_r]  D22 = diag(I_p, cos t_i, 0_r)
//! ```
//!
//! with `a, b in Sp(k)`, `m, l in Sp(n - k)`, `t_i in (0, pi/2)`,
//! `p + q + r = k`, `p' + q + r = n - k` and `p >= 2k - n`. The factors are
//! not unique; [`decompose`] returns one deterministic choice.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::quatcore::householder::{complete_basis, orthonormalize};
use crate::quatcore::matrix::{inner, vec_norm};
use crate::quatcore::{QMatrix, Quaternion};
use crate::spectral;
use crate::stiefel::check_symplectic;

#[derive(Clone, Debug, PartialEq)]
pub struct RelativeSvd {
    pub n: usize,
    pub k: usize,
    pub a: QMatrix,
    pub b: QMatrix,
    pub m: QMatrix,
    pub l: QMatrix,
    /// Interior angles, cosines descending.
    pub thetas: Vec<f64>,
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub p_prime: usize,
}

/// Tolerances for [`decompose_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecomposeOptions {
    /// Symplectic check on the input and angle classification: an angle
    /// within `tol` of 0 joins the `p` block, within `tol` of `pi/2` the `r`
    /// block.
    pub tol: f64,
    /// Maximum accepted `||rebuild(d) - A||_F`.
    pub tol_reconstruct: f64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            tol_reconstruct: 1e-8,
        }
    }
}

impl RelativeSvd {
    pub fn cosines(&self) -> Vec<f64> {
        self.thetas.iter().map(|t| t.cos()).collect()
    }

    /// Singular values of the bottom-right block implied by the data:
    /// `1` (p times), `cos t_i`, `0` (r times).
    pub fn block_spectrum(&self) -> Vec<f64> {
        let mut s = vec![1.0; self.p];
        s.extend(self.cosines());
        s.extend(std::iter::repeat_n(0.0, self.r));
        s
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::DimensionMismatch(msg));
        if self.k > self.n {
            return bad(format!("k = {} exceeds n = {}", self.k, self.n));
        }
        let nk = self.n - self.k;
        if self.p + self.q + self.r != self.k {
            return bad(format!(
                "p + q + r = {} != k = {}",
                self.p + self.q + self.r,
                self.k
            ));
        }
        if self.p_prime + self.q + self.r != nk {
            return bad(format!(
                "p' + q + r = {} != n - k = {nk}",
                self.p_prime + self.q + self.r
            ));
        }
        if self.thetas.len() != self.q {
            return bad(format!("{} angles for q = {}", self.thetas.len(), self.q));
        }
        for (name, mat, dim) in [
            ("a", &self.a, self.k),
            ("b", &self.b, self.k),
            ("m", &self.m, nk),
            ("l", &self.l, nk),
        ] {
            if mat.shape() != (dim, dim) {
                return bad(format!(
                    "{name} is {}x{}, expected {dim}x{dim}",
                    mat.rows(),
                    mat.cols()
                ));
            }
        }
        Ok(())
    }
}

/// Assembles `A` from its block data.
pub fn rebuild(d: &RelativeSvd) -> Result<QMatrix> {
    d.validate()?;
    let (n, k) = (d.n, d.k);
    let nk = n - k;
    let (p, q, pp) = (d.p, d.q, d.p_prime);
    let cos: Vec<f64> = d.thetas.iter().map(|t| t.cos()).collect();
    let sin: Vec<f64> = d.thetas.iter().map(|t| t.sin()).collect();

    let mut d11 = QMatrix::zeros(nk, nk);
    let mut d12 = QMatrix::zeros(nk, k);
    let mut d21 = QMatrix::zeros(k, nk);
    let mut d22 = QMatrix::zeros(k, k);
    for i in 0..pp {
        d11[(i, i)] = Quaternion::ONE;
    }
    for i in 0..p {
        d22[(i, i)] = Quaternion::ONE;
    }
    for i in 0..q {
        d11[(pp + i, pp + i)] = Quaternion::real(cos[i]);
        d22[(p + i, p + i)] = Quaternion::real(cos[i]);
        d12[(pp + i, p + i)] = Quaternion::real(-sin[i]);
        d21[(p + i, pp + i)] = Quaternion::real(sin[i]);
    }
    for i in 0..d.r {
        d12[(pp + q + i, p + q + i)] = -Quaternion::ONE;
        d21[(p + q + i, pp + q + i)] = Quaternion::ONE;
    }

    let la = d.l.adjoint();
    let ba = d.b.adjoint();
    let mut out = QMatrix::zeros(n, n);
    out.set_block(0, 0, &(&(&d.m * &d11) * &la));
    out.set_block(0, nk, &(&(&d.m * &d12) * &ba));
    out.set_block(nk, 0, &(&(&d.a * &d21) * &la));
    out.set_block(nk, nk, &(&(&d.a * &d22) * &ba));
    Ok(out)
}

pub fn decompose(a: &QMatrix, k: usize) -> Result<RelativeSvd> {
    decompose_with(a, k, DecomposeOptions::default())
}

/// Relative SVD of a symplectic `A` with respect to its bottom-right
/// `k x k` block. Verifies its own reconstruction before returning.
pub fn decompose_with(a: &QMatrix, k: usize, opts: DecomposeOptions) -> Result<RelativeSvd> {
    check_symplectic(a, opts.tol)?;
    let n = a.rows();
    if k > n {
        return Err(Error::InvalidDimensions(format!("k = {k} exceeds n = {n}")));
    }
    let nk = n - k;
    let alpha = a.block(0, 0, nk, nk);
    let t = a.block(0, nk, nk, k);
    let beta = a.block(nk, 0, k, nk);
    let pblk = a.block(nk, nk, k, k);

    let svd = spectral::qsvd(&pblk)?;
    let (ua, vb) = (svd.u, svd.v);

    // angles from (cos, sin) = (sigma_i, |T b_i|); the sine side is measured
    // directly since T*T = b diag(0, s^2, I) b*
    let tb: Vec<Vec<Quaternion>> = (0..k).map(|i| t.mul_vec(&vb.col(i))).collect();
    let angles: Vec<f64> = (0..k)
        .map(|i| vec_norm(&tb[i]).atan2(svd.sigma[i]))
        .collect();
    let p = angles.iter().take_while(|&&th| th <= opts.tol).count();
    let r = angles
        .iter()
        .rev()
        .take_while(|&&th| th >= FRAC_PI_2 - opts.tol)
        .count()
        .min(k - p);
    let q = k - p - r;
    if q + r > nk {
        return Err(Error::Consistency(format!(
            "{} non-unit block singular values but only {nk} complementary rows",
            q + r
        )));
    }
    let p_prime = nk - q - r;
    let thetas: Vec<f64> = angles[p..p + q].to_vec();
    let sines: Vec<f64> = (p..k)
        .map(|i| if i < p + q { angles[i].sin() } else { 1.0 })
        .collect();

    // m_{p'+i} = -T b_{p+i} / s_i
    let m_known: Vec<Vec<Quaternion>> = (0..q + r)
        .map(|i| tb[p + i].iter().map(|x| x.scale(-1.0 / sines[i])).collect())
        .collect();
    // l_{p'+i} = beta* a_{p+i} / s_i
    let l_known: Vec<Vec<Quaternion>> = (0..q + r)
        .map(|i| {
            beta.adjoint_mul_vec(&ua.col(p + i))
                .into_iter()
                .map(|x| x.scale(1.0 / sines[i]))
                .collect()
        })
        .collect();
    check_orthonormal("m", &m_known, opts.tol_reconstruct)?;
    check_orthonormal("l", &l_known, opts.tol_reconstruct)?;
    let m_known = orthonormalize(&from_columns(nk, &m_known));
    let l_known = orthonormalize(&from_columns(nk, &l_known));

    // free columns of l by deterministic completion, then m_i = alpha l_i
    let l_free = complete_basis(&l_known);
    let m_free = &alpha * &l_free;
    let l = QMatrix::hstack(&l_free, &l_known)?;
    let m = QMatrix::hstack(&m_free, &m_known)?;

    let d = RelativeSvd {
        n,
        k,
        a: ua,
        b: vb,
        m,
        l,
        thetas,
        p,
        q,
        r,
        p_prime,
    };
    let residual = (&rebuild(&d)? - a).frobenius_norm();
    if !(residual <= opts.tol_reconstruct) {
        return Err(Error::Consistency(format!(
            "relative SVD reconstruction residual {residual:e} exceeds {:e}",
            opts.tol_reconstruct
        )));
    }
    let mdef = d.m.orthonormality_defect();
    if !(mdef <= opts.tol_reconstruct) {
        return Err(Error::Consistency(format!(
            "m is not unitary (defect {mdef:e})"
        )));
    }
    Ok(d)
}

fn from_columns(rows: usize, cols: &[Vec<Quaternion>]) -> QMatrix {
    QMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// Gram matrix of `cols` against the identity, entrywise.
pub(crate) fn gram_defect(cols: &[Vec<Quaternion>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, u) in cols.iter().enumerate() {
        for (j, v) in cols.iter().enumerate() {
            let g = inner(u, v);
            let target = if i == j {
                Quaternion::ONE
            } else {
                Quaternion::ZERO
            };
            worst = worst.max((g - target).norm());
        }
    }
    worst
}

fn check_orthonormal(name: &str, cols: &[Vec<Quaternion>], tol: f64) -> Result<()> {
    let defect = gram_defect(cols);
    if defect > tol {
        return Err(Error::Consistency(format!(
            "constructed columns of {name} are not orthonormal (defect {defect:e})"
        )));
    }
    Ok(())
}

/// The `k = 1` specialization:
///
/// ```text
///     A = [ m diag(I_{n-2}, cos t) l*   m [0; -sin t] E ]
///         [ [0, sin t] l*               (cos t) E       ]
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct CorollaryForm {
    pub m: QMatrix,
    pub l: QMatrix,
    /// In `[0, pi/2]`.
    pub theta: f64,
    /// Unit quaternion.
    pub e: Quaternion,
}

pub fn decompose_corollary(a: &QMatrix) -> Result<CorollaryForm> {
    decompose_corollary_with(a, DecomposeOptions::default())
}

pub fn decompose_corollary_with(a: &QMatrix, opts: DecomposeOptions) -> Result<CorollaryForm> {
    if a.rows() < 2 {
        return Err(Error::InvalidDimensions(format!(
            "corollary form needs n >= 2, got {}",
            a.rows()
        )));
    }
    let d = decompose_with(a, 1, opts)?;
    let theta = if d.p == 1 {
        0.0
    } else if d.q == 1 {
        d.thetas[0]
    } else {
        FRAC_PI_2
    };
    let a1 = d.a[(0, 0)];
    let b1 = d.b[(0, 0)];
    let e = a1 * b1.conj();
    // absorb the Sp(1) factor a into the last columns of m and l
    let nm = a.rows() - 1;
    let mut m = d.m;
    let mut l = d.l;
    for row in 0..nm {
        m[(row, nm - 1)] *= a1.conj();
        l[(row, nm - 1)] *= a1.conj();
    }
    Ok(CorollaryForm { m, l, theta, e })
}

/// Assembles `A` from the `k = 1` form.
pub fn rebuild_corollary(c: &CorollaryForm) -> Result<QMatrix> {
    let nm = c.m.rows();
    if !c.m.is_square() || c.l.shape() != (nm, nm) || nm == 0 {
        return Err(Error::DimensionMismatch(format!(
            "m {}x{} and l {}x{}",
            c.m.rows(),
            c.m.cols(),
            c.l.rows(),
            c.l.cols()
        )));
    }
    let (cos, sin) = (c.theta.cos(), c.theta.sin());
    let mut dmid = QMatrix::identity(nm);
    dmid[(nm - 1, nm - 1)] = Quaternion::real(cos);
    let mut col = QMatrix::zeros(nm, 1);
    col[(nm - 1, 0)] = Quaternion::real(-sin);
    let mut row = QMatrix::zeros(1, nm);
    row[(0, nm - 1)] = Quaternion::real(sin);
    let la = c.l.adjoint();

    let mut out = QMatrix::zeros(nm + 1, nm + 1);
    out.set_block(0, 0, &(&(&c.m * &dmid) * &la));
    out.set_block(0, nm, &(&c.m * &col).right_scale(c.e));
    out.set_block(nm, 0, &(&row * &la));
    out[(nm, nm)] = c.e.scale(cos);
    Ok(out)
}
