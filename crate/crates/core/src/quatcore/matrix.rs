//! Dense quaternionic matrices.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::quatcore::complex::CMatrix;
use crate::quatcore::quaternion::Quaternion;

/// Row-major `rows x cols` matrix of quaternions.
///
/// Matrices act on column vectors from the left; scalars multiply vectors
/// from the right, so the Hermitian product `<u, v> = u* v` is right-linear in
/// `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Quaternion::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Quaternion::ONE;
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Quaternion,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Quaternion>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Quaternion>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Square diagonal matrix.
    pub fn diag(entries: &[Quaternion]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let q: Vec<Quaternion> = entries.iter().map(|&v| Quaternion::real(v)).collect();
        Self::diag(&q)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Quaternion] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Quaternion] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Quaternion> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[Quaternion]) {
        assert_eq!(v.len(), self.rows);
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    /// Conjugate transpose `M*`.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for s in 0..self.cols {
                let a = self[(i, s)];
                if a == Quaternion::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(s, j)];
                }
            }
        }
        Ok(out)
    }

    /// `M* N` without materializing the adjoint.
    pub fn adjoint_mul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "({}x{})* times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = QMatrix::zeros(self.cols, other.cols);
        for s in 0..self.rows {
            for i in 0..self.cols {
                let a = self[(s, i)].conj();
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(s, j)];
                }
            }
        }
        Ok(out)
    }

    /// `M v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[Quaternion]) -> Vec<Quaternion> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// `M* v` for a column vector `v`.
    pub fn adjoint_mul_vec(&self, v: &[Quaternion]) -> Vec<Quaternion> {
        assert_eq!(v.len(), self.rows, "vector length mismatch");
        let mut out = vec![Quaternion::ZERO; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                *o += self[(i, j)].conj() * vi;
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|q| q.scale(s)).collect(),
        }
    }

    /// Left scalar multiplication `q M`.
    pub fn left_scale(&self, q: Quaternion) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&e| q * e).collect(),
        }
    }

    /// Right scalar multiplication `M q`.
    pub fn right_scale(&self, q: Quaternion) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&e| e * q).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|q| q.is_finite())
    }

    /// Copy of the block with top-left corner `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(
            r0 + rows <= self.rows && c0 + cols <= self.cols,
            "block out of range"
        );
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &QMatrix) {
        assert!(
            r0 + b.rows <= self.rows && c0 + b.cols <= self.cols,
            "block out of range"
        );
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// `[top; bottom]`.
    pub fn vstack(top: &QMatrix, bottom: &QMatrix) -> Result<QMatrix> {
        if top.cols != bottom.cols {
            return Err(Error::DimensionMismatch(format!(
                "vstack of {} and {} columns",
                top.cols, bottom.cols
            )));
        }
        let mut data = top.data.clone();
        data.extend_from_slice(&bottom.data);
        Ok(Self {
            rows: top.rows + bottom.rows,
            cols: top.cols,
            data,
        })
    }

    /// `[left, right]`.
    pub fn hstack(left: &QMatrix, right: &QMatrix) -> Result<QMatrix> {
        if left.rows != right.rows {
            return Err(Error::DimensionMismatch(format!(
                "hstack of {} and {} rows",
                left.rows, right.rows
            )));
        }
        Ok(Self::from_fn(left.rows, left.cols + right.cols, |i, j| {
            if j < left.cols {
                left[(i, j)]
            } else {
                right[(i, j - left.cols)]
            }
        }))
    }

    /// Columns `c0..c0+count`.
    pub fn columns(&self, c0: usize, count: usize) -> Self {
        self.block(0, c0, self.rows, count)
    }

    /// Complex adjoint representation: with `M = X + j Y`,
    /// `chi(M) = [[X, -conj(Y)], [Y, conj(X)]]`.
    pub fn chi(&self) -> CMatrix {
        let (m, n) = (self.rows, self.cols);
        let mut c = CMatrix::zeros(2 * m, 2 * n);
        for i in 0..m {
            for j in 0..n {
                let (x, y) = self[(i, j)].to_complex_pair();
                c[(i, j)] = x;
                c[(i, n + j)] = -y.conj();
                c[(m + i, j)] = y;
                c[(m + i, n + j)] = x.conj();
            }
        }
        c
    }

    /// Reads `M` back from the left block column of `chi(M)`.
    pub fn from_chi(c: &CMatrix) -> Result<QMatrix> {
        if !c.rows().is_multiple_of(2) || !c.cols().is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!(
                "chi image must have even dimensions, got {}x{}",
                c.rows(),
                c.cols()
            )));
        }
        let (m, n) = (c.rows() / 2, c.cols() / 2);
        Ok(QMatrix::from_fn(m, n, |i, j| {
            Quaternion::from_complex_pair(c[(i, j)], c[(m + i, j)])
        }))
    }

    /// `||M* M - I||_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.adjoint_mul(self).expect("shape");
        (&g - &QMatrix::identity(self.cols)).frobenius_norm()
    }

    /// `||M M* - I||_F`.
    pub fn co_orthonormality_defect(&self) -> f64 {
        let g = self.matmul(&self.adjoint()).expect("shape");
        (&g - &QMatrix::identity(self.rows)).frobenius_norm()
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    fn index(&self, (i, j): (usize, usize)) -> &Quaternion {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quaternion {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

fn zip_with(a: &QMatrix, b: &QMatrix, f: impl Fn(Quaternion, Quaternion) -> Quaternion) -> QMatrix {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    QMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, o: &QMatrix) -> QMatrix {
        zip_with(self, o, |a, b| a + b)
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, o: &QMatrix) -> QMatrix {
        zip_with(self, o, |a, b| a - b)
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        self.scale(-1.0)
    }
}

/// Panics on a shape mismatch; use [`QMatrix::matmul`] for the fallible form.
impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, o: &QMatrix) -> QMatrix {
        self.matmul(o).expect("matrix product shape mismatch")
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|q| format!("{q:.6}")).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Quaternion-valued Hermitian product `<u, v> = u* v`.
pub fn inner(u: &[Quaternion], v: &[Quaternion]) -> Quaternion {
    u.iter().zip(v).map(|(&a, &b)| a.conj() * b).sum()
}

pub fn vec_norm(v: &[Quaternion]) -> f64 {
    v.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
}
