//! Dense complex matrices: the target of the adjoint embedding and the
//! carrier for LU determinants and the SVD kernel.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Determinant in log-magnitude plus phase form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogDet {
    /// `ln |det|`; `-inf` for a singular matrix.
    pub log_abs: f64,
    /// Unit complex number `det / |det|` (1 when singular).
    pub phase: Complex64,
}

impl LogDet {
    pub fn is_zero(&self) -> bool {
        self.log_abs == f64::NEG_INFINITY
    }

    /// `det` as an ordinary complex number; overflows where `log_abs` is huge.
    pub fn value(&self) -> Complex64 {
        if self.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            self.phase * self.log_abs.exp()
        }
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Determinant by LU with partial pivoting, accumulated as
    /// `sum ln|u_ii|` and a running phase so large sizes neither overflow
    /// nor underflow. Panics on a non-square input.
    pub fn log_det(&self) -> LogDet {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut log_abs = 0.0;
        let mut phase = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let (piv, pmax) =
                (k..n)
                    .map(|i| (i, a[i * n + k].norm()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pmax == 0.0 {
                return LogDet {
                    log_abs: f64::NEG_INFINITY,
                    phase: Complex64::new(1.0, 0.0),
                };
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                phase = -phase;
            }
            let pivot = a[k * n + k];
            log_abs += pmax.ln();
            phase *= pivot / pmax;
            for i in (k + 1)..n {
                let f = a[i * n + k] / pivot;
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in (k + 1)..n {
                    let u = a[k * n + j];
                    a[i * n + j] -= f * u;
                }
            }
        }
        // keep the phase on the unit circle despite rounding drift
        let r = phase.norm();
        LogDet {
            log_abs,
            phase: phase / r,
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, o: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, o: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, o: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, o.rows, "complex product shape mismatch");
        let mut out = CMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for s in 0..self.cols {
                let a = self[(i, s)];
                for j in 0..o.cols {
                    out.data[i * o.cols + j] += a * o[(s, j)];
                }
            }
        }
        out
    }
}
