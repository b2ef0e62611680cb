//! Complex singular value decomposition: Householder bidiagonalization,
//! a diagonal phase change that makes the bidiagonal real, then
//! Golub-Reinsch implicit-shift QR sweeps on the real bidiagonal with the
//! (real) Givens rotations accumulated into the complex factors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quatcore::complex::CMatrix;

const MAX_SWEEPS: usize = 75;

/// Thin complex SVD `A = U diag(sigma) V*` of an `m x n` matrix with `m >= n`
/// (`U` is `m x n`, `V` is `n x n`), or of its adjoint otherwise, in which
/// case `U` is `m x m` and `V` is `n x m`. Singular values are descending.
#[derive(Clone, Debug)]
pub struct ComplexSvd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

/// Singular values only, descending.
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    let (m, n) = (a.rows(), a.cols());
    let work = if m >= n { a.clone() } else { a.adjoint() };
    Ok(Kernel::run(work, false)?.0)
}

pub fn svd(a: &CMatrix) -> Result<ComplexSvd> {
    if a.rows() >= a.cols() {
        let (sigma, u, v) = Kernel::run(a.clone(), true)?;
        Ok(ComplexSvd { u, sigma, v })
    } else {
        // A* = U' S V'*  =>  A = V' S U'*
        let (sigma, u, v) = Kernel::run(a.adjoint(), true)?;
        Ok(ComplexSvd { u: v, sigma, v: u })
    }
}

struct Kernel;

impl Kernel {
    /// Returns `(sigma, U, V)`; `U`, `V` are empty placeholders when vectors
    /// are not requested.
    fn run(mut a: CMatrix, vectors: bool) -> Result<(Vec<f64>, CMatrix, CMatrix)> {
        let (m, n) = (a.rows(), a.cols());
        debug_assert!(m >= n);
        if n == 0 {
            return Ok((Vec::new(), CMatrix::zeros(m, 0), CMatrix::zeros(0, 0)));
        }
        let mut qacc = if vectors {
            CMatrix::identity(m)
        } else {
            CMatrix::zeros(0, 0)
        };
        let mut pacc = if vectors {
            CMatrix::identity(n)
        } else {
            CMatrix::zeros(0, 0)
        };

        for i in 0..n {
            // left reflector: zero a[i+1.., i]
            if let Some(h) = Reflector::new((i..m).map(|r| a[(r, i)]).collect()) {
                h.apply_left(&mut a, i, i);
                if vectors {
                    h.apply_right(&mut qacc, i);
                }
            }
            // right reflector: zero a[i, i+2..]
            if i + 2 < n {
                let row: Vec<Complex64> = (i + 1..n).map(|c| a[(i, c)].conj()).collect();
                if let Some(h) = Reflector::new(row) {
                    h.apply_right_rows(&mut a, i, i + 1);
                    if vectors {
                        h.apply_right(&mut pacc, i + 1);
                    }
                }
            }
        }

        // complex bidiagonal B = L Breal R*, L, R diagonal unitary
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n]; // e[i] couples i-1 and i; e[0] = 0
        let mut r_phase = Complex64::new(1.0, 0.0);
        let mut l_phases = vec![Complex64::new(1.0, 0.0); n];
        let mut r_phases = vec![Complex64::new(1.0, 0.0); n];
        for i in 0..n {
            if i > 0 {
                let t = l_phases[i - 1].conj() * a[(i - 1, i)];
                // choose r_i so that conj(l_{i-1}) B_{i-1,i} r_i = |.|
                let ph = unit_or_one(t);
                r_phase = ph.conj();
                e[i] = t.norm();
            }
            r_phases[i] = r_phase;
            let t = a[(i, i)] * r_phase;
            let ph = unit_or_one(t);
            l_phases[i] = ph;
            d[i] = t.norm();
        }
        if vectors {
            for i in 0..n {
                for row in 0..m {
                    qacc[(row, i)] *= l_phases[i];
                }
                for row in 0..n {
                    pacc[(row, i)] *= r_phases[i];
                }
            }
        }

        let mut u = if vectors {
            CMatrix::from_fn(m, n, |r, c| qacc[(r, c)])
        } else {
            CMatrix::zeros(0, 0)
        };
        let mut v = pacc;
        bidiagonal_qr(&mut d, &mut e, &mut u, &mut v, vectors)?;

        // descending order
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&x, &y| d[y].total_cmp(&d[x]));
        let sigma: Vec<f64> = idx.iter().map(|&i| d[i]).collect();
        if vectors {
            let u = CMatrix::from_fn(m, n, |r, c| u[(r, idx[c])]);
            let v = CMatrix::from_fn(n, n, |r, c| v[(r, idx[c])]);
            Ok((sigma, u, v))
        } else {
            Ok((sigma, u, v))
        }
    }
}

fn unit_or_one(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z / r
    }
}

/// `H = I - beta v v*` acting on trailing coordinates starting at `offset`.
struct Reflector {
    v: Vec<Complex64>,
    beta: f64,
}

impl Reflector {
    /// Reflector sending `x` to a multiple of `e_1`; `None` when `x` already
    /// has that shape.
    fn new(x: Vec<Complex64>) -> Option<Self> {
        let tail: f64 = x.iter().skip(1).map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            return None;
        }
        let x0 = x[0];
        let norm = (x0.norm_sqr() + tail).sqrt();
        let u = unit_or_one(x0);
        let mut v = x;
        v[0] = u * (x0.norm() + norm);
        let beta = 1.0 / (norm * (norm + x0.norm()));
        Some(Self { v, beta })
    }

    /// `A[off.., col0..] <- H A[off.., col0..]`.
    fn apply_left(&self, a: &mut CMatrix, off: usize, col0: usize) {
        for c in col0..a.cols() {
            let mut dot = Complex64::new(0.0, 0.0);
            for (t, vt) in self.v.iter().enumerate() {
                dot += vt.conj() * a[(off + t, c)];
            }
            let dot = dot * self.beta;
            for (t, vt) in self.v.iter().enumerate() {
                a[(off + t, c)] -= vt * dot;
            }
        }
    }

    /// `M[.., off..] <- M[.., off..] H` for all rows.
    fn apply_right(&self, mat: &mut CMatrix, off: usize) {
        for r in 0..mat.rows() {
            self.apply_right_row(mat, r, off);
        }
    }

    /// `A[row0.., off..] <- A[row0.., off..] H`, where `H` was built from the
    /// conjugated row so that row `row0` is reduced.
    fn apply_right_rows(&self, a: &mut CMatrix, row0: usize, off: usize) {
        for r in row0..a.rows() {
            self.apply_right_row(a, r, off);
        }
    }

    fn apply_right_row(&self, mat: &mut CMatrix, r: usize, off: usize) {
        let mut dot = Complex64::new(0.0, 0.0);
        for (t, vt) in self.v.iter().enumerate() {
            dot += mat[(r, off + t)] * vt;
        }
        let dot = dot * self.beta;
        for (t, vt) in self.v.iter().enumerate() {
            mat[(r, off + t)] -= dot * vt.conj();
        }
    }
}

fn rotate_columns(mat: &mut CMatrix, i: usize, j: usize, c: f64, s: f64) {
    for r in 0..mat.rows() {
        let y = mat[(r, i)];
        let z = mat[(r, j)];
        mat[(r, i)] = y * c + z * s;
        mat[(r, j)] = z * c - y * s;
    }
}

/// Golub-Reinsch QR iteration on the upper bidiagonal with diagonal `d` and
/// superdiagonal `e` (`e[i]` between `i - 1` and `i`). Leaves `d >= 0`.
fn bidiagonal_qr(
    d: &mut [f64],
    e: &mut [f64],
    u: &mut CMatrix,
    v: &mut CMatrix,
    vectors: bool,
) -> Result<()> {
    let n = d.len();
    let anorm = d
        .iter()
        .zip(e.iter())
        .map(|(a, b)| a.abs() + b.abs())
        .fold(0.0, f64::max);
    let eps = f64::EPSILON * anorm;

    for k in (0..n).rev() {
        let mut sweeps = 0;
        loop {
            // find l such that e[l] is negligible (e[0] always is)
            let mut l = k;
            let mut cancel = false;
            loop {
                if l == 0 || e[l].abs() <= eps {
                    break;
                }
                if d[l - 1].abs() <= eps {
                    cancel = true;
                    break;
                }
                l -= 1;
            }
            if cancel {
                // d[l-1] is negligible: chase e[l] out with rotations from the left
                let nm = l - 1;
                let mut c = 0.0;
                let mut s = 1.0;
                for i in l..=k {
                    let f = s * e[i];
                    e[i] *= c;
                    if f.abs() <= eps {
                        break;
                    }
                    let g = d[i];
                    let h = f.hypot(g);
                    d[i] = h;
                    c = g / h;
                    s = -f / h;
                    if vectors {
                        rotate_columns(u, nm, i, c, s);
                    }
                }
            }
            let z = d[k];
            if l == k {
                if z < 0.0 {
                    d[k] = -z;
                    if vectors {
                        for r in 0..v.rows() {
                            v[(r, k)] = -v[(r, k)];
                        }
                    }
                }
                break;
            }
            if sweeps == MAX_SWEEPS {
                return Err(Error::NoConvergence);
            }
            sweeps += 1;

            // Wilkinson-style shift from the trailing 2x2
            let mut x = d[l];
            let nm = k - 1;
            let mut y = d[nm];
            let mut g = e[nm];
            let mut h = e[k];
            let mut f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
            g = f.hypot(1.0);
            f = ((x - z) * (x + z) + h * ((y / (f + g.copysign(f))) - h)) / x;

            let mut c = 1.0;
            let mut s = 1.0;
            for j in l..=nm {
                let i = j + 1;
                g = e[i];
                y = d[i];
                h = s * g;
                g *= c;
                let mut zz = f.hypot(h);
                e[j] = zz;
                c = f / zz;
                s = h / zz;
                f = x * c + g * s;
                g = g * c - x * s;
                h = y * s;
                y *= c;
                if vectors {
                    rotate_columns(v, j, i, c, s);
                }
                zz = f.hypot(h);
                d[j] = zz;
                if zz != 0.0 {
                    c = f / zz;
                    s = h / zz;
                }
                f = c * g + s * y;
                x = c * y - s * g;
                if vectors {
                    rotate_columns(u, j, i, c, s);
                }
            }
            e[l] = 0.0;
            e[k] = f;
            d[k] = x;
        }
    }
    Ok(())
}
