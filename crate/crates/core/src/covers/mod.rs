//! Cayley open sets `Omega(C) = { [tau; pi] in X_{n,k} : pi + C* invertible }`
//! for admissible centers `C`, the explicit cover families of `Sp(k)`, a
//! Monte Carlo membership checker, and the LS-category bound table.
//!
//! Sampling can only fail to find a hole; a clean report means "no
//! counterexample among the samples drawn", never a proof of covering.

mod bounds;
mod verify;

pub use bounds::{ls_bounds, LsBounds};
pub use verify::{
    verify_cover, verify_frames, CoverCheck, CoverReport, Execution, Sampler, Witness, CHUNK_SIZE,
    MAX_WITNESSES, RETEST_FACTOR,
};

use std::fmt;

use crate::error::{Error, Result};
use crate::quatcore::{is_invertible, QMatrix};
use crate::stiefel::{is_admissible, StiefelFrame, FRAME_TOL};

/// Default membership threshold on the invertibility margin.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// `Omega(center)` inside `X_{n,k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CayleySet {
    center: QMatrix,
    n: usize,
    label: String,
}

impl CayleySet {
    /// Fails unless `center` is `n`-admissible.
    pub fn new(center: QMatrix, n: usize, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        let report = is_admissible(&center, n, FRAME_TOL)?;
        if !report.admissible {
            return Err(Error::Inadmissible(Box::new(report)));
        }
        Ok(Self { center, n, label })
    }

    /// `Omega(diag(entries))` with an automatic label.
    pub fn diagonal(entries: &[f64], n: usize) -> Result<Self> {
        Self::new(QMatrix::diag_real(entries), n, diagonal_label(entries))
    }

    pub fn center(&self) -> &QMatrix {
        &self.center
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.center.rows()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Margin of `pi + C*` for the bottom block `pi` of a frame.
    pub fn margin_of_block(&self, pi: &QMatrix, tol: f64) -> Membership {
        let inv = is_invertible(&(pi + &self.center.adjoint()), tol);
        Membership {
            member: inv.invertible,
            margin: inv.margin,
        }
    }
}

impl fmt::Display for CayleySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in X_{{{},{}}}", self.label, self.n, self.k())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub margin: f64,
}

/// `x in Omega(C)` iff `x.P + C*` is invertible; the margin is the
/// relative smallest singular value of that sum.
pub fn omega_contains(x: &StiefelFrame, set: &CayleySet, tol: f64) -> Result<Membership> {
    if x.n() != set.n || x.k() != set.k() {
        return Err(Error::DimensionMismatch(format!(
            "frame in X_{{{},{}}} tested against {set}",
            x.n(),
            x.k()
        )));
    }
    Ok(set.margin_of_block(x.p(), tol))
}

/// A family of Cayley sets in one `X_{n,k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverFamily {
    n: usize,
    k: usize,
    sets: Vec<CayleySet>,
}

impl CoverFamily {
    pub fn new(n: usize, k: usize, sets: Vec<CayleySet>) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidDimensions(format!("k = {k} exceeds n = {n}")));
        }
        if let Some(bad) = sets.iter().find(|s| s.n != n || s.k() != k) {
            return Err(Error::DimensionMismatch(format!(
                "{bad} in a family on X_{{{n},{k}}}"
            )));
        }
        Ok(Self { n, k, sets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sets(&self) -> &[CayleySet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Same ambient space, only the sets at `keep`.
    pub fn subfamily(&self, keep: &[usize]) -> Self {
        Self {
            n: self.n,
            k: self.k,
            sets: keep.iter().map(|&i| self.sets[i].clone()).collect(),
        }
    }
}

/// The four-set cover of `Sp(2)`: `Omega(I_2)`, `Omega(-I_2)`,
/// `Omega(I_1, -I_1)`, `Omega(-I_1, I_1)`.
pub fn sp2_cover() -> CoverFamily {
    let sets = [
        ([1.0, 1.0], "Omega(I_2)"),
        ([-1.0, -1.0], "Omega(-I_2)"),
        ([1.0, -1.0], "Omega(I_1,-I_1)"),
        ([-1.0, 1.0], "Omega(-I_1,I_1)"),
    ]
    .into_iter()
    .map(|(d, label)| CayleySet::new(QMatrix::diag_real(&d), 2, label).expect("unitary centers"))
    .collect();
    CoverFamily::new(2, 2, sets).expect("consistent dims")
}

/// Family of all `2^j` centers `diag(0_{k-j}, e_1, ..., e_j)`, `e_t = +-1`,
/// in `X_{2k-j,k}`. Patterns are ordered with `+1` before `-1`, leading sign
/// most significant.
pub fn sign_pattern_family(k: usize, j: usize) -> Result<CoverFamily> {
    if j > k || k == 0 {
        return Err(Error::InvalidDimensions(format!(
            "sign patterns need 0 <= j <= k and k >= 1 (k = {k}, j = {j})"
        )));
    }
    let n = 2 * k - j;
    let sets = (0..1usize << j)
        .map(|idx| {
            let mut d = vec![0.0; k - j];
            d.extend((0..j).map(|t| {
                if (idx >> (j - 1 - t)) & 1 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }));
            CayleySet::diagonal(&d, n)
        })
        .collect::<Result<Vec<_>>>()?;
    CoverFamily::new(n, k, sets)
}

/// The covers of `Sp(k)` inside `X_{2k-j,k}` for `j = 0, 1, 2`: one set
/// `Omega(0_k)`, two sets `Omega(0_{k-1}, +-1)`, four sets
/// `Omega(0_{k-2}, +-1, +-1)`.
pub fn spk_cover(k: usize, j: usize) -> Result<CoverFamily> {
    if j > 2 {
        return Err(Error::InvalidDimensions(format!(
            "explicit covers exist for j <= 2, got j = {j}"
        )));
    }
    sign_pattern_family(k, j)
}

/// Runs the membership engine for a candidate family of `Sp(k)` inside
/// `X_{2k-j,k}`. Every center must be `(2k-j)`-admissible; nothing about the
/// outcome is asserted for `j >= 3`.
pub fn embedding_experiment(
    k: usize,
    j: usize,
    sets: Vec<CayleySet>,
    samples: usize,
    seed: u64,
) -> Result<CoverReport> {
    if j > k || k == 0 {
        return Err(Error::InvalidDimensions(format!(
            "need 0 <= j <= k, k >= 1 (k = {k}, j = {j})"
        )));
    }
    let n = 2 * k - j;
    for s in &sets {
        let report = is_admissible(s.center(), n, FRAME_TOL)?;
        if !report.admissible {
            return Err(Error::Consistency(format!(
                "center {} is not {n}-admissible ({})",
                s.label(),
                report.reason
            )));
        }
    }
    let family = CoverFamily::new(n, k, sets)?;
    Ok(verify_cover(
        &family,
        Sampler::SpEmbedded,
        samples,
        seed,
        MEMBERSHIP_TOL,
    ))
}

fn diagonal_label(entries: &[f64]) -> String {
    let zeros = entries.iter().take_while(|&&x| x == 0.0).count();
    let mut parts = Vec::new();
    if zeros > 0 {
        parts.push(format!("0_{zeros}"));
    }
    parts.extend(entries[zeros..].iter().map(|x| {
        if *x == 1.0 {
            "1".to_string()
        } else if *x == -1.0 {
            "-1".to_string()
        } else {
            format!("{x}")
        }
    }));
    format!("Omega({})", parts.join(","))
}
