use crate::error::{Error, Result};

/// Known bounds on the LS-category of `X_{n,k}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LsBounds {
    pub n: usize,
    pub k: usize,
    /// Kishimoto's lower bound.
    pub lower: usize,
    /// `floor(dim / connectivity)`: `floor(k (4n - 2k + 1) / (4(n - k) + 3))`.
    pub upper_dim: usize,
    /// Nishimoto's exact value `k`, known when `n >= 2k`.
    pub nishimoto_exact: Option<usize>,
}

impl LsBounds {
    /// The category when the bounds pinch.
    pub fn exact(&self) -> Option<usize> {
        self.nishimoto_exact
            .or((self.lower == self.upper_dim).then_some(self.lower))
    }
}

pub fn ls_bounds(n: usize, k: usize) -> Result<LsBounds> {
    if k == 0 || k > n {
        return Err(Error::InvalidDimensions(format!(
            "need 0 < k <= n, got n = {n}, k = {k}"
        )));
    }
    let lower = if n + 1 >= 2 * k {
        k
    } else if n + 3 >= 2 * k {
        k + 1
    } else {
        k + 2
    };
    let upper_dim = k * (4 * n - 2 * k + 1) / (4 * (n - k) + 3);
    let nishimoto_exact = (n >= 2 * k).then_some(k);
    Ok(LsBounds {
        n,
        k,
        lower,
        upper_dim,
        nishimoto_exact,
    })
}
