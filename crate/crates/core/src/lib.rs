//! Quaternionic linear algebra on the symplectic group `Sp(n)` and the
//! quaternionic Stiefel manifolds `X_{n,k}`: Study determinants,
//! admissibility and completion of square blocks, the relative singular
//! value decomposition of `Sp(n)` elements, and Monte Carlo checks of
//! Cayley open covers.

// `!(x <= tol)` is deliberate: NaN residuals must fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod covers;
pub mod error;
pub mod quatcore;
pub mod relsvd;
pub mod spectral;
pub mod stiefel;

pub use error::{Error, Result};
pub use quatcore::{QMatrix, Quaternion};
