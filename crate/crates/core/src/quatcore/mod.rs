//! Quaternion scalars and matrices, the complex adjoint embedding, and the
//! Study determinant.

pub mod complex;
pub mod householder;
pub mod matrix;
pub mod quaternion;
pub mod sdet;

pub use complex::{CMatrix, LogDet};
pub use matrix::{inner, QMatrix};
pub use quaternion::{qmul, Quaternion};
pub use sdet::{chi_det, is_invertible, log_sdet, sdet, Invertibility};
