//! Constructive equivalence after extension, matricial coupling and Schur
//! coupling for finite complex matrices.
//!
//! The crate turns the implications EAE ⇒ EAOE ⇒ SC into verified matrix
//! algorithms: each converter builds an explicit witness and then checks it
//! by residuals, so a result is only returned when the relation it claims
//! has been confirmed numerically. The [`hankel`] module applies the same
//! machinery to finite sections of multiplication operators on the circle.

// `!(x <= tol)` and friends are deliberate: NaN must count as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blockops;
pub mod error;
pub mod hankel;
pub mod instances;
pub mod io;
pub mod numkernel;
pub mod reduction;
pub mod relations;
pub mod residual;

pub use error::{Error, Result};
pub use numkernel::{Matrix, RankTol, C64};
pub use residual::{Check, ResidualReport};

/// Default per-stage relative residual threshold.
pub const DEFAULT_TOL: f64 = 1e-8;
