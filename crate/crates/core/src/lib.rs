//! Linear least squares the way Laplace reduced Bouvard's normal equations.
//!
//! Two equivalent factorizations are provided, both eliminating the last
//! variable first and taking no square roots:
//!
//! - [`mgs::reverse_mgs`] projects the columns of the regression matrix,
//! - [`cholesky::factor`] performs the matching symmetric rank-1 updates on
//!   the normal equations, reducing the right-hand side in the same sweep.
//!
//! On top of them, [`inference`] turns the last pivot into Laplace's poids,
//! standard deviations and confidence probabilities, [`precision`] replays
//! the elimination with a fixed number of significant digits, and
//! [`bouvard`] carries the historical Saturn data set and its replication.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::too_many_arguments
)]

extern crate alloc;

pub mod bouvard;
pub mod cholesky;
pub mod eigen;
pub mod erf;
mod error;
pub mod inference;
pub mod matrix;
pub mod mgs;
pub mod precision;
pub mod rounding;

pub use cholesky::{factor, ReverseCholesky, Snapshot, SnapshotPolicy, Solution};
pub use error::{Error, Result};
pub use matrix::{gram, invert_spd, residual, DenseMatrix, NormalSystem, Vector};
pub use mgs::{reverse_mgs, QLFactors};
