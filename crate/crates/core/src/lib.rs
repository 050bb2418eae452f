//! Stochastic claims reserving on run-off triangles.
//!
//! Two model families share one bootstrap engine:
//!
//! - [`mack`]: classic chain-ladder estimation with the England–Verrall
//!   residual bootstrap.
//! - [`macknet`]: an ensemble of small LSTM networks completes the lower
//!   triangle, and Mack-style parameters estimated on the completed square
//!   drive the same bootstrap.
//!
//! Supporting modules cover triangle data ([`triangle`], [`schedule_p`]),
//! the from-scratch recurrent network stack ([`neural`]) and validation
//! metrics ([`eval`]).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distribution;
pub mod error;
pub mod eval;
pub mod mack;
pub mod macknet;
pub mod neural;
pub mod rng;
pub mod schedule_p;
pub mod square;
pub mod triangle;

pub use distribution::{DistributionSummary, ModelKind, ReserveDistribution};
pub use error::{Error, Result};
pub use square::CompletedSquare;
pub use triangle::{Basis, CompanyDataSet, Exposure, LineOfBusiness, LossKind, Triangle};
