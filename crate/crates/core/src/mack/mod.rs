//! Mack's chain-ladder model and its residual bootstrap.
//!
//! Parameters follow the volume-weighted estimators: for development year
//! `j = 2..I` (1-based)
//!
//! ```text
//! f_j  = sum_i D_ij / sum_i D_i,j-1            over i = 1..I-j+1
//! s2_j = 1/(I-j-1) sum_i D_i,j-1 (D_ij / D_i,j-1 - f_j)^2
//! ```
//!
//! Vectors returned here are indexed `k = j - 2`, so `dev_factors()[0]`
//! links development years 1 and 2.

mod bootstrap;
mod params;
mod residuals;

pub use bootstrap::{bootstrap_mack, BootstrapConfig};
pub(crate) use bootstrap::{simulate, SimulationInputs};
pub use params::{
    chain_ladder_project, dev_factors, estimate, sigma2, sigma2_with, MackParameters, SigmaDivisor,
};
pub(crate) use params::{sigma2_from_columns, ColumnRatios};
pub use residuals::{residuals, Residual, ResidualSet};
pub(crate) use residuals::finish_pool;
