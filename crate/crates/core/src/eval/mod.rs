//! Accuracy metrics, distribution risk measures and the Kupiec
//! proportion-of-failures backtest.

mod kupiec;
mod metrics;
mod special;

pub use kupiec::{kupiec_lr, kupiec_test, BacktestResult, Weighting};
pub use metrics::{
    coefficient_of_variation, mae_pct, population_sd, quantile, rmse_pct, var_quantile,
    CompanyOutcome,
};
pub use special::{chi_square_1df_sf, erfc};
