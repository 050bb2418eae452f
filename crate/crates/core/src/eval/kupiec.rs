use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{chi_square_1df_sf, var_quantile, CompanyOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    #[default]
    Uniform,
    /// Weight proportional to the sd of each company's simulated ultimates.
    SdWeighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestResult {
    pub alpha: f64,
    pub weighting: Weighting,
    pub breaches: Vec<bool>,
    pub weighted_breach_rate: f64,
    pub effective_n: usize,
    pub lr_statistic: f64,
    pub p_value: f64,
}

/// `x ln y` with `0 ln 0 = 0`.
fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// Proportion-of-failures likelihood ratio for `x` breaches out of `n`
/// against the nominal rate `pi`; `x` may be fractional.
pub fn kupiec_lr(n: f64, x: f64, pi: f64) -> Result<f64> {
    if !(n > 0.0) || !(0.0..=n).contains(&x) {
        return Err(Error::invalid(format!("breach count {x} out of {n} is invalid")));
    }
    if !(pi > 0.0 && pi < 1.0) {
        return Err(Error::invalid(format!("nominal breach rate {pi} outside (0, 1)")));
    }
    let p = x / n;
    let null = xlny(n - x, 1.0 - pi) + xlny(x, pi);
    let alt = xlny(n - x, 1.0 - p) + xlny(x, p);
    // Rounding can leave a tiny negative value when p equals pi.
    Ok((-2.0 * (null - alt)).max(0.0))
}

/// Backtest of the `alpha` VaR of simulated total ultimates: a breach is an
/// actual ultimate strictly above the quantile.
pub fn kupiec_test(outcomes: &[CompanyOutcome], alpha: f64, weighting: Weighting) -> Result<BacktestResult> {
    if outcomes.is_empty() {
        return Err(Error::invalid("backtest needs at least one company"));
    }
    let breaches = outcomes
        .iter()
        .map(|o| Ok(o.actual_ultimate > var_quantile(&o.simulated_ultimates, alpha)?))
        .collect::<Result<Vec<bool>>>()?;
    let raw: Vec<f64> = match weighting {
        Weighting::Uniform => vec![1.0; outcomes.len()],
        Weighting::SdWeighted => outcomes.iter().map(CompanyOutcome::sim_sd).collect(),
    };
    let total: f64 = raw.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::numerical("sd weights sum to zero"));
    }
    let rate: f64 = raw
        .iter()
        .zip(&breaches)
        .filter(|(_, &b)| b)
        .map(|(w, _)| w / total)
        .sum::<f64>()
        .min(1.0);
    let n = outcomes.len();
    let lr = kupiec_lr(n as f64, rate * n as f64, 1.0 - alpha)?;
    Ok(BacktestResult {
        alpha,
        weighting,
        breaches,
        weighted_breach_rate: rate,
        effective_n: n,
        lr_statistic: lr,
        p_value: chi_square_1df_sf(lr)?,
    })
}
