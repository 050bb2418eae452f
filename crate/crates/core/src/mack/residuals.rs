use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mack::{BootstrapConfig, MackParameters};
use crate::triangle::Triangle;

/// A scaled link-ratio residual at origin `origin`, development year `dev`
/// (both 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub origin: usize,
    pub dev: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSet {
    pub residuals: Vec<Residual>,
    pub n_params: usize,
    pub zero_mean_applied: bool,
    pub bias_adjusted: bool,
}

impl ResidualSet {
    pub fn len(&self) -> usize {
        self.residuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residuals.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.residuals.iter().map(|r| r.value).collect()
    }

    pub fn mean(&self) -> f64 {
        self.residuals.iter().map(|r| r.value).sum::<f64>() / self.len() as f64
    }
}

/// Relative size below which a link-ratio deviation counts as zero.
pub(crate) const DEVIATION_TOL: f64 = 1e-12;

/// Scaled residual `sqrt(base) (ratio - centre) / sigma`; `None` when the
/// column is degenerate.
pub(crate) fn scaled_residual(base: f64, ratio: f64, centre: f64, sigma: f64) -> Result<Option<f64>> {
    let dev = ratio - centre;
    if sigma > 0.0 {
        if base <= 0.0 {
            return Ok(None);
        }
        return Ok(Some(base.sqrt() * dev / sigma));
    }
    if dev.abs() > DEVIATION_TOL * centre.abs().max(1.0) {
        Err(Error::numerical(format!(
            "zero variance parameter with link-ratio deviation {dev:e}"
        )))
    } else {
        Ok(None)
    }
}

/// Applies the `N / (N - p)` bias factor and zero-mean centring.
pub(crate) fn finish_pool(
    mut residuals: Vec<Residual>,
    n_params: usize,
    bias_adjust: bool,
    zero_mean: bool,
) -> Result<ResidualSet> {
    if residuals.is_empty() {
        return Ok(ResidualSet {
            residuals,
            n_params,
            zero_mean_applied: zero_mean,
            bias_adjusted: bias_adjust,
        });
    }
    let n = residuals.len();
    if bias_adjust {
        if n <= n_params {
            return Err(Error::numerical(format!(
                "{n} residuals cannot be bias-adjusted for {n_params} parameters"
            )));
        }
        let factor = n as f64 / (n - n_params) as f64;
        for r in &mut residuals {
            r.value *= factor;
        }
    }
    if zero_mean {
        let mean = residuals.iter().map(|r| r.value).sum::<f64>() / n as f64;
        for r in &mut residuals {
            r.value -= mean;
        }
    }
    if let Some(r) = residuals.iter().find(|r| !r.value.is_finite()) {
        return Err(Error::numerical(format!(
            "non-finite residual at ({}, {})",
            r.origin + 1,
            r.dev + 1
        )));
    }
    Ok(ResidualSet {
        residuals,
        n_params,
        zero_mean_applied: zero_mean,
        bias_adjusted: bias_adjust,
    })
}

/// Pooled residuals over the observed upper triangle.
pub fn residuals(t: &Triangle, params: &MackParameters, cfg: &BootstrapConfig) -> Result<ResidualSet> {
    t.require_cumulative()?;
    t.require_as_reported()?;
    let n = t.origins();
    if params.dev_factors.len() + 1 != n || params.sigma2.len() + 1 != n {
        return Err(Error::shape("parameter vectors do not match triangle size"));
    }
    let sigma = params.sigma();
    let mut out = Vec::new();
    for j in 1..n {
        for i in 0..n - j {
            let base = t.value(i, j - 1);
            let ratio = t.value(i, j) / base;
            if let Some(value) = scaled_residual(base, ratio, params.dev_factors[j - 1], sigma[j - 1])? {
                out.push(Residual { origin: i, dev: j, value });
            }
        }
    }
    finish_pool(out, n - 1, cfg.bias_adjust, cfg.zero_mean)
}
