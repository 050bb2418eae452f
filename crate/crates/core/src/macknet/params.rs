use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mack::{sigma2_from_columns, ColumnRatios, SigmaDivisor};
use crate::square::CompletedSquare;

/// Rows entering the development factors of the averaged square.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorRows {
    /// Only rows whose cell in the column is predicted.
    #[default]
    Predicted,
    /// Every row of the square.
    FullColumn,
}

/// Parameters estimated on an averaged completed square; indexed `k = j - 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MackNetParameters {
    pub dev_factors_p: Vec<f64>,
    pub sigma2_p: Vec<f64>,
    /// Full-column factors, the centres of the variance and residuals.
    pub fbar: Vec<f64>,
}

impl MackNetParameters {
    pub fn sigma_p(&self) -> Vec<f64> {
        self.sigma2_p.iter().map(|s| s.sqrt()).collect()
    }
}

fn ratio_of_sums(dbar: &CompletedSquare, j: usize, rows: impl Iterator<Item = usize> + Clone) -> Result<f64> {
    let num: f64 = rows.clone().map(|i| dbar.value(i, j)).sum();
    let den: f64 = rows.map(|i| dbar.value(i, j - 1)).sum();
    if den == 0.0 || !den.is_finite() {
        return Err(Error::numerical(format!("development year {} has a zero denominator", j + 1)));
    }
    Ok(num / den)
}

pub fn macknet_parameters(
    dbar: &CompletedSquare,
    rows: FactorRows,
    divisor: SigmaDivisor,
) -> Result<MackNetParameters> {
    let n = dbar.size();
    if n < 2 {
        return Err(Error::invalid("square too small for development factors"));
    }
    let mut dev_factors_p = Vec::with_capacity(n - 1);
    let mut fbar = Vec::with_capacity(n - 1);
    let mut columns = Vec::with_capacity(n - 1);
    for j in 1..n {
        fbar.push(ratio_of_sums(dbar, j, 0..n)?);
        dev_factors_p.push(match rows {
            FactorRows::Predicted => ratio_of_sums(dbar, j, n - j..n)?,
            FactorRows::FullColumn => fbar[j - 1],
        });
        let pairs = (0..n)
            .map(|i| {
                let base = dbar.value(i, j - 1);
                if base == 0.0 {
                    Err(Error::numerical(format!(
                        "zero cumulative value at origin {}, development year {}",
                        i + 1,
                        j
                    )))
                } else {
                    Ok((base, dbar.value(i, j) / base))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let divisor = match divisor {
            SigmaDivisor::AsPublished => n as i64 - (j as i64 + 1) - 1,
            SigmaDivisor::RatioCount => pairs.len() as i64 - 1,
        };
        columns.push(ColumnRatios { pairs, divisor });
    }
    let sigma2_p = sigma2_from_columns(&columns, &fbar)?;
    if dev_factors_p.iter().chain(&sigma2_p).any(|v| !v.is_finite()) {
        return Err(Error::numerical("non-finite Mack-Net parameter"));
    }
    Ok(MackNetParameters {
        dev_factors_p,
        sigma2_p,
        fbar,
    })
}
