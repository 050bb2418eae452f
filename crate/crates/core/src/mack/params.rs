use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::square::CompletedSquare;
use crate::mack::residuals::DEVIATION_TOL;
use crate::triangle::Triangle;

/// Divisor used in the variance estimator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaDivisor {
    /// `I - j - 1`, as the estimator is usually printed for this model.
    #[default]
    AsPublished,
    /// Number of link ratios in the column minus one (classic Mack).
    RatioCount,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MackParameters {
    pub dev_factors: Vec<f64>,
    pub sigma2: Vec<f64>,
}

impl MackParameters {
    pub fn sigma(&self) -> Vec<f64> {
        self.sigma2.iter().map(|s| s.sqrt()).collect()
    }
}

/// Link ratios of one development column: `(D_i,j-1, D_ij / D_i,j-1)`.
#[derive(Debug, Clone, Default)]
pub(crate) struct ColumnRatios {
    pub pairs: Vec<(f64, f64)>,
    /// Divisor under the chosen rule; `<= 0` triggers the fallback.
    pub divisor: i64,
}

/// Volume-weighted development factors of an as-reported cumulative triangle.
pub fn dev_factors(t: &Triangle) -> Result<Vec<f64>> {
    t.require_cumulative()?;
    t.require_as_reported()?;
    let n = t.origins();
    (1..n)
        .map(|j| {
            let rows = 0..n - j;
            let num: f64 = rows.clone().map(|i| t.value(i, j)).sum();
            let den: f64 = rows.map(|i| t.value(i, j - 1)).sum();
            if den == 0.0 {
                Err(Error::numerical(format!(
                    "development year {} has a zero denominator",
                    j + 1
                )))
            } else {
                Ok(num / den)
            }
        })
        .collect()
}

fn upper_columns(t: &Triangle, divisor: SigmaDivisor) -> Result<Vec<ColumnRatios>> {
    let n = t.origins();
    (1..n)
        .map(|j| {
            let pairs = (0..n - j)
                .map(|i| {
                    let base = t.value(i, j - 1);
                    if base == 0.0 {
                        Err(Error::numerical(format!(
                            "zero cumulative value at origin {}, development year {}",
                            i + 1,
                            j
                        )))
                    } else {
                        Ok((base, t.value(i, j) / base))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            // 1-based column index is j + 1.
            let d = match divisor {
                SigmaDivisor::AsPublished => n as i64 - (j as i64 + 1) - 1,
                SigmaDivisor::RatioCount => pairs.len() as i64 - 1,
            };
            Ok(ColumnRatios { pairs, divisor: d })
        })
        .collect()
}

/// Mack's log-linear extrapolation from the two preceding estimates.
pub(crate) fn log_linear_fallback(prev: f64, prev2: f64) -> f64 {
    if prev2 == 0.0 {
        0.0
    } else {
        (prev * prev / prev2).min(prev).min(prev2)
    }
}

/// Variance parameters from per-column ratios and centres.
///
/// Columns without a positive divisor take the log-linear fallback; with a
/// single earlier estimate that value is reused, and the first column falls
/// back to ratio-count-minus-one.
pub(crate) fn sigma2_from_columns(columns: &[ColumnRatios], centres: &[f64]) -> Result<Vec<f64>> {
    if columns.len() != centres.len() {
        return Err(Error::shape("one centre per development column expected"));
    }
    let mut out: Vec<f64> = Vec::with_capacity(columns.len());
    for (k, (col, &f)) in columns.iter().zip(centres).enumerate() {
        // Deviations at rounding level count as zero, matching the residuals.
        // Negative bases weigh by magnitude so the estimate stays non-negative.
        let ss: f64 = col
            .pairs
            .iter()
            .map(|&(b, r)| {
                let d = r - f;
                if d.abs() > DEVIATION_TOL * f.abs().max(1.0) {
                    b.abs() * d * d
                } else {
                    0.0
                }
            })
            .sum();
        let s2 = if col.divisor > 0 {
            ss / col.divisor as f64
        } else if k >= 2 {
            log_linear_fallback(out[k - 1], out[k - 2])
        } else if k == 1 {
            out[0]
        } else if col.pairs.len() >= 2 {
            ss / (col.pairs.len() - 1) as f64
        } else {
            return Err(Error::numerical(
                "first development column has a single ratio; variance not estimable",
            ));
        };
        out.push(s2);
    }
    Ok(out)
}

pub fn sigma2(t: &Triangle, f: &[f64]) -> Result<Vec<f64>> {
    sigma2_with(t, f, SigmaDivisor::default())
}

pub fn sigma2_with(t: &Triangle, f: &[f64], divisor: SigmaDivisor) -> Result<Vec<f64>> {
    t.require_cumulative()?;
    t.require_as_reported()?;
    if f.len() + 1 != t.origins() {
        return Err(Error::shape(format!(
            "{} factors for a triangle with {} origins",
            f.len(),
            t.origins()
        )));
    }
    sigma2_from_columns(&upper_columns(t, divisor)?, f)
}

pub fn estimate(t: &Triangle, divisor: SigmaDivisor) -> Result<MackParameters> {
    let dev_factors = dev_factors(t)?;
    let sigma2 = sigma2_with(t, &dev_factors, divisor)?;
    Ok(MackParameters {
        dev_factors,
        sigma2,
    })
}

/// Deterministic chain-ladder completion of the lower triangle.
pub fn chain_ladder_project(t: &Triangle, f: &[f64]) -> Result<CompletedSquare> {
    t.require_cumulative()?;
    t.require_as_reported()?;
    let n = t.origins();
    if f.len() + 1 != n {
        return Err(Error::shape(format!("{} factors for {} origins", f.len(), n)));
    }
    let mut sq = CompletedSquare::from_observed(t)?;
    for i in 1..n {
        let mut cur = t.value(i, n - 1 - i);
        for j in n - i..n {
            cur *= f[j - 1];
            sq.set(i, j, cur);
        }
    }
    Ok(sq)
}
