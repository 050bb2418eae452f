use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neural::{Sample, FEATURES};
use crate::triangle::{CompanyDataSet, LossKind, Triangle};

/// Number of lags fed to the network.
pub const WINDOW: usize = 8;

/// One training or test cell. Lag arrays hold lag 1 at index 0; lags that
/// precede the first development year are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSample {
    /// Scaled increments of the modelled kind.
    pub x1: [f64; WINDOW],
    /// Development year over the number of origins.
    pub x2: [f64; WINDOW],
    /// Column paid-to-incurred ratio.
    pub x3: [f64; WINDOW],
    /// Scaled increment at the cell.
    pub y: f64,
    pub origin: usize,
    pub dev: usize,
}

impl FeatureSample {
    /// Network input in time order, oldest lag first.
    pub fn sequence(&self) -> Vec<[f64; FEATURES]> {
        (0..WINDOW).rev().map(|k| [self.x1[k], self.x2[k], self.x3[k]]).collect()
    }

    pub fn to_sample(&self) -> Sample {
        Sample {
            sequence: self.sequence(),
            target: self.y,
        }
    }
}

/// Cumulative paid and incurred values with a shared mask of known cells.
/// Used for both the training triangle and progressively completed squares.
pub(crate) struct Grid<'a> {
    pub n: usize,
    pub paid: &'a [f64],
    pub incurred: &'a [f64],
    pub known: &'a dyn Fn(usize, usize) -> bool,
    pub premiums: &'a [f64],
}

impl Grid<'_> {
    fn series(&self, kind: LossKind) -> &[f64] {
        match kind {
            LossKind::Paid => self.paid,
            LossKind::Incurred => self.incurred,
        }
    }

    /// Scaled increment of `kind` at a known cell.
    pub fn scaled_increment(&self, kind: LossKind, i: usize, j: usize) -> f64 {
        let s = self.series(kind);
        let n = self.n;
        let inc = if j == 0 { s[i * n] } else { s[i * n + j] - s[i * n + j - 1] };
        inc / self.premiums[i]
    }

    /// Paid-to-incurred ratio of premium-scaled column sums over known rows,
    /// for every column with at least one known cell.
    pub fn column_ratios(&self) -> Result<Vec<Option<f64>>> {
        let n = self.n;
        (0..n)
            .map(|j| {
                let rows: Vec<usize> = (0..n).filter(|&i| (self.known)(i, j)).collect();
                if rows.is_empty() {
                    return Ok(None);
                }
                let num: f64 = rows.iter().map(|&i| self.paid[i * n + j] / self.premiums[i]).sum();
                let den: f64 = rows.iter().map(|&i| self.incurred[i * n + j] / self.premiums[i]).sum();
                if den == 0.0 {
                    return Err(Error::numerical(format!(
                        "incurred column {} sums to zero; paid-to-incurred ratio undefined",
                        j + 1
                    )));
                }
                Ok(Some(num / den))
            })
            .collect()
    }

    /// Feature sample for cell `(i, j)`, `j >= 1`, from the known lags.
    pub fn sample(&self, kind: LossKind, ratios: &[Option<f64>], i: usize, j: usize, y: f64) -> Result<FeatureSample> {
        debug_assert!(j >= 1);
        let mut s = FeatureSample {
            x1: [0.0; WINDOW],
            x2: [0.0; WINDOW],
            x3: [0.0; WINDOW],
            y,
            origin: i,
            dev: j,
        };
        for k in 0..WINDOW.min(j) {
            let c = j - 1 - k;
            s.x1[k] = self.scaled_increment(kind, i, c);
            s.x2[k] = (c + 1) as f64 / self.n as f64;
            s.x3[k] = ratios[c].ok_or_else(|| Error::shape(format!("column {} has no known cells", c + 1)))?;
        }
        Ok(s)
    }
}

/// Training and test samples for one triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSet {
    pub kind: LossKind,
    /// Cells of the triangle without its last diagonal, dev year two onward.
    pub train: Vec<FeatureSample>,
    /// Last-diagonal cells from dev year two onward.
    pub test: Vec<FeatureSample>,
}

impl FeatureSet {
    pub fn train_samples(&self) -> Vec<Sample> {
        self.train.iter().map(FeatureSample::to_sample).collect()
    }

    pub fn test_samples(&self) -> Vec<Sample> {
        self.test.iter().map(FeatureSample::to_sample).collect()
    }
}

/// Builds features with the last diagonal held out. Ratios and lags come
/// from the remaining triangle only.
pub fn build_features(data: &CompanyDataSet, kind: LossKind) -> Result<FeatureSet> {
    data.validate()?;
    let paid = cumulative(&data.paid)?;
    let incurred = cumulative(&data.incurred)?;
    let (train_paid, test_cells) = paid.split_last_diagonal()?;
    let n = paid.origins();
    let known = |i: usize, j: usize| train_paid.is_observed(i, j);
    let grid = Grid {
        n,
        paid: paid.values(),
        incurred: incurred.values(),
        known: &known,
        premiums: data.exposure.premiums(),
    };
    let ratios = grid.column_ratios()?;

    let mut train = Vec::new();
    for i in 0..n {
        for j in 1..n {
            if known(i, j) {
                train.push(grid.sample(kind, &ratios, i, j, grid.scaled_increment(kind, i, j))?);
            }
        }
    }
    let test = test_cells
        .iter()
        .filter(|c| c.dev >= 1)
        .map(|c| grid.sample(kind, &ratios, c.origin, c.dev, grid.scaled_increment(kind, c.origin, c.dev)))
        .collect::<Result<Vec<_>>>()?;
    if train.iter().chain(&test).any(|s| !s.y.is_finite()) {
        return Err(Error::numerical("non-finite training target"));
    }
    Ok(FeatureSet { kind, train, test })
}

pub(crate) fn cumulative(t: &Triangle) -> Result<Triangle> {
    match t.basis() {
        crate::Basis::Cumulative => Ok(t.clone()),
        crate::Basis::Incremental => t.incremental_to_cumulative(),
    }
}
