//! Simulated reserve distributions and their exports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    MackPaid,
    MackIncurred,
    MacknetPaid,
    MacknetIncurred,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::MackPaid => "mack_paid",
            ModelKind::MackIncurred => "mack_incurred",
            ModelKind::MacknetPaid => "macknet_paid",
            ModelKind::MacknetIncurred => "macknet_incurred",
        }
    }

    pub fn mack(kind: crate::LossKind) -> Self {
        match kind {
            crate::LossKind::Paid => ModelKind::MackPaid,
            crate::LossKind::Incurred => ModelKind::MackIncurred,
        }
    }

    pub fn macknet(kind: crate::LossKind) -> Self {
        match kind {
            crate::LossKind::Paid => ModelKind::MacknetPaid,
            crate::LossKind::Incurred => ModelKind::MacknetIncurred,
        }
    }
}

/// Quantile levels reported in every summary.
pub const SUMMARY_LEVELS: [f64; 7] = [0.005, 0.01, 0.05, 0.5, 0.95, 0.99, 0.995];

/// Per-simulation ultimates and reserves for one triangle and model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReserveDistribution {
    pub model_kind: ModelKind,
    pub seed: u64,
    pub n_origins: usize,
    /// Latest observed value per origin.
    pub latest: Vec<f64>,
    /// Row-major `B x I` simulated ultimates.
    pub ultimates: Vec<f64>,
    pub total_reserves: Vec<f64>,
    /// Central-scenario total reserve.
    pub deterministic_mean: f64,
    /// Central-scenario ultimate per origin.
    pub deterministic_ultimates: Vec<f64>,
    /// Count of simulated cumulative cells that went negative.
    pub negative_cells: u64,
}

impl ReserveDistribution {
    pub fn n_sims(&self) -> usize {
        self.total_reserves.len()
    }

    pub fn ultimate_row(&self, sim: usize) -> &[f64] {
        &self.ultimates[sim * self.n_origins..(sim + 1) * self.n_origins]
    }

    pub fn total_ultimates(&self) -> Vec<f64> {
        (0..self.n_sims())
            .map(|b| self.ultimate_row(b).iter().sum())
            .collect()
    }

    pub fn latest_total(&self) -> f64 {
        self.latest.iter().sum()
    }

    /// Central-scenario total ultimate.
    pub fn deterministic_ultimate(&self) -> f64 {
        self.deterministic_ultimates.iter().sum()
    }

    pub fn mean_total_reserve(&self) -> f64 {
        mean(&self.total_reserves)
    }

    pub fn summary(&self) -> Result<DistributionSummary> {
        Ok(DistributionSummary {
            model: self.model_kind,
            seed: self.seed,
            n_sims: self.n_sims(),
            deterministic_reserve: self.deterministic_mean,
            deterministic_ultimate: self.deterministic_ultimate(),
            reserve: Stats::of(&self.total_reserves)?,
            ultimate: Stats::of(&self.total_ultimates())?,
            negative_cells: self.negative_cells,
        })
    }

    /// One row per simulation: index, total reserve, per-origin ultimates.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["sim".to_string(), "total_reserve".to_string()];
        header.extend((1..=self.n_origins).map(|i| format!("ultimate_{i}")));
        w.write_record(&header)?;
        for b in 0..self.n_sims() {
            let mut rec = vec![b.to_string(), format_f64(self.total_reserves[b])];
            rec.extend(self.ultimate_row(b).iter().map(|&u| format_f64(u)));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the total-ultimate column sums back from a CSV written by
    /// [`write_csv`](Self::write_csv).
    pub fn read_total_ultimates<R: std::io::Read>(reader: R) -> Result<Vec<f64>> {
        let mut r = csv::Reader::from_reader(reader);
        let mut out = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let mut total = 0.0;
            for field in rec.iter().skip(2) {
                total += field.parse::<f64>().map_err(|e| Error::Malformed {
                    line: line as u64 + 2,
                    message: format!("bad ultimate `{field}`: {e}"),
                })?;
            }
            out.push(total);
        }
        Ok(out)
    }
}

/// Shortest representation that round-trips exactly.
fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantile {
    pub level: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub sd: f64,
    pub cv: Option<f64>,
    pub quantiles: Vec<Quantile>,
}

impl Stats {
    pub fn of(samples: &[f64]) -> Result<Stats> {
        let mean = mean(samples);
        let sd = eval::population_sd(samples);
        let quantiles = SUMMARY_LEVELS
            .iter()
            .map(|&level| eval::quantile(samples, level).map(|value| Quantile { level, value }))
            .collect::<Result<_>>()?;
        Ok(Stats {
            mean,
            sd,
            cv: (mean != 0.0).then(|| sd / mean),
            quantiles,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub model: ModelKind,
    pub seed: u64,
    pub n_sims: usize,
    pub deterministic_reserve: f64,
    pub deterministic_ultimate: f64,
    pub reserve: Stats,
    pub ultimate: Stats,
    pub negative_cells: u64,
}
