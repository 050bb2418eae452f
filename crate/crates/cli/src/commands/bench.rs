use std::time::Instant;

use reserving::eval::{rmse_pct, CompanyOutcome};
use reserving::macknet::complete_ensemble;
use reserving::LossKind;

use crate::config::RunConfig;
use crate::data::load_companies;
use crate::error::{CliError, CliResult};
use crate::io::{write_atomic, Layout};

pub const SIZES: std::ops::RangeInclusive<usize> = 5..=10;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub years: usize,
    pub seconds: f64,
    pub rmse_pct: f64,
}

/// Index of each row relative to the first, which is 100.
pub fn indices(rows: &[BenchRow]) -> Vec<(f64, f64)> {
    let Some(first) = rows.first() else { return Vec::new() };
    rows.iter()
        .map(|r| (100.0 * r.seconds / first.seconds, 100.0 * r.rmse_pct / first.rmse_pct))
        .collect()
}

fn render(rows: &[BenchRow]) -> (String, String) {
    let idx = indices(rows);
    let mut csv = String::from("years,seconds,rmse_pct,time_index,error_index\n");
    let mut text = format!(
        "{:>6} {:>10} {:>9} {:>10} {:>11}\n",
        "years", "seconds", "rmse_pct", "time index", "error index"
    );
    for (r, (t, e)) in rows.iter().zip(idx) {
        csv += &format!("{},{:.3},{:.4},{:.2},{:.2}\n", r.years, r.seconds, r.rmse_pct, t, e);
        text += &format!("{:>6} {:>10.3} {:>9.4} {:>10.2} {:>11.2}\n", r.years, r.seconds, r.rmse_pct, t, e);
    }
    (csv, text)
}

/// Trains Mack-Net on the most recent `years` origins of every company and
/// scores the completed square against the realised values at the same
/// development age. Companies run one after another so timings are not
/// shared between them; members still train in parallel.
pub fn run(cfg: &RunConfig, layout: &Layout) -> CliResult<Vec<(LossKind, Vec<BenchRow>)>> {
    let cfg = cfg.seeded("fit --bench")?;
    let data = load_companies(&cfg, layout)?;
    let mut out = Vec::new();
    for &kind in cfg.kind.kinds() {
        let mut rows = Vec::new();
        for years in SIZES {
            let mut seconds = 0.0;
            let mut outcomes = Vec::new();
            for d in data.iter().filter(|d| d.origins() >= years) {
                let cut = d.truncate_recent(years)?;
                let actual = cut.actual_ultimate(kind).ok_or_else(|| {
                    CliError::Missing(format!("actual square for company {} (needed by --bench)", d.company_code))
                })?;
                let start = Instant::now();
                let sq = complete_ensemble(&cut, kind, &cfg.ensemble)?;
                seconds += start.elapsed().as_secs_f64();
                outcomes.push(CompanyOutcome {
                    company_code: d.company_code.clone(),
                    predicted_ultimate: sq.dbar.total_ultimate(),
                    actual_ultimate: actual,
                    simulated_ultimates: Vec::new(),
                });
            }
            if outcomes.is_empty() {
                continue;
            }
            let row = BenchRow {
                years,
                seconds,
                rmse_pct: rmse_pct(&outcomes)?,
            };
            log::info!("bench {kind} {years} years: {:.2}s, {:.3}%", row.seconds, row.rmse_pct);
            rows.push(row);
        }
        let (csv, text) = render(&rows);
        write_atomic(&layout.bench(cfg.lob, kind, "csv"), csv.as_bytes())?;
        write_atomic(&layout.bench(cfg.lob, kind, "txt"), text.as_bytes())?;
        println!("{} {kind}, {} companies\n{text}", cfg.lob, data.len());
        out.push((kind, rows));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_start_at_100() {
        let rows = [
            BenchRow { years: 5, seconds: 2.0, rmse_pct: 10.0 },
            BenchRow { years: 6, seconds: 3.0, rmse_pct: 5.0 },
        ];
        assert_eq!(indices(&rows), vec![(100.0, 100.0), (150.0, 50.0)]);
    }
}
