use rayon::prelude::*;

use reserving::mack::bootstrap_mack;
use reserving::macknet::macknet_bootstrap;
use reserving::{CompanyDataSet, DistributionSummary, LossKind, ReserveDistribution};

use crate::artifacts::MacknetArtifact;
use crate::config::{Model, RunConfig};
use crate::data::{cumulative, load_companies};
use crate::error::{CliError, CliResult};
use crate::io::{read_json, write_atomic, write_json, Layout};

pub struct SimRow {
    pub company_code: String,
    pub kind: LossKind,
    pub model: Model,
    pub summary: DistributionSummary,
}

pub fn simulate_one(d: &CompanyDataSet, kind: LossKind, model: Model, cfg: &RunConfig, layout: &Layout) -> CliResult<ReserveDistribution> {
    match model {
        Model::Mack => Ok(bootstrap_mack(&cumulative(d, kind)?, &cfg.bootstrap)?),
        Model::Macknet => {
            let path = layout.fit(d.line_of_business, kind, Model::Macknet, &d.company_code);
            let a: MacknetArtifact = read_json(&path, "fit --model macknet")?;
            if a.company_code != d.company_code || a.kind != kind {
                return Err(CliError::Usage(format!("{} belongs to another company or kind", path.display())));
            }
            Ok(macknet_bootstrap(&a.dbar, &a.parameters(), &cfg.bootstrap)?)
        }
    }
}

fn simulate_company(d: &CompanyDataSet, cfg: &RunConfig, layout: &Layout) -> CliResult<Vec<SimRow>> {
    let mut rows = Vec::new();
    for &kind in cfg.kind.kinds() {
        for &model in cfg.model.models() {
            let dist = simulate_one(d, kind, model, cfg, layout)?;
            let mut csv = Vec::new();
            dist.write_csv(&mut csv)?;
            write_atomic(&layout.sims(d.line_of_business, kind, model, &d.company_code), &csv)?;
            let summary = dist.summary()?;
            write_json(&layout.summary(d.line_of_business, kind, model, &d.company_code), &summary)?;
            rows.push(SimRow {
                company_code: d.company_code.clone(),
                kind,
                model,
                summary,
            });
        }
    }
    log::info!("simulated company {}", d.company_code);
    Ok(rows)
}

fn table(rows: &[SimRow]) -> String {
    let mut out = format!(
        "{:<10} {:<9} {:<8} {:>16} {:>16} {:>16} {:>8}\n",
        "company", "kind", "model", "mean reserve", "central reserve", "sd", "cv"
    );
    for r in rows {
        let s = &r.summary;
        let cv = s.ultimate.cv.map_or_else(|| "-".to_string(), |c| format!("{c:.4}"));
        out += &format!(
            "{:<10} {:<9} {:<8} {:>16.0} {:>16.0} {:>16.0} {:>8}\n",
            r.company_code,
            r.kind,
            r.model.as_str(),
            s.reserve.mean,
            s.deterministic_reserve,
            s.reserve.sd,
            cv
        );
    }
    out
}

pub fn run(cfg: &RunConfig, layout: &Layout) -> CliResult<Vec<SimRow>> {
    let cfg = cfg.seeded("simulate")?;
    let data = load_companies(&cfg, layout)?;
    let rows: Vec<SimRow> = data
        .par_iter()
        .map(|d| simulate_company(d, &cfg, layout))
        .collect::<CliResult<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    print!("{}", table(&rows));
    Ok(rows)
}
