use rayon::prelude::*;

use reserving::mack::{chain_ladder_project, estimate};
use reserving::macknet::{complete_ensemble, complete_ensemble_joint, macknet_parameters, EnsembleSquare};
use reserving::{CompanyDataSet, LineOfBusiness, LossKind};

use crate::artifacts::{DiagnosticsArtifact, MackArtifact, MacknetArtifact};
use crate::config::{KindChoice, Model, RunConfig};
use crate::data::{cumulative, load_companies};
use crate::error::CliResult;
use crate::io::{write_atomic, write_json, Layout};

#[derive(Debug, Default)]
pub struct CompanyFit {
    pub mack: Vec<MackArtifact>,
    pub macknet: Vec<MacknetArtifact>,
}

fn fit_mack(d: &CompanyDataSet, kind: LossKind, cfg: &RunConfig) -> CliResult<MackArtifact> {
    let t = cumulative(d, kind)?;
    let p = estimate(&t, cfg.bootstrap.sigma_divisor)?;
    let sq = chain_ladder_project(&t, &p.dev_factors)?;
    Ok(MackArtifact {
        company_code: d.company_code.clone(),
        line_of_business: d.line_of_business,
        kind,
        dev_factors: p.dev_factors,
        sigma2: p.sigma2,
        ultimates: sq.ultimates(),
        reserve: sq.total_reserve(),
    })
}

fn macknet_artifacts(d: &CompanyDataSet, sq: EnsembleSquare, cfg: &RunConfig) -> CliResult<(MacknetArtifact, DiagnosticsArtifact)> {
    let p = macknet_parameters(&sq.dbar, cfg.factor_rows, cfg.bootstrap.sigma_divisor)?;
    let kind = sq.diagnostics.kind;
    Ok((
        MacknetArtifact {
            company_code: d.company_code.clone(),
            line_of_business: d.line_of_business,
            kind,
            dev_factors_p: p.dev_factors_p,
            sigma2_p: p.sigma2_p,
            fbar: p.fbar,
            ultimates: sq.dbar.ultimates(),
            reserve: sq.dbar.total_reserve(),
            dbar: sq.dbar,
        },
        DiagnosticsArtifact {
            company_code: d.company_code.clone(),
            line_of_business: d.line_of_business,
            diagnostics: sq.diagnostics,
        },
    ))
}

/// Fits the configured models for one company and writes its artifacts.
pub fn fit_company(d: &CompanyDataSet, cfg: &RunConfig, layout: &Layout) -> CliResult<CompanyFit> {
    let mut out = CompanyFit::default();
    let models = cfg.model.models();
    if models.contains(&Model::Mack) {
        for &kind in cfg.kind.kinds() {
            let a = fit_mack(d, kind, cfg)?;
            write_json(&layout.fit(d.line_of_business, kind, Model::Mack, &d.company_code), &a)?;
            out.mack.push(a);
        }
    }
    if models.contains(&Model::Macknet) {
        let squares = match cfg.kind {
            KindChoice::Both => {
                let (p, i) = complete_ensemble_joint(d, &cfg.ensemble)?;
                vec![p, i]
            }
            _ => cfg
                .kind
                .kinds()
                .iter()
                .map(|&k| complete_ensemble(d, k, &cfg.ensemble))
                .collect::<Result<_, _>>()?,
        };
        for sq in squares {
            let (a, diag) = macknet_artifacts(d, sq, cfg)?;
            write_json(&layout.fit(d.line_of_business, a.kind, Model::Macknet, &d.company_code), &a)?;
            write_json(&layout.diagnostics(d.line_of_business, a.kind, &d.company_code), &diag)?;
            out.macknet.push(a);
        }
    }
    log::info!("fitted company {}", d.company_code);
    Ok(out)
}

/// Element-wise mean over companies; shorter vectors leave later entries
/// to the companies that have them.
pub fn average<'a>(vectors: impl Iterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut sum: Vec<f64> = Vec::new();
    let mut count: Vec<usize> = Vec::new();
    for v in vectors {
        if v.len() > sum.len() {
            sum.resize(v.len(), 0.0);
            count.resize(v.len(), 0);
        }
        for (k, x) in v.iter().enumerate() {
            sum[k] += x;
            count[k] += 1;
        }
    }
    sum.iter().zip(&count).map(|(s, &c)| s / c as f64).collect()
}

/// Average parameters of one model.
pub struct AverageColumn {
    pub model: &'static str,
    pub factors: Vec<f64>,
    pub sigma2: Vec<f64>,
}

pub type AverageColumns = Vec<AverageColumn>;

pub fn averages(fits: &[CompanyFit], kind: LossKind) -> AverageColumns {
    let mut cols = Vec::new();
    let mack: Vec<&MackArtifact> = fits.iter().flat_map(|f| &f.mack).filter(|a| a.kind == kind).collect();
    if !mack.is_empty() {
        cols.push(AverageColumn {
            model: Model::Mack.as_str(),
            factors: average(mack.iter().map(|a| a.dev_factors.as_slice())),
            sigma2: average(mack.iter().map(|a| a.sigma2.as_slice())),
        });
    }
    let net: Vec<&MacknetArtifact> = fits.iter().flat_map(|f| &f.macknet).filter(|a| a.kind == kind).collect();
    if !net.is_empty() {
        cols.push(AverageColumn {
            model: Model::Macknet.as_str(),
            factors: average(net.iter().map(|a| a.dev_factors_p.as_slice())),
            sigma2: average(net.iter().map(|a| a.sigma2_p.as_slice())),
        });
    }
    cols
}

fn table_csv(cols: &AverageColumns, pick: fn(&AverageColumn) -> &[f64]) -> String {
    let mut out = String::from("dev_year");
    for c in cols {
        out += &format!(",{}", c.model);
    }
    out.push('\n');
    let rows = cols.iter().map(|c| pick(c).len()).max().unwrap_or(0);
    for k in 0..rows {
        out += &(k + 1).to_string();
        for c in cols {
            match pick(c).get(k) {
                Some(v) => out += &format!(",{v:?}"),
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

fn table_text(title: &str, cols: &AverageColumns, pick: fn(&AverageColumn) -> &[f64]) -> String {
    let mut out = format!("{title}\n{:>8}", "dev year");
    for c in cols {
        out += &format!(" {:>16}", c.model);
    }
    out.push('\n');
    let rows = cols.iter().map(|c| pick(c).len()).max().unwrap_or(0);
    for k in 0..rows {
        out += &format!("{:>8}", k + 1);
        for c in cols {
            match pick(c).get(k) {
                Some(v) => out += &format!(" {v:>16.6}"),
                None => out += &format!(" {:>16}", ""),
            }
        }
        out.push('\n');
    }
    out
}

/// Writes the per-line average tables and returns their text form.
pub fn write_averages(layout: &Layout, lob: LineOfBusiness, kind: LossKind, n: usize, cols: &AverageColumns) -> CliResult<String> {
    let dir = layout.fit_dir(lob, kind);
    write_atomic(&dir.join("factors.csv"), table_csv(cols, |c| &c.factors).as_bytes())?;
    write_atomic(&dir.join("sigma2.csv"), table_csv(cols, |c| &c.sigma2).as_bytes())?;
    let text = format!(
        "{}\n{}",
        table_text(&format!("average development factors, {lob} {kind}, {n} companies"), cols, |c| &c.factors),
        table_text(&format!("average sigma^2, {lob} {kind}, {n} companies"), cols, |c| &c.sigma2),
    );
    write_atomic(&dir.join("factors.txt"), text.as_bytes())?;
    Ok(text)
}

pub fn run(cfg: &RunConfig, layout: &Layout) -> CliResult<Vec<CompanyFit>> {
    let cfg = if cfg.model.models().contains(&Model::Macknet) {
        cfg.seeded("fit")?
    } else {
        cfg.clone()
    };
    let data = load_companies(&cfg, layout)?;
    let fits = data
        .par_iter()
        .map(|d| fit_company(d, &cfg, layout))
        .collect::<CliResult<Vec<_>>>()?;
    for &kind in cfg.kind.kinds() {
        let text = write_averages(layout, cfg.lob, kind, data.len(), &averages(&fits, kind))?;
        print!("{text}");
    }
    Ok(fits)
}
