use serde::{Deserialize, Serialize};

use reserving::eval::{coefficient_of_variation, kupiec_test, mae_pct, rmse_pct, CompanyOutcome, Weighting};
use reserving::{CompanyDataSet, DistributionSummary, Error, LineOfBusiness, LossKind, ReserveDistribution};

use crate::config::{Model, RunConfig};
use crate::data::load_companies;
use crate::error::{CliError, CliResult};
use crate::io::{read_bytes, read_json, write_atomic, write_json, Layout};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub kind: LossKind,
    pub model: Model,
    pub companies: usize,
    pub rmse_pct: f64,
    pub mae_pct: f64,
    pub alpha: f64,
    pub breaches: usize,
    pub kupiec_lr_uniform: f64,
    pub kupiec_p_uniform: f64,
    pub kupiec_lr_sd_weighted: f64,
    pub kupiec_p_sd_weighted: f64,
    pub mean_cv: f64,
    /// Percentage of companies where this model's CV of the ultimate is
    /// below Mack's; only on Mack-Net rows when both were simulated.
    pub cv_lower_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub line_of_business: LineOfBusiness,
    pub rows: Vec<ReportRow>,
}

pub fn outcomes(data: &[CompanyDataSet], kind: LossKind, model: Model, layout: &Layout) -> CliResult<Vec<CompanyOutcome>> {
    data.iter()
        .map(|d| {
            let code = &d.company_code;
            let actual_ultimate = d.actual_ultimate(kind).ok_or_else(|| {
                CliError::Missing(format!(
                    "actual ultimates for company {code}: the source has no fully developed square"
                ))
            })?;
            let summary: DistributionSummary =
                read_json(&layout.summary(d.line_of_business, kind, model, code), "simulate")?;
            let csv = read_bytes(&layout.sims(d.line_of_business, kind, model, code), "simulate")?;
            Ok(CompanyOutcome {
                company_code: code.clone(),
                predicted_ultimate: summary.deterministic_ultimate,
                actual_ultimate,
                simulated_ultimates: ReserveDistribution::read_total_ultimates(csv.as_slice())?,
            })
        })
        .collect()
}

fn cvs(outcomes: &[CompanyOutcome]) -> CliResult<Vec<f64>> {
    Ok(outcomes
        .iter()
        .map(|o| coefficient_of_variation(&o.simulated_ultimates))
        .collect::<Result<_, Error>>()?)
}

pub fn build_rows(outcomes: &[(LossKind, Model, Vec<CompanyOutcome>)], alpha: f64) -> CliResult<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for (kind, model, o) in outcomes {
        let u = kupiec_test(o, alpha, Weighting::Uniform)?;
        let w = kupiec_test(o, alpha, Weighting::SdWeighted)?;
        let cv = cvs(o)?;
        let cv_lower_pct = match (model, outcomes.iter().find(|(k, m, _)| k == kind && *m == Model::Mack)) {
            (Model::Macknet, Some((_, _, mack))) => {
                let base = cvs(mack)?;
                let lower = cv.iter().zip(&base).filter(|(a, b)| a < b).count();
                Some(100.0 * lower as f64 / cv.len() as f64)
            }
            _ => None,
        };
        rows.push(ReportRow {
            kind: *kind,
            model: *model,
            companies: o.len(),
            rmse_pct: rmse_pct(o)?,
            mae_pct: mae_pct(o)?,
            alpha,
            breaches: u.breaches.iter().filter(|&&b| b).count(),
            kupiec_lr_uniform: u.lr_statistic,
            kupiec_p_uniform: u.p_value,
            kupiec_lr_sd_weighted: w.lr_statistic,
            kupiec_p_sd_weighted: w.p_value,
            mean_cv: cv.iter().sum::<f64>() / cv.len() as f64,
            cv_lower_pct,
        });
    }
    Ok(rows)
}

const HEADER: [&str; 10] = [
    "kind", "model", "companies", "rmse_pct", "mae_pct", "breaches", "kupiec_p", "kupiec_p_sd", "mean_cv", "cv_lower_pct",
];

fn cells(r: &ReportRow) -> [String; 10] {
    [
        r.kind.to_string(),
        r.model.as_str().to_string(),
        r.companies.to_string(),
        format!("{:.2}", r.rmse_pct),
        format!("{:.2}", r.mae_pct),
        r.breaches.to_string(),
        format!("{:.4}", r.kupiec_p_uniform),
        format!("{:.4}", r.kupiec_p_sd_weighted),
        format!("{:.4}", r.mean_cv),
        r.cv_lower_pct.map_or_else(String::new, |v| format!("{v:.0}")),
    ]
}

pub fn to_csv(rows: &[ReportRow]) -> String {
    let mut out = HEADER.join(",") + "\n";
    for r in rows {
        out += &(cells(r).join(",") + "\n");
    }
    out
}

pub fn to_text(lob: LineOfBusiness, rows: &[ReportRow]) -> String {
    let mut out = format!("{lob}\n");
    let widths = [9, 8, 9, 9, 9, 8, 9, 11, 8, 12];
    let line = |fields: &[String]| {
        fields
            .iter()
            .zip(widths)
            .map(|(f, w)| format!("{f:>w$}"))
            .collect::<Vec<_>>()
            .join(" ")
            + "\n"
    };
    out += &line(&HEADER.map(String::from));
    for r in rows {
        out += &line(&cells(r));
    }
    out
}

pub fn run(cfg: &RunConfig, layout: &Layout) -> CliResult<Report> {
    let data = load_companies(cfg, layout)?;
    let mut all = Vec::new();
    for &kind in cfg.kind.kinds() {
        for &model in cfg.model.models() {
            all.push((kind, model, outcomes(&data, kind, model, layout)?));
        }
    }
    let report = Report {
        line_of_business: cfg.lob,
        rows: build_rows(&all, cfg.alpha)?,
    };
    write_atomic(&layout.report(cfg.lob, "csv"), to_csv(&report.rows).as_bytes())?;
    write_json(&layout.report(cfg.lob, "json"), &report)?;
    let text = to_text(cfg.lob, &report.rows);
    write_atomic(&layout.report(cfg.lob, "txt"), text.as_bytes())?;
    print!("{text}");
    Ok(report)
}
