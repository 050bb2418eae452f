use rayon::prelude::*;

use reserving::{CompanyDataSet, LossKind};

use crate::config::RunConfig;
use crate::data::{load_companies, source, Source, INDEX};
use crate::error::{CliError, CliResult};
use crate::io::{write_atomic, write_json, Layout};

fn write_company(layout: &Layout, d: &CompanyDataSet) -> CliResult<()> {
    let dir = layout.data_dir(d.line_of_business);
    let code = &d.company_code;
    write_json(&layout.dataset(&dir, code), d)?;
    for kind in [LossKind::Paid, LossKind::Incurred] {
        let t = d.triangle(kind);
        write_json(&dir.join(format!("{code}_{kind}.json")), &t.to_json())?;
        let mut csv = Vec::new();
        t.write_long_csv(&mut csv)?;
        write_atomic(&dir.join(format!("{code}_{kind}.csv")), &csv)?;
    }
    Ok(())
}

pub fn summary_table(data: &[CompanyDataSet]) -> String {
    let mut out = format!(
        "{:<10} {:>7} {:>7} {:>16} {:>9}\n",
        "company", "origins", "cells", "premium", "complete"
    );
    for d in data {
        let cells = d.paid.mask().iter().filter(|&&m| m).count();
        let premium: f64 = d.exposure.premiums().iter().sum();
        out += &format!(
            "{:<10} {:>7} {:>7} {:>16.0} {:>9}\n",
            d.company_code,
            d.origins(),
            cells,
            premium,
            if d.actual.is_some() { "yes" } else { "no" }
        );
    }
    out += &format!("{} companies\n", data.len());
    out
}

/// Parses the Schedule P file and writes one canonical data set per company.
pub fn run(cfg: &RunConfig, layout: &Layout) -> CliResult<Vec<CompanyDataSet>> {
    if !matches!(source(cfg, layout)?, Source::Csv(_)) {
        return Err(CliError::Usage("`ingest` needs --data pointing at a Schedule P CSV file".into()));
    }
    let data = load_companies(cfg, layout)?;
    data.par_iter().try_for_each(|d| write_company(layout, d))?;
    let codes: Vec<&str> = data.iter().map(|d| d.company_code.as_str()).collect();
    write_json(&layout.data_dir(cfg.lob).join(INDEX), &codes)?;
    print!("{}", summary_table(&data));
    Ok(data)
}
