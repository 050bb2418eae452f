use std::path::{Path, PathBuf};

use reserving::mack::{estimate, SigmaDivisor};
use reserving::macknet::build_features;
use reserving::schedule_p::{load_each, LoadOptions};
use reserving::{Basis, CompanyDataSet, Error, LineOfBusiness, LossKind, Triangle};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::io::{read_json, Layout};

pub const INDEX: &str = "companies.json";

/// Company order used for every aggregate: numeric codes by value, then
/// anything else lexically.
pub fn code_key(code: &str) -> (Option<u64>, &str) {
    (code.parse().ok(), code)
}

/// Requested codes, or `None` for every company in the source.
pub fn requested_codes(cfg: &RunConfig) -> CliResult<Option<Vec<String>>> {
    match cfg.companies.trim() {
        "all" => Ok(None),
        "meyers-all" => {
            let path = cfg.company_list.as_ref().ok_or_else(|| {
                CliError::Usage("`--companies meyers-all` needs --company-list FILE with the selected codes".into())
            })?;
            Ok(Some(read_company_list(path, cfg.lob)?))
        }
        list => {
            let codes: Vec<String> = list
                .split(',')
                .map(|c| c.trim().to_string())
                .filter(|c| !c.is_empty())
                .collect();
            if codes.is_empty() {
                return Err(CliError::Usage("empty company list".into()));
            }
            Ok(Some(codes))
        }
    }
}

/// One code per line, optionally prefixed by a line of business
/// (`CA,353`). Blank lines and `#` comments are skipped.
fn read_company_list(path: &Path, lob: LineOfBusiness) -> CliResult<Vec<String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Missing(format!("company list {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match fields.as_slice() {
            [code] => out.push(code.to_string()),
            [l, code] => {
                let l: LineOfBusiness = l.parse().map_err(|e: Error| Error::Malformed {
                    line: k as u64 + 1,
                    message: e.to_string(),
                })?;
                if l == lob {
                    out.push(code.to_string());
                }
            }
            _ => {
                return Err(Error::Malformed {
                    line: k as u64 + 1,
                    message: format!("expected `code` or `LOB,code` in {}", path.display()),
                }
                .into())
            }
        }
    }
    Ok(out)
}

pub enum Source {
    /// A Schedule P CSV.
    Csv(PathBuf),
    /// A directory of ingested data sets.
    Ingested(PathBuf),
}

pub fn source(cfg: &RunConfig, layout: &Layout) -> CliResult<Source> {
    let path = cfg.data.clone().unwrap_or_else(|| layout.data_dir(cfg.lob));
    if path.is_file() {
        return Ok(Source::Csv(path));
    }
    if path.is_dir() {
        let by_lob = path.join(cfg.lob.as_str());
        return Ok(Source::Ingested(if by_lob.join(INDEX).is_file() { by_lob } else { path }));
    }
    Err(CliError::Missing(format!(
        "data source {} not found (pass --data or run `ingest`)",
        path.display()
    )))
}

/// Loads the selected companies in sorted code order.
pub fn load_companies(cfg: &RunConfig, layout: &Layout) -> CliResult<Vec<CompanyDataSet>> {
    let wanted = requested_codes(cfg)?;
    let mut out = match source(cfg, layout)? {
        Source::Csv(path) => {
            let opts = LoadOptions { net_bulk: cfg.net_bulk };
            let mut each = load_each(&path, cfg.lob, opts)?;
            match &wanted {
                // A wide selection skips companies whose data cannot be modelled.
                None => each
                    .into_iter()
                    .filter_map(|(code, r)| match r.and_then(|d| screen(&d).map(|()| d)) {
                        Ok(d) => Some(d),
                        Err(e) => {
                            log::warn!("skipping company {code}: {e}");
                            None
                        }
                    })
                    .collect(),
                Some(codes) => codes
                    .iter()
                    .map(|c| match each.iter().position(|(code, _)| code == c) {
                        Some(k) => each.swap_remove(k).1,
                        None => Err(Error::MissingCompany {
                            code: c.clone(),
                            source_name: format!("{} ({})", path.display(), cfg.lob),
                        }),
                    })
                    .collect::<Result<_, _>>()?,
            }
        }
        Source::Ingested(dir) => {
            let codes = match wanted {
                Some(c) => c,
                None => read_json::<Vec<String>>(&dir.join(INDEX), "ingest")?,
            };
            codes
                .iter()
                .map(|c| read_json::<CompanyDataSet>(&layout.dataset(&dir, c), "ingest"))
                .collect::<CliResult<Vec<_>>>()?
        }
    };
    if out.is_empty() {
        return Err(Error::Data(format!("no {} companies selected", cfg.lob)).into());
    }
    for d in &out {
        d.validate()?;
    }
    out.sort_by(|a, b| code_key(&a.company_code).cmp(&code_key(&b.company_code)));
    out.dedup_by(|a, b| a.company_code == b.company_code);
    Ok(out)
}

/// Checks that both models can be estimated on the company's triangles.
pub fn screen(d: &CompanyDataSet) -> Result<(), Error> {
    for kind in [LossKind::Paid, LossKind::Incurred] {
        let t = match d.triangle(kind).basis() {
            Basis::Cumulative => d.triangle(kind).clone(),
            Basis::Incremental => d.triangle(kind).incremental_to_cumulative()?,
        };
        estimate(&t, SigmaDivisor::default())?;
        build_features(d, kind)?;
    }
    Ok(())
}

pub fn cumulative(data: &CompanyDataSet, kind: LossKind) -> CliResult<Triangle> {
    let t = data.triangle(kind);
    Ok(match t.basis() {
        Basis::Cumulative => t.clone(),
        Basis::Incremental => t.incremental_to_cumulative()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_sort_numerically() {
        let mut v = ["353", "1767", "x", "44"];
        v.sort_by(|a, b| code_key(a).cmp(&code_key(b)));
        assert_eq!(v, ["x", "44", "353", "1767"]);
    }

    #[test]
    fn company_list_filters_by_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("codes.txt");
        std::fs::write(&p, "# comment\nCA,353\nPA,388\n\n1767\n").unwrap();
        assert_eq!(read_company_list(&p, LineOfBusiness::CA).unwrap(), ["353", "1767"]);
        std::fs::write(&p, "CA,1,2\n").unwrap();
        assert!(read_company_list(&p, LineOfBusiness::CA).is_err());
    }
}
