//! Reader for the CAS Schedule P loss reserving database.
//!
//! Each record is one (company, accident year, development lag). Column
//! names may carry a line-of-business suffix (`IncurLoss_C`, ...) as in the
//! per-line files, or none as in the combined file, which then has a `LOB`
//! column that is used as a filter.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::triangle::{ActualSquares, Basis, CompanyDataSet, Exposure, LineOfBusiness, LossKind, Triangle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LoadOptions {
    /// Incurred = IncurLoss − BulkLoss when set, raw IncurLoss otherwise.
    pub net_bulk: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self { net_bulk: true }
    }
}

#[derive(Debug, Clone)]
struct Record {
    line: u64,
    year: i32,
    lag: usize,
    incurred: f64,
    bulk: f64,
    paid: f64,
    premium: f64,
}

#[derive(Debug, Default)]
struct Company {
    name: Option<String>,
    records: Vec<Record>,
}

struct Columns {
    code: usize,
    name: Option<usize>,
    year: usize,
    lag: usize,
    incurred: usize,
    bulk: usize,
    paid: usize,
    premium: usize,
    lob: Option<usize>,
}

fn find(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    let suffixed = format!("{name}_");
    headers
        .iter()
        .position(|h| h.trim() == name || h.trim().starts_with(&suffixed))
}

fn require(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    find(headers, name).ok_or_else(|| Error::MissingColumn(name.to_string()))
}

impl Columns {
    fn locate(headers: &csv::StringRecord) -> Result<Self> {
        Ok(Self {
            code: require(headers, "GRCODE")?,
            name: find(headers, "GRNAME"),
            year: require(headers, "AccidentYear")?,
            lag: require(headers, "DevelopmentLag")?,
            // Later releases of the database spell it out.
            incurred: find(headers, "IncurLoss")
                .or_else(|| find(headers, "IncurredLosses"))
                .ok_or_else(|| Error::MissingColumn("IncurLoss".into()))?,
            bulk: require(headers, "BulkLoss")?,
            paid: require(headers, "CumPaidLoss")?,
            premium: require(headers, "EarnedPremNet")?,
            lob: headers.iter().position(|h| h.trim() == "LOB"),
        })
    }
}

fn field(rec: &csv::StringRecord, idx: usize, line: u64) -> Result<&str> {
    rec.get(idx).map(str::trim).ok_or_else(|| Error::Malformed {
        line,
        message: format!("record has {} fields", rec.len()),
    })
}

fn number<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, line: u64, what: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = field(rec, idx, line)?;
    raw.parse::<T>().map_err(|e| Error::Malformed {
        line,
        message: format!("bad {what} `{raw}`: {e}"),
    })
}

/// Parses every record of `lob`, keyed by company code in file order.
fn parse(path: &Path, lob: LineOfBusiness) -> Result<Vec<(String, Company)>> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
    let cols = Columns::locate(reader.headers()?)?;
    let mut order = Vec::new();
    let mut companies: HashMap<String, Company> = HashMap::new();
    for (k, rec) in reader.records().enumerate() {
        let line = k as u64 + 2;
        let rec = rec?;
        if let Some(i) = cols.lob {
            if !field(&rec, i, line)?.eq_ignore_ascii_case(lob.database_name()) {
                continue;
            }
        }
        let code = field(&rec, cols.code, line)?.to_string();
        if code.is_empty() {
            return Err(Error::Malformed {
                line,
                message: "empty company code".into(),
            });
        }
        let record = Record {
            line,
            year: number(&rec, cols.year, line, "accident year")?,
            lag: number(&rec, cols.lag, line, "development lag")?,
            incurred: number(&rec, cols.incurred, line, "incurred loss")?,
            bulk: number(&rec, cols.bulk, line, "bulk loss")?,
            paid: number(&rec, cols.paid, line, "paid loss")?,
            premium: number(&rec, cols.premium, line, "earned premium")?,
        };
        if record.lag == 0 {
            return Err(Error::Malformed {
                line,
                message: "development lag must start at 1".into(),
            });
        }
        let entry = companies.entry(code.clone()).or_insert_with(|| {
            order.push(code.clone());
            Company::default()
        });
        if entry.name.is_none() {
            entry.name = cols.name.and_then(|i| rec.get(i)).map(|s| s.trim().to_string());
        }
        entry.records.push(record);
    }
    Ok(order
        .into_iter()
        .map(|code| {
            let c = companies.remove(&code).unwrap_or_default();
            (code, c)
        })
        .collect())
}

fn build(code: &str, company: Company, lob: LineOfBusiness, opts: LoadOptions) -> Result<CompanyDataSet> {
    let years: Vec<i32> = company
        .records
        .iter()
        .map(|r| r.year)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = years.len();
    let first = years[0];
    if years.iter().enumerate().any(|(k, &y)| y != first + k as i32) {
        return Err(Error::Data(format!("company {code}: accident years are not consecutive")));
    }
    let mut cells: BTreeMap<(usize, usize), &Record> = BTreeMap::new();
    let mut premiums = vec![None; n];
    for r in &company.records {
        let i = (r.year - first) as usize;
        premiums[i].get_or_insert(r.premium);
        if r.lag > n {
            continue;
        }
        if cells.insert((i, r.lag - 1), r).is_some() {
            return Err(Error::Malformed {
                line: r.line,
                message: format!("duplicate record for company {code}, year {}, lag {}", r.year, r.lag),
            });
        }
    }

    let mut paid = vec![0.0; n * n];
    let mut incurred = vec![0.0; n * n];
    let mut mask = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            let observed = i + j < n;
            match cells.get(&(i, j)) {
                Some(r) => {
                    paid[i * n + j] = r.paid;
                    incurred[i * n + j] = if opts.net_bulk { r.incurred - r.bulk } else { r.incurred };
                }
                None if observed => {
                    return Err(Error::Data(format!(
                        "company {code}: no record for accident year {}, lag {}",
                        years[i],
                        j + 1
                    )))
                }
                None => {}
            }
            mask[i * n + j] = observed;
        }
    }
    let complete = cells.len() == n * n;

    for i in 0..n {
        for j in 1..n - i {
            if paid[i * n + j] < paid[i * n + j - 1] {
                log::warn!(
                    "company {code}: negative paid increment at accident year {}, lag {}",
                    years[i],
                    j + 1
                );
            }
        }
    }

    let triangle = |values: &[f64], kind| {
        let visible = values
            .iter()
            .zip(&mask)
            .map(|(&v, &m)| if m { v } else { 0.0 })
            .collect();
        Triangle::from_square(n, visible, mask.clone(), Basis::Cumulative, kind)?.with_origin_years(years.clone())
    };
    let premiums: Vec<f64> = premiums.into_iter().map(|p| p.unwrap_or(0.0)).collect();
    let exposure = Exposure::new(premiums).map_err(|e| Error::Data(format!("company {code}: {e}")))?;
    let mut ds = CompanyDataSet::new(
        code,
        lob,
        triangle(&paid, LossKind::Paid)?,
        triangle(&incurred, LossKind::Incurred)?,
        exposure,
    )?;
    ds.company_name = company.name.filter(|s| !s.is_empty());
    ds.actual = complete.then_some(ActualSquares { paid, incurred });
    Ok(ds)
}

/// Loads one company with default options.
pub fn load_schedule_p(path: impl AsRef<Path>, lob: LineOfBusiness, company_code: &str) -> Result<CompanyDataSet> {
    load_schedule_p_with(path, lob, company_code, LoadOptions::default())
}

pub fn load_schedule_p_with(
    path: impl AsRef<Path>,
    lob: LineOfBusiness,
    company_code: &str,
    opts: LoadOptions,
) -> Result<CompanyDataSet> {
    let path = path.as_ref();
    let company = parse(path, lob)?
        .into_iter()
        .find(|(code, _)| code == company_code)
        .ok_or_else(|| Error::MissingCompany {
            code: company_code.to_string(),
            source_name: format!("{} ({})", path.display(), lob),
        })?;
    build(company_code, company.1, lob, opts)
}

/// Company codes present for `lob`, in file order.
pub fn list_companies(path: impl AsRef<Path>, lob: LineOfBusiness) -> Result<Vec<String>> {
    Ok(parse(path.as_ref(), lob)?.into_iter().map(|(c, _)| c).collect())
}

/// Every company for `lob`, in file order.
pub fn load_all(path: impl AsRef<Path>, lob: LineOfBusiness, opts: LoadOptions) -> Result<Vec<CompanyDataSet>> {
    parse(path.as_ref(), lob)?
        .into_iter()
        .map(|(code, c)| build(&code, c, lob, opts))
        .collect()
}

/// Every company for `lob` in file order, each with its own build result,
/// so one unusable company does not hide the rest. File-level problems
/// (missing columns, malformed lines) still fail the whole call.
pub fn load_each(
    path: impl AsRef<Path>,
    lob: LineOfBusiness,
    opts: LoadOptions,
) -> Result<Vec<(String, Result<CompanyDataSet>)>> {
    Ok(parse(path.as_ref(), lob)?
        .into_iter()
        .map(|(code, c)| {
            let built = build(&code, c, lob, opts);
            (code, built)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    const HEADER: &str =
        "GRCODE,GRNAME,AccidentYear,DevelopmentYear,DevelopmentLag,IncurLoss_C,CumPaidLoss_C,BulkLoss_C,EarnedPremNet_C\n";

    fn fixture(body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(HEADER.as_bytes()).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    const THREE_ROWS: &str = "\
7,Test Co,1988,1988,1,100,40,10,500
7,Test Co,1988,1989,2,120,80,5,500
7,Test Co,1989,1989,1,110,50,20,600
";

    #[test]
    fn three_row_fixture() {
        let f = fixture(THREE_ROWS);
        let ds = load_schedule_p(f.path(), LineOfBusiness::CA, "7").unwrap();
        assert_eq!(ds.origins(), 2);
        assert_eq!(ds.paid.origin_years(), &[1988, 1989]);
        assert_eq!(ds.paid.mask(), &[true, true, true, false]);
        assert_eq!(ds.paid.get(0, 1), Some(80.0));
        assert_eq!(ds.paid.get(1, 0), Some(50.0));
        assert_eq!(ds.paid.get(1, 1), None);
        assert_eq!(ds.incurred.get(0, 0), Some(90.0));
        assert_eq!(ds.incurred.get(1, 0), Some(90.0));
        assert_eq!(ds.exposure.premiums(), &[500.0, 600.0]);
        assert_eq!(ds.company_name.as_deref(), Some("Test Co"));
        assert!(ds.actual.is_none());

        let raw = load_schedule_p_with(f.path(), LineOfBusiness::CA, "7", LoadOptions { net_bulk: false }).unwrap();
        assert_eq!(raw.incurred.get(0, 1), Some(120.0));
    }

    #[test]
    fn missing_company() {
        let f = fixture(THREE_ROWS);
        let err = load_schedule_p(f.path(), LineOfBusiness::CA, "8").unwrap_err();
        assert!(matches!(err, Error::MissingCompany { .. }));
    }

    #[test]
    fn malformed_row_reports_line() {
        let f = fixture("7,Test Co,1988,1988,1,abc,40,10,500\n");
        match load_schedule_p(f.path(), LineOfBusiness::CA, "7").unwrap_err() {
            Error::Malformed { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn missing_column() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(b"GRCODE,AccidentYear,DevelopmentLag\n1,1988,1\n").unwrap();
        assert!(matches!(
            load_schedule_p(f.path(), LineOfBusiness::CA, "1").unwrap_err(),
            Error::MissingColumn(_)
        ));
    }

    #[test]
    fn non_positive_premium() {
        let f = fixture("7,Test Co,1988,1988,1,100,40,10,0\n");
        assert!(load_schedule_p(f.path(), LineOfBusiness::CA, "7").unwrap_err().is_data_error());
    }

    #[test]
    fn one_bad_company_does_not_hide_the_rest() {
        let f = fixture("7,A,1988,1988,1,100,40,10,0\n8,B,1988,1988,1,100,40,10,50\n");
        let each = load_each(f.path(), LineOfBusiness::CA, LoadOptions::default()).unwrap();
        assert_eq!(each.len(), 2);
        assert!(each[0].1.is_err());
        assert_eq!(each[1].1.as_ref().unwrap().company_code, "8");
    }

    #[test]
    fn full_square_and_lob_filter() {
        let mut body = String::from("GRCODE,AccidentYear,DevelopmentLag,IncurLoss,CumPaidLoss,BulkLoss,EarnedPremNet,LOB\n");
        for lob in ["comauto", "wkcomp"] {
            for y in 0..3 {
                for lag in 1..=3 {
                    body.push_str(&format!("5,{},{lag},{},{},0,100,{lob}\n", 2000 + y, 10 * lag, 5 * lag));
                }
            }
        }
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        let ds = load_schedule_p(f.path(), LineOfBusiness::WC, "5").unwrap();
        assert_eq!(ds.origins(), 3);
        let actual = ds.actual.as_ref().unwrap();
        assert_eq!(actual.paid[2 * 3 + 2], 15.0);
        assert_eq!(ds.actual_ultimate(LossKind::Paid), Some(45.0));
        assert_eq!(list_companies(f.path(), LineOfBusiness::CA).unwrap(), vec!["5"]);
        assert!(list_companies(f.path(), LineOfBusiness::OL).unwrap().is_empty());
    }

    #[test]
    fn deterministic() {
        let f = fixture(THREE_ROWS);
        let a = load_schedule_p(f.path(), LineOfBusiness::CA, "7").unwrap();
        let b = load_schedule_p(f.path(), LineOfBusiness::CA, "7").unwrap();
        assert_eq!(a, b);
    }
}
