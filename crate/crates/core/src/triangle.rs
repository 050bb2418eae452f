//! Run-off triangles, exposures and company data sets.
//!
//! Origins and development periods are documented 1-based (origin `i`,
//! development year `j`, observed when `i + j <= I + 1`), but every method
//! takes 0-based indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Cumulative,
    Incremental,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Paid,
    Incurred,
}

impl LossKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LossKind::Paid => "paid",
            LossKind::Incurred => "incurred",
        }
    }

    pub fn other(self) -> LossKind {
        match self {
            LossKind::Paid => LossKind::Incurred,
            LossKind::Incurred => LossKind::Paid,
        }
    }
}

impl std::fmt::Display for LossKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "paid" => Ok(LossKind::Paid),
            "incurred" => Ok(LossKind::Incurred),
            other => Err(Error::invalid(format!("unknown loss kind `{other}`"))),
        }
    }
}

/// Schedule P lines of business covered by the company selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LineOfBusiness {
    CA,
    PA,
    WC,
    OL,
}

impl LineOfBusiness {
    pub const ALL: [LineOfBusiness; 4] = [Self::CA, Self::PA, Self::WC, Self::OL];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::CA => "CA",
            Self::PA => "PA",
            Self::WC => "WC",
            Self::OL => "OL",
        }
    }

    /// Value of the `LOB` column in the combined CAS database.
    pub fn database_name(self) -> &'static str {
        match self {
            Self::CA => "comauto",
            Self::PA => "ppauto",
            Self::WC => "wkcomp",
            Self::OL => "othliab",
        }
    }
}

impl std::fmt::Display for LineOfBusiness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for LineOfBusiness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.to_ascii_uppercase();
        Self::ALL
            .into_iter()
            .find(|l| l.as_str() == upper || l.database_name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::invalid(format!("unknown line of business `{s}`")))
    }
}

/// A square matrix of claim amounts with an observed-cell mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    origin_years: Vec<i32>,
    values: Vec<f64>,
    mask: Vec<bool>,
    basis: Basis,
    kind: LossKind,
}

impl Triangle {
    /// Builds a triangle from ragged rows; row `i` holds its observed cells
    /// starting at development year 1.
    pub fn from_rows(rows: &[Vec<f64>], basis: Basis, kind: LossKind) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("triangle needs at least one origin"));
        }
        let mut values = vec![0.0; n * n];
        let mut mask = vec![false; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() > n {
                return Err(Error::shape(format!(
                    "row {} has {} cells but the triangle has {} development years",
                    i + 1,
                    row.len(),
                    n
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::invalid(format!("cell ({}, {}) is not finite", i + 1, j + 1)));
                }
                values[i * n + j] = v;
                mask[i * n + j] = true;
            }
        }
        Ok(Self {
            origin_years: (1..=n as i32).collect(),
            values,
            mask,
            basis,
            kind,
        })
    }

    /// Builds a triangle from a full row-major square and its mask.
    pub fn from_square(
        n: usize,
        values: Vec<f64>,
        mask: Vec<bool>,
        basis: Basis,
        kind: LossKind,
    ) -> Result<Self> {
        if n == 0 || values.len() != n * n || mask.len() != n * n {
            return Err(Error::shape(format!(
                "expected {} values and mask entries, got {} and {}",
                n * n,
                values.len(),
                mask.len()
            )));
        }
        if let Some(pos) = values.iter().zip(&mask).position(|(v, &m)| m && !v.is_finite()) {
            return Err(Error::invalid(format!(
                "cell ({}, {}) is not finite",
                pos / n + 1,
                pos % n + 1
            )));
        }
        let values = values
            .into_iter()
            .zip(&mask)
            .map(|(v, &m)| if m { v } else { 0.0 })
            .collect();
        Ok(Self {
            origin_years: (1..=n as i32).collect(),
            values,
            mask,
            basis,
            kind,
        })
    }

    pub fn with_origin_years(mut self, years: Vec<i32>) -> Result<Self> {
        if years.len() != self.origins() {
            return Err(Error::shape("origin year count differs from triangle size"));
        }
        self.origin_years = years;
        Ok(self)
    }

    pub fn origins(&self) -> usize {
        self.origin_years.len()
    }

    pub fn devs(&self) -> usize {
        self.origins()
    }

    pub fn origin_years(&self) -> &[i32] {
        &self.origin_years
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Raw cell value; unobserved cells read as zero.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.devs() + j]
    }

    pub fn is_observed(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.devs() + j]
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        (i < self.origins() && j < self.devs() && self.is_observed(i, j)).then(|| self.value(i, j))
    }

    /// Number of leading observed cells in row `i`.
    pub fn observed_len(&self, i: usize) -> usize {
        (0..self.devs()).take_while(|&j| self.is_observed(i, j)).count()
    }

    /// True when the mask is exactly `{(i, j): i + j <= I + 1}`.
    pub fn is_as_reported(&self) -> bool {
        let n = self.origins();
        (0..n).all(|i| (0..n).all(|j| self.is_observed(i, j) == (i + j < n)))
    }

    pub(crate) fn require_as_reported(&self) -> Result<()> {
        if self.is_as_reported() {
            Ok(())
        } else {
            Err(Error::shape("triangle mask is not the as-reported upper triangle"))
        }
    }

    pub(crate) fn require_cumulative(&self) -> Result<()> {
        if self.basis == Basis::Cumulative {
            Ok(())
        } else {
            Err(Error::invalid("expected a cumulative triangle"))
        }
    }

    /// Latest observed value per origin (the last diagonal for as-reported data).
    pub fn latest_diagonal(&self) -> Vec<f64> {
        (0..self.origins())
            .map(|i| match self.observed_len(i) {
                0 => 0.0,
                len => self.value(i, len - 1),
            })
            .collect()
    }

    pub fn incremental_to_cumulative(&self) -> Result<Triangle> {
        if self.basis != Basis::Incremental {
            return Err(Error::invalid("incremental_to_cumulative needs an incremental triangle"));
        }
        let n = self.devs();
        let mut out = self.clone();
        for i in 0..self.origins() {
            let mut acc = 0.0;
            for j in 0..n {
                if self.is_observed(i, j) {
                    acc += self.value(i, j);
                    out.values[i * n + j] = acc;
                }
            }
        }
        out.basis = Basis::Cumulative;
        Ok(out)
    }

    pub fn cumulative_to_incremental(&self) -> Result<Triangle> {
        if self.basis != Basis::Cumulative {
            return Err(Error::invalid("cumulative_to_incremental needs a cumulative triangle"));
        }
        let n = self.devs();
        let mut out = self.clone();
        for i in 0..self.origins() {
            let mut prev = 0.0;
            for j in 0..n {
                if self.is_observed(i, j) {
                    let v = self.value(i, j);
                    out.values[i * n + j] = v - prev;
                    prev = v;
                }
            }
        }
        out.basis = Basis::Incremental;
        Ok(out)
    }

    /// Divides every cell of origin `i` by its premium.
    pub fn scale_by_exposure(&self, exposure: &Exposure) -> Result<Triangle> {
        exposure.validate()?;
        if exposure.len() != self.origins() {
            return Err(Error::shape(format!(
                "{} premiums for {} origins",
                exposure.len(),
                self.origins()
            )));
        }
        let n = self.devs();
        let mut out = self.clone();
        for (i, p) in exposure.premiums().iter().enumerate() {
            for v in &mut out.values[i * n..(i + 1) * n] {
                *v /= p;
            }
        }
        Ok(out)
    }

    /// Removes the last observed diagonal for use as a test set.
    ///
    /// The newest origin keeps its single cell: it has no lagged history, so
    /// there is nothing to predict there. With `I` origins this returns
    /// `I - 1` test cells.
    pub fn split_last_diagonal(&self) -> Result<(Triangle, Vec<DiagonalCell>)> {
        self.require_as_reported()?;
        let n = self.origins();
        if n < 3 {
            return Err(Error::invalid(format!("triangle with {n} origins is too small to split")));
        }
        let mut train = self.clone();
        let mut test = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let j = n - 1 - i;
            train.mask[i * n + j] = false;
            train.values[i * n + j] = 0.0;
            test.push(DiagonalCell {
                origin: i,
                dev: j,
                value: self.value(i, j),
            });
        }
        Ok((train, test))
    }

    /// Puts previously split cells back; inverse of [`split_last_diagonal`].
    ///
    /// [`split_last_diagonal`]: Triangle::split_last_diagonal
    pub fn restore_cells(&self, cells: &[DiagonalCell]) -> Result<Triangle> {
        let n = self.devs();
        let mut out = self.clone();
        for c in cells {
            if c.origin >= n || c.dev >= n {
                return Err(Error::shape("cell outside triangle"));
            }
            out.mask[c.origin * n + c.dev] = true;
            out.values[c.origin * n + c.dev] = c.value;
        }
        Ok(out)
    }

    /// Keeps the most recent `size` origins and first `size` development
    /// years, re-masked as reported at the latest evaluation date.
    pub fn truncate_recent(&self, size: usize) -> Result<Triangle> {
        self.require_as_reported()?;
        let n = self.origins();
        if size == 0 || size > n {
            return Err(Error::invalid(format!("cannot truncate {n} origins to {size}")));
        }
        let offset = n - size;
        let mut values = vec![0.0; size * size];
        let mut mask = vec![false; size * size];
        for i in 0..size {
            for j in 0..size {
                if i + j < size {
                    values[i * size + j] = self.value(offset + i, j);
                    mask[i * size + j] = true;
                }
            }
        }
        Triangle::from_square(size, values, mask, self.basis, self.kind)?
            .with_origin_years(self.origin_years[offset..].to_vec())
    }

    pub fn to_json(&self) -> TriangleJson {
        TriangleJson {
            origin_years: self.origin_years.clone(),
            dev_lags: (1..=self.devs() as u32).collect(),
            basis: self.basis,
            kind: self.kind,
            values: self
                .values
                .iter()
                .zip(&self.mask)
                .map(|(&v, &m)| m.then_some(v))
                .collect(),
            mask: self.mask.clone(),
        }
    }

    pub fn from_json(json: &TriangleJson) -> Result<Triangle> {
        let n = json.origin_years.len();
        let values = json.values.iter().map(|v| v.unwrap_or(0.0)).collect();
        Triangle::from_square(n, values, json.mask.clone(), json.basis, json.kind)?
            .with_origin_years(json.origin_years.clone())
    }

    /// Long-format CSV: `origin,dev,value` for observed cells.
    pub fn write_long_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["origin", "dev", "value"])?;
        let n = self.devs();
        for i in 0..self.origins() {
            for j in 0..n {
                if self.is_observed(i, j) {
                    w.write_record([
                        self.origin_years[i].to_string(),
                        (j + 1).to_string(),
                        self.value(i, j).to_string(),
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// One cell of a removed diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalCell {
    pub origin: usize,
    pub dev: usize,
    pub value: f64,
}

/// Canonical triangle JSON: values row-major with `null` for unobserved cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleJson {
    pub origin_years: Vec<i32>,
    pub dev_lags: Vec<u32>,
    pub basis: Basis,
    pub kind: LossKind,
    pub values: Vec<Option<f64>>,
    pub mask: Vec<bool>,
}

/// Earned premium per origin year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exposure {
    premiums: Vec<f64>,
}

impl Exposure {
    pub fn new(premiums: Vec<f64>) -> Result<Self> {
        let e = Self { premiums };
        e.validate()?;
        Ok(e)
    }

    fn validate(&self) -> Result<()> {
        match self.premiums.iter().position(|&p| !(p > 0.0 && p.is_finite())) {
            Some(i) => Err(Error::Data(format!(
                "premium for origin {} is {}; premiums must be positive",
                i + 1,
                self.premiums[i]
            ))),
            None => Ok(()),
        }
    }

    pub fn premiums(&self) -> &[f64] {
        &self.premiums
    }

    pub fn len(&self) -> usize {
        self.premiums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.premiums.is_empty()
    }
}

/// Fully developed squares, when the source holds the realised lower triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActualSquares {
    pub paid: Vec<f64>,
    pub incurred: Vec<f64>,
}

/// Paid and incurred triangles with premiums for one company.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompanyDataSet {
    pub company_code: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub company_name: Option<String>,
    pub line_of_business: LineOfBusiness,
    pub paid: Triangle,
    pub incurred: Triangle,
    pub exposure: Exposure,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actual: Option<ActualSquares>,
}

impl CompanyDataSet {
    pub fn new(
        company_code: impl Into<String>,
        line_of_business: LineOfBusiness,
        paid: Triangle,
        incurred: Triangle,
        exposure: Exposure,
    ) -> Result<Self> {
        let ds = Self {
            company_code: company_code.into(),
            company_name: None,
            line_of_business,
            paid,
            incurred,
            exposure,
            actual: None,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.paid.origins() != self.incurred.origins()
            || self.paid.origin_years() != self.incurred.origin_years()
            || self.paid.mask() != self.incurred.mask()
        {
            return Err(Error::shape("paid and incurred triangles differ in shape"));
        }
        if self.exposure.len() != self.paid.origins() {
            return Err(Error::shape("premium vector length differs from origin count"));
        }
        if self.paid.kind() != LossKind::Paid || self.incurred.kind() != LossKind::Incurred {
            return Err(Error::invalid("paid/incurred triangles carry the wrong kind"));
        }
        self.exposure.validate()?;
        if let Some(a) = &self.actual {
            let n = self.paid.origins();
            if a.paid.len() != n * n || a.incurred.len() != n * n {
                return Err(Error::shape("actual squares do not match triangle size"));
            }
        }
        Ok(())
    }

    pub fn triangle(&self, kind: LossKind) -> &Triangle {
        match kind {
            LossKind::Paid => &self.paid,
            LossKind::Incurred => &self.incurred,
        }
    }

    pub fn origins(&self) -> usize {
        self.paid.origins()
    }

    /// Realised ultimate summed over origins (last development column).
    pub fn actual_ultimate(&self, kind: LossKind) -> Option<f64> {
        let a = self.actual.as_ref()?;
        let n = self.origins();
        let sq = match kind {
            LossKind::Paid => &a.paid,
            LossKind::Incurred => &a.incurred,
        };
        Some((0..n).map(|i| sq[i * n + n - 1]).sum())
    }

    /// Sub-data-set of the most recent `size` origins.
    pub fn truncate_recent(&self, size: usize) -> Result<CompanyDataSet> {
        let n = self.origins();
        let paid = self.paid.truncate_recent(size)?;
        let incurred = self.incurred.truncate_recent(size)?;
        let offset = n - size;
        let exposure = Exposure::new(self.exposure.premiums()[offset..].to_vec())?;
        let actual = self.actual.as_ref().map(|a| {
            let cut = |sq: &[f64]| {
                let mut out = Vec::with_capacity(size * size);
                for i in 0..size {
                    for j in 0..size {
                        out.push(sq[(offset + i) * n + j]);
                    }
                }
                out
            };
            ActualSquares {
                paid: cut(&a.paid),
                incurred: cut(&a.incurred),
            }
        });
        Ok(CompanyDataSet {
            company_code: self.company_code.clone(),
            company_name: self.company_name.clone(),
            line_of_business: self.line_of_business,
            paid,
            incurred,
            exposure,
            actual,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inc(rows: &[Vec<f64>]) -> Triangle {
        Triangle::from_rows(rows, Basis::Incremental, LossKind::Paid).unwrap()
    }

    fn cum(rows: &[Vec<f64>]) -> Triangle {
        Triangle::from_rows(rows, Basis::Cumulative, LossKind::Paid).unwrap()
    }

    #[test]
    fn prefix_sums() {
        let t = inc(&[vec![10.0, 5.0, 3.0], vec![10.0, -2.0], vec![10.0]]);
        let c = t.incremental_to_cumulative().unwrap();
        assert_eq!(c.basis(), Basis::Cumulative);
        assert_eq!(
            [c.value(0, 0), c.value(0, 1), c.value(0, 2)],
            [10.0, 15.0, 18.0]
        );
        assert_eq!([c.value(1, 0), c.value(1, 1)], [10.0, 8.0]);
        assert_eq!(c.value(2, 0), 10.0);
        assert_eq!(c.mask(), t.mask());

        let t = inc(&[vec![10.0, -2.0, 4.0], vec![1.0], vec![]]);
        let c = t.incremental_to_cumulative().unwrap();
        assert_eq!([c.value(0, 0), c.value(0, 1), c.value(0, 2)], [10.0, 8.0, 12.0]);
    }

    #[test]
    fn differencing() {
        let t = cum(&[vec![10.0, 15.0, 18.0], vec![10.0, 8.0, 12.0], vec![7.0]]);
        let d = t.cumulative_to_incremental().unwrap();
        assert_eq!([d.value(0, 0), d.value(0, 1), d.value(0, 2)], [10.0, 5.0, 3.0]);
        assert_eq!([d.value(1, 0), d.value(1, 1), d.value(1, 2)], [10.0, -2.0, 4.0]);
        assert_eq!(d.value(2, 0), 7.0);
    }

    #[test]
    fn basis_mismatch_is_rejected() {
        let t = cum(&[vec![1.0]]);
        assert!(t.incremental_to_cumulative().is_err());
        assert!(inc(&[vec![1.0]]).cumulative_to_incremental().is_err());
    }

    #[test]
    fn exposure_scaling() {
        let t = cum(&[vec![10.0, 5.0], vec![50.0]]);
        let s = t.scale_by_exposure(&Exposure::new(vec![200.0, 100.0]).unwrap()).unwrap();
        assert_eq!([s.value(0, 0), s.value(0, 1)], [0.05, 0.025]);
        assert_eq!(s.value(1, 0), 0.5);
        let unit = t.scale_by_exposure(&Exposure::new(vec![1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(unit, t);
    }

    #[test]
    fn exposure_errors() {
        assert!(Exposure::new(vec![1.0, 0.0]).is_err());
        assert!(Exposure::new(vec![-3.0]).is_err());
        let t = cum(&[vec![1.0, 2.0], vec![1.0]]);
        let e = Exposure::new(vec![1.0]).unwrap();
        assert!(matches!(t.scale_by_exposure(&e), Err(Error::Shape(_))));
    }

    fn as_reported(n: usize) -> Triangle {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n - i).map(|j| (10 * i + j + 1) as f64).collect())
            .collect();
        cum(&rows)
    }

    #[test]
    fn split_sizes() {
        let (train, test) = as_reported(10).split_last_diagonal().unwrap();
        assert_eq!(test.len(), 9);
        assert_eq!(train.observed_len(0), 9);
        assert!(train.is_observed(9, 0));
        let (_, test) = as_reported(3).split_last_diagonal().unwrap();
        assert_eq!(test.len(), 2);
        assert!(as_reported(2).split_last_diagonal().is_err());
    }

    #[test]
    fn split_then_restore_is_identity() {
        let t = as_reported(6);
        let (train, test) = t.split_last_diagonal().unwrap();
        assert_eq!(train.restore_cells(&test).unwrap(), t);
        for c in &test {
            assert!(!train.is_observed(c.origin, c.dev));
        }
    }

    #[test]
    fn truncation_keeps_recent_origins() {
        let t = as_reported(5).with_origin_years(vec![1993, 1994, 1995, 1996, 1997]).unwrap();
        let s = t.truncate_recent(3).unwrap();
        assert_eq!(s.origin_years(), &[1995, 1996, 1997]);
        assert!(s.is_as_reported());
        assert_eq!(s.value(0, 0), t.value(2, 0));
        assert_eq!(s.value(0, 2), t.value(2, 2));
    }

    #[test]
    fn json_round_trip() {
        let t = as_reported(4);
        let back = Triangle::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert_eq!(t.to_json().values[3], Some(4.0));
        assert_eq!(t.to_json().values[15], None);
    }

    proptest! {
        #[test]
        fn conversions_round_trip(rows in proptest::collection::vec(
            proptest::collection::vec(-1_000_000i64..1_000_000, 0..6), 1..6)) {
            // Schedule P amounts are whole numbers, for which the round trip is exact.
            let n = rows.len();
            let rows: Vec<Vec<f64>> = rows
                .into_iter()
                .map(|r| r.into_iter().take(n).map(|v| v as f64).collect())
                .collect();
            let t = Triangle::from_rows(&rows, Basis::Incremental, LossKind::Incurred).unwrap();
            let back = t.incremental_to_cumulative().unwrap().cumulative_to_incremental().unwrap();
            prop_assert_eq!(back, t);
        }

        #[test]
        fn scaling_is_linear(c in 0.01f64..100.0, v in proptest::collection::vec(0.0f64..1e5, 3)) {
            let t = cum(&[vec![v[0], v[1]], vec![v[2]]]);
            let tc = Triangle::from_rows(&[vec![c * v[0], c * v[1]], vec![c * v[2]]],
                Basis::Cumulative, LossKind::Paid).unwrap();
            let e = Exposure::new(vec![3.0, 7.0]).unwrap();
            let a = t.scale_by_exposure(&e).unwrap();
            let b = tc.scale_by_exposure(&e).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((c * x - y).abs() <= 1e-12 * (1.0 + y.abs()));
            }
        }

        #[test]
        fn split_partitions_mask(n in 3usize..12) {
            let t = as_reported(n);
            let (train, test) = t.split_last_diagonal().unwrap();
            let mut count = train.mask().iter().filter(|&&m| m).count();
            for c in &test {
                prop_assert!(!train.is_observed(c.origin, c.dev));
                prop_assert!(t.is_observed(c.origin, c.dev));
                count += 1;
            }
            prop_assert_eq!(count, t.mask().iter().filter(|&&m| m).count());
        }
    }
}
