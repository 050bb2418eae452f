use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::triangle::{Basis, LossKind, Triangle};

/// A full `I x I` cumulative square: observed cells from the triangle and
/// model-predicted cells below the last diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletedSquare {
    n: usize,
    kind: LossKind,
    values: Vec<f64>,
    observed: Vec<bool>,
}

impl CompletedSquare {
    /// Starts a square from an observed cumulative triangle; unobserved cells
    /// hold zero until filled.
    pub fn from_observed(t: &Triangle) -> Result<Self> {
        t.require_cumulative()?;
        Ok(Self {
            n: t.origins(),
            kind: t.kind(),
            values: t.values().to_vec(),
            observed: t.mask().to_vec(),
        })
    }

    pub fn from_parts(n: usize, kind: LossKind, values: Vec<f64>, observed: Vec<bool>) -> Result<Self> {
        if values.len() != n * n || observed.len() != n * n {
            return Err(Error::shape("square values/mask do not match size"));
        }
        Ok(Self {
            n,
            kind,
            values,
            observed,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn observed_mask(&self) -> &[bool] {
        &self.observed
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(!self.observed[i * self.n + j]);
        self.values[i * self.n + j] = v;
    }

    pub fn is_observed(&self, i: usize, j: usize) -> bool {
        self.observed[i * self.n + j]
    }

    /// The observed part as an as-reported cumulative triangle.
    pub fn observed_triangle(&self) -> Result<Triangle> {
        Triangle::from_square(
            self.n,
            self.values.clone(),
            self.observed.clone(),
            Basis::Cumulative,
            self.kind,
        )
    }

    /// Per-origin value at the last development year.
    pub fn ultimates(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.value(i, self.n - 1)).collect()
    }

    /// Per-origin latest observed value.
    pub fn latest_observed(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let len = (0..self.n).take_while(|&j| self.is_observed(i, j)).count();
                if len == 0 {
                    0.0
                } else {
                    self.value(i, len - 1)
                }
            })
            .collect()
    }

    /// Per-origin reserve: ultimate minus latest observed value.
    pub fn reserves(&self) -> Vec<f64> {
        self.ultimates()
            .iter()
            .zip(self.latest_observed())
            .map(|(u, l)| u - l)
            .collect()
    }

    pub fn total_reserve(&self) -> f64 {
        self.reserves().iter().sum()
    }

    pub fn total_ultimate(&self) -> f64 {
        self.ultimates().iter().sum()
    }

    /// Cellwise mean of member squares.
    pub fn average(squares: &[CompletedSquare]) -> Result<CompletedSquare> {
        let first = squares
            .first()
            .ok_or_else(|| Error::invalid("cannot average an empty set of squares"))?;
        if squares
            .iter()
            .any(|s| s.n != first.n || s.kind != first.kind || s.observed != first.observed)
        {
            return Err(Error::shape("member squares differ in size, kind or observed region"));
        }
        let k = squares.len() as f64;
        let mut values = vec![0.0; first.n * first.n];
        for (idx, v) in values.iter_mut().enumerate() {
            if first.observed[idx] {
                *v = first.values[idx];
            } else {
                *v = squares.iter().map(|s| s.values[idx]).sum::<f64>() / k;
            }
        }
        Ok(CompletedSquare {
            n: first.n,
            kind: first.kind,
            values,
            observed: first.observed.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(lower: f64) -> CompletedSquare {
        let t = Triangle::from_rows(&[vec![1.0, 2.0], vec![3.0]], Basis::Cumulative, LossKind::Paid)
            .unwrap();
        let mut s = CompletedSquare::from_observed(&t).unwrap();
        s.set(1, 1, lower);
        s
    }

    #[test]
    fn average_of_identical_is_identity() {
        let s = square(7.0);
        assert_eq!(CompletedSquare::average(&[s.clone(), s.clone(), s.clone()]).unwrap(), s);
    }

    #[test]
    fn average_is_cellwise_mean_and_order_free() {
        let a = square(10.0);
        let b = square(20.0);
        let m = CompletedSquare::average(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(m.value(1, 1), 15.0);
        assert_eq!(m, CompletedSquare::average(&[b, a]).unwrap());
        assert_eq!(m.value(0, 1), 2.0);
    }

    #[test]
    fn average_rejects_mismatch() {
        let t = Triangle::from_rows(&[vec![1.0]], Basis::Cumulative, LossKind::Paid).unwrap();
        let one = CompletedSquare::from_observed(&t).unwrap();
        assert!(CompletedSquare::average(&[square(1.0), one]).is_err());
        assert!(CompletedSquare::average(&[]).is_err());
    }

    #[test]
    fn reserves_use_latest_observed() {
        let s = square(5.0);
        assert_eq!(s.reserves(), vec![0.0, 2.0]);
        assert_eq!(s.total_ultimate(), 7.0);
    }
}
