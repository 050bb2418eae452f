//! Noise-free constant-link-ratio company used by end-to-end checks.

use reserving::triangle::{Basis, CompanyDataSet, Exposure, LineOfBusiness, LossKind, Triangle};

pub const FACTORS: [f64; 9] = [1.8, 1.3, 1.15, 1.08, 1.04, 1.02, 1.01, 1.005, 1.002];
pub const CASE_RATIO: [f64; 10] = [1.6, 1.35, 1.2, 1.1, 1.05, 1.03, 1.015, 1.008, 1.003, 1.0];

/// Noise-free square with constant link ratios; premiums vary by origin.
pub fn synthetic() -> (CompanyDataSet, Vec<f64>) {
    let n = 10;
    let premiums: Vec<f64> = (0..n).map(|i| 1000.0 * (1.0 + 0.05 * i as f64)).collect();
    let mut paid = vec![0.0; n * n];
    for i in 0..n {
        paid[i * n] = 0.4 * premiums[i];
        for j in 1..n {
            paid[i * n + j] = paid[i * n + j - 1] * FACTORS[j - 1];
        }
    }
    let incurred: Vec<f64> = paid.iter().enumerate().map(|(k, v)| v * CASE_RATIO[k % n]).collect();
    let mask: Vec<bool> = (0..n * n).map(|k| k / n + k % n < n).collect();
    let data = CompanyDataSet::new(
        "synthetic",
        LineOfBusiness::CA,
        Triangle::from_square(n, paid.clone(), mask.clone(), Basis::Cumulative, LossKind::Paid).unwrap(),
        Triangle::from_square(n, incurred, mask, Basis::Cumulative, LossKind::Incurred).unwrap(),
        Exposure::new(premiums).unwrap(),
    )
    .unwrap();
    (data, paid)
}

/// True total reserve of the synthetic square.
pub fn true_reserve(paid: &[f64]) -> f64 {
    let n = 10;
    (0..n).map(|i| paid[i * n + n - 1] - paid[i * n + n - 1 - i]).sum()
}
