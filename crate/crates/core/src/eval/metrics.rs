use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One company's predicted and realised total ultimate, with the simulated
/// total ultimates of its reserve distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompanyOutcome {
    pub company_code: String,
    pub predicted_ultimate: f64,
    pub actual_ultimate: f64,
    pub simulated_ultimates: Vec<f64>,
}

impl CompanyOutcome {
    pub fn relative_error(&self) -> Result<f64> {
        if !(self.actual_ultimate > 0.0) {
            return Err(Error::invalid(format!(
                "company {}: actual ultimate {} must be positive",
                self.company_code, self.actual_ultimate
            )));
        }
        Ok((self.predicted_ultimate - self.actual_ultimate) / self.actual_ultimate)
    }

    pub fn sim_sd(&self) -> f64 {
        population_sd(&self.simulated_ultimates)
    }
}

fn relative_errors(outcomes: &[CompanyOutcome]) -> Result<Vec<f64>> {
    if outcomes.is_empty() {
        return Err(Error::invalid("no company outcomes"));
    }
    outcomes.iter().map(CompanyOutcome::relative_error).collect()
}

/// Root mean squared relative error of the total ultimate, in percent.
pub fn rmse_pct(outcomes: &[CompanyOutcome]) -> Result<f64> {
    let e = relative_errors(outcomes)?;
    Ok((e.iter().map(|x| x * x).sum::<f64>() / e.len() as f64).sqrt() * 100.0)
}

/// Mean absolute relative error of the total ultimate, in percent.
pub fn mae_pct(outcomes: &[CompanyOutcome]) -> Result<f64> {
    let e = relative_errors(outcomes)?;
    Ok(e.iter().map(|x| x.abs()).sum::<f64>() / e.len() as f64 * 100.0)
}

/// Empirical quantile with linear interpolation between order statistics
/// (position `(n - 1) * level` in the sorted sample).
pub fn quantile(samples: &[f64], level: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("quantile of an empty sample"));
    }
    if !(0.0..=1.0).contains(&level) {
        return Err(Error::invalid(format!("quantile level {level} outside [0, 1]")));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::numerical("NaN in sample"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = (sorted.len() - 1) as f64 * level;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// Value at risk of simulated total ultimates.
pub fn var_quantile(simulated_ultimates: &[f64], alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("VaR level {alpha} outside (0, 1)")));
    }
    quantile(simulated_ultimates, alpha)
}

/// Standard deviation with divisor `n`; zero for an empty sample.
pub fn population_sd(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt()
}

/// Population sd over mean of simulated ultimates.
pub fn coefficient_of_variation(simulated_ultimates: &[f64]) -> Result<f64> {
    if simulated_ultimates.is_empty() {
        return Err(Error::invalid("coefficient of variation of an empty sample"));
    }
    let mean = simulated_ultimates.iter().sum::<f64>() / simulated_ultimates.len() as f64;
    if mean == 0.0 {
        return Err(Error::numerical("coefficient of variation with zero mean"));
    }
    Ok(population_sd(simulated_ultimates) / mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn outcome(pred: f64, actual: f64) -> CompanyOutcome {
        CompanyOutcome {
            company_code: "1".into(),
            predicted_ultimate: pred,
            actual_ultimate: actual,
            simulated_ultimates: vec![pred],
        }
    }

    #[test]
    fn error_metrics() {
        assert_eq!(rmse_pct(&[outcome(5.0, 5.0)]).unwrap(), 0.0);
        assert_eq!(mae_pct(&[outcome(5.0, 5.0)]).unwrap(), 0.0);
        assert!((rmse_pct(&[outcome(110.0, 100.0)]).unwrap() - 10.0).abs() < 1e-12);
        let two = [outcome(110.0, 100.0), outcome(90.0, 100.0)];
        assert!((mae_pct(&two).unwrap() - 10.0).abs() < 1e-12);
        assert!(rmse_pct(&[]).is_err());
        assert!(mae_pct(&[outcome(1.0, 0.0)]).is_err());
    }

    #[test]
    fn quantile_examples() {
        let grid: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(var_quantile(&grid, 0.5).unwrap(), 500.5);
        assert_eq!(var_quantile(&[3.0; 10], 0.995).unwrap(), 3.0);
        assert!(var_quantile(&grid, 0.995).unwrap() >= var_quantile(&grid, 0.5).unwrap());
        assert!((var_quantile(&grid, 1.0 - 1e-12).unwrap() - 1000.0).abs() < 1e-6);
        assert!(var_quantile(&[], 0.5).is_err());
        assert!(var_quantile(&grid, 1.0).is_err());
        assert_eq!(quantile(&[4.0, 1.0, 2.0], 1.0).unwrap(), 4.0);
    }

    #[test]
    fn cv_examples() {
        assert_eq!(coefficient_of_variation(&[7.0; 4]).unwrap(), 0.0);
        assert!((coefficient_of_variation(&[90.0, 110.0]).unwrap() - 0.1).abs() < 1e-15);
        let a = coefficient_of_variation(&[1.0, 2.0, 6.0]).unwrap();
        let b = coefficient_of_variation(&[3.0, 6.0, 18.0]).unwrap();
        assert!((a - b).abs() < 1e-15);
        assert!(coefficient_of_variation(&[-1.0, 1.0]).is_err());
    }
}
