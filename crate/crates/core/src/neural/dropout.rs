use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Train,
    Eval,
}

pub(crate) fn check_rate(theta: f64) -> Result<()> {
    if (0.0..1.0).contains(&theta) {
        Ok(())
    } else {
        Err(Error::invalid(format!("dropout rate {theta} outside [0, 1)")))
    }
}

/// Multiplicative inverted-dropout mask: `0` with probability `theta`,
/// otherwise `1 / (1 - theta)`.
pub(crate) fn sample_mask<R: Rng + ?Sized>(len: usize, theta: f64, rng: &mut R) -> Vec<f64> {
    if theta == 0.0 {
        return vec![1.0; len];
    }
    let keep = 1.0 / (1.0 - theta);
    (0..len)
        .map(|_| if rng.random::<f64>() < theta { 0.0 } else { keep })
        .collect()
}

/// Inverted dropout; identity in eval mode.
pub fn dropout<R: Rng + ?Sized>(x: &[f64], theta: f64, rng: &mut R, mode: Mode) -> Result<Vec<f64>> {
    check_rate(theta)?;
    match mode {
        Mode::Eval => Ok(x.to_vec()),
        Mode::Train => Ok(x
            .iter()
            .zip(sample_mask(x.len(), theta, rng))
            .map(|(v, m)| v * m)
            .collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Domain};

    #[test]
    fn zero_rate_and_eval_are_identity() {
        let x = vec![1.0, -2.0, 3.5];
        let mut rng = substream(0, Domain::Dropout, 0);
        assert_eq!(dropout(&x, 0.0, &mut rng, Mode::Train).unwrap(), x);
        assert_eq!(dropout(&x, 0.0, &mut rng, Mode::Eval).unwrap(), x);
        assert_eq!(dropout(&x, 0.5, &mut rng, Mode::Eval).unwrap(), x);
    }

    #[test]
    fn rate_out_of_range() {
        let mut rng = substream(0, Domain::Dropout, 0);
        assert!(dropout(&[1.0], 1.0, &mut rng, Mode::Train).is_err());
        assert!(dropout(&[1.0], -0.1, &mut rng, Mode::Eval).is_err());
    }

    #[test]
    fn zeroed_fraction_and_expectation() {
        let n = 1_000_000;
        let x = vec![1.0; n];
        let mut rng = substream(8, Domain::Dropout, 0);
        let y = dropout(&x, 0.05, &mut rng, Mode::Train).unwrap();
        let zeroed = y.iter().filter(|&&v| v == 0.0).count() as f64 / n as f64;
        assert!((zeroed - 0.05).abs() < 0.001, "zeroed {zeroed}");
        let mean = y.iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.005, "mean {mean}");
    }
}
