//! Mack-Net: an LSTM ensemble completes the loss triangle and Mack-style
//! parameters estimated on the averaged square drive the residual bootstrap.
//!
//! For development year `j` (1-based) of the averaged square `D`:
//!
//! ```text
//! fp_j   = sum D_ij / sum D_i,j-1        over predicted rows i = I-j+2..I
//! fbar_j = sum D_ij / sum D_i,j-1        over all rows
//! s2p_j  = 1/(I-j-1) sum_i D_i,j-1 (D_ij / D_i,j-1 - fbar_j)^2
//! ```

mod bootstrap;
mod complete;
mod ensemble;
pub(crate) mod features;
mod params;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bootstrap::{macknet_bootstrap, macknet_residuals};
pub use complete::{complete_joint, complete_square, Predictor};
pub use ensemble::{train_ensemble, EnsembleConfig, Member};
pub use features::{build_features, FeatureSample, FeatureSet, WINDOW};
pub use params::{macknet_parameters, FactorRows, MackNetParameters};

use crate::distribution::ReserveDistribution;
use crate::error::Result;
use crate::mack::BootstrapConfig;
use crate::square::CompletedSquare;
use crate::triangle::{CompanyDataSet, LossKind};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct MacknetConfig {
    pub ensemble: EnsembleConfig,
    pub bootstrap: BootstrapConfig,
    pub factor_rows: FactorRows,
}

/// Per-member training summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberDiagnostics {
    pub member: usize,
    pub seed: u64,
    pub attempts: usize,
    pub epochs_run: usize,
    pub best_epoch: usize,
    /// Eval-mode loss on the held-out last diagonal at the kept weights.
    pub best_test_mse: Option<f64>,
    pub final_train_mse: f64,
    pub train_loss: Vec<f64>,
    pub test_loss: Vec<f64>,
}

impl MemberDiagnostics {
    fn of(m: &Member) -> Self {
        let t = &m.trained;
        Self {
            member: m.index,
            seed: t.seed,
            attempts: m.attempts,
            epochs_run: t.epochs_run(),
            best_epoch: t.best_epoch,
            best_test_mse: t.best_validation_loss(),
            final_train_mse: t.train_loss.last().copied().unwrap_or(f64::NAN),
            train_loss: t.train_loss.clone(),
            test_loss: t.validation_loss.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleDiagnostics {
    pub kind: LossKind,
    pub n_train: usize,
    pub n_test: usize,
    pub members: Vec<MemberDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacknetFit {
    pub parameters: MackNetParameters,
    pub distribution: ReserveDistribution,
    /// Cellwise mean of the member squares.
    pub dbar: CompletedSquare,
    pub diagnostics: EnsembleDiagnostics,
}

struct TrainedEnsemble {
    members: Vec<Member>,
    diagnostics: EnsembleDiagnostics,
}

/// Averaged square of a trained ensemble with its training diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSquare {
    pub dbar: CompletedSquare,
    pub diagnostics: EnsembleDiagnostics,
}

fn fit_ensemble(data: &CompanyDataSet, kind: LossKind, cfg: &EnsembleConfig) -> Result<TrainedEnsemble> {
    let features = build_features(data, kind)?;
    let train = features.train_samples();
    let test = features.test_samples();
    let members = train_ensemble(&train, &test, cfg)?;
    let diagnostics = EnsembleDiagnostics {
        kind,
        n_train: train.len(),
        n_test: test.len(),
        members: members.iter().map(MemberDiagnostics::of).collect(),
    };
    Ok(TrainedEnsemble { members, diagnostics })
}

/// Holds out the last diagonal, trains the ensemble on the rest and
/// averages the member completions. The other kind is completed by chain
/// ladder.
pub fn complete_ensemble(data: &CompanyDataSet, kind: LossKind, cfg: &EnsembleConfig) -> Result<EnsembleSquare> {
    let ens = fit_ensemble(data, kind, cfg)?;
    let squares = ens
        .members
        .par_iter()
        .map(|m| complete_square(&m.trained.network, data, kind))
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleSquare {
        dbar: CompletedSquare::average(&squares)?,
        diagnostics: ens.diagnostics,
    })
}

/// Trains paid and incurred ensembles and completes member `k` of each
/// jointly, so future paid-to-incurred ratios come from both networks.
pub fn complete_ensemble_joint(data: &CompanyDataSet, cfg: &EnsembleConfig) -> Result<(EnsembleSquare, EnsembleSquare)> {
    let paid = fit_ensemble(data, LossKind::Paid, cfg)?;
    let incurred = fit_ensemble(data, LossKind::Incurred, cfg)?;
    let pairs = paid
        .members
        .par_iter()
        .zip(&incurred.members)
        .map(|(p, i)| complete_joint(&p.trained.network, &i.trained.network, data))
        .collect::<Result<Vec<_>>>()?;
    let (ps, is): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok((
        EnsembleSquare {
            dbar: CompletedSquare::average(&ps)?,
            diagnostics: paid.diagnostics,
        },
        EnsembleSquare {
            dbar: CompletedSquare::average(&is)?,
            diagnostics: incurred.diagnostics,
        },
    ))
}

/// Parameters and bootstrap on an averaged square.
pub fn finish_macknet(square: EnsembleSquare, cfg: &MacknetConfig) -> Result<MacknetFit> {
    let parameters = macknet_parameters(&square.dbar, cfg.factor_rows, cfg.bootstrap.sigma_divisor)?;
    let distribution = macknet_bootstrap(&square.dbar, &parameters, &cfg.bootstrap)?;
    Ok(MacknetFit {
        parameters,
        distribution,
        dbar: square.dbar,
        diagnostics: square.diagnostics,
    })
}

/// End-to-end fit for one kind: ensemble completion, parameters, bootstrap.
pub fn fit_macknet(data: &CompanyDataSet, kind: LossKind, cfg: &MacknetConfig) -> Result<MacknetFit> {
    finish_macknet(complete_ensemble(data, kind, &cfg.ensemble)?, cfg)
}

/// End-to-end fit of both kinds with joint completion.
pub fn fit_macknet_joint(data: &CompanyDataSet, cfg: &MacknetConfig) -> Result<(MacknetFit, MacknetFit)> {
    let (p, i) = complete_ensemble_joint(data, &cfg.ensemble)?;
    Ok((finish_macknet(p, cfg)?, finish_macknet(i, cfg)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mack::{chain_ladder_project, dev_factors};
    use crate::triangle::{Basis, Triangle};

    fn noisy_square(n: usize) -> CompletedSquare {
        let t = Triangle::from_rows(
            &(0..n)
                .map(|i| {
                    let mut v = 500.0 + 37.0 * i as f64;
                    (0..n - i)
                        .map(|j| {
                            if j > 0 {
                                v *= 1.0 + 0.6 / j as f64 + (((i * 5 + j * 3) % 7) as f64 - 3.0) / 60.0;
                            }
                            v
                        })
                        .collect()
                })
                .collect::<Vec<_>>(),
            Basis::Cumulative,
            LossKind::Paid,
        )
        .unwrap();
        // Perturb a chain-ladder completion so predicted ratios vary by row.
        let cl = chain_ladder_project(&t, &dev_factors(&t).unwrap()).unwrap();
        let mut values = cl.values().to_vec();
        for i in 0..n {
            for j in 0..n {
                if i + j >= n {
                    values[i * n + j] *= 1.0 + 0.01 * ((i + 2 * j) % 5) as f64;
                }
            }
        }
        CompletedSquare::from_parts(n, LossKind::Paid, values, cl.observed_mask().to_vec()).unwrap()
    }

    #[test]
    fn projection_with_predicted_factors_reproduces_square_total() {
        let dbar = noisy_square(8);
        let p = macknet_parameters(&dbar, FactorRows::Predicted, Default::default()).unwrap();
        let t = dbar.observed_triangle().unwrap();
        let proj = chain_ladder_project(&t, &p.dev_factors_p).unwrap();
        let rel = (proj.total_ultimate() - dbar.total_ultimate()).abs() / dbar.total_ultimate();
        assert!(rel < 1e-12, "{rel}");
    }

    #[test]
    fn zero_variance_gives_the_ensemble_reserve() {
        let dbar = noisy_square(6);
        let mut p = macknet_parameters(&dbar, FactorRows::Predicted, Default::default()).unwrap();
        p.sigma2_p.iter_mut().for_each(|s| *s = 0.0);
        let cfg = BootstrapConfig {
            n_sims: 50,
            ..Default::default()
        };
        let d = macknet_bootstrap(&dbar, &p, &cfg).unwrap();
        for r in &d.total_reserves {
            assert!((r - dbar.total_reserve()).abs() < 1e-9 * dbar.total_reserve().abs());
        }
    }

    #[test]
    fn residual_pool_is_centred() {
        let dbar = noisy_square(8);
        let p = macknet_parameters(&dbar, FactorRows::Predicted, Default::default()).unwrap();
        let r = macknet_residuals(&dbar, &p, &BootstrapConfig::default()).unwrap();
        assert!(r.mean().abs() < 1e-12);
        // Every (i, j) with j >= 2 of the square contributes.
        assert_eq!(r.len(), 8 * 7);
    }

    #[test]
    fn bootstrap_mean_matches_central_scenario() {
        let dbar = noisy_square(8);
        let p = macknet_parameters(&dbar, FactorRows::Predicted, Default::default()).unwrap();
        let cfg = BootstrapConfig {
            seed: 3,
            ..Default::default()
        };
        let d = macknet_bootstrap(&dbar, &p, &cfg).unwrap();
        let rel = (d.mean_total_reserve() - dbar.total_reserve()).abs() / dbar.total_reserve();
        assert!(rel < 0.005, "{rel}");
        assert_eq!(d, macknet_bootstrap(&dbar, &p, &cfg).unwrap());
    }
}
