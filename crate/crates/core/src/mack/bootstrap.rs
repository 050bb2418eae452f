use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::{ModelKind, ReserveDistribution};
use crate::error::{Error, Result};
use crate::mack::{chain_ladder_project, estimate, residuals, SigmaDivisor};
use crate::rng::{substream, Domain};
use crate::triangle::{Basis, Triangle};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapConfig {
    pub n_sims: usize,
    pub seed: u64,
    pub zero_mean: bool,
    pub bias_adjust: bool,
    pub process_variance: bool,
    pub sigma_divisor: SigmaDivisor,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            n_sims: 10_000,
            seed: 0,
            zero_mean: true,
            bias_adjust: true,
            process_variance: true,
            sigma_divisor: SigmaDivisor::AsPublished,
        }
    }
}

/// Everything the resampling loop needs, independent of which model
/// produced the parameters.
pub(crate) struct SimulationInputs<'a> {
    /// Observed as-reported cumulative triangle.
    pub observed: &'a Triangle,
    /// Link-ratio centres per development column.
    pub centres: &'a [f64],
    /// Square roots of the variance parameters.
    pub sigma: &'a [f64],
    pub pool: &'a [f64],
    pub model: ModelKind,
    pub deterministic_mean: f64,
    pub deterministic_ultimates: Vec<f64>,
}

struct SimOutcome {
    ultimates: Vec<f64>,
    negative: u64,
}

/// Runs the bootstrap: resample residuals onto the upper triangle,
/// re-estimate volume-weighted factors, project forward and add process
/// noise. Simulation `b` draws only from streams indexed by `b`.
pub(crate) fn simulate(inputs: &SimulationInputs<'_>, cfg: &BootstrapConfig) -> Result<ReserveDistribution> {
    if cfg.n_sims == 0 {
        return Err(Error::invalid("number of simulations must be positive"));
    }
    let t = inputs.observed;
    let n = t.origins();
    if inputs.centres.len() + 1 != n || inputs.sigma.len() + 1 != n {
        return Err(Error::shape("parameter vectors do not match triangle size"));
    }
    let latest = t.latest_diagonal();
    let pool = inputs.pool;
    let needs_pool = inputs.sigma.iter().any(|&s| s > 0.0);
    if needs_pool && pool.is_empty() {
        return Err(Error::numerical("empty residual pool with nonzero variance"));
    }

    let run = |b: usize| -> SimOutcome {
        let mut ratio_rng = substream(cfg.seed, Domain::LinkRatioResample, b as u64);
        let mut noise_rng = substream(cfg.seed, Domain::ProcessVariance, b as u64);
        let draw = |rng: &mut crate::rng::StreamRng| pool[rng.random_range(0..pool.len() as u64) as usize];

        let mut factors = vec![0.0; n.saturating_sub(1)];
        for j in 1..n {
            let (centre, sigma) = (inputs.centres[j - 1], inputs.sigma[j - 1]);
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..n - j {
                let base = t.value(i, j - 1);
                let mut ratio = centre;
                if sigma > 0.0 && base > 0.0 {
                    ratio += draw(&mut ratio_rng) * sigma / base.sqrt();
                }
                num += base * ratio;
                den += base;
            }
            factors[j - 1] = if den != 0.0 { num / den } else { centre };
        }

        let mut negative = 0;
        let ultimates = (0..n)
            .map(|i| {
                let mut cur = latest[i];
                for j in n - i..n {
                    let base = cur;
                    cur = base * factors[j - 1];
                    let sigma = inputs.sigma[j - 1];
                    if cfg.process_variance && sigma > 0.0 {
                        cur += sigma * draw(&mut noise_rng) * base.abs().sqrt();
                    }
                    if cur < 0.0 {
                        negative += 1;
                    }
                }
                cur
            })
            .collect();
        SimOutcome { ultimates, negative }
    };

    let sims: Vec<SimOutcome> = (0..cfg.n_sims).into_par_iter().map(run).collect();

    let latest_total: f64 = latest.iter().sum();
    let mut ultimates = Vec::with_capacity(cfg.n_sims * n);
    let mut total_reserves = Vec::with_capacity(cfg.n_sims);
    let mut negative_cells = 0;
    for s in sims {
        total_reserves.push(s.ultimates.iter().sum::<f64>() - latest_total);
        ultimates.extend_from_slice(&s.ultimates);
        negative_cells += s.negative;
    }
    if negative_cells > 0 {
        log::warn!(
            "{}: {negative_cells} simulated cumulative cells were negative",
            inputs.model.as_str()
        );
    }
    Ok(ReserveDistribution {
        model_kind: inputs.model,
        seed: cfg.seed,
        n_origins: n,
        latest,
        ultimates,
        total_reserves,
        deterministic_mean: inputs.deterministic_mean,
        deterministic_ultimates: inputs.deterministic_ultimates.clone(),
        negative_cells,
    })
}

/// England–Verrall bootstrap of Mack's model on one triangle.
pub fn bootstrap_mack(t: &Triangle, cfg: &BootstrapConfig) -> Result<ReserveDistribution> {
    let cumulative;
    let t = match t.basis() {
        Basis::Cumulative => t,
        Basis::Incremental => {
            cumulative = t.incremental_to_cumulative()?;
            &cumulative
        }
    };
    let params = estimate(t, cfg.sigma_divisor)?;
    let pool = residuals(t, &params, cfg)?.values();
    let sigma = params.sigma();
    let central = chain_ladder_project(t, &params.dev_factors)?;
    simulate(
        &SimulationInputs {
            observed: t,
            centres: &params.dev_factors,
            sigma: &sigma,
            pool: &pool,
            model: ModelKind::mack(t.kind()),
            deterministic_mean: central.total_reserve(),
            deterministic_ultimates: central.ultimates(),
        },
        cfg,
    )
}
