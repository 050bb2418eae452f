use crate::distribution::{ModelKind, ReserveDistribution};
use crate::error::{Error, Result};
use crate::mack::{finish_pool, simulate, BootstrapConfig, Residual, ResidualSet, SimulationInputs};
use crate::macknet::MackNetParameters;
use crate::square::CompletedSquare;

/// Residuals over the whole averaged square, centred on the full-column
/// factors. Columns with zero variance and non-positive bases are skipped.
pub fn macknet_residuals(dbar: &CompletedSquare, params: &MackNetParameters, cfg: &BootstrapConfig) -> Result<ResidualSet> {
    let n = dbar.size();
    if params.fbar.len() + 1 != n || params.sigma2_p.len() + 1 != n {
        return Err(Error::shape("parameter vectors do not match square size"));
    }
    let sigma = params.sigma_p();
    let mut out = Vec::new();
    for j in 1..n {
        if !(sigma[j - 1] > 0.0) {
            continue;
        }
        for i in 0..n {
            let base = dbar.value(i, j - 1);
            if base <= 0.0 {
                continue;
            }
            let value = base.sqrt() * (dbar.value(i, j) / base - params.fbar[j - 1]) / sigma[j - 1];
            out.push(Residual { origin: i, dev: j, value });
        }
    }
    finish_pool(out, n - 1, cfg.bias_adjust, cfg.zero_mean)
}

/// Bootstrap driven by Mack-Net parameters. The resampled triangle sits on
/// the observed upper part of `dbar`; the central scenario is the reserve
/// of `dbar` itself.
pub fn macknet_bootstrap(
    dbar: &CompletedSquare,
    params: &MackNetParameters,
    cfg: &BootstrapConfig,
) -> Result<ReserveDistribution> {
    let observed = dbar.observed_triangle()?;
    let pool = macknet_residuals(dbar, params, cfg)?.values();
    let sigma = params.sigma_p();
    simulate(
        &SimulationInputs {
            observed: &observed,
            centres: &params.dev_factors_p,
            sigma: &sigma,
            pool: &pool,
            model: ModelKind::macknet(dbar.kind()),
            deterministic_mean: dbar.total_reserve(),
            deterministic_ultimates: dbar.ultimates(),
        },
        cfg,
    )
}
