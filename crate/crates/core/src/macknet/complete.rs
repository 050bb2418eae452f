use crate::error::{Error, Result};
use crate::mack::{chain_ladder_project, dev_factors};
use crate::macknet::features::{cumulative, Grid};
use crate::neural::{Network, FEATURES};
use crate::square::CompletedSquare;
use crate::triangle::{CompanyDataSet, LossKind};

/// Anything that maps an input sequence to a scaled increment.
pub trait Predictor: Sync {
    fn predict_increment(&self, sequence: &[[f64; FEATURES]]) -> f64;
}

impl Predictor for Network {
    fn predict_increment(&self, sequence: &[[f64; FEATURES]]) -> f64 {
        self.predict(sequence)
    }
}

impl<F: Fn(&[[f64; FEATURES]]) -> f64 + Sync> Predictor for F {
    fn predict_increment(&self, sequence: &[[f64; FEATURES]]) -> f64 {
        self(sequence)
    }
}

/// Completes the lower triangle of `kind` by one-step predictions applied
/// diagonal by diagonal. The other kind is completed by deterministic chain
/// ladder so that paid-to-incurred ratios exist for future columns.
pub fn complete_square(predictor: &dyn Predictor, data: &CompanyDataSet, kind: LossKind) -> Result<CompletedSquare> {
    let mut out = match kind {
        LossKind::Paid => complete(data, [Some(predictor), None])?,
        LossKind::Incurred => complete(data, [None, Some(predictor)])?,
    };
    Ok(match kind {
        LossKind::Paid => out.swap_remove(0),
        LossKind::Incurred => out.swap_remove(1),
    })
}

/// Completes paid and incurred together, each with its own predictor.
pub fn complete_joint(
    paid: &dyn Predictor,
    incurred: &dyn Predictor,
    data: &CompanyDataSet,
) -> Result<(CompletedSquare, CompletedSquare)> {
    let mut out = complete(data, [Some(paid), Some(incurred)])?;
    let i = out.pop().unwrap_or_else(|| unreachable!());
    let p = out.pop().unwrap_or_else(|| unreachable!());
    Ok((p, i))
}

fn complete(data: &CompanyDataSet, predictors: [Option<&dyn Predictor>; 2]) -> Result<Vec<CompletedSquare>> {
    data.validate()?;
    let kinds = [LossKind::Paid, LossKind::Incurred];
    let mut squares = kinds
        .iter()
        .zip(&predictors)
        .map(|(&kind, p)| {
            let t = cumulative(data.triangle(kind))?;
            match p {
                Some(_) => CompletedSquare::from_observed(&t),
                None => chain_ladder_project(&t, &dev_factors(&t)?),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let n = data.origins();
    let premiums = data.exposure.premiums();

    for d in 1..n {
        let frontier = n - 1 + d;
        let known = |i: usize, j: usize| i + j < frontier;
        let predictions: Vec<(usize, usize, usize, f64)> = {
            let grid = Grid {
                n,
                paid: squares[0].values(),
                incurred: squares[1].values(),
                known: &known,
                premiums,
            };
            let ratios = grid.column_ratios()?;
            let mut out = Vec::new();
            for (s, (&kind, p)) in kinds.iter().zip(&predictors).enumerate() {
                let Some(p) = p else { continue };
                for j in d..n {
                    let i = frontier - j;
                    let f = grid.sample(kind, &ratios, i, j, 0.0)?;
                    let y = p.predict_increment(&f.sequence());
                    if !y.is_finite() {
                        return Err(Error::numerical(format!(
                            "non-finite prediction at origin {}, development year {}",
                            i + 1,
                            j + 1
                        )));
                    }
                    out.push((s, i, j, y));
                }
            }
            out
        };
        for (s, i, j, y) in predictions {
            let prev = squares[s].value(i, j - 1);
            squares[s].set(i, j, prev + premiums[i] * y);
        }
    }
    Ok(squares)
}
