use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neural::dropout::check_rate;
use crate::neural::{adam_step, AdamConfig, Architecture, DropoutMasks, Network, OptimizerState, Sample};
use crate::rng::{substream, Domain};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub dropout: f64,
    /// Also drop LSTM input features, not only dense activations.
    pub dropout_inputs: bool,
    pub epochs: usize,
    /// Epochs without improvement on the validation set before stopping.
    /// `None` always runs every epoch.
    pub patience: Option<usize>,
    pub architecture: Architecture,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        let adam = AdamConfig::default();
        Self {
            learning_rate: adam.learning_rate,
            beta1: adam.beta1,
            beta2: adam.beta2,
            epsilon: adam.epsilon,
            dropout: 0.05,
            dropout_inputs: false,
            epochs: 500,
            patience: Some(50),
            architecture: Architecture::default(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.adam().validate()?;
        check_rate(self.dropout)?;
        self.architecture.validate()?;
        if self.epochs == 0 {
            return Err(Error::invalid("epochs must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedNetwork {
    pub network: Network,
    pub optimizer: OptimizerState,
    pub seed: u64,
    /// Training loss per epoch, measured under that epoch's dropout masks.
    pub train_loss: Vec<f64>,
    /// Eval-mode validation loss after each epoch; empty without a validation set.
    pub validation_loss: Vec<f64>,
    /// Epoch (1-based) whose weights were kept.
    pub best_epoch: usize,
}

impl TrainedNetwork {
    pub fn epochs_run(&self) -> usize {
        self.train_loss.len()
    }

    pub fn best_validation_loss(&self) -> Option<f64> {
        self.validation_loss.get(self.best_epoch.checked_sub(1)?).copied()
    }
}

fn eval_loss(net: &Network, samples: &[Sample]) -> Result<f64> {
    let masks = vec![DropoutMasks::identity(&net.arch); samples.len()];
    net.loss(samples, &masks)
}

/// Full-batch ADAM on `samples`. When `validation` is non-empty its
/// eval-mode loss drives early stopping and the best weights are restored;
/// it never contributes to the gradient.
pub fn train(samples: &[Sample], validation: &[Sample], cfg: &TrainConfig) -> Result<TrainedNetwork> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(Error::invalid("no training samples"));
    }
    let adam = cfg.adam();
    let mut init_rng = substream(cfg.seed, Domain::Initialisation, 0);
    let mut net = Network::init(cfg.architecture, &mut init_rng)?;
    let mut params = net.to_flat();
    let mut state = OptimizerState::new(params.len());
    let steps = samples[0].sequence.len();

    let mut train_loss = Vec::with_capacity(cfg.epochs);
    let mut validation_loss = Vec::new();
    let mut best: Option<(usize, f64, Vec<f64>, OptimizerState)> = None;

    for epoch in 1..=cfg.epochs {
        let mut rng = substream(cfg.seed, Domain::Dropout, epoch as u64);
        let masks: Vec<DropoutMasks> = samples
            .iter()
            .map(|_| DropoutMasks::sample(&net.arch, cfg.dropout, cfg.dropout_inputs, steps, &mut rng))
            .collect();
        let (loss, grads) = net.gradient(samples, &masks).map_err(|e| match e {
            Error::Numerical(msg) => Error::Divergence(format!("epoch {epoch}: {msg}")),
            other => other,
        })?;
        adam_step(&mut params, &grads.to_flat(), &mut state, &adam)?;
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Divergence(format!("epoch {epoch}: non-finite weights")));
        }
        net.load_flat(&params)?;
        train_loss.push(loss);

        if validation.is_empty() {
            continue;
        }
        let v = eval_loss(&net, validation)?;
        if !v.is_finite() {
            return Err(Error::Divergence(format!("epoch {epoch}: non-finite validation loss")));
        }
        validation_loss.push(v);
        match &best {
            Some((_, b, _, _)) if v >= *b => {}
            _ => best = Some((epoch, v, params.clone(), state.clone())),
        }
        if let (Some(patience), Some((best_epoch, ..))) = (cfg.patience, &best) {
            if epoch - best_epoch >= patience {
                log::debug!("early stop at epoch {epoch}, best {best_epoch}");
                break;
            }
        }
    }

    let best_epoch = match best {
        Some((epoch, _, p, s)) => {
            net.load_flat(&p)?;
            state = s;
            epoch
        }
        None => train_loss.len(),
    };
    Ok(TrainedNetwork {
        network: net,
        optimizer: state,
        seed: cfg.seed,
        train_loss,
        validation_loss,
        best_epoch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::FEATURES;

    fn samples(n: usize, target: impl Fn(usize) -> f64) -> Vec<Sample> {
        (0..n)
            .map(|k| Sample {
                sequence: (0..8)
                    .map(|t| [0.01 * (k + t) as f64, t as f64 / 10.0, 0.8])
                    .collect::<Vec<[f64; FEATURES]>>(),
                target: target(k),
            })
            .collect()
    }

    fn small(epochs: usize) -> TrainConfig {
        TrainConfig {
            epochs,
            dropout: 0.0,
            patience: None,
            architecture: Architecture {
                hidden: 4,
                dense_widths: [4; 4],
            },
            ..TrainConfig::default()
        }
    }

    #[test]
    fn rejects_bad_config() {
        let s = samples(3, |_| 0.1);
        assert!(train(&s, &[], &small(0)).is_err());
        let mut cfg = small(5);
        cfg.dropout = 1.0;
        assert!(train(&s, &[], &cfg).is_err());
        assert!(train(&[], &[], &small(5)).is_err());
    }

    #[test]
    fn one_epoch_is_one_step() {
        let t = train(&samples(3, |_| 0.1), &[], &small(1)).unwrap();
        assert_eq!(t.optimizer.t, 1);
        assert_eq!(t.epochs_run(), 1);
    }

    #[test]
    fn constant_target_is_learned() {
        let t = train(&samples(10, |_| 0.5), &[], &small(3000)).unwrap();
        let first = t.train_loss[0];
        let last = *t.train_loss.last().unwrap();
        assert!(last < 1e-6 * first, "{first} -> {last}");
    }

    #[test]
    fn same_seed_same_weights() {
        let mut cfg = small(30);
        cfg.dropout = 0.05;
        let s = samples(6, |k| 0.1 * k as f64);
        let a = train(&s, &s[..2], &cfg).unwrap();
        let b = train(&s, &s[..2], &cfg).unwrap();
        assert_eq!(a, b);
        cfg.seed = 1;
        let c = train(&s, &s[..2], &cfg).unwrap();
        assert_ne!(a.network, c.network);
    }

    #[test]
    fn early_stopping_restores_best() {
        let mut cfg = small(400);
        cfg.patience = Some(5);
        let s = samples(6, |k| 0.1 * k as f64);
        let val = samples(2, |_| 3.0);
        let t = train(&s, &val, &cfg).unwrap();
        let best = t.best_validation_loss().unwrap();
        assert!(t.validation_loss.iter().all(|&v| v >= best));
        assert!(t.epochs_run() <= t.best_epoch + 5);
        assert!((eval_loss(&t.network, &val).unwrap() - best).abs() < 1e-12);
    }
}
