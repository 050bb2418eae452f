//! Finite-difference check of the network gradient.

use rand::Rng;
use reserving::neural::{Architecture, DropoutMasks, Network, Sample, FEATURES};
use reserving::rng::{substream, Domain};

const STEP: f64 = 1e-5;

/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6); the floor keeps
/// parameters with vanishing gradients from dominating through rounding.
pub fn relative_error(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(1e-6)
}

fn batch<R: Rng>(rng: &mut R, n: usize) -> Vec<Sample> {
    (0..n)
        .map(|_| Sample {
            sequence: (0..8)
                .map(|_| [rng.random_range(-1.0..1.0), rng.random_range(0.0..1.0), rng.random_range(0.5..1.5)])
                .collect::<Vec<[f64; FEATURES]>>(),
            target: rng.random_range(-0.5..0.5),
        })
        .collect()
}

pub fn check(config: u64, inputs_dropout: bool) -> f64 {
    let mut rng = substream(config, Domain::Initialisation, 99);
    let hidden = if config.is_multiple_of(2) { 2 } else { 4 };
    let w1 = rng.random_range(2..=8);
    let arch = Architecture {
        hidden,
        dense_widths: [w1, rng.random_range(2..=8), rng.random_range(2..=8), w1],
    };
    let mut net = Network::init(arch, &mut rng).unwrap();
    // Move biases off zero so every path carries gradient.
    let mut flat = net.to_flat();
    for p in flat.iter_mut() {
        *p += rng.random_range(-0.1..0.1);
    }
    net.load_flat(&flat).unwrap();

    let samples = batch(&mut rng, 5);
    let masks: Vec<DropoutMasks> = samples
        .iter()
        .map(|_| DropoutMasks::sample(&arch, 0.2, inputs_dropout, 8, &mut rng))
        .collect();
    let (_, grads) = net.gradient(&samples, &masks).unwrap();
    let analytic = grads.to_flat();

    let mut probe = net.clone();
    let mut worst: f64 = 0.0;
    for k in 0..flat.len() {
        let mut p = flat.clone();
        p[k] = flat[k] + STEP;
        probe.load_flat(&p).unwrap();
        let up = probe.loss(&samples, &masks).unwrap();
        p[k] = flat[k] - STEP;
        probe.load_flat(&p).unwrap();
        let down = probe.loss(&samples, &masks).unwrap();
        let numeric = (up - down) / (2.0 * STEP);
        worst = worst.max(relative_error(analytic[k], numeric));
    }
    worst
}

