use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neural::dropout::{check_rate, sample_mask};
use crate::neural::lstm::StepCache;
use crate::neural::{init_glorot, LstmWeights, Matrix, Mode};

/// Features per time step: lagged increment, development index, paid/incurred ratio.
pub const FEATURES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Architecture {
    pub hidden: usize,
    /// Widths of FC1..FC4; FC4 must match FC1 for the skip connection.
    pub dense_widths: [usize; 4],
}

impl Default for Architecture {
    fn default() -> Self {
        Self {
            hidden: 16,
            dense_widths: [16; 4],
        }
    }
}

impl Architecture {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.dense_widths.contains(&0) {
            return Err(Error::invalid("layer sizes must be positive"));
        }
        if self.dense_widths[3] != self.dense_widths[0] {
            return Err(Error::invalid(format!(
                "skip connection needs FC4 width {} to equal FC1 width {}",
                self.dense_widths[3], self.dense_widths[0]
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub w: Matrix,
    pub b: Vec<f64>,
}

impl Dense {
    fn zeros(out: usize, inp: usize) -> Self {
        Self {
            w: Matrix::zeros(out, inp),
            b: vec![0.0; out],
        }
    }
}

/// FC1..FC5. Hidden layers use the rectifier, FC5 is linear with a single
/// output, and FC1's output is added to FC4's before FC5.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseStack {
    pub layers: [Dense; 5],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub arch: Architecture,
    pub lstm: LstmWeights,
    pub dense: DenseStack,
}

/// One training sequence (chronological, oldest step first) and its target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub sequence: Vec<[f64; FEATURES]>,
    pub target: f64,
}

/// Multiplicative dropout masks for one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct DropoutMasks {
    pub inputs: Option<Vec<Vec<f64>>>,
    pub dense: [Vec<f64>; 4],
}

impl DropoutMasks {
    pub fn identity(arch: &Architecture) -> Self {
        Self {
            inputs: None,
            dense: arch.dense_widths.map(|w| vec![1.0; w]),
        }
    }

    pub fn sample<R: Rng + ?Sized>(
        arch: &Architecture,
        theta: f64,
        on_inputs: bool,
        steps: usize,
        rng: &mut R,
    ) -> Self {
        let dense = arch.dense_widths.map(|w| sample_mask(w, theta, rng));
        let inputs = on_inputs.then(|| (0..steps).map(|_| sample_mask(FEATURES, theta, rng)).collect());
        Self { inputs, dense }
    }
}

struct DenseCache {
    input: Vec<f64>,
    /// Pre-activations of FC1..FC4.
    pre: [Vec<f64>; 4],
    /// Post-dropout outputs of FC1..FC4.
    out: [Vec<f64>; 4],
    skip_sum: Vec<f64>,
}

struct ForwardCache {
    steps: Vec<StepCache>,
    dense: DenseCache,
}

fn relu(v: Vec<f64>) -> Vec<f64> {
    v.into_iter().map(|x| x.max(0.0)).collect()
}

/// Tensor names in checkpoint order.
const TENSOR_NAMES: [&str; 18] = [
    "lstm.w_f", "lstm.w_i", "lstm.w_c", "lstm.w_o", "lstm.b_f", "lstm.b_i", "lstm.b_c", "lstm.b_o",
    "fc1.w", "fc1.b", "fc2.w", "fc2.b", "fc3.w", "fc3.b", "fc4.w", "fc4.b", "fc5.w", "fc5.b",
];

impl Network {
    pub fn zeros(arch: Architecture) -> Self {
        let [d1, d2, d3, d4] = arch.dense_widths;
        Self {
            arch,
            lstm: LstmWeights::zeros(arch.hidden, FEATURES),
            dense: DenseStack {
                layers: [
                    Dense::zeros(d1, arch.hidden),
                    Dense::zeros(d2, d1),
                    Dense::zeros(d3, d2),
                    Dense::zeros(d4, d3),
                    Dense::zeros(1, d4),
                ],
            },
        }
    }

    /// Random initialisation: Glorot-uniform kernels with zero biases for
    /// the dense layers; see [`LstmWeights::init`] for the recurrent cell.
    pub fn init<R: Rng + ?Sized>(arch: Architecture, rng: &mut R) -> Result<Self> {
        arch.validate()?;
        let mut net = Self::zeros(arch);
        net.lstm = LstmWeights::init(arch.hidden, FEATURES, rng);
        for layer in &mut net.dense.layers {
            layer.w = init_glorot(layer.w.rows, layer.w.cols, rng);
        }
        Ok(net)
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.arch)
    }

    fn tensors(&self) -> [&[f64]; 18] {
        let l = &self.lstm;
        let d = &self.dense.layers;
        [
            &l.w_f.data, &l.w_i.data, &l.w_c.data, &l.w_o.data, &l.b_f, &l.b_i, &l.b_c, &l.b_o,
            &d[0].w.data, &d[0].b, &d[1].w.data, &d[1].b, &d[2].w.data, &d[2].b, &d[3].w.data,
            &d[3].b, &d[4].w.data, &d[4].b,
        ]
    }

    fn tensors_mut(&mut self) -> [&mut [f64]; 18] {
        let l = &mut self.lstm;
        let [d0, d1, d2, d3, d4] = &mut self.dense.layers;
        [
            &mut l.w_f.data, &mut l.w_i.data, &mut l.w_c.data, &mut l.w_o.data, &mut l.b_f,
            &mut l.b_i, &mut l.b_c, &mut l.b_o, &mut d0.w.data, &mut d0.b, &mut d1.w.data,
            &mut d1.b, &mut d2.w.data, &mut d2.b, &mut d3.w.data, &mut d3.b, &mut d4.w.data,
            &mut d4.b,
        ]
    }

    fn shapes(&self) -> [[usize; 2]; 18] {
        let l = &self.lstm;
        let d = &self.dense.layers;
        let m = |x: &Matrix| [x.rows, x.cols];
        let v = |x: &Vec<f64>| [x.len(), 1];
        [
            m(&l.w_f), m(&l.w_i), m(&l.w_c), m(&l.w_o), v(&l.b_f), v(&l.b_i), v(&l.b_c), v(&l.b_o),
            m(&d[0].w), v(&d[0].b), m(&d[1].w), v(&d[1].b), m(&d[2].w), v(&d[2].b), m(&d[3].w),
            v(&d[3].b), m(&d[4].w), v(&d[4].b),
        ]
    }

    pub fn n_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// All parameters concatenated in checkpoint order.
    pub fn to_flat(&self) -> Vec<f64> {
        self.tensors().concat()
    }

    pub fn load_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.n_params() {
            return Err(Error::shape(format!(
                "{} values for a network with {} parameters",
                flat.len(),
                self.n_params()
            )));
        }
        let mut offset = 0;
        for t in self.tensors_mut() {
            let len = t.len();
            t.copy_from_slice(&flat[offset..offset + len]);
            offset += len;
        }
        Ok(())
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            arch: self.arch,
            tensors: TENSOR_NAMES
                .iter()
                .zip(self.shapes())
                .zip(self.tensors())
                .map(|((name, shape), data)| NamedTensor {
                    name: name.to_string(),
                    shape,
                    data: data.to_vec(),
                })
                .collect(),
        }
    }

    pub fn from_checkpoint(ck: &Checkpoint) -> Result<Self> {
        ck.arch.validate()?;
        let mut net = Self::zeros(ck.arch);
        let shapes = net.shapes();
        if ck.tensors.len() != TENSOR_NAMES.len() {
            return Err(Error::shape("checkpoint tensor count"));
        }
        for (((slot, name), shape), t) in net.tensors_mut().into_iter().zip(TENSOR_NAMES).zip(shapes).zip(&ck.tensors)
        {
            if t.name != name || t.shape != shape || t.data.len() != slot.len() {
                return Err(Error::shape(format!("checkpoint tensor `{}` does not match", t.name)));
            }
            slot.copy_from_slice(&t.data);
        }
        Ok(net)
    }

    fn check_sequence(&self, seq: &[[f64; FEATURES]]) -> Result<()> {
        if seq.is_empty() {
            return Err(Error::shape("empty input sequence"));
        }
        if seq.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite network input"));
        }
        Ok(())
    }

    fn forward_cached(&self, seq: &[[f64; FEATURES]], masks: &DropoutMasks) -> (f64, ForwardCache) {
        let xs: Vec<Vec<f64>> = match &masks.inputs {
            None => seq.iter().map(|x| x.to_vec()).collect(),
            Some(m) => seq
                .iter()
                .zip(m)
                .map(|(x, m)| x.iter().zip(m).map(|(a, b)| a * b).collect())
                .collect(),
        };
        let (hs, steps) = self.lstm.run(&xs);
        let input = hs.last().cloned().unwrap_or_else(|| vec![0.0; self.arch.hidden]);

        let layers = &self.dense.layers;
        let mut pre: [Vec<f64>; 4] = Default::default();
        let mut out: [Vec<f64>; 4] = Default::default();
        let mut x = input.clone();
        for k in 0..4 {
            pre[k] = layers[k].w.affine(&x, &layers[k].b);
            out[k] = relu(pre[k].clone())
                .into_iter()
                .zip(&masks.dense[k])
                .map(|(a, m)| a * m)
                .collect();
            x = out[k].clone();
        }
        let skip_sum: Vec<f64> = out[3].iter().zip(&out[0]).map(|(a, b)| a + b).collect();
        let y = layers[4].w.affine(&skip_sum, &layers[4].b)[0];
        (
            y,
            ForwardCache {
                steps,
                dense: DenseCache {
                    input,
                    pre,
                    out,
                    skip_sum,
                },
            },
        )
    }

    /// Accumulates `dy * d y / d theta` into `grads`.
    fn backward_cached(&self, cache: &ForwardCache, masks: &DropoutMasks, dy: f64, grads: &mut Network) {
        let layers = &self.dense.layers;
        let glayers = &mut grads.dense.layers;
        let dc = &cache.dense;

        glayers[4].w.add_outer(&[dy], &dc.skip_sum);
        glayers[4].b[0] += dy;
        let mut d_skip = vec![0.0; dc.skip_sum.len()];
        layers[4].w.add_transpose_mul(&[dy], &mut d_skip);

        // Gradient w.r.t. each layer's post-dropout output.
        let mut d_out = d_skip.clone();
        for k in (0..4).rev() {
            if k == 0 {
                for (a, b) in d_out.iter_mut().zip(&d_skip) {
                    *a += b;
                }
            }
            let d_pre: Vec<f64> = d_out
                .iter()
                .zip(&masks.dense[k])
                .zip(&dc.pre[k])
                .map(|((d, m), p)| if *p > 0.0 { d * m } else { 0.0 })
                .collect();
            let below = if k == 0 { &dc.input } else { &dc.out[k - 1] };
            glayers[k].w.add_outer(&d_pre, below);
            for (b, d) in glayers[k].b.iter_mut().zip(&d_pre) {
                *b += d;
            }
            let mut d_below = vec![0.0; below.len()];
            layers[k].w.add_transpose_mul(&d_pre, &mut d_below);
            d_out = d_below;
        }
        self.lstm.backward(&cache.steps, &d_out, &mut grads.lstm);
    }

    /// Prediction in eval mode.
    pub fn predict(&self, seq: &[[f64; FEATURES]]) -> f64 {
        self.forward_cached(seq, &DropoutMasks::identity(&self.arch)).0
    }

    pub fn forward<R: Rng + ?Sized>(
        &self,
        seq: &[[f64; FEATURES]],
        mode: Mode,
        theta: f64,
        rng: &mut R,
    ) -> Result<f64> {
        self.check_sequence(seq)?;
        check_rate(theta)?;
        let masks = match mode {
            Mode::Eval => DropoutMasks::identity(&self.arch),
            Mode::Train => DropoutMasks::sample(&self.arch, theta, false, seq.len(), rng),
        };
        Ok(self.forward_cached(seq, &masks).0)
    }

    /// Mean squared error over `batch` under fixed dropout masks.
    pub fn loss(&self, batch: &[Sample], masks: &[DropoutMasks]) -> Result<f64> {
        if batch.is_empty() || masks.len() != batch.len() {
            return Err(Error::shape("one dropout mask set per sample expected"));
        }
        let preds: Vec<f64> = batch
            .iter()
            .zip(masks)
            .map(|(s, m)| self.forward_cached(&s.sequence, m).0)
            .collect();
        let targets: Vec<f64> = batch.iter().map(|s| s.target).collect();
        mse_loss(&preds, &targets)
    }

    /// Mean squared error and its exact gradient with respect to every
    /// parameter, backpropagated through all time steps.
    pub fn gradient(&self, batch: &[Sample], masks: &[DropoutMasks]) -> Result<(f64, Network)> {
        if batch.is_empty() || masks.len() != batch.len() {
            return Err(Error::shape("one dropout mask set per sample expected"));
        }
        let n = batch.len() as f64;
        let mut grads = self.zeros_like();
        let mut loss = 0.0;
        for (s, m) in batch.iter().zip(masks) {
            self.check_sequence(&s.sequence)?;
            let (y, cache) = self.forward_cached(&s.sequence, m);
            let err = y - s.target;
            loss += err * err / n;
            self.backward_cached(&cache, m, 2.0 * err / n, &mut grads);
        }
        if !loss.is_finite() || grads.to_flat().iter().any(|g| !g.is_finite()) {
            return Err(Error::numerical("non-finite loss or gradient"));
        }
        Ok((loss, grads))
    }
}

pub fn mse_loss(preds: &[f64], targets: &[f64]) -> Result<f64> {
    if preds.is_empty() {
        return Err(Error::invalid("mse of an empty batch"));
    }
    if preds.len() != targets.len() {
        return Err(Error::shape("predictions and targets differ in length"));
    }
    Ok(preds
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / preds.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedTensor {
    pub name: String,
    pub shape: [usize; 2],
    pub data: Vec<f64>,
}

/// Flat JSON weight dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub arch: Architecture,
    pub tensors: Vec<NamedTensor>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Domain};

    fn small() -> Architecture {
        Architecture {
            hidden: 3,
            dense_widths: [4, 3, 2, 4],
        }
    }

    fn seq(v: f64) -> Vec<[f64; FEATURES]> {
        (0..8).map(|t| [v * t as f64, t as f64 / 10.0, 1.0 - v]).collect()
    }

    #[test]
    fn mse_examples() {
        assert_eq!(mse_loss(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mse_loss(&[1.0, 3.0], &[0.0, 0.0]).unwrap(), 5.0);
        assert!((mse_loss(&[0.5], &[0.1]).unwrap() - 0.16).abs() < 1e-15);
        assert!(mse_loss(&[], &[]).is_err());
        assert!(mse_loss(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn constant_network_ignores_input() {
        let mut net = Network::zeros(small());
        for (k, l) in net.dense.layers.iter_mut().enumerate() {
            l.b.iter_mut().for_each(|b| *b = 0.1 * (k + 1) as f64);
        }
        let a = net.predict(&seq(0.3));
        let b = net.predict(&seq(-2.0));
        assert_eq!(a, b);
        assert_eq!(a, 0.5);
    }

    #[test]
    fn skip_path_isolation() {
        let mut rng = substream(5, Domain::Initialisation, 0);
        let mut net = Network::init(small(), &mut rng).unwrap();
        for l in &mut net.dense.layers[2..4] {
            l.w.data.iter_mut().for_each(|w| *w = 0.0);
            l.b.iter_mut().for_each(|b| *b = 0.05);
        }
        // FC4 output is constant, so the prediction is FC5 applied to
        // constant + FC1 output.
        let s = seq(0.7);
        let xs: Vec<Vec<f64>> = s.iter().map(|x| x.to_vec()).collect();
        let h = net.lstm.run(&xs).0.pop().unwrap();
        let l = &net.dense.layers;
        let a1 = relu(l[0].w.affine(&h, &l[0].b));
        let a4 = relu(l[3].w.affine(&[0.0; 2], &l[3].b));
        let s5: Vec<f64> = a4.iter().zip(&a1).map(|(a, b)| a + b).collect();
        let expected = l[4].w.affine(&s5, &l[4].b)[0];
        assert!((net.predict(&s) - expected).abs() < 1e-14);
    }

    #[test]
    fn eval_mode_is_deterministic() {
        let mut rng = substream(6, Domain::Initialisation, 0);
        let net = Network::init(Architecture::default(), &mut rng).unwrap();
        let s = seq(0.2);
        let mut r1 = substream(1, Domain::Dropout, 0);
        let mut r2 = substream(2, Domain::Dropout, 0);
        let a = net.forward(&s, Mode::Eval, 0.05, &mut r1).unwrap();
        let b = net.forward(&s, Mode::Eval, 0.05, &mut r2).unwrap();
        assert_eq!(a, b);
        assert!(net.forward(&[], Mode::Eval, 0.0, &mut r1).is_err());
    }

    #[test]
    fn zero_error_gives_zero_gradient() {
        let mut rng = substream(9, Domain::Initialisation, 0);
        let net = Network::init(small(), &mut rng).unwrap();
        let s = seq(0.4);
        let batch = vec![Sample {
            target: net.predict(&s),
            sequence: s,
        }];
        let (loss, g) = net.gradient(&batch, &[DropoutMasks::identity(&net.arch)]).unwrap();
        assert_eq!(loss, 0.0);
        assert!(g.to_flat().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn duplicated_sample_keeps_mean_gradient() {
        let mut rng = substream(10, Domain::Initialisation, 0);
        let net = Network::init(small(), &mut rng).unwrap();
        let a = Sample { sequence: seq(0.3), target: 0.2 };
        let b = Sample { sequence: seq(-0.1), target: -0.4 };
        let id = DropoutMasks::identity(&net.arch);
        let (_, g1) = net.gradient(&[a.clone(), b.clone()], &[id.clone(), id.clone()]).unwrap();
        let (_, g2) = net
            .gradient(&[a.clone(), b.clone(), a.clone(), b.clone()], &vec![id; 4])
            .unwrap();
        for (x, y) in g1.to_flat().iter().zip(g2.to_flat()) {
            assert!((x - y).abs() <= 1e-14 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn flat_and_checkpoint_round_trip() {
        let mut rng = substream(11, Domain::Initialisation, 0);
        let net = Network::init(small(), &mut rng).unwrap();
        let mut other = net.zeros_like();
        other.load_flat(&net.to_flat()).unwrap();
        assert_eq!(other, net);
        let json = serde_json::to_string(&net.checkpoint()).unwrap();
        let back = Network::from_checkpoint(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, net);
        assert!(other.load_flat(&[1.0]).is_err());
    }

    #[test]
    fn skip_requires_matching_widths() {
        let bad = Architecture {
            hidden: 2,
            dense_widths: [4, 3, 3, 5],
        };
        assert!(bad.validate().is_err());
    }
}
