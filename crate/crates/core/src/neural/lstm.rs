use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neural::{init_glorot, init_orthogonal, Matrix};

/// Gate weights acting on the concatenation `[h_{t-1}, x_t]`.
///
/// Columns `0..hidden` multiply the previous hidden state, the remaining
/// `input` columns multiply the current input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmWeights {
    pub hidden: usize,
    pub input: usize,
    pub w_f: Matrix,
    pub w_i: Matrix,
    pub w_c: Matrix,
    pub w_o: Matrix,
    pub b_f: Vec<f64>,
    pub b_i: Vec<f64>,
    pub b_c: Vec<f64>,
    pub b_o: Vec<f64>,
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Intermediates of one time step, kept for the backward pass.
#[derive(Debug, Clone)]
pub(crate) struct StepCache {
    pub z: Vec<f64>,
    pub f: Vec<f64>,
    pub i: Vec<f64>,
    pub g: Vec<f64>,
    pub o: Vec<f64>,
    pub c_prev: Vec<f64>,
    pub tanh_c: Vec<f64>,
}

impl LstmWeights {
    pub fn zeros(hidden: usize, input: usize) -> Self {
        let w = Matrix::zeros(hidden, hidden + input);
        Self {
            hidden,
            input,
            w_f: w.clone(),
            w_i: w.clone(),
            w_c: w.clone(),
            w_o: w,
            b_f: vec![0.0; hidden],
            b_i: vec![0.0; hidden],
            b_c: vec![0.0; hidden],
            b_o: vec![0.0; hidden],
        }
    }

    /// Glorot-uniform input kernel and orthogonal recurrent kernel, each
    /// drawn for all four gates jointly; forget-gate bias starts at one.
    pub fn init<R: Rng + ?Sized>(hidden: usize, input: usize, rng: &mut R) -> Self {
        let kernel = init_glorot(4 * hidden, input, rng);
        let recurrent = init_orthogonal(4 * hidden, hidden, rng);
        let mut w = Self::zeros(hidden, input);
        for (gate, m) in [&mut w.w_i, &mut w.w_f, &mut w.w_c, &mut w.w_o]
            .into_iter()
            .enumerate()
        {
            for r in 0..hidden {
                for c in 0..hidden {
                    m.set(r, c, recurrent.get(gate * hidden + r, c));
                }
                for c in 0..input {
                    m.set(r, hidden + c, kernel.get(gate * hidden + r, c));
                }
            }
        }
        w.b_f = vec![1.0; hidden];
        w
    }

    pub(crate) fn check(&self) -> Result<()> {
        let cols = self.hidden + self.input;
        let ok = [&self.w_f, &self.w_i, &self.w_c, &self.w_o]
            .iter()
            .all(|m| m.rows == self.hidden && m.cols == cols)
            && [&self.b_f, &self.b_i, &self.b_c, &self.b_o]
                .iter()
                .all(|b| b.len() == self.hidden);
        if ok {
            Ok(())
        } else {
            Err(Error::shape("LSTM weight shapes are inconsistent"))
        }
    }

    /// Runs the cell over a sequence from zero state, returning every hidden
    /// state and the step caches.
    pub(crate) fn run(&self, xs: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<StepCache>) {
        let (hs, caches, _) = self.run_from(vec![0.0; self.hidden], vec![0.0; self.hidden], xs);
        (hs, caches)
    }

    fn run_from(
        &self,
        mut h: Vec<f64>,
        mut c: Vec<f64>,
        xs: &[Vec<f64>],
    ) -> (Vec<Vec<f64>>, Vec<StepCache>, Vec<f64>) {
        let hdim = self.hidden;
        let mut hs = Vec::with_capacity(xs.len());
        let mut caches = Vec::with_capacity(xs.len());
        for x in xs {
            let mut z = h.clone();
            z.extend_from_slice(x);
            let f: Vec<f64> = self.w_f.affine(&z, &self.b_f).into_iter().map(sigmoid).collect();
            let i: Vec<f64> = self.w_i.affine(&z, &self.b_i).into_iter().map(sigmoid).collect();
            let g: Vec<f64> = self.w_c.affine(&z, &self.b_c).into_iter().map(f64::tanh).collect();
            let o: Vec<f64> = self.w_o.affine(&z, &self.b_o).into_iter().map(sigmoid).collect();
            let c_prev = c.clone();
            for k in 0..hdim {
                c[k] = f[k] * c_prev[k] + i[k] * g[k];
            }
            let tanh_c: Vec<f64> = c.iter().map(|v| v.tanh()).collect();
            h = (0..hdim).map(|k| o[k] * tanh_c[k]).collect();
            hs.push(h.clone());
            caches.push(StepCache {
                z,
                f,
                i,
                g,
                o,
                c_prev,
                tanh_c,
            });
        }
        (hs, caches, c)
    }

    /// Backpropagates `dh_last` (gradient at the final hidden state) through
    /// every step, accumulating into `grads`. Returns input gradients.
    pub(crate) fn backward(&self, caches: &[StepCache], dh_last: &[f64], grads: &mut LstmWeights) -> Vec<Vec<f64>> {
        let hdim = self.hidden;
        let mut dh = dh_last.to_vec();
        let mut dc = vec![0.0; hdim];
        let mut dxs = vec![Vec::new(); caches.len()];
        for (t, s) in caches.iter().enumerate().rev() {
            let mut da_f = vec![0.0; hdim];
            let mut da_i = vec![0.0; hdim];
            let mut da_g = vec![0.0; hdim];
            let mut da_o = vec![0.0; hdim];
            for k in 0..hdim {
                let d_o = dh[k] * s.tanh_c[k];
                dc[k] += dh[k] * s.o[k] * (1.0 - s.tanh_c[k] * s.tanh_c[k]);
                let d_f = dc[k] * s.c_prev[k];
                let d_i = dc[k] * s.g[k];
                let d_g = dc[k] * s.i[k];
                da_f[k] = d_f * s.f[k] * (1.0 - s.f[k]);
                da_i[k] = d_i * s.i[k] * (1.0 - s.i[k]);
                da_g[k] = d_g * (1.0 - s.g[k] * s.g[k]);
                da_o[k] = d_o * s.o[k] * (1.0 - s.o[k]);
                dc[k] *= s.f[k];
            }
            let mut dz = vec![0.0; hdim + self.input];
            for (w, gw, gb, da) in [
                (&self.w_f, &mut grads.w_f, &mut grads.b_f, &da_f),
                (&self.w_i, &mut grads.w_i, &mut grads.b_i, &da_i),
                (&self.w_c, &mut grads.w_c, &mut grads.b_c, &da_g),
                (&self.w_o, &mut grads.w_o, &mut grads.b_o, &da_o),
            ] {
                gw.add_outer(da, &s.z);
                for (b, d) in gb.iter_mut().zip(da.iter()) {
                    *b += d;
                }
                w.add_transpose_mul(da, &mut dz);
            }
            dh = dz[..hdim].to_vec();
            dxs[t] = dz[hdim..].to_vec();
        }
        dxs
    }
}

/// Hidden states `h_1..h_T` for a sequence, starting from `h_0 = C_0 = 0`.
pub fn lstm_forward(xs: &[Vec<f64>], w: &LstmWeights) -> Result<Vec<Vec<f64>>> {
    w.check()?;
    for x in xs {
        if x.len() != w.input {
            return Err(Error::shape(format!("input of size {} for LSTM expecting {}", x.len(), w.input)));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite LSTM input"));
        }
    }
    Ok(w.run(xs).0)
}
