use serde::{Deserialize, Serialize};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Self { rows, cols, data }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        out
    }

    /// `W x + b`.
    pub(crate) fn affine(&self, x: &[f64], b: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| b[r] + self.row(r).iter().zip(x).map(|(w, v)| w * v).sum::<f64>())
            .collect()
    }

    /// `out += W^T dy`.
    pub(crate) fn add_transpose_mul(&self, dy: &[f64], out: &mut [f64]) {
        for (r, &d) in dy.iter().enumerate() {
            if d != 0.0 {
                for (o, w) in out.iter_mut().zip(self.row(r)) {
                    *o += w * d;
                }
            }
        }
    }

    /// `W += dy x^T`.
    pub(crate) fn add_outer(&mut self, dy: &[f64], x: &[f64]) {
        let cols = self.cols;
        for (r, &d) in dy.iter().enumerate() {
            if d != 0.0 {
                for (w, v) in self.data[r * cols..(r + 1) * cols].iter_mut().zip(x) {
                    *w += d * v;
                }
            }
        }
    }
}
