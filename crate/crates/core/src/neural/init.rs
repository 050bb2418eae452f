use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::neural::Matrix;

/// Glorot (Xavier) uniform on `[-L, L]` with `L = sqrt(6 / (rows + cols))`.
pub fn init_glorot<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    assert!(rows > 0 && cols > 0, "glorot init needs positive dimensions");
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    let dist = Uniform::new_inclusive(-limit, limit).expect("finite limit");
    Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| dist.sample(rng)).collect())
}

/// Random matrix with orthonormal columns (`rows >= cols`) or rows
/// (`rows < cols`): a Gaussian matrix orthonormalised by modified
/// Gram-Schmidt, run twice for numerical orthogonality.
pub fn init_orthogonal<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    assert!(rows > 0 && cols > 0, "orthogonal init needs positive dimensions");
    let (long, short) = if rows >= cols { (rows, cols) } else { (cols, rows) };
    // `short` vectors of length `long`.
    let mut basis: Vec<Vec<f64>> = (0..short)
        .map(|_| (0..long).map(|_| StandardNormal.sample(rng)).collect())
        .collect();
    for k in 0..short {
        for _ in 0..2 {
            for p in 0..k {
                let dot: f64 = basis[k].iter().zip(&basis[p]).map(|(a, b)| a * b).sum();
                let prev = basis[p].clone();
                for (a, b) in basis[k].iter_mut().zip(&prev) {
                    *a -= dot * b;
                }
            }
            let norm = basis[k].iter().map(|a| a * a).sum::<f64>().sqrt();
            for a in &mut basis[k] {
                *a /= norm;
            }
        }
    }
    let mut m = Matrix::zeros(rows, cols);
    for (k, v) in basis.iter().enumerate() {
        for (l, &x) in v.iter().enumerate() {
            if rows >= cols {
                m.set(l, k, x);
            } else {
                m.set(k, l, x);
            }
        }
    }
    m
}
