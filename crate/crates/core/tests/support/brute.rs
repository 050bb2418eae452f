//! Loop-by-loop reimplementation of the chain-ladder estimators on ragged
//! rows, used as an oracle for the library.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reserving::mack::{chain_ladder_project, estimate, residuals, BootstrapConfig, SigmaDivisor};
use reserving::{Basis, LossKind, Triangle};

/// Row `i` (0-based) holds `n - i` cumulative values.
pub type Rows = Vec<Vec<f64>>;

pub fn random_rows(rng: &mut impl Rng, n: usize) -> Rows {
    (0..n)
        .map(|i| {
            let mut v = rng.random_range(50.0..5000.0);
            let mut row = vec![v];
            for j in 1..n - i {
                v *= 1.0 + rng.random_range(0.0..1.5) / j as f64;
                row.push(v);
            }
            row
        })
        .collect()
}

pub fn factors(rows: &Rows) -> Vec<f64> {
    let n = rows.len();
    let mut f = Vec::new();
    for j in 1..n {
        let mut num = 0.0;
        let mut den = 0.0;
        for row in rows {
            if row.len() > j {
                num += row[j];
                den += row[j - 1];
            }
        }
        f.push(num / den);
    }
    f
}

pub fn variances(rows: &Rows, f: &[f64], divisor: SigmaDivisor) -> Vec<f64> {
    let n = rows.len();
    let mut s2: Vec<f64> = Vec::new();
    for j in 1..n {
        let mut ss = 0.0;
        let mut count = 0i64;
        for row in rows {
            if row.len() > j {
                let r = row[j] / row[j - 1];
                ss += row[j - 1].abs() * (r - f[j - 1]).powi(2);
                count += 1;
            }
        }
        // 1-based column index j + 1.
        let d = match divisor {
            SigmaDivisor::AsPublished => n as i64 - (j as i64 + 1) - 1,
            SigmaDivisor::RatioCount => count - 1,
        };
        let k = s2.len();
        let v = if d > 0 {
            ss / d as f64
        } else if k >= 2 {
            let (a, b) = (s2[k - 1], s2[k - 2]);
            if b == 0.0 { 0.0 } else { (a * a / b).min(a).min(b) }
        } else if k == 1 {
            s2[0]
        } else {
            ss / (count - 1) as f64
        };
        s2.push(v);
    }
    s2
}

/// `((origin, dev), value)` with optional bias factor and centring.
pub fn pooled_residuals(rows: &Rows, f: &[f64], s2: &[f64], bias: bool, centre: bool) -> Vec<((usize, usize), f64)> {
    let n = rows.len();
    let mut out = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        for j in 1..row.len() {
            let sigma = s2[j - 1].sqrt();
            if sigma > 0.0 {
                out.push(((i, j), row[j - 1].sqrt() * (row[j] / row[j - 1] - f[j - 1]) / sigma));
            }
        }
    }
    let m = out.len() as f64;
    if bias {
        let factor = m / (m - (n - 1) as f64);
        out.iter_mut().for_each(|r| r.1 *= factor);
    }
    if centre {
        let mean = out.iter().map(|r| r.1).sum::<f64>() / m;
        out.iter_mut().for_each(|r| r.1 -= mean);
    }
    out.sort_by_key(|r| r.0);
    out
}

pub fn projected(rows: &Rows, f: &[f64]) -> Rows {
    let n = rows.len();
    rows.iter()
        .map(|row| {
            let mut full = row.clone();
            while full.len() < n {
                let j = full.len();
                full.push(full[j - 1] * f[j - 1]);
            }
            full
        })
        .collect()
}

fn rel(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

/// Largest relative discrepancy between library and oracle over `count`
/// random triangles with 3 to 6 origins.
pub fn max_discrepancy(seed: u64, count: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let n = rng.random_range(3..=6);
        let rows = random_rows(&mut rng, n);
        let t = Triangle::from_rows(&rows, Basis::Cumulative, LossKind::Paid).unwrap();
        for divisor in [SigmaDivisor::AsPublished, SigmaDivisor::RatioCount] {
            let p = estimate(&t, divisor).unwrap();
            let f = factors(&rows);
            let s2 = variances(&rows, &f, divisor);
            for (a, b) in p.dev_factors.iter().zip(&f) {
                worst = worst.max(rel(*a, *b, 0.0));
            }
            for (a, b) in p.sigma2.iter().zip(&s2) {
                worst = worst.max(rel(*a, *b, 1e-300));
            }
            for (bias, centre) in [(false, false), (true, false), (true, true)] {
                let cfg = BootstrapConfig {
                    bias_adjust: bias,
                    zero_mean: centre,
                    sigma_divisor: divisor,
                    ..BootstrapConfig::default()
                };
                let mut lib: Vec<((usize, usize), f64)> = residuals(&t, &p, &cfg)
                    .unwrap()
                    .residuals
                    .iter()
                    .map(|r| ((r.origin, r.dev), r.value))
                    .collect();
                lib.sort_by_key(|r| r.0);
                let oracle = pooled_residuals(&rows, &f, &s2, bias, centre);
                assert_eq!(lib.len(), oracle.len());
                for (a, b) in lib.iter().zip(&oracle) {
                    assert_eq!(a.0, b.0);
                    // Residuals are order one; near-zero ones are compared absolutely.
                    worst = worst.max(rel(a.1, b.1, 1.0));
                }
            }
            let sq = chain_ladder_project(&t, &p.dev_factors).unwrap();
            for (i, row) in projected(&rows, &f).iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    worst = worst.max(rel(sq.value(i, j), *v, 0.0));
                }
            }
        }
    }
    worst
}
