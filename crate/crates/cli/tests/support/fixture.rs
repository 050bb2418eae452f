//! Schedule P style CSV fixtures and a handle on the built binary.
#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub const HEADER: &str =
    "GRCODE,GRNAME,AccidentYear,DevelopmentYear,DevelopmentLag,IncurLoss_C,CumPaidLoss_C,BulkLoss_C,EarnedPremNet_C";

/// One company: cumulative paid and incurred rows (ragged for an upper
/// triangle, square for a fully developed company) and premiums.
pub struct Company {
    pub code: &'static str,
    pub paid: Vec<Vec<f64>>,
    pub incurred: Vec<Vec<f64>>,
    pub premiums: Vec<f64>,
}

pub fn csv(companies: &[Company]) -> String {
    let mut out = format!("{HEADER}\n");
    for c in companies {
        for (i, row) in c.paid.iter().enumerate() {
            let year = 1988 + i;
            for (j, p) in row.iter().enumerate() {
                out += &format!(
                    "{},Company {},{},{},{},{},{},0,{}\n",
                    c.code,
                    c.code,
                    year,
                    year + j,
                    j + 1,
                    c.incurred[i][j],
                    p,
                    c.premiums[i]
                );
            }
        }
    }
    out
}

pub fn write(path: &Path, companies: &[Company]) {
    std::fs::write(path, csv(companies)).unwrap();
}

/// The 3-origin hand triangle; incurred runs 10% above paid.
pub fn hand() -> Company {
    let paid = vec![vec![100.0, 180.0, 200.0], vec![110.0, 200.0], vec![120.0]];
    let incurred = paid.iter().map(|r| r.iter().map(|v| v * 1.1).collect()).collect();
    Company {
        code: "1",
        paid,
        incurred,
        premiums: vec![300.0, 320.0, 340.0],
    }
}

/// Fully developed noise-free company with constant link ratios.
pub fn noise_free(code: &'static str, n: usize, scale: f64) -> Company {
    let premiums: Vec<f64> = (0..n).map(|i| scale * (1000.0 + 50.0 * i as f64)).collect();
    let factor = |j: usize| 1.0 + 0.8 / (j * j) as f64;
    let paid: Vec<Vec<f64>> = premiums
        .iter()
        .map(|p| {
            let mut v = 0.4 * p;
            (0..n)
                .map(|j| {
                    if j > 0 {
                        v *= factor(j);
                    }
                    v
                })
                .collect()
        })
        .collect();
    let incurred = paid
        .iter()
        .map(|r| r.iter().enumerate().map(|(j, v)| v * (1.0 + 0.5 / (j + 1) as f64)).collect())
        .collect();
    Company { code, paid, incurred, premiums }
}

/// Fully developed company with multiplicative noise on the link ratios.
pub fn noisy(code: &'static str, n: usize, seed: u64) -> Company {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut c = noise_free(code, n, 1.0);
    for (row, inc) in c.paid.iter_mut().zip(c.incurred.iter_mut()) {
        for j in 1..n {
            let wobble = 1.0 + 0.1 * (next() - 0.5) / j as f64;
            let base = row[j - 1];
            let ratio = row[j] / inc[j].max(1e-9);
            row[j] = base.max(row[j] * wobble);
            inc[j] = row[j] / ratio;
        }
    }
    c
}

pub fn reserving(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reserving")).args(args).output().unwrap()
}

pub fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}
