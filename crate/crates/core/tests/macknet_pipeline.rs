mod support {
    pub mod synthetic;
}

use reserving::macknet::{fit_macknet, MacknetConfig};
use reserving::LossKind;
use support::synthetic::{synthetic, true_reserve};

#[test]
fn noise_free_triangle_reserve_is_recovered() {
    let (data, truth) = synthetic();
    let n = 10;
    let true_reserve = true_reserve(&truth);
    let mut cfg = MacknetConfig::default();
    cfg.ensemble.seed = 11;
    cfg.bootstrap.n_sims = 1000;
    let started = std::time::Instant::now();
    let fit = fit_macknet(&data, LossKind::Paid, &cfg).unwrap();
    let reserve = fit.dbar.total_reserve();
    let err = (reserve - true_reserve).abs() / true_reserve;
    eprintln!(
        "reserve {reserve:.2} vs truth {true_reserve:.2}: {:.3}% in {:?}",
        100.0 * err,
        started.elapsed()
    );
    assert!(err < 0.02);
    for i in 0..n {
        for j in 0..n - i {
            assert_eq!(fit.dbar.value(i, j), truth[i * n + j]);
        }
    }
    assert_eq!(fit.diagnostics.members.len(), 20);
}

#[test]
fn fixed_seed_fixed_outputs() {
    let (data, _) = synthetic();
    let mut cfg = MacknetConfig::default();
    cfg.ensemble.members = 2;
    cfg.ensemble.train.epochs = 30;
    cfg.bootstrap.n_sims = 200;
    let a = fit_macknet(&data, LossKind::Incurred, &cfg).unwrap();
    let b = fit_macknet(&data, LossKind::Incurred, &cfg).unwrap();
    assert_eq!(a, b);
}
