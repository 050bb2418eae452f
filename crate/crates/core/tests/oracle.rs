mod support {
    pub mod brute;
}

use proptest::prelude::*;
use support::brute::max_discrepancy;

#[test]
fn fifty_random_triangles_match_the_loop_oracle() {
    let start = std::time::Instant::now();
    let worst = max_discrepancy(2024, 50);
    println!("max relative discrepancy {worst:e}");
    assert!(worst < 1e-12, "{worst:e}");
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_seed_matches_the_loop_oracle(seed in any::<u64>()) {
        let worst = max_discrepancy(seed, 3);
        prop_assert!(worst < 1e-12, "{:e}", worst);
    }
}
