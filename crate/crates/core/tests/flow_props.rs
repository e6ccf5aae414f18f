use std::f64::consts::PI;

use pgmt_core::flow::{default_registry, fourier_circle, run_to_extinction, FlowOptions};
use pgmt_core::monotonicity::extinction_upper_bound;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn doubling_quadruples_extinction_time(seed in 0u64..1000, amp in 0.0..0.3f64) {
        let c = fourier_circle(1.0, amp, 4, seed, 96).unwrap();
        let opts = FlowOptions::default();
        let h1 = run_to_extinction(&c, &opts).unwrap();
        let h2 = run_to_extinction(&c.scaled(2.0), &opts).unwrap();
        prop_assert!((h2.tau / h1.tau - 4.0).abs() < 0.08, "{} {}", h1.tau, h2.tau);
        let m0 = c.length();
        prop_assert!(h1.tau <= extinction_upper_bound(m0, 1).unwrap());
        prop_assert!(h1.tau <= m0 * m0 / (4.0 * PI));
    }
}

#[test]
fn registry_histories_behave() {
    let opts = FlowOptions::default();
    for spec in default_registry(7) {
        let c = spec.build(128).unwrap();
        let h = run_to_extinction(&c, &opts).unwrap();
        assert!(h.embedded, "{}", spec.name());
        assert!(h.tau >= h.last().t);
        assert!(h.tau <= extinction_upper_bound(h.mass0(), 1).unwrap());
        for w in h.snapshots.windows(2) {
            assert!(w[1].t > w[0].t);
            assert!(w[1].length < w[0].length, "{}", spec.name());
            // enclosed area falls at rate 2 pi
            let a0 = w[0].curve.signed_area().unwrap();
            let a1 = w[1].curve.signed_area().unwrap();
            let rate = (a0 - a1) / (w[1].t - w[0].t);
            assert!(
                (rate / (2.0 * PI) - 1.0).abs() < 0.02,
                "{}: rate {rate}",
                spec.name()
            );
        }
    }
}

#[test]
fn ellipse_lifetime() {
    // area / (2 pi) for an ellipse of semi-axes 2 and 1
    let c = pgmt_core::flow::ellipse(2.0, 1.0, 256).unwrap();
    let h = run_to_extinction(&c, &FlowOptions::default()).unwrap();
    assert!((h.tau - 1.0).abs() < 0.02, "tau {}", h.tau);
}
