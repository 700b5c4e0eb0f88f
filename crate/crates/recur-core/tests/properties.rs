//! Property tests for the structural invariants.

use std::f64::consts::PI;

use proptest::prelude::*;

use recur_core::numerics::special::dist_to_nearest_int;
use recur_core::{toeplitz, windows};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn window_membership_matches_direct_oracle(
        t in 0.01f64..25.0,
        eps in 0.02f64..0.95,
        theta in -PI..PI,
    ) {
        // skip points on the window edge where roundoff decides
        let margin = (dist_to_nearest_int(t * theta / (2.0 * PI)) - eps / 2.0).abs();
        prop_assume!(margin > 1e-9);
        let w = windows::build_window(t, eps).unwrap();
        prop_assert_eq!(
            windows::contains(&w, theta),
            windows::in_window_direct(t, eps, theta)
        );
    }

    #[test]
    fn window_geometry_invariants(t in 0.01f64..25.0, eps in 0.02f64..0.95) {
        let w = windows::build_window(t, eps).unwrap();
        let measure = windows::window_measure(&w);
        prop_assert!(measure <= 2.0 * PI + 1e-12);
        prop_assert!((measure == 2.0 * PI) == (t <= eps));
        for win in w.intervals.windows(2) {
            prop_assert!(win[0].1 <= win[1].0 + 1e-12);
        }
        for &(lo, hi) in &w.intervals {
            prop_assert!(lo < hi && lo >= -PI - 1e-15 && hi <= PI + 1e-15);
            prop_assert!(w
                .intervals
                .iter()
                .any(|&(l2, h2)| (l2 + hi).abs() < 1e-12 && (h2 + lo).abs() < 1e-12));
        }
    }

    #[test]
    fn toeplitz_entries_bounded_by_diagonal(
        n in 1usize..40,
        t in 0.05f64..20.0,
        eps in 0.05f64..0.9,
    ) {
        // Fourier coefficients of a nonnegative symbol: |c_m| <= c_0 <= 1
        let spec = toeplitz::build_entries(n, t, eps).unwrap();
        let c0 = spec.first_row[0];
        prop_assert!(c0 > 0.0 && c0 <= 1.0 + 1e-12);
        for &c in &spec.first_row[1..] {
            prop_assert!(c.abs() <= c0 + 1e-12, "|{c}| > {c0}");
        }
    }

    #[test]
    fn log_prob_is_nonpositive_small_n(
        n in 1usize..7,
        t in 0.05f64..12.0,
        eps in 0.05f64..0.9,
    ) {
        let lp = toeplitz::log_prob_exact(n, t, eps).unwrap();
        prop_assert!(lp.log_value <= 1e-10);
        prop_assert!((lp.log_value == 0.0) == (t <= eps) || !(t <= eps));
        if t <= eps {
            prop_assert_eq!(lp.log_value, 0.0);
        }
    }
}
