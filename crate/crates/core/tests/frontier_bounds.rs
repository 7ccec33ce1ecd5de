use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use qtradeoff::eavesdrop::{evolve, generator_len, isometry_from_generator};
use qtradeoff::metrics::{
    closed_forms, disturbance, frontier_d, helstrom_error, pe_min, FamilyParams,
};
use qtradeoff::optimize::NelderMead;
use qtradeoff::random::{rng_from, uniform};
use qtradeoff::states::pair_from_overlap;
use qtradeoff::tradeoff::{family_frontier, isometry_tradeoff, pe_grid, SearchBudget};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_interactions_lie_above_frontier(s in 0.05f64..0.95, dim_e in 2usize..=4, seed in any::<u64>()) {
        let mut rng = rng_from(seed, &[]);
        let params: Vec<f64> = (0..generator_len(dim_e))
            .map(|_| uniform(-std::f64::consts::PI, std::f64::consts::PI, &mut rng))
            .collect();
        let pair = pair_from_overlap(s).unwrap();
        let post = evolve(&pair, &isometry_from_generator(&params, dim_e).unwrap()).unwrap();
        let pe = helstrom_error(&post.rho_e[0], &post.rho_e[1], 0.5).unwrap();
        let d = disturbance(&pair, &post).unwrap();
        prop_assert!(pe >= pe_min(s) - 1e-12);
        prop_assert!(d >= frontier_d(pe, s).unwrap() - 1e-9);
        prop_assert_eq!(isometry_tradeoff(&pair, &params, dim_e).unwrap(), (pe, d));
    }

    #[test]
    fn family_points_lie_above_frontier(s in 0.01f64..0.99, l in 0.0f64..FRAC_PI_2, p in 0.0f64..PI, t in 0.0f64..PI) {
        let pt = closed_forms(&FamilyParams::new(l, p, t).unwrap(), s).unwrap();
        prop_assert!(pt.d >= frontier_d(pt.pe, s).unwrap() - 1e-9);
    }

    #[test]
    fn simplex_history_never_increases(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = rng_from(seed, &[1]);
        let centre: Vec<f64> = (0..n).map(|_| uniform(-2.0, 2.0, &mut rng)).collect();
        let scale: Vec<f64> = (0..n).map(|_| uniform(0.1, 10.0, &mut rng)).collect();
        let f = |x: &[f64]| -> f64 {
            x.iter().zip(&centre).zip(&scale).map(|((a, c), w)| w * (a - c).powi(2)).sum::<f64>()
                + (x[0] * 3.0).sin()
        };
        let r = NelderMead::new(300, 1e-12, 0.5).minimize(f, &vec![0.0; n]);
        prop_assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(r.f <= f(&vec![0.0; n]));
    }
}

#[test]
fn family_search_agrees_with_frontier_across_overlaps() {
    let budget = SearchBudget {
        restarts: 8,
        ..SearchBudget::default()
    };
    for s in [0.3, 0.7] {
        let c = family_frontier(s, &pe_grid(s, 6), &budget).unwrap();
        assert!(c.all_feasible());
        assert!(c.max_abs_gap() <= 1e-6, "S={s}: {}", c.max_abs_gap());
        assert!(!c.has_violation());
    }
}
