use proptest::prelude::*;
use qtradeoff::broadcast::{
    block_diagonal, broadcast_fidelity_search, common_block_structure, commutes,
    measure_prepare_broadcaster, nondisturbing_information,
};
use qtradeoff::linalg::ComplexMatrix;
use qtradeoff::random::{
    random_density, random_simplex, random_unitary, rng_from, rotated_spectrum,
};
use qtradeoff::states::{validate_density, DensityOperator};
use qtradeoff::tradeoff::SearchBudget;

fn commuting_pair(d: usize, seed: u64) -> [DensityOperator<f64>; 2] {
    let mut rng = rng_from(seed, &[d as u64]);
    let u = random_unitary::<f64, _>(d, &mut rng);
    [0, 1].map(|_| {
        let p = random_simplex::<f64, _>(d, &mut rng);
        validate_density(&rotated_spectrum(&p, &u), 1e-10).unwrap()
    })
}

fn block_pair(seed: u64) -> [DensityOperator<f64>; 2] {
    let mut rng = rng_from(seed, &[0xb1]);
    let u = random_unitary::<f64, _>(4, &mut rng);
    [0, 1].map(|_| {
        let blocks = vec![
            random_density::<f64, _>(2, &mut rng).into_matrix(),
            ComplexMatrix::identity(1),
            ComplexMatrix::identity(1),
        ];
        let w = random_simplex::<f64, _>(3, &mut rng);
        let m = block_diagonal(&blocks, &w);
        validate_density(&u.matmul(&m).unwrap().matmul(&u.adjoint()).unwrap(), 1e-10).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn measure_prepare_marginals_are_exact(d in 2usize..=4, seed in any::<u64>()) {
        let [r0, r1] = commuting_pair(d, seed);
        prop_assume!(commutes(&r0, &r1, 1e-8).unwrap());
        let mp = measure_prepare_broadcaster(&r0, &r1).unwrap();
        for rho in [&r0, &r1] {
            for m in mp.marginals(rho).unwrap() {
                prop_assert!(m.matrix().max_abs_diff(rho.matrix()).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn block_structure_is_valid(seed in any::<u64>()) {
        let [r0, r1] = block_pair(seed);
        let bs = common_block_structure(&r0, &r1, 1e-8).unwrap();
        prop_assert_eq!(&bs.block_dims, &vec![2, 1, 1]);
        prop_assert!(bs.off_block_residual <= 1e-8);
        prop_assert!((bs.p0.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        prop_assert!((bs.p1.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        let v = nondisturbing_information(&r0, &r1, 1e-8).unwrap();
        prop_assert!(v.exists);
        prop_assert!(v.residual <= 1e-8);
    }
}

#[test]
fn broadcast_scores_never_exceed_one() {
    let budget = SearchBudget {
        restarts: 2,
        iterations: 300,
        ..SearchBudget::default()
    };
    for seed in 0..6 {
        let mut rng = rng_from(seed, &[0x5c]);
        let r0 = random_density::<f64, _>(2, &mut rng);
        let r1 = random_density::<f64, _>(2, &mut rng);
        let rep = broadcast_fidelity_search(&r0, &r1, None, &budget).unwrap();
        assert!(rep.best_score <= 1.0 + 1e-12);
        let [c0, c1] = commuting_pair(3, seed);
        let rep = broadcast_fidelity_search(&c0, &c1, None, &budget).unwrap();
        assert!(rep.constructive_score.is_some());
        assert!(rep.best_score <= 1.0 + 1e-12);
        assert!(rep.best_score >= 1.0 - 1e-12);
    }
}
