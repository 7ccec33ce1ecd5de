use qtradeoff::broadcast::illegal_eavesdropping_predicate;
use qtradeoff::linalg::{basis_vector, tensor, ComplexMatrix};
use qtradeoff::random::{random_state, random_unitary, rng_from, uniform};
use qtradeoff::scalar::C;
use qtradeoff::states::alice_pair;

fn product(a: &[C<f64>], e: &[C<f64>]) -> Vec<C<f64>> {
    a.iter()
        .flat_map(|x| e.iter().map(move |y| x * y))
        .collect()
}

/// `Σ_b |b⟩⟨b| ⊗ W_b` for unitaries `W_b`.
fn controlled(ws: &[ComplexMatrix<f64>]) -> ComplexMatrix<f64> {
    let (da, de) = (ws.len(), ws[0].rows());
    ComplexMatrix::from_fn(da * de, da * de, |r, c| {
        if r / de == c / de {
            ws[r / de][(r % de, c % de)]
        } else {
            C::new(0.0, 0.0)
        }
    })
}

#[test]
fn joint_unitaries_never_allow_illegal_eavesdropping() {
    let mut fired = 0;
    for trial in 0..10_000u64 {
        let mut rng = rng_from(trial, &[0xe4]);
        let dim_e = 2 + (trial % 3) as usize;
        let alpha = uniform(0.01, std::f64::consts::FRAC_PI_4 - 0.01, &mut rng);
        let pair = alice_pair(alpha).unwrap();
        let sigma = random_state::<f64, _>(dim_e, &mut rng);
        let in0 = product(&pair.ket0(), &sigma);
        let in1 = product(&pair.ket1(), &sigma);
        let u = match trial % 3 {
            0 => random_unitary(2 * dim_e, &mut rng),
            1 => tensor(
                &ComplexMatrix::identity(2),
                &random_unitary(dim_e, &mut rng),
            )
            .unwrap(),
            _ => controlled(&[
                random_unitary(dim_e, &mut rng),
                random_unitary(dim_e, &mut rng),
            ]),
        };
        let out0 = u.apply(&in0).unwrap();
        let out1 = u.apply(&in1).unwrap();
        if illegal_eavesdropping_predicate(&in0, &in1, &out0, &out1, 2, dim_e).unwrap() {
            fired += 1;
        }
    }
    assert_eq!(fired, 0);
}

#[test]
fn hand_built_outputs_with_orthogonal_records_fire() {
    for dim_e in 2..=4 {
        let pair = alice_pair(0.3).unwrap();
        let e0 = basis_vector::<f64>(dim_e, 0);
        let e1 = basis_vector::<f64>(dim_e, dim_e - 1);
        let in0 = product(&pair.ket0(), &e0);
        let in1 = product(&pair.ket1(), &e0);
        let out0 = product(&pair.ket0(), &e0);
        let out1 = product(&pair.ket1(), &e1);
        assert!(illegal_eavesdropping_predicate(&in0, &in1, &out0, &out1, 2, dim_e).unwrap());
    }
}
