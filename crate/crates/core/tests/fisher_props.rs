mod common;

use common::{qubit_catalog, random_density, random_hermitian, random_pure, random_unitary};
use lownoise::fisher::{
    exact_fisher, leading_fisher_nbody, leading_fisher_pure, leading_fisher_reduced, sld,
    LeadingFunctional,
};
use lownoise::matrix::ComplexMatrix;
use lownoise::{catalog, random_lownoise, CatalogName, DensityMatrix, PureState};
use num_complex::Complex64;
use proptest::prelude::*;

/// Random traceless Hermitian direction.
fn traceless(dim: usize, seed: u64) -> ComplexMatrix {
    let h = random_hermitian(dim, seed ^ 0x5eed);
    let shift = h.trace().re / dim as f64;
    let mut out = h;
    out.add_scaled(&ComplexMatrix::identity(dim), Complex64::new(-shift, 0.0));
    out.hermitize()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sld_forms_agree_and_solve_the_equation(dim in 2usize..=16, seed in any::<u64>()) {
        let rho = random_density(dim, seed);
        let drho = traceless(dim, seed);
        let r = sld(&rho, &drho).unwrap();
        prop_assert!((r.fisher - r.fisher_trace_form).abs() <= 1e-8 * r.fisher.max(1.0));
        prop_assert!(r.residual <= 1e-9);
    }

    #[test]
    fn leading_functional_is_concave(seed in any::<u64>(), channel_seed in 0u64..500, dim in 2usize..4) {
        let f = LeadingFunctional::new(&random_lownoise(dim, 6, channel_seed).unwrap());
        let a = random_density(dim, seed);
        let b = random_density(dim, seed.wrapping_add(1));
        for k in 0..=10 {
            let lambda = k as f64 / 10.0;
            let mut mix = a.matrix().scale_real(lambda);
            mix.add_scaled(b.matrix(), Complex64::new(1.0 - lambda, 0.0));
            let chord = lambda * f.reduced(a.matrix()) + (1.0 - lambda) * f.reduced(b.matrix());
            prop_assert!(f.reduced(&mix) >= chord - 1e-12);
        }
    }

    #[test]
    fn leading_coefficients_are_nonnegative(seed in any::<u64>(), channel_seed in 0u64..500) {
        let ch = random_lownoise(2, 6, channel_seed).unwrap();
        prop_assert!(leading_fisher_reduced(&ch, &random_density(2, seed)).unwrap() >= -1e-12);
        prop_assert!(leading_fisher_pure(&ch, &random_pure(2, seed)).unwrap() >= -1e-12);
    }

    #[test]
    fn reduced_functional_ignores_noise_mixing(seed in any::<u64>(), channel_seed in 0u64..500) {
        let ch = random_lownoise(2, 6, channel_seed).unwrap();
        let mixed = ch.mix_noise_families(&random_unitary(ch.c_series().len(), seed)).unwrap();
        let rho = random_density(2, seed);
        let a = leading_fisher_reduced(&ch, &rho).unwrap();
        let b = leading_fisher_reduced(&mixed, &rho).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
    }
}

#[test]
fn exact_and_leading_coefficients_agree_at_small_eps() {
    let eps = 1e-4;
    for ch in qubit_catalog() {
        for sample in 0..20 {
            let phi = random_pure(2, sample);
            let leading = leading_fisher_pure(&ch, &phi).unwrap();
            let exact = exact_fisher(&ch, &phi.density(), eps).unwrap();
            let gap = (exact.leading_coefficient - leading).abs();
            assert!(
                gap <= 5.0 * eps * (1.0 + leading),
                "{} sample {sample}: gap {gap}",
                ch.label()
            );
        }
    }
}

#[test]
fn reduced_functional_on_pure_states_is_the_pure_functional() {
    for ch in qubit_catalog() {
        for sample in 0..20 {
            let phi = random_pure(2, sample);
            let a = leading_fisher_reduced(&ch, &phi.density()).unwrap();
            let b = leading_fisher_pure(&ch, &phi).unwrap();
            assert!((a - b).abs() <= 1e-12, "{}", ch.label());
        }
    }
}

#[test]
fn nbody_coefficient_is_additive_on_product_inputs() {
    for ch in qubit_catalog() {
        for n in 1..=3 {
            for sample in 0..10 {
                let sites: Vec<PureState> = (0..n)
                    .map(|i| random_pure(4, sample * 10 + i as u64))
                    .collect();
                let psi = sites[1..]
                    .iter()
                    .fold(sites[0].clone(), |acc, s| acc.tensor(s));
                let expected: f64 = sites
                    .iter()
                    .map(|s| {
                        leading_fisher_reduced(&ch, &s.density().reduce(&[2, 2], &[0]).unwrap())
                            .unwrap()
                    })
                    .sum();
                let total = leading_fisher_nbody(&ch, &psi, n).unwrap().total;
                assert!((total - expected).abs() <= 1e-10, "{} n={n}", ch.label());
            }
        }
    }
}

/// The site-sum formula agrees with the leading coefficient of the full
/// ancilla-assisted n-site channel built from its Kraus operators.
#[test]
fn nbody_coefficient_matches_extended_channel() {
    for name in [
        CatalogName::Depolarizing,
        CatalogName::AmplitudeDamping,
        CatalogName::RandomLowNoise { seed: 3 },
    ] {
        let ch = catalog(&name, 2, 6).unwrap();
        let assisted = ch.extend_ancilla().unwrap();
        for n in 1..=2 {
            let full = assisted.extend_nbody(n).unwrap();
            for sample in 0..5 {
                let psi = random_pure(4usize.pow(n as u32), sample);
                let direct = leading_fisher_pure(&full, &psi).unwrap();
                let sum = leading_fisher_nbody(&ch, &psi, n).unwrap().total;
                assert!(
                    (direct - sum).abs() <= 1e-10,
                    "{} n={n}: {direct} vs {sum}",
                    ch.label()
                );
            }
        }
    }
}

#[test]
fn maximally_entangled_input_reaches_reduced_value() {
    let ch = catalog(&CatalogName::Depolarizing, 2, 6).unwrap();
    let psi = PureState::maximally_entangled(2);
    let assisted = ch.extend_ancilla().unwrap();
    let leading = leading_fisher_pure(&assisted, &psi).unwrap();
    assert!((leading - 1.0).abs() < 1e-12);
    let reduced = leading_fisher_reduced(&ch, &DensityMatrix::maximally_mixed(2)).unwrap();
    assert!((leading - reduced).abs() < 1e-12);
}
