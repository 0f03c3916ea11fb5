use std::f64::consts::PI;

use mim_core::dissipative::{
    auxiliary, mirror_reduced_state, qubit_coefficients, qubit_linear_entropies, reduced_qubit_rho,
    reduced_qubit_rho_from_ansatz, steady_state, QubitDensityMatrix, Variant,
};
use mim_core::measures::{concurrence, purity};
use mim_core::oracle::{
    integrate_lindblad, partial_trace, FockStateVector, IntegratorConfig, Mode,
};
use mim_core::unitary::{
    evolve_coherent, evolve_superposition, full_state_vector, reduced_optical_rho,
};
use mim_core::validate::qubit_initial_state;
use mim_core::{CoherentProductState, DimensionlessParams, FockCutoff, C64};
use nalgebra::{DMatrix, Matrix4};
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TRACE: f64 = 1e-9;
const HERMITICITY: f64 = 1e-12;
const MIN_EIGENVALUE: f64 = -1e-8;

fn assert_physical(m: &DMatrix<C64>, what: &str) {
    assert!(
        (m.trace() - 1.0).norm() <= TRACE,
        "{what}: trace {}",
        m.trace()
    );
    let herm = (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    assert!(herm <= HERMITICITY, "{what}: hermiticity {herm:e}");
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let min = h.symmetric_eigenvalues().min();
    assert!(min >= MIN_EIGENVALUE, "{what}: eigenvalue {min:e}");
}

fn qubit(m: &QubitDensityMatrix) -> DMatrix<C64> {
    DMatrix::from_iterator(4, 4, m.iter().copied())
}

fn random_params(rng: &mut ChaCha8Rng) -> DimensionlessParams {
    DimensionlessParams::new(
        rng.random_range(0.0..1.0),
        rng.random_range(0.0..1.0),
        rng.random_range(0.2..2.0),
        rng.random_range(0.2..2.0),
        rng.random_range(0.0..1.0),
    )
    .unwrap()
}

fn random_phi(rng: &mut ChaCha8Rng, max: f64) -> C64 {
    C64::from_polar(rng.random_range(0.0..max), rng.random_range(-PI..PI))
}

proptest! {
    #[test]
    fn closed_form_rho_ab_is_physical(
        k_a in 0.0..1.0f64, k_b in 0.0..1.0f64, gamma in 0.0..1.0f64,
        r_a in 0.2..2.0f64, r_b in 0.2..2.0f64,
        phi_abs in 0.0..2.0f64, phi_arg in -PI..PI, t in 0.0..(8.0 * PI),
    ) {
        let p = DimensionlessParams::new(k_a, k_b, r_a, r_b, gamma).unwrap();
        let phi = C64::from_polar(phi_abs, phi_arg);
        for variant in [Variant::Exact, Variant::Approx] {
            let rho = reduced_qubit_rho(t, &p, phi, variant);
            assert_physical(&qubit(&rho), "closed-form rho_AB");
            let c = concurrence(&rho).unwrap().value;
            prop_assert!((0.0..=1.0).contains(&c));
        }
        assert_physical(&qubit(&reduced_qubit_rho_from_ansatz(&qubit_coefficients(t, &p, phi))), "traced ansatz");
    }

    #[test]
    fn big_gamma_is_nondecreasing(gamma in 0.0..2.0f64) {
        let mut last = 0.0;
        for i in 0..=400 {
            let g = auxiliary(i as f64 * 8.0 * PI / 400.0, gamma).big_gamma;
            prop_assert!(g >= last - 1e-15, "Γ decreased from {} to {}", last, g);
            last = g;
        }
    }

    #[test]
    fn ab_entropy_dominates_mirror_entropy(kappa in 0.0..1.0f64, gamma in 0.0..1.0f64, t in 0.0..(8.0 * PI)) {
        let p = DimensionlessParams::symmetric(kappa, 1.0, 1.0, gamma).unwrap();
        let (ab, c) = qubit_linear_entropies(t, &p);
        prop_assert!(ab >= c - 1e-15);
    }
}

/// ρ = G G† / Tr(G G†) with a complex Gaussian G of random rank.
fn random_two_qubit_state(rng: &mut ChaCha8Rng) -> QubitDensityMatrix {
    let rank = rng.random_range(1..=4);
    let mut g = Matrix4::<C64>::zeros();
    for i in 0..4 {
        for j in 0..rank {
            g[(i, j)] = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
    }
    let m = g * g.adjoint();
    let tr = m.trace();
    QubitDensityMatrix(m / tr)
}

#[test]
fn concurrence_is_bounded_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..1000 {
        let rho = random_two_qubit_state(&mut rng);
        let c = concurrence(&rho).unwrap().value;
        assert!((0.0..=1.0).contains(&c), "C = {c}");
    }
}

#[test]
fn mirror_and_steady_states_are_physical() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let p = random_params(&mut rng);
        let phi = random_phi(&mut rng, 1.0);
        let t = rng.random_range(0.0..8.0 * PI);
        let mix = mirror_reduced_state(t, &p, [[0.25; 2]; 2], phi);
        assert_physical(&mix.to_matrix(40), "mirror state");
        assert!((purity(&mix.to_matrix(40)).unwrap() - mix.purity()).abs() < 1e-9);
        if p.gamma() > 0.0 {
            let ss = steady_state(&p, &[0.25; 4], &FockCutoff::qubit(40).unwrap()).unwrap();
            assert!((ss.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn unitary_reduced_states_are_physical() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let one = C64::new(1.0, 0.0);
    for _ in 0..10 {
        let p = random_params(&mut rng).with_gamma(0.0).unwrap();
        let phi = random_phi(&mut rng, 1.0);
        let t = rng.random_range(0.0..4.0 * PI);
        let state = CoherentProductState::with_mirror(one, one, phi).unwrap();
        let (table, mirror) =
            evolve_coherent(&state, &p, t, &FockCutoff::new(15, 15, 24).unwrap()).unwrap();
        let optical = reduced_optical_rho(table.amplitudes(), &mirror);
        let tr = optical.trace();
        assert_physical(&(optical / tr), "optical state");

        let (c, m) = evolve_superposition(&[C64::new(0.5, 0.0); 4], 2, 2, phi, &p, t).unwrap();
        assert_physical(&reduced_optical_rho(&c, &m), "qubit optical state");

        // a cheaper cutoff for the full vector
        let (small, small_mirror) = evolve_coherent(
            &CoherentProductState::with_mirror(C64::new(0.3, 0.0), C64::new(0.3, 0.0), phi)
                .unwrap(),
            &p,
            t,
            &FockCutoff::new(9, 9, 24).unwrap(),
        )
        .unwrap();
        let psi = full_state_vector(&small, &small_mirror, 24);
        let psi = FockStateVector::new(FockCutoff::new(9, 9, 24).unwrap(), psi)
            .unwrap()
            .normalized();
        assert_physical(
            &psi.partial_trace(&[Mode::A, Mode::B]),
            "optical part of full state",
        );
        assert_physical(&psi.partial_trace(&[Mode::C]), "mirror part of full state");
    }
}

#[test]
fn oracle_states_are_physical_and_purity_ignores_phi() {
    let p = DimensionlessParams::symmetric(0.5, 1.0, 1.0, 0.07).unwrap();
    let cfg = IntegratorConfig::new(1e-2, 1e-8).unwrap();
    let samples = [PI / 2.0, PI, 3.0 * PI / 2.0];
    let mut purities = Vec::new();
    for phi in [C64::new(0.0, 0.0), C64::from_polar(0.6, 0.4)] {
        let rho0 = qubit_initial_state(phi, 28).unwrap();
        let states = integrate_lindblad(&rho0, &p, &cfg, PI * 1.5, &samples).unwrap();
        let mut row = Vec::new();
        for (s, &t) in states.iter().zip(&samples) {
            assert_physical(s.matrix(), "oracle state");
            let ab = partial_trace(s, &[Mode::A, Mode::B]);
            assert_physical(&ab, "oracle rho_AB");
            let c = partial_trace(s, &[Mode::C]);
            assert_physical(&c, "oracle rho_C");
            let (s_ab, _) = qubit_linear_entropies(t, &p);
            assert!((1.0 - purity(&ab).unwrap() - s_ab).abs() < 1e-6);
            row.push(purity(&ab).unwrap());
        }
        purities.push(row);
    }
    for (a, b) in purities[0].iter().zip(&purities[1]) {
        assert!((a - b).abs() < 1e-6);
    }
}
