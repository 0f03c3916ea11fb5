//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! lines are always printed.
//!
//! Criteria listed in `KNOWN_FAILURES` fail for reasons recorded next to the
//! entry; they are reported as FAIL but do not fail the target.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use mim_core::dissipative::{
    auxiliary, mirror_reduced_state, qubit_coefficients, reduced_qubit_rho,
    reduced_qubit_rho_from_ansatz, QubitDensityMatrix, Variant,
};
use mim_core::figures::{cat_couplings, linspace, CONCURRENCE_GAMMAS};
use mim_core::measures::concurrence;
use mim_core::unitary::{
    cat_fit, entropy_optical_at_tau, evolve_coherent, evolve_superposition,
    linear_entropy_abc_split, reduced_optical_rho, revival_time,
};
use mim_core::validate::{
    check_coefficient_ode, check_lindblad, check_quadrature, check_unitary_limit, ExactClosedForm,
    ValidationOptions,
};
use mim_core::{CoherentProductState, DimensionlessParams, Execution, FockCutoff, C64};
use nalgebra::{DMatrix, Matrix4};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORACLE_TOLERANCE: f64 = 1e-6;
const ORACLE_SAMPLES: usize = 50;
const ORACLE_STEP: f64 = 1e-2;
const COEFFICIENT_TOLERANCE: f64 = 1e-8;
const QUADRATURE_TOLERANCE: f64 = 1e-9;
const UNITARY_LIMIT_TOLERANCE: f64 = 1e-8;
const REVIVAL_ENTROPY_MAX: f64 = 1e-10;
const SEPARABLE_ENTROPY_MAX: f64 = 1e-8;
const ENTANGLED_ENTROPY_MIN: f64 = 0.1;
const FIDELITY_TOLERANCE: f64 = 1e-8;
const DELTA_C_STRONG_MIN: f64 = 0.1;
const DELTA_C_WEAK_MAX: f64 = 1e-2;
const CONCURRENCE_INVARIANCE: f64 = 1e-9;
const TRACE_TOLERANCE: f64 = 1e-9;
const HERMITICITY_TOLERANCE: f64 = 1e-12;
const MIN_EIGENVALUE: f64 = -1e-8;

/// (criterion, reason)
const KNOWN_FAILURES: [(u32, &str); 2] = [
    (
        4,
        "the displayed rho_AB carries the mirror phase as zeta - mu; the partial trace gives zeta + mu, \
         so it leaves the lossless result once phi != 0",
    ),
    (
        6,
        "at kappa = 1/2 the optical entropy vanishes at tau_2 = 4 pi (2 kappa^2 tau_2 = 2 pi), \
         so the >= 0.1 bound cannot hold for q = 2",
    ),
];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn symmetric(kappa: f64, gamma: f64) -> DimensionlessParams {
    DimensionlessParams::symmetric(kappa, 1.0, 1.0, gamma).unwrap()
}

fn coherent_one() -> (CoherentProductState, FockCutoff) {
    let one = C64::new(1.0, 0.0);
    (
        CoherentProductState::with_mirror(one, one, C64::new(0.0, 0.0)).unwrap(),
        FockCutoff::new(15, 15, 32).unwrap(),
    )
}

fn oracle_options(samples: Vec<f64>) -> ValidationOptions {
    ValidationOptions {
        integrator: mim_core::oracle::IntegratorConfig::new(ORACLE_STEP, 1e-8).unwrap(),
        lindblad_samples: samples,
        ..ValidationOptions::default()
    }
}

/// Worst of trace, Hermiticity and eigenvalue violations relative to their
/// tolerances; ≤ 1 is physical.
fn physicality(m: &DMatrix<C64>) -> f64 {
    let tr = (m.trace() - 1.0).norm() / TRACE_TOLERANCE;
    let herm = (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        / HERMITICITY_TOLERANCE;
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let min = h.symmetric_eigenvalues().min();
    tr.max(herm).max((-min).max(0.0) / -MIN_EIGENVALUE)
}

fn qubit_dm(m: &QubitDensityMatrix) -> DMatrix<C64> {
    DMatrix::from_iterator(4, 4, m.iter().copied())
}

fn criterion_1(oracle_physicality: &mut f64) -> Outcome {
    let samples: Vec<f64> = (1..=ORACLE_SAMPLES)
        .map(|i| 4.0 * PI * i as f64 / ORACLE_SAMPLES as f64)
        .collect();
    let [_, ab, _, phys] = check_lindblad(
        &symmetric(0.5, 0.07),
        C64::new(0.0, 0.0),
        32,
        &oracle_options(samples),
        &ExactClosedForm,
    )
    .unwrap();
    *oracle_physicality = phys.max_deviation;
    outcome(
        ab.max_deviation <= ORACLE_TOLERANCE,
        format!("max |rho_AB - oracle| = {:.2e} over {ORACLE_SAMPLES} times (tol {ORACLE_TOLERANCE:.0e})", ab.max_deviation),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let times = [1.0, PI, 2.0 * PI, 4.0 * PI];
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let p = symmetric(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let phi = C64::from_polar(rng.random_range(0.0..2.0), rng.random_range(-PI..PI));
        let c = check_coefficient_ode(&p, phi, &times, Execution::Parallel).unwrap();
        worst = worst.max(c.max_deviation);
    }
    outcome(
        worst <= COEFFICIENT_TOLERANCE,
        format!("max deviation {worst:.2e} over 10 draws x 16 tuples x 4 times (tol {COEFFICIENT_TOLERANCE:.0e})"),
    )
}

fn criterion_3() -> Outcome {
    let c = check_quadrature(20, Execution::Parallel).unwrap();
    outcome(
        c.max_deviation <= QUADRATURE_TOLERANCE,
        format!(
            "max deviation {:.2e} on 20x20 grid (tol {QUADRATURE_TOLERANCE:.0e})",
            c.max_deviation
        ),
    )
}

fn criterion_4() -> Outcome {
    let one = C64::new(1.0, 0.0);
    let mut parts = Vec::new();
    let mut passed = true;
    for (label, p, phi) in [
        ("phi=0", symmetric(0.5, 0.07), C64::new(0.0, 0.0)),
        (
            "phi=0.3e^{0.9i}, k_a=0.4, k_b=0.7",
            DimensionlessParams::new(0.4, 0.7, 1.0, 1.3, 0.07).unwrap(),
            C64::from_polar(0.3, 0.9),
        ),
    ] {
        let state = CoherentProductState::with_mirror(one, one, phi).unwrap();
        let cut = FockCutoff::new(15, 15, 32).unwrap();
        let checks =
            check_unitary_limit(&p, &state, &cut, 41, &ExactClosedForm, Execution::Parallel)
                .unwrap();
        for c in checks {
            passed &= c.max_deviation <= UNITARY_LIMIT_TOLERANCE;
            parts.push(format!("{label} {}: {:.2e}", c.name, c.max_deviation));
        }
    }
    outcome(
        passed,
        format!("{} (tol {UNITARY_LIMIT_TOLERANCE:.0e})", parts.join("; ")),
    )
}

fn criterion_5() -> Outcome {
    let (state, cut) = coherent_one();
    let mut worst: f64 = 0.0;
    for kappa in cat_couplings() {
        let p = symmetric(kappa, 0.0);
        for q in [1, 2] {
            let (table, _) = evolve_coherent(&state, &p, revival_time(q), &cut).unwrap();
            worst = worst.max(linear_entropy_abc_split(&table, &p));
        }
    }
    outcome(
        worst <= REVIVAL_ENTROPY_MAX,
        format!("max S_L(tau_q) = {worst:.2e} for q = 1, 2 (limit {REVIVAL_ENTROPY_MAX:.0e})"),
    )
}

fn criterion_6() -> Outcome {
    let (state, cut) = coherent_one();
    let mut sep_worst: f64 = 0.0;
    let mut ent = Vec::new();
    for q in [1, 2, 3] {
        for kappa in [1.0 / 2f64.sqrt(), 1.0] {
            sep_worst = sep_worst
                .max(entropy_optical_at_tau(q, &symmetric(kappa, 0.0), &state, &cut).unwrap());
        }
        ent.push(entropy_optical_at_tau(q, &symmetric(0.5, 0.0), &state, &cut).unwrap());
    }
    let ent_ok = ent.iter().all(|&s| s >= ENTANGLED_ENTROPY_MIN);
    outcome(
        sep_worst <= SEPARABLE_ENTROPY_MAX && ent_ok,
        format!(
            "max S_L at kappa in {{1/sqrt2, 1}} = {sep_worst:.2e} (limit {SEPARABLE_ENTROPY_MAX:.0e}); \
             S_L at kappa = 1/2 for q = 1, 2, 3: {:.4}, {:.2e}, {:.4} (need >= {ENTANGLED_ENTROPY_MIN})",
            ent[0], ent[1], ent[2]
        ),
    )
}

fn criterion_7() -> Outcome {
    let (state, cut) = coherent_one();
    let mut parts = Vec::new();
    let mut passed = true;
    for (kappa, n) in cat_couplings().into_iter().zip([2usize, 3, 4]) {
        let p = symmetric(kappa, 0.0);
        let (table, _) = evolve_coherent(&state, &p, revival_time(1), &cut).unwrap();
        let fit = cat_fit(&table, n, &p).unwrap();
        passed &= (1.0 - fit.fidelity).abs() <= FIDELITY_TOLERANCE;
        parts.push(format!("N={n}: 1-F = {:.2e}", 1.0 - fit.fidelity));
    }
    outcome(
        passed,
        format!("{} (tol {FIDELITY_TOLERANCE:.0e})", parts.join(", ")),
    )
}

fn criterion_8() -> Outcome {
    let phi0 = C64::new(0.0, 0.0);
    let times: Vec<f64> = linspace(0.0, 4.0 * PI, 1601).into_iter().skip(1).collect();
    let max_delta = |gamma: f64| {
        let p = symmetric(0.5, gamma);
        times
            .iter()
            .map(|&t| {
                let e = concurrence(&reduced_qubit_rho(t, &p, phi0, Variant::Exact))
                    .unwrap()
                    .value;
                let a = concurrence(&reduced_qubit_rho(t, &p, phi0, Variant::Approx))
                    .unwrap()
                    .value;
                (e - a).abs()
            })
            .fold(0.0, f64::max)
    };
    let strong = max_delta(1.0);
    let weak = max_delta(1e-2);

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let grid = linspace(0.0, 8.0 * PI, 201);
    let mut drift: f64 = 0.0;
    for _ in 0..20 {
        let (r_a, r_b) = (rng.random_range(0.1..3.0), rng.random_range(0.1..3.0));
        let phi = C64::from_polar(rng.random_range(0.0..2.0), rng.random_range(-PI..PI));
        for gamma in CONCURRENCE_GAMMAS {
            let base = symmetric(0.5, gamma);
            let moved = base.with_frequencies(r_a, r_b).unwrap();
            for &t in &grid {
                let c0 = concurrence(&reduced_qubit_rho(t, &base, phi0, Variant::Exact))
                    .unwrap()
                    .value;
                let c1 = concurrence(&reduced_qubit_rho(t, &moved, phi, Variant::Exact))
                    .unwrap()
                    .value;
                drift = drift.max((c0 - c1).abs());
            }
        }
    }
    outcome(
        strong >= DELTA_C_STRONG_MIN && weak <= DELTA_C_WEAK_MAX && drift <= CONCURRENCE_INVARIANCE,
        format!(
            "max|dC| gamma=1: {strong:.4} (>= {DELTA_C_STRONG_MIN}); gamma=1e-2: {weak:.2e} (<= {DELTA_C_WEAK_MAX:.0e}); \
             invariance drift {drift:.2e} (<= {CONCURRENCE_INVARIANCE:.0e})"
        ),
    )
}

fn criterion_9(oracle_physicality: f64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut score = oracle_physicality;
    let mut count = ORACLE_SAMPLES;
    for _ in 0..100 {
        let p = DimensionlessParams::new(
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..1.0),
            rng.random_range(0.1..3.0),
            rng.random_range(0.1..3.0),
            rng.random_range(0.0..1.0),
        )
        .unwrap();
        let phi = C64::from_polar(rng.random_range(0.0..1.0), rng.random_range(-PI..PI));
        let t = rng.random_range(0.0..8.0 * PI);
        for v in [Variant::Exact, Variant::Approx] {
            score = score.max(physicality(&qubit_dm(&reduced_qubit_rho(t, &p, phi, v))));
        }
        let coeffs = qubit_coefficients(t, &p, phi);
        score = score.max(physicality(&qubit_dm(&reduced_qubit_rho_from_ansatz(
            &coeffs,
        ))));
        score = score.max(physicality(coeffs.to_fock(32).unwrap().matrix()));
        score = score.max(physicality(
            &mirror_reduced_state(t, &p, [[0.25; 2]; 2], phi).to_matrix(32),
        ));
        let lossless = p.with_gamma(0.0).unwrap();
        let (c, m) =
            evolve_superposition(&[C64::new(0.5, 0.0); 4], 2, 2, phi, &lossless, t).unwrap();
        score = score.max(physicality(&reduced_optical_rho(&c, &m)));
        count += 6;
    }

    let mut gamma_monotone = true;
    for gamma in [0.0, 0.07, 0.5, 1.0, 2.0] {
        let g: Vec<f64> = linspace(0.0, 8.0 * PI, 1001)
            .into_iter()
            .map(|t| auxiliary(t, gamma).big_gamma)
            .collect();
        gamma_monotone &= g.windows(2).all(|w| w[1] >= w[0]);
    }

    let mut c_bounded = true;
    for _ in 0..1000 {
        let rank = rng.random_range(1..=4);
        let mut g = Matrix4::<C64>::zeros();
        for i in 0..4 {
            for j in 0..rank {
                g[(i, j)] = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
        }
        let m = g * g.adjoint();
        let tr = m.trace();
        let c = concurrence(&QubitDensityMatrix(m / tr)).unwrap().value;
        c_bounded &= (0.0..=1.0).contains(&c);
    }
    outcome(
        score <= 1.0 && gamma_monotone && c_bounded,
        format!(
            "worst violation/tolerance {score:.2e} over {count} matrices; Gamma nondecreasing: {gamma_monotone}; \
             C in [0,1] on 1000 random states: {c_bounded}"
        ),
    )
}

fn run_cli(dir: &Path, args: &[&str], out: &str) -> Vec<u8> {
    let path = dir.join(out);
    let status = Command::new(env!("CARGO_BIN_EXE_mim"))
        .args(args)
        .arg("--out")
        .arg(&path)
        .status()
        .unwrap();
    assert!(status.success(), "mim {args:?} exited with {status}");
    std::fs::read(path).unwrap()
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut parts = Vec::new();
    let mut passed = true;
    for cmd in [
        "unitary-entropy",
        "coupling-sweep",
        "qubit-entropy",
        "concurrence",
    ] {
        let a = run_cli(dir.path(), &[cmd], &format!("{cmd}-1.csv"));
        let b = run_cli(dir.path(), &[cmd], &format!("{cmd}-2.csv"));
        let s = run_cli(
            dir.path(),
            &[cmd, "--sequential"],
            &format!("{cmd}-seq.csv"),
        );
        let same = a == b && a == s;
        passed &= same;
        parts.push(format!(
            "{cmd}: {}",
            if same { "identical" } else { "differs" }
        ));
    }
    outcome(
        passed,
        format!("{} (repeat and --sequential)", parts.join(", ")),
    )
}

fn main() {
    let start = Instant::now();
    let mut oracle_physicality = f64::INFINITY;
    let c1 = criterion_1(&mut oracle_physicality);
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "oracle equivalence (dissipative)", c1),
        (2, "coefficient-ODE equivalence", criterion_2()),
        (3, "quadrature equivalence", criterion_3()),
        (4, "unitary limit", criterion_4()),
        (5, "revival entropy vanishes", criterion_5()),
        (6, "coupling sweep separability", criterion_6()),
        (7, "cat fidelity", criterion_7()),
        (8, "concurrence approximation and invariance", criterion_8()),
        (9, "physicality suite", criterion_9(oracle_physicality)),
        (10, "CLI determinism", criterion_10()),
    ];

    let mut unexpected = 0;
    for (n, name, o) in &results {
        let known = KNOWN_FAILURES.iter().find(|(k, _)| k == n);
        println!(
            "criterion {n:>2} {} {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        match (o.passed, known) {
            (false, Some((_, why))) => println!("             known failure: {why}"),
            (false, None) => unexpected += 1,
            (true, Some(_)) => println!("             listed as a known failure but passed"),
            (true, None) => {}
        }
    }
    let passed = results.iter().filter(|r| r.2.passed).count();
    println!(
        "acceptance: {passed}/{} passed, {unexpected} unexpected failure(s), {:.1}s",
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
