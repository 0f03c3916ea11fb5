//! Cross-validation of the closed forms against the brute-force oracles.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;

use crate::dissipative::{
    auxiliary, eta_gamma, evolve_coefficients, phi_kl_gamma, qubit_coefficients,
    qubit_linear_entropies, reduced_qubit_rho, rho_coefficient, QubitDensityMatrix, Variant,
};
use crate::error::Result;
use crate::figures::linspace;
use crate::measures::concurrence;
use crate::model::{CoherentProductState, DimensionlessParams, FockCutoff, SimulationConfig};
use crate::oracle::{
    integrate_coefficient_ode, integrate_lindblad, integrate_mirror_amplitude, partial_trace,
    quadrature_xi_gamma, FockDensityMatrix, FockStateVector, IntegratorConfig, Mode,
};
use crate::par::{try_map_ordered, Execution};
use crate::unitary::{
    eta, evolve_coherent, evolve_superposition, reduced_optical_rho, SplitEntropyKernel,
};
use crate::{coherent_fock_amplitudes, C64};

/// Source of the closed-form two-qubit matrix under test.
pub trait QubitClosedForm: Sync {
    fn reduced_rho(&self, t: f64, p: &DimensionlessParams, phi0: C64) -> QubitDensityMatrix;
}

/// The exact solution.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactClosedForm;

impl QubitClosedForm for ExactClosedForm {
    fn reduced_rho(&self, t: f64, p: &DimensionlessParams, phi0: C64) -> QubitDensityMatrix {
        reduced_qubit_rho(t, p, phi0, Variant::Exact)
    }
}

pub mod tolerance {
    pub const QUADRATURE: f64 = 1e-9;
    pub const COEFFICIENT_ODE: f64 = 1e-8;
    pub const MIRROR_ODE: f64 = 1e-10;
    pub const LINDBLAD: f64 = 1e-6;
    pub const CONCURRENCE: f64 = 1e-6;
    pub const UNITARY_LIMIT: f64 = 1e-8;
    pub const TRACE: f64 = 1e-9;
    pub const HERMITICITY: f64 = 1e-12;
    pub const MIN_EIGENVALUE: f64 = -1e-8;
}

/// γ used to probe the lossless limit of the damped formulas.
pub const UNITARY_LIMIT_GAMMA: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &'static str, max_deviation: f64, tolerance: f64) -> Self {
        Self {
            name,
            max_deviation,
            tolerance,
            passed: max_deviation <= tolerance,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<44} max deviation {:.3e} (tolerance {:.0e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_deviation,
            self.tolerance
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

pub const QUADRATURE_CHECK: &str = "quadrature vs auxiliary closed forms";
pub const COEFFICIENT_CHECK: &str = "coefficient ODE vs closed form";
pub const MIRROR_CHECK: &str = "mirror amplitude ODE vs closed form";
pub const LINDBLAD_FULL_CHECK: &str = "Lindblad vs ansatz (full state)";
pub const LINDBLAD_AB_CHECK: &str = "Lindblad vs closed-form rho_AB";
pub const CONCURRENCE_CHECK: &str = "partial-trace vs closed-form concurrence";
pub const UNITARY_LIMIT_CHECK: &str = "unitary limit";
pub const UNITARY_LIMIT_AB_CHECK: &str = "unitary limit of closed-form rho_AB";
pub const PHYSICALITY_CHECK: &str = "physicality of density matrices";

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationOptions {
    pub integrator: IntegratorConfig,
    /// Oracle sample times for the qubit scenario.
    pub lindblad_samples: Vec<f64>,
    /// Side of the (t, γ) grid on [0, 4π] × [0, 1] for the quadrature check.
    pub quadrature_grid: usize,
    /// Times for the coefficient-ODE check.
    pub ode_times: Vec<f64>,
    /// Number of times on [0, 4π] for the unitary-limit check.
    pub limit_points: usize,
    pub exec: Execution,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            integrator: IntegratorConfig::new(1e-2, 1e-8).expect("valid defaults"),
            lindblad_samples: (1..=12).map(|i| 4.0 * PI * f64::from(i) / 12.0).collect(),
            quadrature_grid: 20,
            ode_times: vec![1.0, PI, 2.0 * PI, 4.0 * PI],
            limit_points: 41,
            exec: Execution::default(),
        }
    }
}

const QUBIT_TUPLES: [(usize, usize, usize, usize); 16] = {
    let mut out = [(0, 0, 0, 0); 16];
    let mut i = 0;
    while i < 16 {
        out[i] = ((i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1);
        i += 1;
    }
    out
};

fn max_entry(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn to_dmatrix(rho: &QubitDensityMatrix) -> DMatrix<C64> {
    DMatrix::from_iterator(4, 4, rho.iter().copied())
}

/// Worst violation among trace, Hermiticity and positivity, each measured in
/// units of its own tolerance (so ≤ 1 means physical).
fn physicality_score(m: &DMatrix<C64>) -> Result<f64> {
    let tr = (m.trace() - 1.0).norm() / tolerance::TRACE;
    let herm = max_entry(&(m - m.adjoint())) / tolerance::HERMITICITY;
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let min_eig = nalgebra::SymmetricEigen::try_new(h, f64::EPSILON, 0)
        .ok_or(crate::Error::NonConvergedEigen)?
        .eigenvalues
        .min();
    let pos = (-min_eig).max(0.0) / -tolerance::MIN_EIGENVALUE;
    Ok(tr.max(herm).max(pos))
}

/// Integration error leaves eigenvalues of order −10⁻¹⁰ on nearly pure
/// oracle states; clip them (the physicality check bounds how negative they
/// were) and renormalise.
fn clip_to_state(m: &DMatrix<C64>) -> Result<QubitDensityMatrix> {
    let h = nalgebra::Matrix4::from_iterator(m.iter().copied());
    let h = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::try_new(h, f64::EPSILON, 0)
        .ok_or(crate::Error::NonConvergedEigen)?;
    let vals = eig.eigenvalues.map(|l| l.max(0.0));
    let total = vals.sum();
    let u = eig.eigenvectors;
    let d = nalgebra::Matrix4::from_diagonal(&vals.map(|l| C64::new(l / total, 0.0)));
    Ok(QubitDensityMatrix(u * d * u.adjoint()))
}

/// Closed-form ξ, Γ against direct quadrature.
pub fn check_quadrature(n: usize, exec: Execution) -> Result<Check> {
    let grid: Vec<(f64, f64)> = linspace(0.0, 4.0 * PI, n)
        .into_iter()
        .flat_map(|t| linspace(0.0, 1.0, n).into_iter().map(move |g| (t, g)))
        .collect();
    let devs = try_map_ordered(&grid, exec, |&(t, g)| {
        let (xi, big_gamma) = quadrature_xi_gamma(t, g)?;
        let aux = auxiliary(t, g);
        Ok::<_, crate::Error>(
            (xi.re - aux.xi_re)
                .abs()
                .max((xi.im - aux.xi_im).abs())
                .max((big_gamma - aux.big_gamma).abs()),
        )
    })?;
    Ok(Check::new(
        QUADRATURE_CHECK,
        devs.into_iter().fold(0.0, f64::max),
        tolerance::QUADRATURE,
    ))
}

/// ρ_{km,ln}(t)/ρ_{km,ln}(0) against the integrated logarithmic derivative,
/// for all sixteen qubit index tuples.
pub fn check_coefficient_ode(
    p: &DimensionlessParams,
    phi0: C64,
    times: &[f64],
    exec: Execution,
) -> Result<Check> {
    let jobs: Vec<(f64, (usize, usize, usize, usize))> = times
        .iter()
        .flat_map(|&t| QUBIT_TUPLES.iter().map(move |&idx| (t, idx)))
        .collect();
    let devs = try_map_ordered(&jobs, exec, |&(t, (k, m, l, n))| {
        let closed = rho_coefficient(k, m, l, n, t, p, C64::new(1.0, 0.0), phi0);
        let ode = integrate_coefficient_ode(k, m, l, n, t, p, phi0)?;
        Ok::<_, crate::Error>((closed - ode).norm())
    })?;
    Ok(Check::new(
        COEFFICIENT_CHECK,
        devs.into_iter().fold(0.0, f64::max),
        tolerance::COEFFICIENT_ODE,
    ))
}

/// φ_kl(t) against direct integration of its equation of motion.
pub fn check_mirror_ode(p: &DimensionlessParams, phi0: C64, times: &[f64]) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for &t in times {
        for (k, l) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let ode = integrate_mirror_amplitude(p.kappa(k, l), p.gamma(), phi0, t)?;
            worst = worst.max((ode - phi_kl_gamma(k, l, t, p, phi0)).norm());
        }
    }
    Ok(Check::new(MIRROR_CHECK, worst, tolerance::MIRROR_ODE))
}

/// |+⟩|+⟩|φ⟩ on a qubit cutoff with `n_c` mirror levels, renormalised after
/// truncation of the mirror.
pub fn qubit_initial_state(phi0: C64, n_c: usize) -> Result<FockDensityMatrix> {
    let plus = [C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0); 2];
    let psi = FockStateVector::product(&plus, &plus, &coherent_fock_amplitudes(phi0, n_c))?;
    Ok(FockDensityMatrix::from_pure(&psi.normalized()))
}

/// Oracle comparisons for the qubit preparation: full state against the
/// ansatz, ρ_AB against the closed form, and concurrence of both.
pub fn check_lindblad(
    p: &DimensionlessParams,
    phi0: C64,
    n_c: usize,
    opts: &ValidationOptions,
    closed: &dyn QubitClosedForm,
) -> Result<[Check; 4]> {
    let rho0 = qubit_initial_state(phi0, n_c)?;
    let t_end = opts.lindblad_samples.iter().copied().fold(0.0, f64::max);
    let states = integrate_lindblad(&rho0, p, &opts.integrator, t_end, &opts.lindblad_samples)?;
    let per_sample = try_map_ordered(
        &opts
            .lindblad_samples
            .iter()
            .copied()
            .zip(states.iter())
            .collect::<Vec<_>>(),
        opts.exec,
        |&(t, rho)| {
            let ansatz = qubit_coefficients(t, p, phi0).to_fock(n_c)?;
            let full = rho.max_abs_diff(ansatz.matrix());
            let ab_oracle = partial_trace(rho, &[Mode::A, Mode::B]);
            let ab_closed = closed.reduced_rho(t, p, phi0);
            let ab = max_entry(&(&ab_oracle - to_dmatrix(&ab_closed)));
            let c_oracle = concurrence(&clip_to_state(&ab_oracle)?)?.value;
            let c_closed = concurrence(&ab_closed)?.value;
            let phys = physicality_score(rho.matrix())?
                .max(physicality_score(ansatz.matrix())?)
                .max(physicality_score(&ab_oracle)?);
            Ok::<_, crate::Error>([full, ab, (c_oracle - c_closed).abs(), phys])
        },
    )?;
    let worst = |i: usize| per_sample.iter().map(|d| d[i]).fold(0.0, f64::max);
    Ok([
        Check::new(LINDBLAD_FULL_CHECK, worst(0), tolerance::LINDBLAD),
        Check::new(LINDBLAD_AB_CHECK, worst(1), tolerance::LINDBLAD),
        Check::new(CONCURRENCE_CHECK, worst(2), tolerance::CONCURRENCE),
        // score ≤ 1 is physical
        Check::new(PHYSICALITY_CHECK, worst(3), 1.0),
    ])
}

/// Every damped closed form at γ = 10⁻¹² against its lossless counterpart,
/// over `points` times on [0, 4π].
pub fn check_unitary_limit(
    p: &DimensionlessParams,
    state0: &CoherentProductState,
    cutoff: &FockCutoff,
    points: usize,
    closed: &dyn QubitClosedForm,
    exec: Execution,
) -> Result<[Check; 2]> {
    let p0 = p.with_gamma(UNITARY_LIMIT_GAMMA)?;
    let phi0 = state0.phi();
    let (table0, _) = evolve_coherent(state0, &p0, 0.0, cutoff)?;
    let (na, nb) = (cutoff.n_a(), cutoff.n_b());
    let c0 = table0.amplitudes().to_vec();
    let qubit_kernel = SplitEntropyKernel::new(&[0.25; 4], 2, &p0);
    let times = linspace(0.0, 4.0 * PI, points);
    let devs = try_map_ordered(&times, exec, |&t| {
        let mut worst: f64 = 0.0;
        let aux = auxiliary(t, p0.gamma());
        worst = worst
            .max((aux.xi_re - (t - t.sin())).abs())
            .max((aux.xi_im - (1.0 - t.cos())).abs())
            .max(aux.big_gamma.abs())
            .max((eta_gamma(t, p0.gamma()) - eta(t)).norm());

        // qubit preparation
        let half = C64::new(0.5, 0.0);
        let (cq, mq) = evolve_superposition(&[half; 4], 2, 2, phi0, &p0, t)?;
        let pure_ab = reduced_optical_rho(&cq, &mq);
        let worst_ab = max_entry(&(pure_ab - to_dmatrix(&closed.reduced_rho(t, &p0, phi0))));
        let (s_ab, s_c) = qubit_linear_entropies(t, &p0);
        let s_pure = qubit_kernel.at(t);
        worst = worst.max((s_ab - s_pure).abs()).max((s_c - s_pure).abs());

        // coherent preparation
        let (table, mirror) = evolve_coherent(state0, &p0, t, cutoff)?;
        let coeffs = evolve_coefficients(
            na,
            nb,
            |k, m, l, n| c0[k * nb + l] * c0[m * nb + n].conj(),
            t,
            &p0,
            phi0,
            Execution::Sequential,
        );
        for k in 0..na {
            for l in 0..nb {
                worst = worst.max((coeffs.phi(k, l) - mirror.amplitude(k, l)).norm());
                let ckl = table.amplitude(k, l);
                for m in 0..na {
                    for n in 0..nb {
                        let want = ckl * table.amplitude(m, n).conj();
                        worst = worst.max((coeffs.rho(k, m, l, n) - want).norm());
                    }
                }
            }
        }
        Ok::<_, crate::Error>((worst, worst_ab))
    })?;
    Ok([
        Check::new(
            UNITARY_LIMIT_CHECK,
            devs.iter().map(|d| d.0).fold(0.0, f64::max),
            tolerance::UNITARY_LIMIT,
        ),
        Check::new(
            UNITARY_LIMIT_AB_CHECK,
            devs.iter().map(|d| d.1).fold(0.0, f64::max),
            tolerance::UNITARY_LIMIT,
        ),
    ])
}

/// Physicality of the closed-form ρ_AB over [0, 4π].
fn closed_form_physicality(
    p: &DimensionlessParams,
    phi0: C64,
    closed: &dyn QubitClosedForm,
    exec: Execution,
) -> Result<f64> {
    let times = linspace(0.0, 4.0 * PI, 201);
    let scores = try_map_ordered(&times, exec, |&t| {
        physicality_score(&to_dmatrix(&closed.reduced_rho(t, p, phi0)))
    })?;
    Ok(scores.into_iter().fold(0.0, f64::max))
}

/// Runs the whole suite for a configuration.
pub fn run_validation(
    cfg: &SimulationConfig,
    opts: &ValidationOptions,
) -> Result<ValidationReport> {
    run_validation_with(cfg, opts, &ExactClosedForm)
}

/// [`run_validation`] with a substitute closed form for ρ_AB.
pub fn run_validation_with(
    cfg: &SimulationConfig,
    opts: &ValidationOptions,
    closed: &dyn QubitClosedForm,
) -> Result<ValidationReport> {
    let p = cfg.params()?;
    let phi0 = cfg.qubit_state()?.phi();
    let state0 = cfg.coherent_state()?;
    let cutoff = cfg.cutoff()?;
    let n_c = cutoff.n_c();

    let mut checks = vec![
        check_quadrature(opts.quadrature_grid, opts.exec)?,
        check_coefficient_ode(&p, phi0, &opts.ode_times, opts.exec)?,
        check_mirror_ode(&p, phi0, &opts.ode_times)?,
    ];
    let [full, ab, conc, mut phys] = check_lindblad(&p, phi0, n_c, opts, closed)?;
    checks.extend([full, ab, conc]);
    checks.extend(check_unitary_limit(
        &p,
        &state0,
        &cutoff,
        opts.limit_points,
        closed,
        opts.exec,
    )?);
    let closed_score = closed_form_physicality(&p, phi0, closed, opts.exec)?;
    phys = Check::new(PHYSICALITY_CHECK, phys.max_deviation.max(closed_score), 1.0);
    checks.push(phys);
    Ok(ValidationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_tuples_cover_all_indices() {
        let mut seen = std::collections::HashSet::new();
        for t in QUBIT_TUPLES {
            assert!(t.0 < 2 && t.1 < 2 && t.2 < 2 && t.3 < 2);
            seen.insert(t);
        }
        assert_eq!(seen.len(), 16);
    }

    #[test]
    fn check_display() {
        let c = Check::new("x", 1e-9, 1e-8);
        assert!(c.passed);
        assert!(c.to_string().starts_with("PASS x"));
        assert!(!Check::new("y", 1e-7, 1e-8).passed);
    }

    #[test]
    fn physicality_score_flags_bad_matrices() {
        let good = DMatrix::<C64>::identity(4, 4) * C64::new(0.25, 0.0);
        assert!(physicality_score(&good).unwrap() <= 1.0);
        let bad = DMatrix::<C64>::identity(4, 4) * C64::new(0.3, 0.0);
        assert!(physicality_score(&bad).unwrap() > 1.0);
    }
}
