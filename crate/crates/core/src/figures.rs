//! Data series for the entropy, coupling-sweep and concurrence curves. Each
//! generator returns rows in a fixed order, independent of the execution
//! mode.

use std::f64::consts::PI;

use crate::dissipative::{qubit_linear_entropies, reduced_qubit_rho, Variant};
use crate::error::{Error, Result};
use crate::measures::concurrence;
use crate::model::{CoherentProductState, DimensionlessParams, FockCutoff};
use crate::par::{try_map_ordered, Execution};
use crate::unitary::{entropy_optical_at_tau, evolve_coherent, SplitEntropyKernel};
use crate::C64;

/// κ ∈ {1/2, 1/√6, 1/(2√2)}: the two-, three- and four-component cat couplings.
pub fn cat_couplings() -> [f64; 3] {
    [0.5, 1.0 / 6f64.sqrt(), 1.0 / (2.0 * 2f64.sqrt())]
}

/// γ ∈ {10⁻², 1/2, 1}.
pub const CONCURRENCE_GAMMAS: [f64; 3] = [1e-2, 0.5, 1.0];

pub const UNITARY_ENTROPY_POINTS: usize = 801;
pub const COUPLING_SWEEP_POINTS: usize = 401;
pub const QUBIT_ENTROPY_POINTS: usize = 301;
pub const CONCURRENCE_POINTS: usize = 1601;

/// `n` evenly spaced points from `a` to `b`, both ends included exactly.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| {
                if i + 1 == n {
                    b
                } else {
                    a + (b - a) * (i as f64 / (n - 1) as f64)
                }
            })
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitaryEntropyRow {
    pub t: f64,
    pub kappa: f64,
    pub s_l: f64,
}

/// S_L of the optical|mirror split over t ∈ [0, 4π], for each κ (k_a = k_b = κ).
pub fn unitary_entropy(
    base: &DimensionlessParams,
    state0: &CoherentProductState,
    cutoff: &FockCutoff,
    kappas: &[f64],
    points: usize,
    exec: Execution,
) -> Result<Vec<UnitaryEntropyRow>> {
    let times = linspace(0.0, 4.0 * PI, points);
    let mut rows = Vec::with_capacity(times.len() * kappas.len());
    for &kappa in kappas {
        let p = base.with_couplings(kappa, kappa)?;
        // |c_mn|² is constant, so one table fixes the kernel for all t
        let (table, _) = evolve_coherent(state0, &p, 0.0, cutoff)?;
        let kernel = SplitEntropyKernel::from_table(&table, &p);
        let values = try_map_ordered(&times, exec, |&t| Ok::<_, Error>(kernel.at(t)))?;
        rows.extend(
            times
                .iter()
                .zip(values)
                .map(|(&t, s_l)| UnitaryEntropyRow { t, kappa, s_l }),
        );
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingSweepRow {
    pub kappa: f64,
    pub q: u32,
    pub s_l: f64,
}

/// Optical-mode entropy at τ_q as a function of κ ∈ [0, 1].
pub fn coupling_sweep(
    base: &DimensionlessParams,
    state0: &CoherentProductState,
    cutoff: &FockCutoff,
    qs: &[u32],
    points: usize,
    exec: Execution,
) -> Result<Vec<CouplingSweepRow>> {
    let grid: Vec<(u32, f64)> = qs
        .iter()
        .flat_map(|&q| linspace(0.0, 1.0, points).into_iter().map(move |k| (q, k)))
        .collect();
    try_map_ordered(&grid, exec, |&(q, kappa)| {
        let p = base.with_couplings(kappa, kappa)?;
        Ok(CouplingSweepRow {
            kappa,
            q,
            s_l: entropy_optical_at_tau(q, &p, state0, cutoff)?,
        })
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitEntropyRow {
    pub gamma_t: f64,
    pub kappa: f64,
    pub s_l_ab: f64,
    pub s_l_c: f64,
}

/// S_L(ρ_AB) and S_L(ρ_C) for the |+⟩|+⟩ preparation against γt ∈ [0, 3].
pub fn qubit_entropy(
    base: &DimensionlessParams,
    kappas: &[f64],
    points: usize,
    exec: Execution,
) -> Result<Vec<QubitEntropyRow>> {
    let gamma = base.gamma();
    if gamma <= 0.0 {
        return Err(Error::invalid("gamma", "the γt axis needs gamma > 0"));
    }
    let scaled = linspace(0.0, 3.0, points);
    let grid: Vec<(f64, f64)> = kappas
        .iter()
        .flat_map(|&k| scaled.iter().map(move |&gt| (k, gt)))
        .collect();
    try_map_ordered(&grid, exec, |&(kappa, gamma_t)| {
        let p = base.with_couplings(kappa, kappa)?;
        let (s_l_ab, s_l_c) = qubit_linear_entropies(gamma_t / gamma, &p);
        Ok(QubitEntropyRow {
            gamma_t,
            kappa,
            s_l_ab,
            s_l_c,
        })
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcurrenceRow {
    pub t: f64,
    pub gamma: f64,
    pub c_exact: f64,
    pub c_approx: f64,
    pub delta_c: f64,
}

/// Exact and approximate concurrence of ρ_AB over t ∈ [0, 8π] for each γ.
pub fn concurrence_series(
    base: &DimensionlessParams,
    phi0: C64,
    gammas: &[f64],
    points: usize,
    exec: Execution,
) -> Result<Vec<ConcurrenceRow>> {
    let times = linspace(0.0, 8.0 * PI, points);
    let grid: Vec<(f64, f64)> = gammas
        .iter()
        .flat_map(|&g| times.iter().map(move |&t| (g, t)))
        .collect();
    try_map_ordered(&grid, exec, |&(gamma, t)| {
        let p = base.with_gamma(gamma)?;
        let c_exact = concurrence(&reduced_qubit_rho(t, &p, phi0, Variant::Exact))?.value;
        let c_approx = concurrence(&reduced_qubit_rho(t, &p, phi0, Variant::Approx))?.value;
        Ok(ConcurrenceRow {
            t,
            gamma,
            c_exact,
            c_approx,
            delta_c: c_exact - c_approx,
        })
    })
}
