//! Fock-basis helpers for coherent states.

use crate::C64;

/// Fock amplitudes ⟨n|z⟩ = e^{-|z|²/2} zⁿ/√n! for n < `len`.
pub fn coherent_fock_amplitudes(z: C64, len: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(len);
    let mut a = C64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    for n in 0..len {
        if n > 0 {
            a = a * z / (n as f64).sqrt();
        }
        out.push(a);
    }
    out
}

/// Poisson probability mass e^{-mean} meanᵏ/k!, evaluated in log space.
fn poisson_pmf(mean: f64, k: usize) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let mut log_fact = 0.0;
    for j in 2..=k {
        log_fact += (j as f64).ln();
    }
    (k as f64 * mean.ln() - mean - log_fact).exp()
}

/// Probability mass Σ_{k ≥ n} of a Poisson distribution with the given mean,
/// i.e. the weight a coherent state with |z|² = mean places at or above Fock
/// level `n`. Summed directly rather than as `1 - head` so that tiny tails
/// keep their relative precision.
pub fn poisson_tail(mean: f64, n: usize) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let mut term = poisson_pmf(mean, n);
    let mut sum = 0.0;
    let mut k = n;
    loop {
        sum += term;
        k += 1;
        term *= mean / k as f64;
        if (k as f64) > mean && term <= sum * 1e-18 {
            break;
        }
        if term == 0.0 && (k as f64) > mean {
            break;
        }
    }
    sum
}

/// Smallest number of Fock levels whose Poisson tail is below `tolerance`.
pub fn minimal_cutoff(mean: f64, tolerance: f64) -> usize {
    let mut n = 1;
    while poisson_tail(mean, n) >= tolerance {
        n += 1;
    }
    n
}
