//! Closed-form lossless dynamics from a coherent product state.
//!
//! With all three modes initially coherent, |α⟩|β⟩|φ⟩, the state stays of the
//! form Σ c_mn(t) |m⟩|n⟩|φ_mn(t)⟩: every optical Fock pair drags the mirror
//! into its own coherent state. At the revival times τ_q = 2qπ the mirror
//! returns to |φ⟩ for every pair and the optical modes are left in a (possibly
//! entangled) multi-component cat state.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::coherent::{coherent_fock_amplitudes, poisson_tail};
use crate::error::{Error, Result};
use crate::model::{CoherentProductState, DimensionlessParams, FockCutoff, POISSON_TAIL_TOLERANCE};
use crate::C64;

/// η(t) = 1 − e^{−it}.
#[inline]
pub fn eta(t: f64) -> C64 {
    C64::new(1.0 - t.cos(), t.sin())
}

/// Revival time τ_q = 2qπ.
#[inline]
pub fn revival_time(q: u32) -> f64 {
    2.0 * f64::from(q) * PI
}

/// κ_mn = k_a m − k_b n.
#[inline]
pub fn kappa(m: usize, n: usize, p: &DimensionlessParams) -> f64 {
    p.kappa(m, n)
}

/// Optical amplitudes c_mn(t) on the truncated grid m < n_a, n < n_b.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeAmplitudeTable {
    cutoff: FockCutoff,
    c: Vec<C64>,
    alpha_t: C64,
    beta_t: C64,
    t: f64,
}

impl TwoModeAmplitudeTable {
    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }
    pub fn t(&self) -> f64 {
        self.t
    }
    /// Drifted amplitude α(t).
    pub fn alpha_t(&self) -> C64 {
        self.alpha_t
    }
    /// Drifted amplitude β(t).
    pub fn beta_t(&self) -> C64 {
        self.beta_t
    }

    pub fn amplitude(&self, m: usize, n: usize) -> C64 {
        self.c[m * self.cutoff.n_b + n]
    }

    /// Row-major (m, n) amplitudes.
    pub fn amplitudes(&self) -> &[C64] {
        &self.c
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Row-major |c_mn|², renormalised to unit sum over the truncated grid.
    pub fn normalized_weights(&self) -> Vec<f64> {
        let total = self.norm_sqr();
        self.c.iter().map(|z| z.norm_sqr() / total).collect()
    }

    /// The optical state Σ c_mn |m, n⟩ as an (n_a, n_b) matrix.
    pub fn as_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.cutoff.n_a, self.cutoff.n_b, &self.c)
    }
}

/// Mirror amplitudes φ_mn(t) = φ e^{−it} + κ_mn η(t).
#[derive(Clone, Debug, PartialEq)]
pub struct MirrorAmplitudeTable {
    n_a: usize,
    n_b: usize,
    phi: Vec<C64>,
}

impl MirrorAmplitudeTable {
    pub fn amplitude(&self, m: usize, n: usize) -> C64 {
        self.phi[m * self.n_b + n]
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.phi
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_a, self.n_b)
    }
}

fn check_tails(state0: &CoherentProductState, cutoff: &FockCutoff, tolerance: f64) -> Result<()> {
    for (mode, amp, levels) in [
        ('A', state0.alpha(), cutoff.n_a),
        ('B', state0.beta(), cutoff.n_b),
    ] {
        let tail = poisson_tail(amp.norm_sqr(), levels);
        if tail >= tolerance {
            return Err(Error::CutoffInsufficient {
                mode,
                tail,
                tolerance,
            });
        }
    }
    Ok(())
}

/// Evolves |α⟩|β⟩|φ⟩ to time `t`, checking that the optical truncation keeps
/// the Poissonian tail below 1e-12.
pub fn evolve_coherent(
    state0: &CoherentProductState,
    p: &DimensionlessParams,
    t: f64,
    cutoff: &FockCutoff,
) -> Result<(TwoModeAmplitudeTable, MirrorAmplitudeTable)> {
    evolve_coherent_with_tolerance(state0, p, t, cutoff, POISSON_TAIL_TOLERANCE)
}

/// [`evolve_coherent`] with an explicit tail tolerance.
pub fn evolve_coherent_with_tolerance(
    state0: &CoherentProductState,
    p: &DimensionlessParams,
    t: f64,
    cutoff: &FockCutoff,
    tail_tolerance: f64,
) -> Result<(TwoModeAmplitudeTable, MirrorAmplitudeTable)> {
    check_tails(state0, cutoff, tail_tolerance)?;
    let (alpha, beta, phi) = (state0.alpha(), state0.beta(), state0.phi());
    let eta_t = eta(t);
    let drive = (phi * eta_t).im;
    // Both optical modes rotate as e^{-i r t}; the mirror adds a
    // state-dependent phase through κ_mn Im[φη].
    let alpha_t = alpha * C64::from_polar(1.0, -p.r_a * t + p.k_a * drive);
    let beta_t = beta * C64::from_polar(1.0, -p.r_b * t - p.k_b * drive);
    let kerr_time = t - t.sin();

    let fa = coherent_fock_amplitudes(alpha_t, cutoff.n_a);
    let fb = coherent_fock_amplitudes(beta_t, cutoff.n_b);
    let mut c = Vec::with_capacity(cutoff.n_a * cutoff.n_b);
    let mut mirror = Vec::with_capacity(cutoff.n_a * cutoff.n_b);
    let phi_rot = phi * C64::from_polar(1.0, -t);
    for (m, am) in fa.iter().enumerate() {
        for (n, bn) in fb.iter().enumerate() {
            let k = p.kappa(m, n);
            c.push(am * bn * C64::from_polar(1.0, k * k * kerr_time));
            mirror.push(phi_rot + k * eta_t);
        }
    }
    Ok((
        TwoModeAmplitudeTable {
            cutoff: *cutoff,
            c,
            alpha_t,
            beta_t,
            t,
        },
        MirrorAmplitudeTable {
            n_a: cutoff.n_a,
            n_b: cutoff.n_b,
            phi: mirror,
        },
    ))
}

/// The full truncated state vector Σ c_mn |m⟩|n⟩|φ_mn⟩ in the basis
/// ((a·n_b) + b)·n_c + c.
pub fn full_state_vector(
    table: &TwoModeAmplitudeTable,
    mirror: &MirrorAmplitudeTable,
    n_c: usize,
) -> DVector<C64> {
    let cut = table.cutoff;
    let mut psi = DVector::zeros(cut.n_a * cut.n_b * n_c);
    for m in 0..cut.n_a {
        for n in 0..cut.n_b {
            let base = (m * cut.n_b + n) * n_c;
            let cmn = table.amplitude(m, n);
            for (j, f) in coherent_fock_amplitudes(mirror.amplitude(m, n), n_c)
                .into_iter()
                .enumerate()
            {
                psi[base + j] = cmn * f;
            }
        }
    }
    psi
}

/// Evolves an arbitrary optical superposition Σ c_mn(0) |m⟩|n⟩ with the
/// mirror in |φ⟩. `c0` is row-major over an (n_a, n_b) grid.
///
/// c_mn(t) = c_mn(0) e^{−i(r_a m + r_b n)t} e^{iκ_mn Im[φη(t)]} e^{iκ_mn²(t − sin t)}.
pub fn evolve_superposition(
    c0: &[C64],
    n_a: usize,
    n_b: usize,
    phi: C64,
    p: &DimensionlessParams,
    t: f64,
) -> Result<(Vec<C64>, MirrorAmplitudeTable)> {
    if c0.len() != n_a * n_b {
        return Err(Error::invalid(
            "c0",
            format!("expected {} amplitudes, got {}", n_a * n_b, c0.len()),
        ));
    }
    let eta_t = eta(t);
    let drive = (phi * eta_t).im;
    let kerr_time = t - t.sin();
    let phi_rot = phi * C64::from_polar(1.0, -t);
    let mut c = Vec::with_capacity(c0.len());
    let mut mirror = Vec::with_capacity(c0.len());
    for m in 0..n_a {
        for n in 0..n_b {
            let k = p.kappa(m, n);
            let free = -(p.r_a * m as f64 + p.r_b * n as f64) * t;
            c.push(c0[m * n_b + n] * C64::from_polar(1.0, free + k * drive + k * k * kerr_time));
            mirror.push(phi_rot + k * eta_t);
        }
    }
    Ok((
        c,
        MirrorAmplitudeTable {
            n_a,
            n_b,
            phi: mirror,
        },
    ))
}

/// Reduced optical state Σ c_kl c*_mn ⟨φ_mn|φ_kl⟩ |k, l⟩⟨m, n| of a pure
/// state Σ c_mn |m⟩|n⟩|φ_mn⟩, indexed row-major like `c`.
pub fn reduced_optical_rho(c: &[C64], mirror: &MirrorAmplitudeTable) -> DMatrix<C64> {
    let d = c.len();
    DMatrix::from_fn(d, d, |i, j| {
        c[i] * c[j].conj() * coherent_inner(mirror.phi[j], mirror.phi[i])
    })
}

/// Linear entropy of the AB|C split as a function of time, for fixed optical
/// weights. Pairs that share a coupling value κ_mn are merged, so the double
/// sum runs over distinct κ only.
#[derive(Clone, Debug)]
pub struct SplitEntropyKernel {
    /// (κ, total weight) sorted by κ.
    groups: Vec<(f64, f64)>,
}

impl SplitEntropyKernel {
    pub fn new(weights: &[f64], n_b: usize, p: &DimensionlessParams) -> Self {
        let mut pairs: Vec<(f64, f64)> = weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(i, &w)| (p.kappa(i / n_b, i % n_b), w))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut groups: Vec<(f64, f64)> = Vec::new();
        for (k, w) in pairs {
            match groups.last_mut() {
                Some(last) if (k - last.0).abs() <= 1e-12 * k.abs().max(1.0) => last.1 += w,
                _ => groups.push((k, w)),
            }
        }
        Self { groups }
    }

    pub fn from_table(table: &TwoModeAmplitudeTable, p: &DimensionlessParams) -> Self {
        Self::new(&table.normalized_weights(), table.cutoff.n_b, p)
    }

    /// 1 − Σ w_i w_j e^{−(κ_i − κ_j)² |η(t)|²}.
    pub fn at(&self, t: f64) -> f64 {
        let e2 = eta(t).norm_sqr();
        let mut purity = 0.0;
        for (i, &(ki, wi)) in self.groups.iter().enumerate() {
            purity += wi * wi;
            for &(kj, wj) in &self.groups[i + 1..] {
                let d = ki - kj;
                purity += 2.0 * wi * wj * (-d * d * e2).exp();
            }
        }
        (1.0 - purity).clamp(0.0, 1.0)
    }
}

/// Linear entropy S_L(ρ_AB) = S_L(ρ_C) of the pure tripartite state.
pub fn linear_entropy_abc_split(table: &TwoModeAmplitudeTable, p: &DimensionlessParams) -> f64 {
    SplitEntropyKernel::from_table(table, p).at(table.t)
}

/// Linear entropy of one optical mode at the revival time τ_q, where the
/// mirror has factored out and ρ_AB is pure.
///
/// The quadruple sum over (k, l, m, n) only depends on k − m and l − n, so it
/// is regrouped over the two difference distributions.
pub fn entropy_optical_at_tau(
    q: u32,
    p: &DimensionlessParams,
    state0: &CoherentProductState,
    cutoff: &FockCutoff,
) -> Result<f64> {
    if q == 0 {
        return Err(Error::invalid("q", "revival index must be >= 1"));
    }
    check_tails(state0, cutoff, POISSON_TAIL_TOLERANCE)?;
    let wa = poisson_weights(state0.alpha().norm_sqr(), cutoff.n_a);
    let wb = poisson_weights(state0.beta().norm_sqr(), cutoff.n_b);
    let da = difference_distribution(&wa);
    let db = difference_distribution(&wb);
    let omega = 2.0 * p.k_a * p.k_b * revival_time(q);
    let (oa, ob) = (wa.len() as i64 - 1, wb.len() as i64 - 1);
    let mut purity = 0.0;
    for (i, pa) in da.iter().enumerate() {
        let d1 = i as i64 - oa;
        for (j, pb) in db.iter().enumerate() {
            let d2 = j as i64 - ob;
            purity += pa * pb * (omega * (d1 * d2) as f64).cos();
        }
    }
    Ok((1.0 - purity).clamp(0.0, 1.0))
}

/// Normalised Poisson weights over `len` levels.
fn poisson_weights(mean: f64, len: usize) -> Vec<f64> {
    let w: Vec<f64> = coherent_fock_amplitudes(C64::new(mean.sqrt(), 0.0), len)
        .into_iter()
        .map(|z| z.norm_sqr())
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// P(d) = Σ_k w_k w_{k−d} for d = −(len−1)..=(len−1), stored at index d + len − 1.
fn difference_distribution(w: &[f64]) -> Vec<f64> {
    let n = w.len();
    let mut out = vec![0.0; 2 * n - 1];
    for (k, wk) in w.iter().enumerate() {
        for (m, wm) in w.iter().enumerate() {
            out[k + n - 1 - m] += wk * wm;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatComponent {
    pub weight: C64,
    pub alpha: C64,
    pub beta: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatDecomposition {
    pub components: Vec<CatComponent>,
    /// |⟨cat|χ⟩|² / (⟨cat|cat⟩⟨χ|χ⟩) against the truncated Fock expansion.
    pub fidelity: f64,
}

impl CatDecomposition {
    /// Σ_j w_j |α_j⟩|β_j⟩ expanded on an (n_a, n_b) Fock grid, row-major.
    pub fn fock_expansion(&self, n_a: usize, n_b: usize) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); n_a * n_b];
        for comp in &self.components {
            let fa = coherent_fock_amplitudes(comp.alpha, n_a);
            let fb = coherent_fock_amplitudes(comp.beta, n_b);
            for (m, am) in fa.iter().enumerate() {
                for (n, bn) in fb.iter().enumerate() {
                    out[m * n_b + n] += comp.weight * am * bn;
                }
            }
        }
        out
    }
}

fn state_fidelity(target: &[C64], candidate: &[C64]) -> f64 {
    let overlap: C64 = candidate
        .iter()
        .zip(target)
        .map(|(a, b)| a.conj() * b)
        .sum();
    let na: f64 = candidate.iter().map(|z| z.norm_sqr()).sum();
    let nb: f64 = target.iter().map(|z| z.norm_sqr()).sum();
    (overlap.norm_sqr() / (na * nb)).clamp(0.0, 1.0)
}

/// The two-component cat obtained at τ_q for k_a = k_b = 1/2:
/// (1 + e^{iτ_q/4})/2 |α, β⟩ + (1 − e^{iτ_q/4})/2 |−α, −β⟩ with the drifted
/// amplitudes α(τ_q), β(τ_q). Odd q gives a genuine cat, even q a product.
pub fn cat_two_component(
    q: u32,
    state0: &CoherentProductState,
    p: &DimensionlessParams,
    cutoff: &FockCutoff,
) -> Result<CatDecomposition> {
    if (p.k_a - 0.5).abs() > 1e-12 || (p.k_b - 0.5).abs() > 1e-12 {
        return Err(Error::InvalidCoupling {
            k_a: p.k_a,
            k_b: p.k_b,
        });
    }
    if q == 0 {
        return Err(Error::invalid("q", "revival index must be >= 1"));
    }
    let tau = revival_time(q);
    let (table, _) = evolve_coherent(state0, p, tau, cutoff)?;
    let phase = C64::from_polar(1.0, tau / 4.0);
    let (a, b) = (table.alpha_t, table.beta_t);
    let mut cat = CatDecomposition {
        components: vec![
            CatComponent {
                weight: (1.0 + phase) / 2.0,
                alpha: a,
                beta: b,
            },
            CatComponent {
                weight: (1.0 - phase) / 2.0,
                alpha: -a,
                beta: -b,
            },
        ],
        fidelity: 0.0,
    };
    cat.fidelity = state_fidelity(
        table.amplitudes(),
        &cat.fock_expansion(cutoff.n_a, cutoff.n_b),
    );
    Ok(cat)
}

/// ⟨x|y⟩ for coherent states.
fn coherent_inner(x: C64, y: C64) -> C64 {
    (-(x.norm_sqr() + y.norm_sqr()) / 2.0 + x.conj() * y).exp()
}

/// Least-squares fit of an `n_components`-component two-mode cat onto the
/// optical state at a revival time.
///
/// Candidate components are (α(τ) ω_j, β(τ) ω_j^{∓1}) with ω_j running over
/// the N-th roots of unity, or over the N-th roots of −1. The β rotation runs
/// against α's whenever k_a k_b > 0, because the revival phase then depends on
/// k_a m − k_b n only through the photon-number difference. Weights solve the
/// normal equations in the non-orthogonal coherent frame with the analytic
/// Gram matrix; the better of the two families is returned.
pub fn cat_fit(
    table: &TwoModeAmplitudeTable,
    n_components: usize,
    p: &DimensionlessParams,
) -> Result<CatDecomposition> {
    if !(2..=4).contains(&n_components) {
        return Err(Error::invalid(
            "component_count",
            format!("must be 2, 3 or 4, got {n_components}"),
        ));
    }
    let counter = if p.k_a * p.k_b > 0.0 { -1.0 } else { 1.0 };
    let mut best: Option<CatDecomposition> = None;
    let mut last_err = None;
    for offset in [0.0, PI / n_components as f64] {
        let components: Vec<CatComponent> = (0..n_components)
            .map(|j| {
                let angle = 2.0 * PI * j as f64 / n_components as f64 + offset;
                CatComponent {
                    weight: C64::new(0.0, 0.0),
                    alpha: table.alpha_t * C64::from_polar(1.0, angle),
                    beta: table.beta_t * C64::from_polar(1.0, counter * angle),
                }
            })
            .collect();
        match fit_weights(table, components) {
            Ok(fit) => {
                if best.as_ref().is_none_or(|b| fit.fidelity > b.fidelity) {
                    best = Some(fit);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.expect("at least one family was tried"))
}

fn fit_weights(
    table: &TwoModeAmplitudeTable,
    mut components: Vec<CatComponent>,
) -> Result<CatDecomposition> {
    let n = components.len();
    let cut = table.cutoff;
    let gram = DMatrix::from_fn(n, n, |i, j| {
        coherent_inner(components[i].alpha, components[j].alpha)
            * coherent_inner(components[i].beta, components[j].beta)
    });
    let eig = nalgebra::linalg::SymmetricEigen::new(gram.clone()).eigenvalues;
    let (lo, hi) = eig
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(lo > 1e-12 * hi) {
        return Err(Error::IllConditionedFit {
            condition: if lo > 0.0 { hi / lo } else { f64::INFINITY },
        });
    }

    let target = table.amplitudes();
    let projections = DVector::from_iterator(
        n,
        components.iter().map(|comp| {
            let fa = coherent_fock_amplitudes(comp.alpha, cut.n_a);
            let fb = coherent_fock_amplitudes(comp.beta, cut.n_b);
            let mut acc = C64::new(0.0, 0.0);
            for (m, am) in fa.iter().enumerate() {
                for (k, bk) in fb.iter().enumerate() {
                    acc += (am * bk).conj() * target[m * cut.n_b + k];
                }
            }
            acc
        }),
    );
    let weights = gram
        .clone()
        .lu()
        .solve(&projections)
        .ok_or(Error::IllConditionedFit {
            condition: f64::INFINITY,
        })?;
    for (comp, w) in components.iter_mut().zip(weights.iter()) {
        comp.weight = *w;
    }
    let captured = projections.dotc(&weights).re;
    let fidelity = (captured / table.norm_sqr()).clamp(0.0, 1.0);
    Ok(CatDecomposition {
        components,
        fidelity,
    })
}
