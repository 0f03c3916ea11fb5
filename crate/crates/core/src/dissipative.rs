//! Exact solution of the master equation with zero-temperature mechanical
//! damping at rate γ.
//!
//! The density operator keeps the form
//!
//! ρ(t) = Σ ρ_{km,ln}(t) |k⟩⟨m| ⊗ |l⟩⟨n| ⊗ |φ_kl(t)⟩⟨φ_mn(t)|,
//!
//! where φ_kl relaxes towards κ_kl i/(i + γ/2) and the scalar coefficients pick
//! up phases and a decay set by the auxiliary integrals ξ(t) = ∫η and
//! Γ(t) = (γ/2)∫|η|².

use nalgebra::{Matrix4, SymmetricEigen};

use crate::coherent::coherent_fock_amplitudes;
use crate::error::{Error, Result};
use crate::model::{DimensionlessParams, FockCutoff};
use crate::oracle::FockDensityMatrix;
use crate::par::{map_ordered, Execution};
use crate::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// η^γ(t) = [i/(i+γ/2)] [1 − e^{−(i+γ/2)t}].
pub fn eta_gamma(t: f64, gamma: f64) -> C64 {
    let s = C64::new(gamma / 2.0, 1.0);
    I / s * (1.0 - (-s * t).exp())
}

/// Long-time limit η^γ(∞) = i/(i+γ/2).
pub fn eta_gamma_infinity(gamma: f64) -> C64 {
    I / C64::new(gamma / 2.0, 1.0)
}

/// Closed-form values of ξ(t) = ∫₀ᵗ η^γ and Γ(t) = (γ/2)∫₀ᵗ |η^γ|², plus the
/// damped trigonometric helpers they are built from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuxiliaryFunctions {
    pub eta_g: C64,
    pub xi_re: f64,
    pub xi_im: f64,
    pub big_gamma: f64,
    /// e^{−γt/2} sin t
    pub s_g: f64,
    /// e^{−γt/2} cos t
    pub c_g: f64,
}

pub fn auxiliary(t: f64, gamma: f64) -> AuxiliaryFunctions {
    let decay = (-gamma * t / 2.0).exp();
    let s_g = decay * t.sin();
    let c_g = decay * t.cos();
    let d = 1.0 + gamma * gamma / 4.0;
    let a = 1.0 - gamma * gamma / 4.0;
    let one_minus_c = 1.0 - c_g;
    let xi_re = (t - a / d * s_g - gamma / d * one_minus_c) / d;
    let xi_im = (gamma * t / 2.0 + a / d * one_minus_c - gamma / d * s_g) / d;
    let big_gamma = (gamma * t / 2.0
        - (-gamma * t).exp_m1() / 2.0
        - gamma / d * s_g
        - gamma * gamma / 2.0 / d * one_minus_c)
        / d;
    AuxiliaryFunctions {
        eta_g: eta_gamma(t, gamma),
        xi_re,
        xi_im,
        big_gamma,
        s_g,
        c_g,
    }
}

/// φ^γ_kl(t) = φ e^{−(i+γ/2)t} + κ_kl η^γ(t).
pub fn phi_kl_gamma(k: usize, l: usize, t: f64, p: &DimensionlessParams, phi0: C64) -> C64 {
    let s = C64::new(p.gamma / 2.0, 1.0);
    phi0 * (-s * t).exp() + p.kappa(k, l) * eta_gamma(t, p.gamma)
}

/// Coherent-phase function ζ_φ(t), entering ρ_{km,ln} as e^{i(κ_kl − κ_mn)ζ}.
pub fn zeta_phi(t: f64, p: &DimensionlessParams, phi0: C64) -> f64 {
    zeta_from(&auxiliary(t, p.gamma), t, p.gamma, phi0)
}

fn zeta_from(aux: &AuxiliaryFunctions, t: f64, gamma: f64, phi0: C64) -> f64 {
    let r = phi0.norm();
    if r == 0.0 {
        return 0.0;
    }
    let (s, c) = phi0.arg().sin_cos();
    r * (t * c - (c + 1.5 * gamma * s) * aux.xi_re
        + (s + 0.5 * gamma * c) * aux.xi_im
        + 2.0 * (s - 0.5 * gamma * c) * aux.big_gamma)
}

/// μ_φ(t), the overlap phase that joins ζ_φ in the qubit functions a(t), b(t).
pub fn mu_phi(t: f64, p: &DimensionlessParams, phi0: C64) -> f64 {
    mu_from(eta_gamma(t, p.gamma), p.gamma, phi0)
}

fn mu_from(eta_g: C64, gamma: f64, phi0: C64) -> f64 {
    let r = phi0.norm();
    if r == 0.0 {
        return 0.0;
    }
    let (s, c) = phi0.arg().sin_cos();
    r * (c * eta_g.im - s * eta_g.re + (s - 0.5 * gamma * c) * eta_g.norm_sqr())
}

/// ρ^γ_{km,ln}(t) from its initial value.
#[allow(clippy::too_many_arguments)]
pub fn rho_coefficient(
    k: usize,
    m: usize,
    l: usize,
    n: usize,
    t: f64,
    p: &DimensionlessParams,
    rho0_elem: C64,
    phi0: C64,
) -> C64 {
    CoefficientEvaluator::new(t, p, phi0).coefficient(k, m, l, n, rho0_elem)
}

/// Caches the time-dependent pieces shared by every coefficient at one t.
#[derive(Clone, Copy, Debug)]
pub struct CoefficientEvaluator {
    t: f64,
    p: DimensionlessParams,
    aux: AuxiliaryFunctions,
    zeta: f64,
}

impl CoefficientEvaluator {
    pub fn new(t: f64, p: &DimensionlessParams, phi0: C64) -> Self {
        let aux = auxiliary(t, p.gamma);
        Self {
            t,
            p: *p,
            aux,
            zeta: zeta_from(&aux, t, p.gamma, phi0),
        }
    }

    pub fn auxiliary(&self) -> &AuxiliaryFunctions {
        &self.aux
    }

    pub fn coefficient(&self, k: usize, m: usize, l: usize, n: usize, rho0_elem: C64) -> C64 {
        let p = &self.p;
        let free = -self.t * (p.r_a * (k as f64 - m as f64) + p.r_b * (l as f64 - n as f64));
        let (kkl, kmn) = (p.kappa(k, l), p.kappa(m, n));
        let kerr = (kkl * kkl - kmn * kmn) * self.aux.xi_re;
        let delta = kkl - kmn;
        if delta == 0.0 {
            return rho0_elem * C64::from_polar(1.0, free + kerr);
        }
        let decay = (-delta * delta * self.aux.big_gamma).exp();
        rho0_elem * C64::from_polar(decay, free + kerr + delta * self.zeta)
    }
}

/// Coefficient table ρ_{km,ln}(t) and mirror amplitudes φ_kl(t) on an
/// (n_a, n_b) optical grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DissipativeCoefficients {
    n_a: usize,
    n_b: usize,
    rho: Vec<C64>,
    phis: Vec<C64>,
    t: f64,
    gamma: f64,
}

impl DissipativeCoefficients {
    #[inline]
    fn index(&self, k: usize, m: usize, l: usize, n: usize) -> usize {
        ((k * self.n_b + l) * self.n_a + m) * self.n_b + n
    }

    /// ρ_{km,ln}: k, m index mode A and l, n mode B.
    pub fn rho(&self, k: usize, m: usize, l: usize, n: usize) -> C64 {
        self.rho[self.index(k, m, l, n)]
    }

    pub fn phi(&self, k: usize, l: usize) -> C64 {
        self.phis[k * self.n_b + l]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_a, self.n_b)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Rebuilds the full tripartite density matrix from the ansatz, with the
    /// mirror coherent states expanded over `n_c` Fock levels.
    pub fn to_fock(&self, n_c: usize) -> Result<FockDensityMatrix> {
        let cut = FockCutoff::new(self.n_a, self.n_b, n_c)?;
        let kets: Vec<Vec<C64>> = self
            .phis
            .iter()
            .map(|z| coherent_fock_amplitudes(*z, n_c))
            .collect();
        let d = cut.dim();
        let mut rho = FockDensityMatrix::zeros(cut);
        let data = rho.data_mut();
        let (na, nb) = (self.n_a, self.n_b);
        for k in 0..na {
            for l in 0..nb {
                let row0 = (k * nb + l) * n_c;
                let ket = &kets[k * nb + l];
                for m in 0..na {
                    for n in 0..nb {
                        let coef = self.rho(k, m, l, n);
                        if coef == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let col0 = (m * nb + n) * n_c;
                        let bra = &kets[m * nb + n];
                        for (j, bj) in bra.iter().enumerate() {
                            let cb = coef * bj.conj();
                            for (i, ki) in ket.iter().enumerate() {
                                // column-major storage
                                data[(col0 + j) * d + row0 + i] = cb * ki;
                            }
                        }
                    }
                }
            }
        }
        Ok(rho)
    }
}

/// Evaluates every coefficient at time `t` from an initial table, given as a
/// function of (k, m, l, n).
pub fn evolve_coefficients(
    n_a: usize,
    n_b: usize,
    rho0: impl Fn(usize, usize, usize, usize) -> C64 + Sync,
    t: f64,
    p: &DimensionlessParams,
    phi0: C64,
    exec: Execution,
) -> DissipativeCoefficients {
    let eval = CoefficientEvaluator::new(t, p, phi0);
    let rows: Vec<(usize, usize)> = (0..n_a)
        .flat_map(|k| (0..n_b).map(move |l| (k, l)))
        .collect();
    let blocks = map_ordered(&rows, exec, |&(k, l)| {
        let mut out = Vec::with_capacity(n_a * n_b);
        for m in 0..n_a {
            for n in 0..n_b {
                out.push(eval.coefficient(k, m, l, n, rho0(k, m, l, n)));
            }
        }
        out
    });
    DissipativeCoefficients {
        n_a,
        n_b,
        rho: blocks.concat(),
        phis: rows
            .iter()
            .map(|&(k, l)| phi_kl_gamma(k, l, t, p, phi0))
            .collect(),
        t,
        gamma: p.gamma,
    }
}

/// Coefficients for the |+⟩|+⟩|φ⟩ preparation, where every ρ_{km,ln}(0) = 1/4.
pub fn qubit_coefficients(t: f64, p: &DimensionlessParams, phi0: C64) -> DissipativeCoefficients {
    evolve_coefficients(
        2,
        2,
        |_, _, _, _| C64::new(0.25, 0.0),
        t,
        p,
        phi0,
        Execution::Sequential,
    )
}

/// Steady state: a classical mixture over optical Fock pairs (k, l), each
/// with the mirror parked at κ_kl i/(i + γ/2).
#[derive(Clone, Debug, PartialEq)]
pub struct SteadyState {
    pub n_a: usize,
    pub n_b: usize,
    /// ρ_{kk,ll}(0), row-major in (k, l).
    pub weights: Vec<f64>,
    /// Mirror amplitude for each (k, l), row-major.
    pub mirror_amplitudes: Vec<C64>,
}

/// The t → ∞ limit, taken analytically.
pub fn steady_state(
    p: &DimensionlessParams,
    rho0_diagonal: &[f64],
    cutoff: &FockCutoff,
) -> Result<SteadyState> {
    if p.gamma == 0.0 {
        return Err(Error::NoDissipation);
    }
    let (n_a, n_b) = (cutoff.n_a, cutoff.n_b);
    if rho0_diagonal.len() != n_a * n_b {
        return Err(Error::invalid(
            "rho0_diagonal",
            format!(
                "expected {} entries, got {}",
                n_a * n_b,
                rho0_diagonal.len()
            ),
        ));
    }
    let eta_inf = eta_gamma_infinity(p.gamma);
    let mirror_amplitudes = (0..n_a)
        .flat_map(|k| (0..n_b).map(move |l| (k, l)))
        .map(|(k, l)| p.kappa(k, l) * eta_inf)
        .collect();
    Ok(SteadyState {
        n_a,
        n_b,
        weights: rho0_diagonal.to_vec(),
        mirror_amplitudes,
    })
}

/// e^{−|φ_kl − φ_mn|²/2} e^{−i Im[φ_kl φ*_mn]}, the overlap convention the
/// qubit matrix is written in. In the usual convention this is ⟨φ_kl|φ_mn⟩;
/// tracing out the mirror needs the conjugate, `coherent_overlap(phi_mn, phi_kl)`.
pub fn coherent_overlap(phi_kl: C64, phi_mn: C64) -> C64 {
    C64::from_polar(
        (-(phi_kl - phi_mn).norm_sqr() / 2.0).exp(),
        -(phi_kl * phi_mn.conj()).im,
    )
}

/// Exact solution, or the earlier approximation that replaces Re ξ(t) by
/// t − sin t in the qubit functions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Variant {
    #[default]
    Exact,
    Approx,
}

/// Two-qubit density matrix on the basis |00⟩, |01⟩, |10⟩, |11⟩ of A ⊗ B.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitDensityMatrix(pub Matrix4<C64>);

impl std::ops::Deref for QubitDensityMatrix {
    type Target = Matrix4<C64>;
    fn deref(&self) -> &Matrix4<C64> {
        &self.0
    }
}

impl QubitDensityMatrix {
    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::new(h).eigenvalues.min()
    }

    pub fn max_abs_diff(&self, other: &Matrix4<C64>) -> f64 {
        (self.0 - other)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// a(t), b(t), θ(t): everything the reduced two-qubit matrix depends on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitFunctions {
    pub a: C64,
    pub b: C64,
    pub theta: C64,
}

pub fn qubit_functions(
    t: f64,
    p: &DimensionlessParams,
    phi0: C64,
    variant: Variant,
) -> QubitFunctions {
    let aux = auxiliary(t, p.gamma);
    let zeta = zeta_from(&aux, t, p.gamma, phi0);
    let mu = mu_from(aux.eta_g, p.gamma, phi0);
    let xi_re = match variant {
        Variant::Exact => aux.xi_re,
        Variant::Approx => t - t.sin(),
    };
    let spread = aux.eta_g.norm_sqr() + 2.0 * aux.big_gamma;
    let (ka, kb) = (p.k_a, p.k_b);
    let a = C64::from_polar(
        (-ka * ka * spread / 2.0).exp(),
        p.r_a * t - ka * (zeta - mu) - ka * ka * xi_re,
    );
    let b = C64::from_polar(
        (-kb * kb * spread / 2.0).exp(),
        p.r_b * t + kb * (zeta - mu) - kb * kb * xi_re,
    );
    let theta = ka * kb * C64::new(spread, 2.0 * xi_re);
    QubitFunctions { a, b, theta }
}

/// Assembles the reduced two-qubit matrix from a(t), b(t), θ(t).
pub fn qubit_matrix(f: &QubitFunctions) -> QubitDensityMatrix {
    let QubitFunctions { a, b, theta } = *f;
    let one = C64::new(1.0, 0.0);
    let (ac, bc) = (a.conj(), b.conj());
    let e_im = C64::from_polar(1.0, theta.im);
    let e_re = (-theta.re).exp();
    let corner = a * b * theta.exp();
    #[rustfmt::skip]
    let m = Matrix4::new(
        one,             b,                a,              corner,
        bc,              one,              a * bc * e_re,  a * e_im,
        ac,              ac * b * e_re,    one,            b * e_im,
        corner.conj(),   ac * e_im.conj(), bc * e_im.conj(), one,
    );
    QubitDensityMatrix(m * C64::new(0.25, 0.0))
}

/// ρ_AB(t) for the |+⟩|+⟩|φ⟩ preparation, as the 4×4 matrix in a(t), b(t),
/// θ(t). The mirror phase enters a and b as ζ − μ; see
/// [`reduced_qubit_rho_from_ansatz`] for the direct partial trace.
pub fn reduced_qubit_rho(
    t: f64,
    p: &DimensionlessParams,
    phi0: C64,
    variant: Variant,
) -> QubitDensityMatrix {
    qubit_matrix(&qubit_functions(t, p, phi0, variant))
}

/// ρ_AB obtained by tracing the ansatz over the mirror term by term,
/// Σ ρ_{km,ln} ⟨φ_mn|φ_kl⟩ |k⟩⟨m| ⊗ |l⟩⟨n|, independently of the a/b/θ
/// parametrisation. For φ = 0 this equals [`reduced_qubit_rho`]; for φ ≠ 0
/// the two differ by local phases (same concurrence and purity).
pub fn reduced_qubit_rho_from_ansatz(coeffs: &DissipativeCoefficients) -> QubitDensityMatrix {
    let mut m = Matrix4::zeros();
    for k in 0..2 {
        for l in 0..2 {
            for mm in 0..2 {
                for n in 0..2 {
                    m[(2 * k + l, 2 * mm + n)] = coeffs.rho(k, mm, l, n)
                        * coherent_overlap(coeffs.phi(mm, n), coeffs.phi(k, l));
                }
            }
        }
    }
    QubitDensityMatrix(m)
}

/// (S_L(ρ_AB), S_L(ρ_C)) for the |+⟩|+⟩ preparation. Neither depends on φ.
pub fn qubit_linear_entropies(t: f64, p: &DimensionlessParams) -> (f64, f64) {
    let aux = auxiliary(t, p.gamma);
    let e2 = aux.eta_g.norm_sqr();
    let spread = e2 + 2.0 * aux.big_gamma;
    let mut sum_ab = 0.0;
    let mut sum_c = 0.0;
    for (k, l) in QUBIT_PAIRS {
        for (m, n) in QUBIT_PAIRS {
            let d = p.kappa(k, l) - p.kappa(m, n);
            sum_ab += (-d * d * spread).exp();
            sum_c += (-d * d * e2).exp();
        }
    }
    (1.0 - sum_ab / 16.0, 1.0 - sum_c / 16.0)
}

const QUBIT_PAIRS: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

/// The mirror's reduced state: a convex mixture of coherent states.
#[derive(Clone, Debug, PartialEq)]
pub struct MirrorMixture {
    /// (weight, coherent amplitude)
    pub components: Vec<(f64, C64)>,
}

impl MirrorMixture {
    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|c| c.0).sum()
    }

    /// Tr ρ_C² = Σ w_i w_j |⟨φ_i|φ_j⟩|².
    pub fn purity(&self) -> f64 {
        let mut acc = 0.0;
        for &(wi, zi) in &self.components {
            for &(wj, zj) in &self.components {
                acc += wi * wj * (-(zi - zj).norm_sqr()).exp();
            }
        }
        acc
    }

    /// Expands the mixture as a dense n_c × n_c matrix.
    pub fn to_matrix(&self, n_c: usize) -> nalgebra::DMatrix<C64> {
        let mut out = nalgebra::DMatrix::zeros(n_c, n_c);
        for &(w, z) in &self.components {
            let v = nalgebra::DVector::from_vec(coherent_fock_amplitudes(z, n_c));
            out += (&v * v.adjoint()) * C64::new(w, 0.0);
        }
        out
    }
}

/// ρ_C(t) = Σ_{k,l ∈ {0,1}} ρ_{kk,ll} |φ_kl(t)⟩⟨φ_kl(t)|. `weights[k][l]` are
/// the diagonal initial coefficients, which do not evolve.
pub fn mirror_reduced_state(
    t: f64,
    p: &DimensionlessParams,
    weights: [[f64; 2]; 2],
    phi0: C64,
) -> MirrorMixture {
    MirrorMixture {
        components: QUBIT_PAIRS
            .iter()
            .map(|&(k, l)| (weights[k][l], phi_kl_gamma(k, l, t, p, phi0)))
            .collect(),
    }
}
