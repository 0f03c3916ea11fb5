//! Parameters, initial states and truncation settings shared by every other
//! module.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coherent::minimal_cutoff;
use crate::error::{Error, Result};
use crate::C64;

/// CODATA 2018 value of ħ in J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;

/// Default mirror truncation for coherent mirror inputs with |φ| ≤ 2 and κ ≤ 1.
pub const DEFAULT_MIRROR_LEVELS: usize = 32;

/// Tail mass tolerated when truncating the Poissonian weight of a coherent
/// optical input.
pub const POISSON_TAIL_TOLERANCE: f64 = 1e-12;

fn finite(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("must be finite, got {v}")))
    }
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    finite(name, v)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("must be > 0, got {v}")))
    }
}

/// Laboratory parameters in SI units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhysicalParams {
    omega_a: f64,
    omega_b: f64,
    omega_m: f64,
    mass: f64,
    length_a: f64,
    length_b: f64,
    hbar: f64,
}

impl PhysicalParams {
    pub fn new(
        omega_a: f64,
        omega_b: f64,
        omega_m: f64,
        mass: f64,
        length_a: f64,
        length_b: f64,
        hbar: f64,
    ) -> Result<Self> {
        Ok(Self {
            omega_a: positive("omega_a", omega_a)?,
            omega_b: positive("omega_b", omega_b)?,
            omega_m: positive("omega_m", omega_m)?,
            mass: positive("mass", mass)?,
            length_a: positive("L_a", length_a)?,
            length_b: positive("L_b", length_b)?,
            hbar: positive("hbar", hbar)?,
        })
    }

    pub fn omega_a(&self) -> f64 {
        self.omega_a
    }
    pub fn omega_b(&self) -> f64 {
        self.omega_b
    }
    pub fn omega_m(&self) -> f64 {
        self.omega_m
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn length_a(&self) -> f64 {
        self.length_a
    }
    pub fn length_b(&self) -> f64 {
        self.length_b
    }
    pub fn hbar(&self) -> f64 {
        self.hbar
    }
}

/// Zero-point fluctuation √(ħ / 2mω_m) of the mirror position, in metres.
pub fn zero_point_fluctuation(p: &PhysicalParams) -> f64 {
    (p.hbar / (2.0 * p.mass * p.omega_m)).sqrt()
}

/// Converts to dimensionless couplings g/ω_m and frequencies ω/ω_m, with
/// g = ω x_ZPF / L. The decay rate is not a property of the optics and is left
/// at zero; set it with [`DimensionlessParams::with_gamma`].
pub fn to_dimensionless(p: &PhysicalParams) -> DimensionlessParams {
    let x_zpf = zero_point_fluctuation(p);
    let g_a = p.omega_a * x_zpf / p.length_a;
    let g_b = p.omega_b * x_zpf / p.length_b;
    DimensionlessParams {
        k_a: g_a / p.omega_m,
        k_b: g_b / p.omega_m,
        r_a: p.omega_a / p.omega_m,
        r_b: p.omega_b / p.omega_m,
        gamma: 0.0,
    }
}

/// Couplings, optical frequencies and mechanical decay rate, all scaled by
/// the mechanical frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessParams {
    pub(crate) k_a: f64,
    pub(crate) k_b: f64,
    pub(crate) r_a: f64,
    pub(crate) r_b: f64,
    pub(crate) gamma: f64,
}

impl DimensionlessParams {
    pub fn new(k_a: f64, k_b: f64, r_a: f64, r_b: f64, gamma: f64) -> Result<Self> {
        finite("gamma", gamma)?;
        if gamma < 0.0 {
            return Err(Error::invalid(
                "gamma",
                format!("must be >= 0, got {gamma}"),
            ));
        }
        Ok(Self {
            k_a: finite("k_a", k_a)?,
            k_b: finite("k_b", k_b)?,
            r_a: finite("r_a", r_a)?,
            r_b: finite("r_b", r_b)?,
            gamma,
        })
    }

    /// k_a = k_b = `kappa`.
    pub fn symmetric(kappa: f64, r_a: f64, r_b: f64, gamma: f64) -> Result<Self> {
        Self::new(kappa, kappa, r_a, r_b, gamma)
    }

    pub fn with_gamma(self, gamma: f64) -> Result<Self> {
        Self::new(self.k_a, self.k_b, self.r_a, self.r_b, gamma)
    }

    pub fn with_couplings(self, k_a: f64, k_b: f64) -> Result<Self> {
        Self::new(k_a, k_b, self.r_a, self.r_b, self.gamma)
    }

    pub fn with_frequencies(self, r_a: f64, r_b: f64) -> Result<Self> {
        Self::new(self.k_a, self.k_b, r_a, r_b, self.gamma)
    }

    pub fn k_a(&self) -> f64 {
        self.k_a
    }
    pub fn k_b(&self) -> f64 {
        self.k_b
    }
    pub fn r_a(&self) -> f64 {
        self.r_a
    }
    pub fn r_b(&self) -> f64 {
        self.r_b
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Net force κ_mn = k_a m − k_b n exerted on the mirror by m photons in
    /// cavity A and n in cavity B.
    #[inline]
    pub fn kappa(&self, m: usize, n: usize) -> f64 {
        self.k_a * m as f64 - self.k_b * n as f64
    }
}

/// |α⟩ ⊗ |β⟩ ⊗ |φ⟩ with the mirror amplitude stored in polar form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoherentProductState {
    alpha: C64,
    beta: C64,
    phi_abs: f64,
    phi_arg: f64,
}

fn check_complex(name: &'static str, z: C64) -> Result<C64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::invalid(name, "must be finite"))
    }
}

fn polar_mirror(phi_abs: f64, phi_arg: f64) -> Result<(f64, f64)> {
    finite("phi_abs", phi_abs)?;
    finite("phi_arg", phi_arg)?;
    if phi_abs < 0.0 {
        return Err(Error::invalid("phi_abs", "must be >= 0"));
    }
    Ok(if phi_abs == 0.0 {
        (0.0, 0.0)
    } else {
        (phi_abs, phi_arg)
    })
}

impl CoherentProductState {
    pub fn new(alpha: C64, beta: C64, phi_abs: f64, phi_arg: f64) -> Result<Self> {
        let (phi_abs, phi_arg) = polar_mirror(phi_abs, phi_arg)?;
        Ok(Self {
            alpha: check_complex("alpha", alpha)?,
            beta: check_complex("beta", beta)?,
            phi_abs,
            phi_arg,
        })
    }

    pub fn with_mirror(alpha: C64, beta: C64, phi: C64) -> Result<Self> {
        let phi = check_complex("phi", phi)?;
        Self::new(alpha, beta, phi.norm(), phi.arg())
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }
    pub fn beta(&self) -> C64 {
        self.beta
    }
    pub fn phi_abs(&self) -> f64 {
        self.phi_abs
    }
    pub fn phi_arg(&self) -> f64 {
        self.phi_arg
    }
    pub fn phi(&self) -> C64 {
        C64::from_polar(self.phi_abs, self.phi_arg)
    }
}

/// |+⟩ ⊗ |+⟩ ⊗ |φ⟩ with |+⟩ = (|0⟩ + |1⟩)/√2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QubitPlusProductState {
    phi_abs: f64,
    phi_arg: f64,
}

impl Default for QubitPlusProductState {
    fn default() -> Self {
        Self {
            phi_abs: 0.0,
            phi_arg: 0.0,
        }
    }
}

impl QubitPlusProductState {
    pub fn new(phi_abs: f64, phi_arg: f64) -> Result<Self> {
        let (phi_abs, phi_arg) = polar_mirror(phi_abs, phi_arg)?;
        Ok(Self { phi_abs, phi_arg })
    }

    pub fn with_mirror(phi: C64) -> Result<Self> {
        let phi = check_complex("phi", phi)?;
        Self::new(phi.norm(), phi.arg())
    }

    pub fn phi(&self) -> C64 {
        C64::from_polar(self.phi_abs, self.phi_arg)
    }

    pub fn phi_abs(&self) -> f64 {
        self.phi_abs
    }

    pub fn phi_arg(&self) -> f64 {
        self.phi_arg
    }

    /// ρ_{km,ln}(0) for k, m, l, n ∈ {0, 1}.
    pub const fn initial_element(&self) -> f64 {
        0.25
    }
}

/// Number of retained Fock levels per mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockCutoff {
    pub(crate) n_a: usize,
    pub(crate) n_b: usize,
    pub(crate) n_c: usize,
}

impl FockCutoff {
    pub fn new(n_a: usize, n_b: usize, n_c: usize) -> Result<Self> {
        for (name, v) in [("n_a", n_a), ("n_b", n_b), ("n_c", n_c)] {
            if v < 2 {
                return Err(Error::invalid(name, format!("must be >= 2, got {v}")));
            }
        }
        Ok(Self { n_a, n_b, n_c })
    }

    /// Two optical levels per cavity.
    pub fn qubit(n_c: usize) -> Result<Self> {
        Self::new(2, 2, n_c)
    }

    /// Smallest optical truncation whose Poisson tails are below `tolerance`.
    pub fn for_coherent(alpha: C64, beta: C64, n_c: usize, tolerance: f64) -> Result<Self> {
        Self::new(
            minimal_cutoff(alpha.norm_sqr(), tolerance).max(2),
            minimal_cutoff(beta.norm_sqr(), tolerance).max(2),
            n_c,
        )
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }
    pub fn n_b(&self) -> usize {
        self.n_b
    }
    pub fn n_c(&self) -> usize {
        self.n_c
    }

    /// Dimension of the truncated tripartite space.
    pub fn dim(&self) -> usize {
        self.n_a * self.n_b * self.n_c
    }
}

/// Flat key-value configuration, read from a TOML file such as
///
/// ```toml
/// k_a = 0.5
/// k_b = 0.5
/// gamma = 0.07
/// n_c = 32
/// ```
///
/// Missing keys take the defaults below; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub k_a: f64,
    pub k_b: f64,
    pub r_a: f64,
    pub r_b: f64,
    pub gamma: f64,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub beta_re: f64,
    pub beta_im: f64,
    pub phi_abs: f64,
    pub phi_arg: f64,
    pub n_a: usize,
    pub n_b: usize,
    pub n_c: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            k_a: 0.5,
            k_b: 0.5,
            r_a: 1.0,
            r_b: 1.0,
            gamma: 0.07,
            alpha_re: 1.0,
            alpha_im: 0.0,
            beta_re: 1.0,
            beta_im: 0.0,
            phi_abs: 0.0,
            phi_arg: 0.0,
            n_a: 15,
            n_b: 15,
            n_c: DEFAULT_MIRROR_LEVELS,
        }
    }
}

impl SimulationConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.params()?;
        cfg.coherent_state()?;
        cfg.cutoff()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn params(&self) -> Result<DimensionlessParams> {
        DimensionlessParams::new(self.k_a, self.k_b, self.r_a, self.r_b, self.gamma)
    }

    pub fn coherent_state(&self) -> Result<CoherentProductState> {
        CoherentProductState::new(
            C64::new(self.alpha_re, self.alpha_im),
            C64::new(self.beta_re, self.beta_im),
            self.phi_abs,
            self.phi_arg,
        )
    }

    pub fn qubit_state(&self) -> Result<QubitPlusProductState> {
        QubitPlusProductState::new(self.phi_abs, self.phi_arg)
    }

    pub fn cutoff(&self) -> Result<FockCutoff> {
        FockCutoff::new(self.n_a, self.n_b, self.n_c)
    }
}
