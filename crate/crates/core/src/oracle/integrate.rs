//! Fixed-step fourth-order Runge–Kutta propagation of the Schrödinger and
//! Lindblad equations.
//!
//! Every public run is done twice, at the configured step and at half of it,
//! and fails with [`Error::StepTooLarge`] if any sampled entry moves by more
//! than [`RICHARDSON_TOLERANCE`]. The half-step run is returned.

use nalgebra::{DMatrix, DVector};

use super::fock::{symmetrize_in_place, FockDensityMatrix, FockStateVector, Mode};
use super::hamiltonian::{build_hamiltonian_sparse, lowering, number_diagonal};
use super::sparse::SparseOperator;
use crate::error::{Error, Result};
use crate::model::{DimensionlessParams, FockCutoff};
use crate::par::{for_each_chunk_mut, join, Execution};
use crate::C64;

pub const RICHARDSON_TOLERANCE: f64 = 1e-7;
pub const MAX_STEP: f64 = 1e-2;
pub const MAX_TAIL_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scheme {
    #[default]
    RungeKutta4,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    step: f64,
    scheme: Scheme,
    tail_tolerance: f64,
    exec: Execution,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step: 5e-3,
            scheme: Scheme::RungeKutta4,
            tail_tolerance: 1e-8,
            exec: Execution::default(),
        }
    }
}

impl IntegratorConfig {
    pub fn new(step: f64, tail_tolerance: f64) -> Result<Self> {
        if !(step > 0.0 && step <= MAX_STEP) {
            return Err(Error::invalid(
                "step",
                format!("{step} not in (0, {MAX_STEP}]"),
            ));
        }
        if !(tail_tolerance > 0.0 && tail_tolerance <= MAX_TAIL_TOLERANCE) {
            return Err(Error::invalid(
                "tail_tolerance",
                format!("{tail_tolerance} not in (0, {MAX_TAIL_TOLERANCE}]"),
            ));
        }
        Ok(Self {
            step,
            tail_tolerance,
            ..Self::default()
        })
    }

    pub fn with_execution(self, exec: Execution) -> Self {
        Self { exec, ..self }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }
}

/// y += a x
#[inline]
fn axpy(y: &mut [C64], a: f64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += xi * a;
    }
}

/// Splits [0, t_1], [t_1, t_2], ... into equal sub-steps no longer than `h`.
fn segments(samples: &[f64], h: f64) -> Vec<(f64, usize)> {
    let mut prev = 0.0;
    samples
        .iter()
        .map(|&t| {
            let span = t - prev;
            prev = t;
            let n = if span == 0.0 {
                0
            } else {
                (span / h).ceil().max(1.0) as usize
            };
            (span, n)
        })
        .collect()
}

fn check_samples(samples: &[f64], t_end: f64) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::invalid("sample_times", "empty"));
    }
    let mut prev = 0.0;
    for &t in samples {
        if !t.is_finite() || t < prev || t > t_end {
            return Err(Error::invalid(
                "sample_times",
                format!("must be nondecreasing within [0, {t_end}], got {t}"),
            ));
        }
        prev = t;
    }
    Ok(())
}

/// Right-hand side L(ρ) = −i(H_eff ρ − ρ H_eff†) + γ c ρ c† with
/// H_eff = H − i(γ/2) c†c.
pub struct LindbladIntegrator {
    h_eff: SparseOperator,
    c: SparseOperator,
    gamma: f64,
    cutoff: FockCutoff,
    exec: Execution,
}

struct LindbladWork {
    acc: DMatrix<C64>,
    stage: DMatrix<C64>,
    k: DMatrix<C64>,
    c_rho: DMatrix<C64>,
}

impl LindbladWork {
    fn new(d: usize) -> Self {
        Self {
            acc: DMatrix::zeros(d, d),
            stage: DMatrix::zeros(d, d),
            k: DMatrix::zeros(d, d),
            c_rho: DMatrix::zeros(d, d),
        }
    }
}

impl LindbladIntegrator {
    pub fn new(p: &DimensionlessParams, cutoff: &FockCutoff, exec: Execution) -> Self {
        let n_c = number_diagonal(Mode::C, cutoff);
        let shift: Vec<C64> = n_c
            .iter()
            .map(|&n| C64::new(0.0, -0.5 * p.gamma * n))
            .collect();
        Self {
            h_eff: build_hamiltonian_sparse(p, cutoff).add_diagonal(&shift),
            c: lowering(Mode::C, cutoff),
            gamma: p.gamma,
            cutoff: *cutoff,
            exec,
        }
    }

    /// out = L(rho).
    fn rhs(&self, rho: &DMatrix<C64>, c_rho: &mut DMatrix<C64>, out: &mut DMatrix<C64>) {
        let d = rho.nrows();
        let src = rho.as_slice();
        let dissipative = self.gamma != 0.0;
        if dissipative {
            for_each_chunk_mut(c_rho.as_mut_slice(), d, self.exec, |j, col| {
                self.c.mul_vec(&src[j * d..(j + 1) * d], col);
            });
        }
        let c_rho = c_rho.as_slice();
        let minus_i = C64::new(0.0, -1.0);
        let plus_i = C64::new(0.0, 1.0);
        let gamma = C64::new(self.gamma, 0.0);
        for_each_chunk_mut(out.as_mut_slice(), d, self.exec, |j, col| {
            self.h_eff.mul_vec(&src[j * d..(j + 1) * d], col);
            for z in col.iter_mut() {
                *z *= minus_i;
            }
            self.h_eff.right_adjoint_column(j, src, d, plus_i, col);
            if dissipative {
                self.c.right_adjoint_column(j, c_rho, d, gamma, col);
            }
        });
    }

    fn rk4_step(&self, rho: &mut DMatrix<C64>, h: f64, w: &mut LindbladWork) {
        let LindbladWork {
            acc,
            stage,
            k,
            c_rho,
        } = w;
        acc.copy_from(rho);
        self.rhs(rho, c_rho, k);
        axpy(acc.as_mut_slice(), h / 6.0, k.as_slice());
        for (weight, frac) in [(h / 3.0, 0.5), (h / 3.0, 0.5), (h / 6.0, 1.0)] {
            stage.copy_from(rho);
            axpy(stage.as_mut_slice(), frac * h, k.as_slice());
            self.rhs(stage, c_rho, k);
            axpy(acc.as_mut_slice(), weight, k.as_slice());
        }
        std::mem::swap(rho, acc);
        symmetrize_in_place(rho);
    }

    /// Advances `rho` by `span` in `n_steps` equal steps, without any checks.
    pub fn propagate(&self, rho: &mut FockDensityMatrix, span: f64, n_steps: usize) {
        if n_steps == 0 {
            return;
        }
        let h = span / n_steps as f64;
        let mut work = LindbladWork::new(self.cutoff.dim());
        let mut m = std::mem::replace(rho, FockDensityMatrix::zeros(self.cutoff)).into_matrix();
        for _ in 0..n_steps {
            self.rk4_step(&mut m, h, &mut work);
        }
        *rho = FockDensityMatrix::from_matrix(self.cutoff, m).expect("shape is preserved");
    }

    fn run(
        &self,
        rho0: &FockDensityMatrix,
        segs: &[(f64, usize)],
        refine: usize,
    ) -> Vec<FockDensityMatrix> {
        let mut rho = rho0.clone();
        segs.iter()
            .map(|&(span, n)| {
                self.propagate(&mut rho, span, n * refine);
                rho.clone()
            })
            .collect()
    }
}

fn check_initial_density(rho0: &FockDensityMatrix) -> Result<()> {
    let tr = rho0.trace();
    if (tr - 1.0).norm() > 1e-9 {
        return Err(Error::NotDensityMatrix(format!("initial trace {tr}")));
    }
    let herm = rho0.hermiticity_error();
    if herm > 1e-12 {
        return Err(Error::NotDensityMatrix(format!(
            "initial hermiticity error {herm:.3e}"
        )));
    }
    Ok(())
}

/// Integrates the master equation from `rho0` at t = 0 and returns the state
/// at each of `sample_times` (nondecreasing, within [0, t_end]).
///
/// Optical photon numbers are conserved, so only the mirror truncation is
/// checked dynamically.
pub fn integrate_lindblad(
    rho0: &FockDensityMatrix,
    p: &DimensionlessParams,
    cfg: &IntegratorConfig,
    t_end: f64,
    sample_times: &[f64],
) -> Result<Vec<FockDensityMatrix>> {
    check_samples(sample_times, t_end)?;
    check_initial_density(rho0)?;
    rho0.check_cutoff(Mode::C, cfg.tail_tolerance)?;
    let integ = LindbladIntegrator::new(p, &rho0.cutoff(), cfg.exec);
    let segs = segments(sample_times, cfg.step);
    let (coarse, fine) = join(
        cfg.exec,
        || integ.run(rho0, &segs, 1),
        || integ.run(rho0, &segs, 2),
    );
    let mut worst: f64 = 0.0;
    for (a, b) in coarse.iter().zip(&fine) {
        worst = worst.max(a.max_abs_diff(b.matrix()));
    }
    if worst > RICHARDSON_TOLERANCE {
        return Err(Error::StepTooLarge {
            deviation: worst,
            tolerance: RICHARDSON_TOLERANCE,
        });
    }
    for rho in &fine {
        rho.check_cutoff(Mode::C, cfg.tail_tolerance)?;
    }
    Ok(fine)
}

/// dψ/dt = −iHψ.
pub struct SchrodingerIntegrator {
    h: SparseOperator,
    cutoff: FockCutoff,
}

impl SchrodingerIntegrator {
    pub fn new(p: &DimensionlessParams, cutoff: &FockCutoff) -> Self {
        Self {
            h: build_hamiltonian_sparse(p, cutoff),
            cutoff: *cutoff,
        }
    }

    fn rhs(&self, psi: &[C64], out: &mut [C64]) {
        self.h.mul_vec(psi, out);
        for z in out.iter_mut() {
            *z = C64::new(z.im, -z.re);
        }
    }

    /// Advances `psi` by `span` in `n_steps` equal steps, without any checks.
    pub fn propagate(&self, psi: &mut DVector<C64>, span: f64, n_steps: usize) {
        if n_steps == 0 {
            return;
        }
        let h = span / n_steps as f64;
        let d = psi.len();
        let mut k = DVector::zeros(d);
        let mut stage = DVector::zeros(d);
        let mut acc = DVector::zeros(d);
        for _ in 0..n_steps {
            acc.copy_from(psi);
            self.rhs(psi.as_slice(), k.as_mut_slice());
            axpy(acc.as_mut_slice(), h / 6.0, k.as_slice());
            for (weight, frac) in [(h / 3.0, 0.5), (h / 3.0, 0.5), (h / 6.0, 1.0)] {
                stage.copy_from(psi);
                axpy(stage.as_mut_slice(), frac * h, k.as_slice());
                self.rhs(stage.as_slice(), k.as_mut_slice());
                axpy(acc.as_mut_slice(), weight, k.as_slice());
            }
            std::mem::swap(psi, &mut acc);
        }
    }

    fn run(
        &self,
        psi0: &FockStateVector,
        segs: &[(f64, usize)],
        refine: usize,
    ) -> Vec<FockStateVector> {
        let mut psi = psi0.vector().clone();
        segs.iter()
            .map(|&(span, n)| {
                self.propagate(&mut psi, span, n * refine);
                FockStateVector::new(self.cutoff, psi.clone()).expect("shape is preserved")
            })
            .collect()
    }
}

/// Pure-state counterpart of [`integrate_lindblad`] for the lossless case.
pub fn integrate_schrodinger(
    psi0: &FockStateVector,
    p: &DimensionlessParams,
    cfg: &IntegratorConfig,
    t_end: f64,
    sample_times: &[f64],
) -> Result<Vec<FockStateVector>> {
    check_samples(sample_times, t_end)?;
    let norm = psi0.norm_sqr();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("psi0", format!("norm² {norm}")));
    }
    let check = |psi: &FockStateVector| {
        let tail = psi.top_level_population(Mode::C);
        if tail > cfg.tail_tolerance {
            return Err(Error::CutoffInsufficient {
                mode: 'C',
                tail,
                tolerance: cfg.tail_tolerance,
            });
        }
        Ok(())
    };
    check(psi0)?;
    let integ = SchrodingerIntegrator::new(p, &psi0.cutoff());
    let segs = segments(sample_times, cfg.step);
    let (coarse, fine) = join(
        cfg.exec,
        || integ.run(psi0, &segs, 1),
        || integ.run(psi0, &segs, 2),
    );
    let mut worst: f64 = 0.0;
    for (a, b) in coarse.iter().zip(&fine) {
        worst = worst.max(
            (a.vector() - b.vector())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max),
        );
    }
    if worst > RICHARDSON_TOLERANCE {
        return Err(Error::StepTooLarge {
            deviation: worst,
            tolerance: RICHARDSON_TOLERANCE,
        });
    }
    for psi in &fine {
        check(psi)?;
    }
    Ok(fine)
}
