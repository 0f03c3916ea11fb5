//! Mixedness and entanglement quantifiers.
//!
//! Linear entropy is a faithful entanglement measure only for pure bipartite
//! states. Applied to a mixed state it measures purity and nothing more.

use nalgebra::{storage::Storage, DMatrix, Dim, Matrix, Matrix4, SymmetricEigen};

use crate::dissipative::{reduced_qubit_rho, QubitDensityMatrix, Variant};
use crate::error::{Error, Result};
use crate::model::DimensionlessParams;
use crate::C64;

/// Tolerance on |Tr ρ − 1|.
pub const TRACE_TOLERANCE: f64 = 1e-9;
/// Tolerance on max |ρ − ρ†|.
pub const HERMITICITY_TOLERANCE: f64 = 1e-9;
/// Negative eigenvalues down to this are rounding and clamp to zero.
pub const EIGEN_CLAMP: f64 = 1e-10;
/// Eigenvalues below this are dropped from −Σ λ ln λ.
pub const ENTROPY_FLOOR: f64 = 1e-14;

fn check_density<D: Dim, S: Storage<C64, D, D>>(rho: &Matrix<C64, D, D, S>) -> Result<()> {
    let n = rho.nrows();
    if n == 0 || n != rho.ncols() {
        return Err(Error::NotDensityMatrix(format!(
            "shape {}x{}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let mut herm: f64 = 0.0;
    let mut tr = C64::new(0.0, 0.0);
    for j in 0..n {
        tr += rho[(j, j)];
        for i in 0..=j {
            let d = (rho[(i, j)] - rho[(j, i)].conj()).norm();
            if !d.is_finite() {
                return Err(Error::NotDensityMatrix("non-finite entry".into()));
            }
            herm = herm.max(d);
        }
    }
    if herm > HERMITICITY_TOLERANCE {
        return Err(Error::NotDensityMatrix(format!(
            "hermiticity error {herm:.3e}"
        )));
    }
    if (tr - 1.0).norm() > TRACE_TOLERANCE {
        return Err(Error::NotDensityMatrix(format!("trace {tr}")));
    }
    Ok(())
}

fn to_dense<D: Dim, S: Storage<C64, D, D>>(rho: &Matrix<C64, D, D, S>) -> DMatrix<C64> {
    let h = DMatrix::from_iterator(rho.nrows(), rho.ncols(), rho.iter().copied());
    (&h + h.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigenvalues of a density matrix with the clamping policy applied.
pub fn density_eigenvalues<D: Dim, S: Storage<C64, D, D>>(
    rho: &Matrix<C64, D, D, S>,
) -> Result<Vec<f64>> {
    check_density(rho)?;
    let eig =
        SymmetricEigen::try_new(to_dense(rho), f64::EPSILON, 0).ok_or(Error::NonConvergedEigen)?;
    eig.eigenvalues
        .iter()
        .map(|&l| clamp_eigenvalue(l))
        .collect()
}

fn clamp_eigenvalue(l: f64) -> Result<f64> {
    if l >= 0.0 {
        Ok(l)
    } else if l >= -EIGEN_CLAMP {
        Ok(0.0)
    } else {
        Err(Error::NotDensityMatrix(format!("eigenvalue {l:.3e}")))
    }
}

/// Tr ρ², clamped to [0, 1].
pub fn purity<D: Dim, S: Storage<C64, D, D>>(rho: &Matrix<C64, D, D, S>) -> Result<f64> {
    check_density(rho)?;
    // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
    let p: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
    Ok(p.clamp(0.0, 1.0))
}

/// 1 − Tr ρ².
pub fn linear_entropy<D: Dim, S: Storage<C64, D, D>>(rho: &Matrix<C64, D, D, S>) -> Result<f64> {
    Ok(1.0 - purity(rho)?)
}

/// −Tr ρ ln ρ.
pub fn von_neumann_entropy<D: Dim, S: Storage<C64, D, D>>(
    rho: &Matrix<C64, D, D, S>,
) -> Result<f64> {
    Ok(density_eigenvalues(rho)?
        .into_iter()
        .filter(|&l| l >= ENTROPY_FLOOR)
        .map(|l| -l * l.ln())
        .sum())
}

fn sigma_y_sigma_y() -> Matrix4<C64> {
    let one = C64::new(1.0, 0.0);
    let z = C64::new(0.0, 0.0);
    // σ_y ⊗ σ_y is real: anti-diagonal (−1, 1, 1, −1)
    Matrix4::new(
        z, z, z, -one, //
        z, z, one, z, //
        z, one, z, z, //
        -one, z, z, z,
    )
}

/// ρ̃ = (σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y).
pub fn spin_flip(rho: &Matrix4<C64>) -> Matrix4<C64> {
    let yy = sigma_y_sigma_y();
    yy * rho.map(|z| z.conj()) * yy
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcurrenceResult {
    pub value: f64,
    /// Square roots of the eigenvalues of ρρ̃, descending.
    pub lambdas: [f64; 4],
}

impl ConcurrenceResult {
    fn from_eigenvalues(mut ev: [f64; 4]) -> Result<Self> {
        for l in ev.iter_mut() {
            *l = clamp_eigenvalue(*l)?.sqrt();
        }
        Ok(Self::from_lambdas(ev))
    }

    fn from_lambdas(mut lambdas: [f64; 4]) -> Self {
        lambdas.sort_by(|a, b| b.total_cmp(a));
        let value = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0);
        Self { value, lambdas }
    }
}

/// Wootters concurrence. Goes through the Hermitian eigendecomposition of ρ
/// and falls back to a general eigensolver on ρρ̃ if that does not converge.
pub fn concurrence(rho: &QubitDensityMatrix) -> Result<ConcurrenceResult> {
    match concurrence_hermitian(rho) {
        Err(Error::NonConvergedEigen) => concurrence_general(rho),
        other => other,
    }
}

/// λ_i from a factorisation ρ = X X† with X = U √D: they are the singular
/// values of τ = Xᵀ (σ_y ⊗ σ_y) X, since ττ† = Xᵀ Y ρ Y X* has the spectrum
/// of ρρ̃. Taking singular values avoids square roots of the tiny
/// eigenvalues of ρρ̃, which would turn 10⁻¹⁶ rounding into 10⁻⁸ errors on
/// rank-deficient states.
pub fn concurrence_hermitian(rho: &QubitDensityMatrix) -> Result<ConcurrenceResult> {
    check_density(&rho.0)?;
    let h = (rho.0 + rho.0.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, 0).ok_or(Error::NonConvergedEigen)?;
    let mut sqrt_vals = eig.eigenvalues;
    for l in sqrt_vals.iter_mut() {
        *l = clamp_eigenvalue(*l)?.sqrt();
    }
    let x = eig.eigenvectors * Matrix4::from_diagonal(&sqrt_vals.map(|v| C64::new(v, 0.0)));
    let tau = x.transpose() * sigma_y_sigma_y() * x;
    let sv = tau
        .try_svd(false, false, f64::EPSILON, 0)
        .ok_or(Error::NonConvergedEigen)?
        .singular_values;
    Ok(ConcurrenceResult::from_lambdas([
        sv[0], sv[1], sv[2], sv[3],
    ]))
}

/// Spectrum of the non-Hermitian ρρ̃ from a complex Schur decomposition.
pub fn concurrence_general(rho: &QubitDensityMatrix) -> Result<ConcurrenceResult> {
    check_density(&rho.0)?;
    let r = rho.0 * spin_flip(&rho.0);
    let ev = nalgebra::Schur::try_new(r, f64::EPSILON, 0)
        .ok_or(Error::NonConvergedEigen)?
        .eigenvalues()
        .ok_or(Error::NonConvergedEigen)?;
    // the spectrum is real and nonnegative for a valid ρ; keep the real part
    ConcurrenceResult::from_eigenvalues([ev[0].re, ev[1].re, ev[2].re, ev[3].re])
}

/// ΔC(t) = C(exact) − C(approx) for the |+⟩|+⟩|0⟩ preparation.
pub fn delta_concurrence(t: f64, p: &DimensionlessParams) -> Result<f64> {
    let phi0 = C64::new(0.0, 0.0);
    let exact = concurrence(&reduced_qubit_rho(t, p, phi0, Variant::Exact))?;
    let approx = concurrence(&reduced_qubit_rho(t, p, phi0, Variant::Approx))?;
    Ok(exact.value - approx.value)
}
