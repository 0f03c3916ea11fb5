//! States on the truncated tripartite Fock space. Basis index is
//! ((a·n_b) + b)·n_c + c.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::FockCutoff;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    A,
    B,
    C,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::A, Mode::B, Mode::C];

    fn slot(self) -> usize {
        self as usize
    }

    pub fn label(self) -> char {
        ['A', 'B', 'C'][self.slot()]
    }
}

fn dims(cut: &FockCutoff) -> [usize; 3] {
    [cut.n_a, cut.n_b, cut.n_c]
}

fn split(i: usize, d: [usize; 3]) -> [usize; 3] {
    [i / (d[1] * d[2]), (i / d[2]) % d[1], i % d[2]]
}

/// Maps a full index to (kept index, traced index) for a given set of kept
/// modes, preserving the A, B, C order inside each group.
struct Bipartition {
    d: [usize; 3],
    keep: [bool; 3],
    kept_dim: usize,
    traced_dim: usize,
}

impl Bipartition {
    fn new(cut: &FockCutoff, keep: &[Mode]) -> Self {
        let d = dims(cut);
        let mut mask = [false; 3];
        for m in keep {
            mask[m.slot()] = true;
        }
        let kept_dim = (0..3).filter(|&s| mask[s]).map(|s| d[s]).product();
        let traced_dim = (0..3).filter(|&s| !mask[s]).map(|s| d[s]).product();
        Self {
            d,
            keep: mask,
            kept_dim,
            traced_dim,
        }
    }

    fn map(&self, i: usize) -> (usize, usize) {
        let digits = split(i, self.d);
        let (mut k, mut t) = (0, 0);
        for ((&keep, &d), &digit) in self.keep.iter().zip(&self.d).zip(&digits) {
            if keep {
                k = k * d + digit;
            } else {
                t = t * d + digit;
            }
        }
        (k, t)
    }
}

/// Dense density matrix on the truncated space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockDensityMatrix {
    cutoff: FockCutoff,
    data: DMatrix<C64>,
}

impl FockDensityMatrix {
    pub fn zeros(cutoff: FockCutoff) -> Self {
        let d = cutoff.dim();
        Self {
            cutoff,
            data: DMatrix::zeros(d, d),
        }
    }

    pub fn from_matrix(cutoff: FockCutoff, data: DMatrix<C64>) -> Result<Self> {
        let d = cutoff.dim();
        if data.shape() != (d, d) {
            return Err(Error::invalid(
                "data",
                format!("expected {d}x{d}, got {:?}", data.shape()),
            ));
        }
        Ok(Self { cutoff, data })
    }

    pub fn from_pure(psi: &FockStateVector) -> Self {
        Self {
            cutoff: psi.cutoff,
            data: &psi.data * psi.data.adjoint(),
        }
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    /// Column-major entries.
    pub fn data(&self) -> &[C64] {
        self.data.as_slice()
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        self.data.as_mut_slice()
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.data - self.data.adjoint()))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let h = (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::try_new(h, f64::EPSILON, 0)
            .map(|e| e.eigenvalues.min())
            .ok_or(Error::NonConvergedEigen)
    }

    pub fn max_abs_diff(&self, other: &DMatrix<C64>) -> f64 {
        max_abs(&(&self.data - other))
    }

    /// Population of the highest retained Fock level of `mode`.
    pub fn top_level_population(&self, mode: Mode) -> f64 {
        let d = dims(&self.cutoff);
        let top = d[mode.slot()] - 1;
        (0..self.data.nrows())
            .filter(|&i| split(i, d)[mode.slot()] == top)
            .map(|i| self.data[(i, i)].re)
            .sum()
    }

    /// CutoffInsufficient if the top level of `mode` holds more than
    /// `tolerance`.
    pub fn check_cutoff(&self, mode: Mode, tolerance: f64) -> Result<()> {
        let tail = self.top_level_population(mode);
        if tail > tolerance {
            return Err(Error::CutoffInsufficient {
                mode: mode.label(),
                tail,
                tolerance,
            });
        }
        Ok(())
    }

    /// ⟨N_mode⟩.
    pub fn mean_occupation(&self, mode: Mode) -> f64 {
        let d = dims(&self.cutoff);
        (0..self.data.nrows())
            .map(|i| split(i, d)[mode.slot()] as f64 * self.data[(i, i)].re)
            .sum()
    }
}

pub(crate) fn symmetrize_in_place(m: &mut DMatrix<C64>) {
    let n = m.nrows();
    for j in 0..n {
        m[(j, j)].im = 0.0;
        for i in 0..j {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Partial trace keeping the listed modes (in A, B, C order).
pub fn partial_trace(rho: &FockDensityMatrix, keep: &[Mode]) -> DMatrix<C64> {
    let bp = Bipartition::new(&rho.cutoff, keep);
    let d = rho.data.nrows();
    let maps: Vec<(usize, usize)> = (0..d).map(|i| bp.map(i)).collect();
    let mut out = DMatrix::zeros(bp.kept_dim, bp.kept_dim);
    for (j, &(kj, tj)) in maps.iter().enumerate() {
        let col = rho.data.column(j);
        for (i, &(ki, ti)) in maps.iter().enumerate() {
            if ti == tj {
                out[(ki, kj)] += col[i];
            }
        }
    }
    out
}

/// Pure state on the truncated space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockStateVector {
    cutoff: FockCutoff,
    data: DVector<C64>,
}

impl FockStateVector {
    pub fn new(cutoff: FockCutoff, data: DVector<C64>) -> Result<Self> {
        if data.len() != cutoff.dim() {
            return Err(Error::invalid(
                "data",
                format!("expected length {}, got {}", cutoff.dim(), data.len()),
            ));
        }
        Ok(Self { cutoff, data })
    }

    /// |ψ_A⟩ ⊗ |ψ_B⟩ ⊗ |ψ_C⟩.
    pub fn product(a: &[C64], b: &[C64], c: &[C64]) -> Result<Self> {
        let cutoff = FockCutoff::new(a.len(), b.len(), c.len())?;
        let mut data = Vec::with_capacity(cutoff.dim());
        for x in a {
            for y in b {
                data.extend(c.iter().map(|z| x * y * z));
            }
        }
        Ok(Self {
            cutoff,
            data: DVector::from_vec(data),
        })
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn vector(&self) -> &DVector<C64> {
        &self.data
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.norm_squared()
    }

    pub fn normalized(&self) -> Self {
        Self {
            cutoff: self.cutoff,
            data: self.data.normalize(),
        }
    }

    pub fn top_level_population(&self, mode: Mode) -> f64 {
        let d = dims(&self.cutoff);
        let top = d[mode.slot()] - 1;
        self.data
            .iter()
            .enumerate()
            .filter(|(i, _)| split(*i, d)[mode.slot()] == top)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }

    /// Reduced state of the kept modes, computed as M M† with M the
    /// kept × traced reshaping of ψ.
    pub fn partial_trace(&self, keep: &[Mode]) -> DMatrix<C64> {
        let bp = Bipartition::new(&self.cutoff, keep);
        let mut m = DMatrix::zeros(bp.kept_dim, bp.traced_dim);
        for (i, z) in self.data.iter().enumerate() {
            let (k, t) = bp.map(i);
            m[(k, t)] = *z;
        }
        &m * m.adjoint()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn normalized(v: Vec<C64>) -> Vec<C64> {
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|z| z / n).collect()
    }

    fn proj(v: &[C64]) -> DMatrix<C64> {
        let v = DVector::from_row_slice(v);
        &v * v.adjoint()
    }

    #[test]
    fn product_state_traces() {
        let a = normalized(vec![c(1.0, 0.0), c(0.3, 0.2)]);
        let b = normalized(vec![c(0.1, 0.0), c(0.0, 1.0), c(0.4, -0.4)]);
        let cc = normalized(vec![c(0.5, 0.5), c(1.0, 0.0), c(0.0, 0.0), c(0.2, 0.0)]);
        let psi = FockStateVector::product(&a, &b, &cc).unwrap();
        let rho = FockDensityMatrix::from_pure(&psi);
        for (keep, want) in [
            (vec![Mode::A], proj(&a)),
            (vec![Mode::B], proj(&b)),
            (vec![Mode::C], proj(&cc)),
        ] {
            assert!((partial_trace(&rho, &keep) - &want).norm() < 1e-14);
            assert!((psi.partial_trace(&keep) - &want).norm() < 1e-14);
        }
        let ab = partial_trace(&rho, &[Mode::A, Mode::B]);
        assert!((ab.trace() - c(1.0, 0.0)).norm() < 1e-14);
        let full = partial_trace(&rho, &Mode::ALL);
        assert!((full - rho.matrix()).norm() < 1e-15);
    }

    #[test]
    fn traces_preserved_for_mixed_input() {
        let cut = FockCutoff::new(2, 3, 2).unwrap();
        let d = cut.dim();
        let g = DMatrix::from_fn(d, d, |i, j| {
            c((i * 7 + j * 3) as f64 % 5.0 - 2.0, (i + 2 * j) as f64 % 3.0)
        });
        let mut m = &g * g.adjoint();
        let tr = m.trace();
        m /= tr;
        let rho = FockDensityMatrix::from_matrix(cut, m).unwrap();
        for keep in [
            vec![Mode::A],
            vec![Mode::C],
            vec![Mode::A, Mode::C],
            vec![Mode::B, Mode::C],
        ] {
            assert!((partial_trace(&rho, &keep).trace() - c(1.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn bell_pair_with_vacuum_mirror() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let cut = FockCutoff::new(2, 2, 3).unwrap();
        let mut v = DVector::zeros(cut.dim());
        v[0] = c(s, 0.0); // |0,0,0⟩
        v[(2 + 1) * 3] = c(s, 0.0); // |1,1,0⟩
        let psi = FockStateVector::new(cut, v).unwrap();
        let rho = FockDensityMatrix::from_pure(&psi);
        let ab = partial_trace(&rho, &[Mode::A, Mode::B]);
        let mut want = DMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            want[(i, j)] = c(0.5, 0.0);
        }
        assert!((ab - want).norm() < 1e-12);
    }

    #[test]
    fn top_level_and_occupation() {
        let psi = FockStateVector::product(
            &[c(0.0, 0.0), c(1.0, 0.0)],
            &[c(1.0, 0.0), c(0.0, 0.0)],
            &normalized(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
        )
        .unwrap();
        let rho = FockDensityMatrix::from_pure(&psi);
        assert!((rho.top_level_population(Mode::A) - 1.0).abs() < 1e-15);
        assert_eq!(rho.top_level_population(Mode::B), 0.0);
        assert!((rho.top_level_population(Mode::C) - 0.5).abs() < 1e-15);
        assert!((psi.top_level_population(Mode::C) - 0.5).abs() < 1e-15);
        assert!((rho.mean_occupation(Mode::C) - 1.0).abs() < 1e-15);
        assert!(matches!(
            rho.check_cutoff(Mode::C, 1e-8),
            Err(Error::CutoffInsufficient { mode: 'C', .. })
        ));
    }
}
