//! Truncated operators in units of ħω_m.

use nalgebra::DMatrix;

use super::fock::Mode;
use super::sparse::SparseOperator;
use crate::model::{DimensionlessParams, FockCutoff};
use crate::C64;

fn occupations(cut: &FockCutoff) -> impl Iterator<Item = (usize, [usize; 3])> + '_ {
    (0..cut.n_a).flat_map(move |a| {
        (0..cut.n_b).flat_map(move |b| {
            (0..cut.n_c).map(move |c| (((a * cut.n_b) + b) * cut.n_c + c, [a, b, c]))
        })
    })
}

/// H = r_a a†a + r_b b†b + c†c − k_a a†a (c + c†) + k_b b†b (c + c†).
pub fn build_hamiltonian_sparse(p: &DimensionlessParams, cut: &FockCutoff) -> SparseOperator {
    let mut t = Vec::with_capacity(3 * cut.dim());
    for (i, [a, b, c]) in occupations(cut) {
        t.push((
            i,
            i,
            C64::new(p.r_a * a as f64 + p.r_b * b as f64 + c as f64, 0.0),
        ));
        // −k_a a + k_b b = −κ_ab
        let g = -p.kappa(a, b);
        if c + 1 < cut.n_c && g != 0.0 {
            let v = C64::new(g * ((c + 1) as f64).sqrt(), 0.0);
            t.push((i + 1, i, v)); // c†
            t.push((i, i + 1, v)); // c
        }
    }
    SparseOperator::from_triplets(cut.dim(), t)
}

pub fn build_hamiltonian(p: &DimensionlessParams, cut: &FockCutoff) -> DMatrix<C64> {
    build_hamiltonian_sparse(p, cut).to_dense()
}

/// Annihilation operator of `mode`.
pub fn lowering(mode: Mode, cut: &FockCutoff) -> SparseOperator {
    let stride = match mode {
        Mode::A => cut.n_b * cut.n_c,
        Mode::B => cut.n_c,
        Mode::C => 1,
    };
    let slot = mode as usize;
    let t = occupations(cut)
        .filter(|(_, occ)| occ[slot] > 0)
        .map(|(i, occ)| (i - stride, i, C64::new((occ[slot] as f64).sqrt(), 0.0)))
        .collect();
    SparseOperator::from_triplets(cut.dim(), t)
}

/// Number operator of `mode`, as a diagonal.
pub fn number_diagonal(mode: Mode, cut: &FockCutoff) -> Vec<f64> {
    occupations(cut)
        .map(|(_, occ)| occ[mode as usize] as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncoupled_is_diagonal() {
        let p = DimensionlessParams::new(0.0, 0.0, 1.3, 0.7, 0.0).unwrap();
        let cut = FockCutoff::new(3, 2, 4).unwrap();
        let h = build_hamiltonian(&p, &cut);
        for (i, [a, b, c]) in occupations(&cut) {
            for j in 0..cut.dim() {
                let want = if i == j {
                    1.3 * a as f64 + 0.7 * b as f64 + c as f64
                } else {
                    0.0
                };
                assert_eq!(h[(i, j)], C64::new(want, 0.0));
            }
        }
    }

    #[test]
    fn exactly_hermitian() {
        let p = DimensionlessParams::new(0.4, 0.9, 1.0, 2.0, 0.0).unwrap();
        let cut = FockCutoff::new(3, 3, 5).unwrap();
        let h = build_hamiltonian(&p, &cut);
        assert_eq!(h.adjoint(), h);
    }

    #[test]
    fn matches_operator_algebra() {
        let p = DimensionlessParams::new(0.4, 0.9, 1.1, 0.6, 0.0).unwrap();
        let cut = FockCutoff::new(3, 3, 4).unwrap();
        let a = lowering(Mode::A, &cut).to_dense();
        let b = lowering(Mode::B, &cut).to_dense();
        let c = lowering(Mode::C, &cut).to_dense();
        let na = a.adjoint() * &a;
        let nb = b.adjoint() * &b;
        let x = &c + c.adjoint();
        let s = |v: f64| C64::new(v, 0.0);
        let want =
            &na * s(1.1) + &nb * s(0.6) + c.adjoint() * &c - &na * &x * s(0.4) + &nb * &x * s(0.9);
        assert!((build_hamiltonian(&p, &cut) - want).norm() < 1e-14);
        let diag = number_diagonal(Mode::B, &cut);
        for i in 0..cut.dim() {
            assert!((nb[(i, i)].re - diag[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn vacuum_number_expectation() {
        let cut = FockCutoff::new(2, 2, 3).unwrap();
        let a = lowering(Mode::A, &cut).to_dense();
        assert_eq!((a.adjoint() * a)[(0, 0)], C64::new(0.0, 0.0));
    }
}
