//! Hamiltonians in the three frames related by `R = exp(iπ/4 Σ σʸ)` and the
//! sublattice flip `U = Π_{j odd} σᶻ_j`.
//!
//! The spec's couplings `J_j` live in the fully transformed frame, so that
//! frame is built directly and the others are obtained by undoing `U` and
//! then `R` on each Pauli string.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::pauli::{Pauli, PauliString, PauliSum};
use super::sparse::{CsrMatrix, OperatorMatrix};
use crate::error::{Error, Result};
use crate::model::{ModelKind, ModelSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    Original,
    Rotated,
    RotatedSublattice,
}

/// Largest chain the oracle will build an operator for.
pub const MAX_ED_SITES: usize = 20;

pub(crate) fn check_ed_size(n: usize) -> Result<()> {
    if !(2..=MAX_ED_SITES).contains(&n) {
        Err(Error::ChainLength(n, "2..=20 for exact diagonalization"))
    } else {
        Ok(())
    }
}

/// Mask of odd sites, in basis-bit layout.
pub(crate) fn odd_site_mask(n: usize) -> u64 {
    (1..=n).filter(|j| j % 2 == 1).fold(0, |m, j| m | 1 << (j - 1))
}

/// The Hamiltonian `H` the solvers work with, per bond `j → j+1`:
/// XZ `-J XX + ε ZZ`; AF XXZ `-J XX + ε ZZ - εJ YY`; ferro `-J XX - ε ZZ - εJ YY`.
fn transformed_terms(spec: &ModelSpec<f64>) -> PauliSum {
    let n = spec.n_sites;
    let eps = spec.epsilon;
    let mut h = PauliSum::default();
    for j in 1..=n {
        let k = if j == n { 1 } else { j + 1 };
        let jj = spec.coupling(j) as f64;
        h.push(PauliString::two_site(-jj, Pauli::X, j, Pauli::X, k));
        match spec.model {
            ModelKind::XzAf => {
                h.push(PauliString::two_site(eps, Pauli::Z, j, Pauli::Z, k));
            }
            ModelKind::XxzAf => {
                h.push(PauliString::two_site(eps, Pauli::Z, j, Pauli::Z, k));
                h.push(PauliString::two_site(-eps * jj, Pauli::Y, j, Pauli::Y, k));
            }
            ModelKind::XxzFerro => {
                h.push(PauliString::two_site(-eps, Pauli::Z, j, Pauli::Z, k));
                h.push(PauliString::two_site(-eps * jj, Pauli::Y, j, Pauli::Y, k));
            }
        }
    }
    h
}

/// Pauli form of the Hamiltonian in `frame`.
pub fn hamiltonian_terms(spec: &ModelSpec<f64>, frame: Frame) -> Result<PauliSum> {
    let n = spec.n_sites;
    let h = transformed_terms(spec);
    let af = spec.model.is_af();
    let out = match (frame, af) {
        (Frame::RotatedSublattice, true) => h,
        (Frame::RotatedSublattice, false) => {
            return Err(Error::InvalidFrame { frame: "rotated-sublattice".into(), model: spec.model.to_string() })
        }
        (Frame::Rotated, true) => h.map(|s| s.conjugate_by_z(odd_site_mask(n))),
        (Frame::Rotated, false) => h,
        (Frame::Original, true) => h.map(|s| s.conjugate_by_z(odd_site_mask(n)).rotate_back()),
        (Frame::Original, false) => h.map(PauliString::rotate_back),
    };
    Ok(out.simplified())
}

pub fn build_hamiltonian(spec: &ModelSpec<f64>, frame: Frame) -> Result<OperatorMatrix> {
    check_ed_size(spec.n_sites)?;
    if spec.couplings.len() != spec.n_sites {
        return Err(Error::SizeMismatch { left: spec.n_sites, right: spec.couplings.len() });
    }
    Ok(hamiltonian_terms(spec, frame)?.to_csr(spec.n_sites))
}

/// Dense `R = ⊗ r` with `r = exp(iπ/4 σʸ) = [[1, 1], [-1, 1]]/√2`.
pub fn rotation_matrix(n: usize) -> DMatrix<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // r[(out, in)], index 0 = up
    let r = [[s, s], [-s, s]];
    let dim = 1usize << n;
    DMatrix::from_fn(dim, dim, |a, b| {
        (0..n).map(|j| r[(a >> j) & 1][(b >> j) & 1]).product()
    })
}

/// Dense sublattice flip `U = Π_{j odd} σᶻ_j` (diagonal).
pub fn sublattice_matrix(n: usize) -> CsrMatrix {
    let mask = odd_site_mask(n);
    let dim = 1usize << n;
    CsrMatrix::from_triplets(
        dim,
        (0..dim)
            .map(|c| (c, c, if (c as u64 & mask).count_ones() % 2 == 1 { -1.0 } else { 1.0 }))
            .collect(),
    )
}
