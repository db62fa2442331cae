//! Generalized translation `T` and parity `P` as signed permutations.

use super::frames::{build_hamiltonian, check_ed_size, Frame};
use super::sparse::{CsrMatrix, OperatorMatrix};
use crate::error::{Error, Result};
use crate::lattice::rotl;
use crate::model::ModelSpec;

/// `A|c⟩ = sign[c] |image[c]⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPerm {
    pub image: Vec<usize>,
    pub sign: Vec<i8>,
}

impl SignedPerm {
    pub fn identity(dim: usize) -> Self {
        SignedPerm { image: (0..dim).collect(), sign: vec![1; dim] }
    }

    pub fn dim(&self) -> usize {
        self.image.len()
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &SignedPerm) -> SignedPerm {
        let image = other.image.iter().map(|&c| self.image[c]).collect();
        let sign = other.image.iter().zip(&other.sign).map(|(&c, &s)| s * self.sign[c]).collect();
        SignedPerm { image, sign }
    }

    pub fn pow(&self, k: usize) -> SignedPerm {
        (0..k).fold(SignedPerm::identity(self.dim()), |acc, _| self.compose(&acc))
    }

    pub fn to_matrix(&self) -> CsrMatrix {
        CsrMatrix::from_triplets(
            self.dim(),
            (0..self.dim()).map(|c| (self.image[c], c, self.sign[c] as f64)).collect(),
        )
    }

    /// Reads a matrix with exactly one `±1` per column.
    pub fn from_matrix(m: &CsrMatrix) -> Result<SignedPerm> {
        let dim = m.dim();
        let mut image = vec![usize::MAX; dim];
        let mut sign = vec![0i8; dim];
        for (r, c, v) in m.triplets() {
            if image[c] != usize::MAX || (v != 1.0 && v != -1.0) {
                return Err(Error::Model("operator is not a signed permutation".into()));
            }
            image[c] = r;
            sign[c] = v as i8;
        }
        if image.contains(&usize::MAX) {
            return Err(Error::Model("operator is not a signed permutation".into()));
        }
        Ok(SignedPerm { image, sign })
    }
}

/// `T = σᶻ₁ · shift` when the seam coupling is flipped, the pure shift
/// otherwise. The shift sends site `j` to `j + 1`.
pub fn translation(spec: &ModelSpec<f64>) -> SignedPerm {
    let n = spec.n_sites;
    let dim = 1usize << n;
    let twisted = spec.coupling(n) == -1;
    let mut image = Vec::with_capacity(dim);
    let mut sign = Vec::with_capacity(dim);
    for c in 0..dim {
        let img = rotl(c as u64, 1, n) as usize;
        image.push(img);
        // σᶻ₁ on the image reads the old σ_N
        sign.push(if twisted && img & 1 == 1 { -1 } else { 1 });
    }
    SignedPerm { image, sign }
}

/// `P = Π σᶻ_j`.
pub fn parity(n: usize) -> SignedPerm {
    let dim = 1usize << n;
    SignedPerm {
        image: (0..dim).collect(),
        sign: (0..dim).map(|c| if c.count_ones() % 2 == 0 { 1 } else { -1 }).collect(),
    }
}

/// `max |[A, B]|` for a sparse `A` and signed permutation `B`.
pub fn commutator_norm(a: &CsrMatrix, b: &SignedPerm) -> f64 {
    let bm = b.to_matrix();
    a.matmul(&bm).max_abs_diff(&bm.matmul(a))
}

/// `T` and `P` for the transformed frame of `spec`, after checking that both
/// commute with its Hamiltonian.
pub fn build_symmetries(spec: &ModelSpec<f64>) -> Result<(OperatorMatrix, OperatorMatrix)> {
    check_ed_size(spec.n_sites)?;
    let h = build_hamiltonian(spec, transformed_frame(spec))?;
    let t = translation(spec);
    let p = parity(spec.n_sites);
    for op in [&t, &p] {
        let c = commutator_norm(&h, op);
        if c > 1e-12 {
            return Err(Error::SymmetryViolation(c));
        }
    }
    Ok((t.to_matrix(), p.to_matrix()))
}

/// The frame the expansions are written in.
pub fn transformed_frame(spec: &ModelSpec<f64>) -> Frame {
    if spec.model.is_af() {
        Frame::RotatedSublattice
    } else {
        Frame::Rotated
    }
}
