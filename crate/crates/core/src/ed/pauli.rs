//! Real-coefficient Pauli strings on the σᶻ product basis.
//!
//! A string is `coeff · Π_j P_j` with `P_j = X` (x bit), `Z` (z bit) or
//! `Y = iXZ` (both bits). Basis bit `j-1` set means site `j` is down.

use std::collections::BTreeMap;

use super::sparse::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
    pub coeff: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl PauliString {
    /// `coeff · P_a ⊗ P_b` on 1-based sites `a ≠ b`.
    pub fn two_site(coeff: f64, pa: Pauli, a: usize, pb: Pauli, b: usize) -> Self {
        let mut s = PauliString { x: 0, z: 0, coeff };
        for (p, site) in [(pa, a), (pb, b)] {
            let bit = 1u64 << (site - 1);
            match p {
                Pauli::X => s.x |= bit,
                Pauli::Z => s.z |= bit,
                Pauli::Y => {
                    s.x |= bit;
                    s.z |= bit;
                }
            }
        }
        s
    }

    pub fn single(coeff: f64, p: Pauli, site: usize) -> Self {
        let bit = 1u64 << (site - 1);
        match p {
            Pauli::X => PauliString { x: bit, z: 0, coeff },
            Pauli::Z => PauliString { x: 0, z: bit, coeff },
            Pauli::Y => PauliString { x: bit, z: bit, coeff },
        }
    }

    fn n_y(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Image of basis state `c`: `(c', amplitude)`. Panics on an odd number
    /// of `Y` factors, which would make the string non-real.
    #[inline]
    pub fn apply(&self, c: u64) -> (u64, f64) {
        let ny = self.n_y();
        assert!(ny % 2 == 0, "Pauli string with an odd number of Y is not real");
        let mut amp = self.coeff;
        if (ny / 2) % 2 == 1 {
            amp = -amp;
        }
        if (self.z & c).count_ones() % 2 == 1 {
            amp = -amp;
        }
        (c ^ self.x, amp)
    }

    /// Flips the sign once per `X` or `Y` factor on a site in `mask`
    /// (conjugation by `Π_{j∈mask} Z_j`).
    pub fn conjugate_by_z(mut self, mask: u64) -> Self {
        if (self.x & mask).count_ones() % 2 == 1 {
            self.coeff = -self.coeff;
        }
        self
    }

    /// Site-wise substitution `Z → X`, `X → -Z`, `Y → Y`.
    pub fn rotate_back(self) -> Self {
        let only_x = self.x & !self.z;
        let only_z = self.z & !self.x;
        let y = self.x & self.z;
        let mut coeff = self.coeff;
        if only_x.count_ones() % 2 == 1 {
            coeff = -coeff;
        }
        PauliString { x: only_z | y, z: only_x | y, coeff }
    }
}

/// A sum of Pauli strings; like strings are merged.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PauliSum {
    pub terms: Vec<PauliString>,
}

impl PauliSum {
    pub fn push(&mut self, s: PauliString) {
        self.terms.push(s);
    }

    pub fn map(&self, f: impl Fn(PauliString) -> PauliString) -> PauliSum {
        PauliSum { terms: self.terms.iter().copied().map(f).collect() }
    }

    /// Merged, zero-free canonical form.
    pub fn simplified(&self) -> PauliSum {
        let mut acc: BTreeMap<(u64, u64), f64> = BTreeMap::new();
        for t in &self.terms {
            *acc.entry((t.x, t.z)).or_default() += t.coeff;
        }
        PauliSum {
            terms: acc
                .into_iter()
                .filter(|(_, c)| *c != 0.0)
                .map(|((x, z), coeff)| PauliString { x, z, coeff })
                .collect(),
        }
    }

    pub fn to_csr(&self, n_sites: usize) -> CsrMatrix {
        let dim = 1usize << n_sites;
        let mut trip = Vec::with_capacity(dim * self.terms.len());
        for c in 0..dim as u64 {
            for t in &self.terms {
                let (r, amp) = t.apply(c);
                trip.push((r as usize, c as usize, amp));
            }
        }
        CsrMatrix::from_triplets(dim, trip)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_site_actions() {
        // |0> = up, |1> = down
        let x = PauliString::single(1.0, Pauli::X, 1);
        let z = PauliString::single(1.0, Pauli::Z, 1);
        assert_eq!(x.apply(0), (1, 1.0));
        assert_eq!(z.apply(1), (1, -1.0));
        // YY|up up> = (i)(i)|down down> = -|down down>
        let yy = PauliString::two_site(1.0, Pauli::Y, 1, Pauli::Y, 2);
        assert_eq!(yy.apply(0b00), (0b11, -1.0));
        assert_eq!(yy.apply(0b01), (0b10, 1.0));
    }

    #[test]
    fn rotate_back_matches_substitution() {
        let s = PauliString::two_site(2.0, Pauli::X, 1, Pauli::Z, 2).rotate_back();
        assert_eq!(s, PauliString::two_site(-2.0, Pauli::Z, 1, Pauli::X, 2));
        let yy = PauliString::two_site(1.0, Pauli::Y, 1, Pauli::Y, 2);
        assert_eq!(yy.rotate_back(), yy);
    }
}
