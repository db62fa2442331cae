//! Site subsets of the periodic chain `{1..N}` and their combinatorics.
//!
//! Sites and bonds are 1-based. Bond `j` is `<j, j+1>`; bond `N` is the seam
//! `<N, 1>`. A [`SiteSet`] with bit `j` set contains site `j`, so only bits
//! `1..=N` are ever used and `N` is capped at [`MAX_SITES`].

mod hopping;
mod weights;

use std::fmt;
use std::ops::BitXor;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use hopping::{alpha, alpha_between, beta, AlphaTable};
pub use weights::{weight_w, weight_wn, WeightTable};

/// Largest chain length a [`SiteSet`] can hold in one machine word.
pub const MAX_SITES: usize = 62;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteSet {
    bits: u64,
    n_sites: u8,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BondSet {
    bits: u64,
    n_sites: u8,
}

#[inline]
fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Rotates the low `n` bits of `c` left by `t` (bit `i` moves to `i + t mod n`).
#[inline]
pub(crate) fn rotl(c: u64, t: usize, n: usize) -> u64 {
    let t = t % n;
    if t == 0 {
        return c;
    }
    ((c << t) | (c >> (n - t))) & low_mask(n)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_SITES {
        Err(Error::ChainLength(n, "1..=62"))
    } else {
        Ok(())
    }
}

impl SiteSet {
    pub fn empty(n_sites: usize) -> Self {
        assert!(n_sites >= 1 && n_sites <= MAX_SITES, "chain length {n_sites} out of range");
        SiteSet { bits: 0, n_sites: n_sites as u8 }
    }

    /// The full lattice `Λ`.
    pub fn full(n_sites: usize) -> Self {
        let mut s = Self::empty(n_sites);
        s.bits = low_mask(n_sites) << 1;
        s
    }

    pub fn from_sites(n_sites: usize, sites: &[usize]) -> Result<Self> {
        check_n(n_sites)?;
        let mut bits = 0u64;
        for &j in sites {
            if j == 0 || j > n_sites {
                return Err(Error::Model(format!("site {j} outside 1..={n_sites}")));
            }
            bits |= 1 << j;
        }
        Ok(SiteSet { bits, n_sites: n_sites as u8 })
    }

    /// Builds from the raw word (bit `j` ⇔ site `j`).
    pub fn from_bits(n_sites: usize, bits: u64) -> Result<Self> {
        check_n(n_sites)?;
        if bits & !(low_mask(n_sites) << 1) != 0 {
            return Err(Error::Model(format!("bits {bits:#x} outside sites 1..={n_sites}")));
        }
        Ok(SiteSet { bits, n_sites: n_sites as u8 })
    }

    /// Dense index in `0..2^N` (bit `j-1` ⇔ site `j`). Also the σᶻ basis index
    /// of the configuration whose down spins are exactly this set.
    #[inline]
    pub fn index(self) -> usize {
        (self.bits >> 1) as usize
    }

    #[inline]
    pub fn from_index(n_sites: usize, index: usize) -> Self {
        debug_assert!((index as u64) <= low_mask(n_sites));
        SiteSet { bits: (index as u64) << 1, n_sites: n_sites as u8 }
    }

    /// `{j, j+1}` with the periodic wrap.
    pub fn pair(n_sites: usize, j: usize) -> Self {
        let n = n_sites;
        let next = if j == n { 1 } else { j + 1 };
        SiteSet { bits: (1 << j) | (1 << next), n_sites: n as u8 }
    }

    /// `{1, .., m}` for `0 <= m <= N`.
    pub fn interval_from_one(n_sites: usize, m: usize) -> Self {
        debug_assert!(m <= n_sites);
        SiteSet { bits: low_mask(m) << 1, n_sites: n_sites as u8 }
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn n_sites(self) -> usize {
        self.n_sites as usize
    }

    #[inline]
    pub fn contains(self, j: usize) -> bool {
        j >= 1 && j <= self.n_sites() && self.bits & (1 << j) != 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn is_full(self) -> bool {
        self == Self::full(self.n_sites())
    }

    /// Sites in increasing order.
    pub fn sites(self) -> Vec<usize> {
        (1..=self.n_sites()).filter(|&j| self.contains(j)).collect()
    }

    pub fn sym_diff(self, other: SiteSet) -> Result<SiteSet> {
        if self.n_sites != other.n_sites {
            return Err(Error::SizeMismatch { left: self.n_sites(), right: other.n_sites() });
        }
        Ok(self ^ other)
    }

    pub fn union(self, other: SiteSet) -> SiteSet {
        debug_assert_eq!(self.n_sites, other.n_sites);
        SiteSet { bits: self.bits | other.bits, n_sites: self.n_sites }
    }

    pub fn with_site(self, j: usize) -> SiteSet {
        debug_assert!(j >= 1 && j <= self.n_sites());
        SiteSet { bits: self.bits | (1 << j), n_sites: self.n_sites }
    }

    /// `Λ △ X`.
    pub fn complement(self) -> SiteSet {
        self ^ Self::full(self.n_sites())
    }

    /// Cyclic translation `X + t`: site `j` moves to `j + t mod N`.
    pub fn shift(self, t: i64) -> SiteSet {
        let n = self.n_sites();
        let t = t.rem_euclid(n as i64) as usize;
        SiteSet::from_index(n, rotl(self.index() as u64, t, n) as usize)
    }

    /// Representative of the cyclic-translation orbit: the member with the
    /// smallest index.
    pub fn canonical(self) -> SiteSet {
        let n = self.n_sites();
        let c = self.index() as u64;
        let best = (0..n).map(|t| rotl(c, t, n)).min().unwrap_or(c);
        SiteSet::from_index(n, best as usize)
    }

    /// Generalized translation `T^t X`, where `T X = {1} △ (X + 1)`.
    /// `t` is read modulo `2N`.
    pub fn gen_translate(self, t: i64) -> SiteSet {
        let n = self.n_sites();
        let t = t.rem_euclid(2 * n as i64) as usize;
        self.shift(t as i64) ^ kink_set(n, t)
    }

    /// Boundary `∂X`: bonds with exactly one endpoint in `X`.
    pub fn boundary(self) -> BondSet {
        let n = self.n_sites();
        let c = self.index() as u64;
        // bit j-1 of `next` is site j+1
        let next = rotl(c, n - 1, n);
        BondSet { bits: (c ^ next) << 1, n_sites: self.n_sites }
    }

    /// `n(X) = Σ_{j ∈ ∂X} s(j, N)` with `s = -1` on the seam.
    pub fn n_of(self) -> i32 {
        let b = self.boundary();
        b.len() as i32 - if b.contains(self.n_sites()) { 2 } else { 0 }
    }

    /// Sites `j` carrying an interface between `j` and `j+1`: `j ∈ ∂X` for
    /// `j ≠ N`, and both-or-neither of `N, 1` for the seam. Always has
    /// `n(X) + 1` elements.
    pub fn interface_sites(self) -> SiteSet {
        let n = self.n_sites();
        SiteSet { bits: self.boundary().bits ^ (1 << n), n_sites: self.n_sites }
    }

    /// `σ(X)` for the configuration whose down spins are `down`.
    #[inline]
    pub fn sigma(self, down: SiteSet) -> i32 {
        if (self.bits & down.bits).count_ones() % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// `T^m ∅`: `{1..m}` for `m <= N`, `{m-N+1..N}` for `N < m < 2N`.
pub fn kink_set(n_sites: usize, m: usize) -> SiteSet {
    let m = m % (2 * n_sites);
    if m <= n_sites {
        SiteSet::interval_from_one(n_sites, m)
    } else {
        SiteSet::interval_from_one(n_sites, m - n_sites).complement()
    }
}

/// Convenience free-function form of [`SiteSet::sym_diff`].
pub fn sym_diff(a: SiteSet, b: SiteSet) -> Result<SiteSet> {
    a.sym_diff(b)
}

impl BitXor for SiteSet {
    type Output = SiteSet;

    #[inline]
    fn bitxor(self, rhs: SiteSet) -> SiteSet {
        debug_assert_eq!(self.n_sites, rhs.n_sites);
        SiteSet { bits: self.bits ^ rhs.bits, n_sites: self.n_sites }
    }
}

impl fmt::Debug for SiteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}/N={}", self.sites(), self.n_sites)
    }
}

impl fmt::Display for SiteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.sites().iter().map(|j| j.to_string()).collect();
        write!(f, "{{{}}}", s.join(","))
    }
}

impl BondSet {
    pub fn empty(n_sites: usize) -> Self {
        BondSet { bits: 0, n_sites: n_sites as u8 }
    }

    pub fn from_bonds(n_sites: usize, bonds: &[usize]) -> Result<Self> {
        check_n(n_sites)?;
        let mut bits = 0;
        for &j in bonds {
            if j == 0 || j > n_sites {
                return Err(Error::Model(format!("bond {j} outside 1..={n_sites}")));
            }
            bits |= 1 << j;
        }
        Ok(BondSet { bits, n_sites: n_sites as u8 })
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn n_sites(self) -> usize {
        self.n_sites as usize
    }

    pub fn contains(self, j: usize) -> bool {
        j >= 1 && j <= self.n_sites() && self.bits & (1 << j) != 0
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn bonds(self) -> Vec<usize> {
        (1..=self.n_sites()).filter(|&j| self.contains(j)).collect()
    }
}

impl fmt::Debug for BondSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n_sites();
        let s: Vec<String> = self
            .bonds()
            .iter()
            .map(|&j| format!("<{},{}>", j, if j == n { 1 } else { j + 1 }))
            .collect();
        write!(f, "{{{}}}", s.join(","))
    }
}

/// Wire form: sorted 1-based site list plus the chain length.
#[derive(Serialize, Deserialize)]
struct SiteSetRepr {
    n_sites: usize,
    sites: Vec<usize>,
}

impl Serialize for SiteSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SiteSetRepr { n_sites: self.n_sites(), sites: self.sites() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SiteSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SiteSetRepr::deserialize(d)?;
        SiteSet::from_sites(r.n_sites, &r.sites).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, s: &[usize]) -> SiteSet {
        SiteSet::from_sites(n, s).unwrap()
    }

    #[test]
    fn sym_diff_examples() {
        assert_eq!(sym_diff(set(5, &[1, 2]), set(5, &[2, 3])).unwrap(), set(5, &[1, 3]));
        let x = set(6, &[1, 4, 6]);
        assert_eq!(x.sym_diff(SiteSet::empty(6)).unwrap(), x);
        assert!(x.sym_diff(x).unwrap().is_empty());
        assert_eq!(
            x.sym_diff(SiteSet::empty(7)),
            Err(Error::SizeMismatch { left: 6, right: 7 })
        );
    }

    #[test]
    fn boundary_examples() {
        let b = set(5, &[2, 3]).boundary();
        assert_eq!(b.bonds(), vec![1, 3]);
        assert!(SiteSet::empty(5).boundary().is_empty());
        assert!(SiteSet::full(5).boundary().is_empty());
        // seam bond
        assert_eq!(set(5, &[1]).boundary().bonds(), vec![1, 5]);
    }

    #[test]
    fn gen_translate_examples() {
        let n = 7;
        let e = SiteSet::empty(n);
        assert_eq!(e.gen_translate(1), set(n, &[1]));
        assert_eq!(e.gen_translate(2), set(n, &[1, 2]));
        assert_eq!(e.gen_translate(n as i64), SiteSet::full(n));
        let x = set(n, &[2, 5, 6]);
        assert_eq!(x.gen_translate(2 * n as i64), x);
        assert_eq!(x.gen_translate(n as i64), x.complement());
        assert_eq!(x.gen_translate(-1).gen_translate(1), x);
        // one step is {1} △ (x+1)
        assert_eq!(x.gen_translate(1), set(n, &[1]) ^ x.shift(1));
        // composing single steps
        let mut y = x;
        for t in 1..=3 * n as i64 {
            y = set(n, &[1]) ^ y.shift(1);
            assert_eq!(y, x.gen_translate(t));
        }
    }

    #[test]
    fn n_of_examples() {
        assert_eq!(set(5, &[2, 3]).n_of(), 2);
        assert_eq!(set(5, &[5, 1]).n_of(), 2);
        for n in 3..9 {
            for m in 0..2 * n {
                assert_eq!(kink_set(n, m).n_of(), 0, "N={n} m={m}");
                assert_eq!(SiteSet::empty(n).gen_translate(m as i64), kink_set(n, m));
            }
        }
    }

    #[test]
    fn interface_site_examples() {
        assert_eq!(SiteSet::empty(5).interface_sites().sites(), vec![5]);
        assert_eq!(set(5, &[1, 2]).interface_sites().sites(), vec![2]);
        for n in 3..=8 {
            for idx in 0..1usize << n {
                let x = SiteSet::from_index(n, idx);
                assert_eq!(x.interface_sites().len() as i32 - 1, x.n_of());
            }
        }
    }

    #[test]
    fn n_of_vanishes_only_on_kink_sets() {
        for n in 3..=9 {
            let kinks: Vec<SiteSet> = (0..2 * n).map(|m| kink_set(n, m)).collect();
            for idx in 0..1usize << n {
                let x = SiteSet::from_index(n, idx);
                assert!(x.n_of() >= 0 && x.n_of() % 2 == 0);
                assert_eq!(x.n_of() == 0, kinks.contains(&x));
            }
        }
    }

    #[test]
    fn canonical_is_orbit_minimum() {
        let x = set(6, &[4, 5]);
        assert_eq!(x.canonical(), set(6, &[1, 2]));
        assert_eq!(set(6, &[6, 1]).canonical(), set(6, &[1, 2]));
        for idx in 0..64 {
            let x = SiteSet::from_index(6, idx);
            for t in 0..6 {
                assert_eq!(x.shift(t).canonical(), x.canonical());
            }
        }
    }

    #[test]
    fn serde_wire_form_is_site_list() {
        let x = set(9, &[1, 2]);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"{"n_sites":9,"sites":[1,2]}"#);
        assert_eq!(serde_json::from_str::<SiteSet>(&json).unwrap(), x);
        assert!(serde_json::from_str::<SiteSet>(r#"{"n_sites":3,"sites":[4]}"#).is_err());
    }
}
