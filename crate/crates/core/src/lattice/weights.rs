//! Connected-cover weights `w(X)` and the seam variant `w_N(X)`.
//!
//! Two bonds are connected when they share an endpoint or sit one bond
//! apart, so a connected family of `k` bonds spans an arc of at most `2k`
//! consecutive sites and every such arc is reachable. The minimum cover of
//! `X` is therefore `⌈L/2⌉`, where `L` is the shortest cyclic arc holding
//! `X`, i.e. `N` minus the longest cyclic run of sites outside `X`.

use super::SiteSet;

/// Longest cyclic run of sites outside `x` (capped at `N`).
fn max_gap(x: SiteSet) -> usize {
    let n = x.n_sites();
    if x.is_empty() {
        return n;
    }
    let c = x.index() as u64;
    // start scanning right after an occupied site so runs never wrap
    let start = c.trailing_zeros() as usize;
    let (mut best, mut run) = (0, 0);
    for step in 1..=n {
        let i = (start + step) % n;
        if c >> i & 1 == 0 {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best
}

/// `w(X)`: size of the smallest connected bond set covering `X`; `w(∅) = 0`.
pub fn weight_w(x: SiteSet) -> u32 {
    if x.is_empty() {
        return 0;
    }
    let span = x.n_sites() - max_gap(x);
    span.div_ceil(2) as u32
}

/// `w_N(X)`: as [`weight_w`] but the cover must also touch the seam bond
/// `<N,1>`. Includes `w_N(∅) = 1`.
pub fn weight_wn(x: SiteSet) -> u32 {
    let n = x.n_sites();
    weight_w(x.with_site(n)).min(weight_w(x.with_site(1)))
}

/// Dense `w` and `w_N` tables over all `2^N` subsets, indexed by
/// [`SiteSet::index`]. Immutable once built.
#[derive(Clone, Debug)]
pub struct WeightTable {
    n_sites: usize,
    w: Vec<u8>,
    wn: Vec<u8>,
}

impl WeightTable {
    pub const MAX_SITES: usize = 26;

    pub fn new(n_sites: usize) -> Self {
        assert!(n_sites <= Self::MAX_SITES);
        let size = 1usize << n_sites;
        let mut w = Vec::with_capacity(size);
        let mut wn = Vec::with_capacity(size);
        for idx in 0..size {
            let x = SiteSet::from_index(n_sites, idx);
            w.push(weight_w(x) as u8);
            wn.push(weight_wn(x) as u8);
        }
        WeightTable { n_sites, w, wn }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    #[inline]
    pub fn w(&self, x: SiteSet) -> u32 {
        self.w[x.index()] as u32
    }

    #[inline]
    pub fn wn(&self, x: SiteSet) -> u32 {
        self.wn[x.index()] as u32
    }

    #[inline]
    pub fn w_at(&self, idx: usize) -> u32 {
        self.w[idx] as u32
    }

    #[inline]
    pub fn wn_at(&self, idx: usize) -> u32 {
        self.wn[idx] as u32
    }
}
