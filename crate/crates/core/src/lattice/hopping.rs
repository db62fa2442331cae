//! Move distances under the ferromagnetic hopping `X ↦ X △ {j, j+1}`,
//! `j ∈ I(X)`. The move graph is undirected: a move at `j` leaves `j` in
//! `I` of the image.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, OnceLock, RwLock};

use super::{kink_set, SiteSet};

const UNREACHED: u16 = u16::MAX;

fn neighbours(x: SiteSet) -> impl Iterator<Item = SiteSet> {
    let n = x.n_sites();
    let moves = x.interface_sites();
    (1..=n).filter(move |&j| moves.contains(j)).map(move |j| x ^ SiteSet::pair(n, j))
}

/// Full table `α(X)` for every `X`, from one breadth-first sweep out of `∅`.
#[derive(Clone, Debug)]
pub struct AlphaTable {
    n_sites: usize,
    dist: Vec<u16>,
}

impl AlphaTable {
    pub const MAX_SITES: usize = 24;

    pub fn new(n_sites: usize) -> Self {
        assert!(n_sites >= 1 && n_sites <= Self::MAX_SITES);
        let mut dist = vec![UNREACHED; 1 << n_sites];
        let mut queue = VecDeque::new();
        dist[0] = 0;
        queue.push_back(SiteSet::empty(n_sites));
        while let Some(x) = queue.pop_front() {
            let d = dist[x.index()];
            for y in neighbours(x) {
                if dist[y.index()] == UNREACHED {
                    dist[y.index()] = d + 1;
                    queue.push_back(y);
                }
            }
        }
        AlphaTable { n_sites, dist }
    }

    /// Process-wide memoized table for `N <= 20`.
    pub fn shared(n_sites: usize) -> Arc<AlphaTable> {
        static CACHE: OnceLock<RwLock<HashMap<usize, Arc<AlphaTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(t) = cache.read().expect("alpha cache poisoned").get(&n_sites) {
            return t.clone();
        }
        let table = Arc::new(AlphaTable::new(n_sites));
        cache
            .write()
            .expect("alpha cache poisoned")
            .entry(n_sites)
            .or_insert(table)
            .clone()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// `None` stands for infinity.
    #[inline]
    pub fn get(&self, x: SiteSet) -> Option<u32> {
        self.at(x.index())
    }

    #[inline]
    pub fn at(&self, idx: usize) -> Option<u32> {
        match self.dist[idx] {
            UNREACHED => None,
            d => Some(d as u32),
        }
    }

    pub fn beta(&self, m: i64) -> Option<u32> {
        let n = self.n_sites;
        self.get(kink_set(n, m.rem_euclid(2 * n as i64) as usize))
    }
}

/// Bidirectional BFS distance from `x` to `y` under the hopping moves.
pub fn alpha_between(x: SiteSet, y: SiteSet) -> Option<u32> {
    assert_eq!(x.n_sites(), y.n_sites());
    if x.len() % 2 != y.len() % 2 {
        return None;
    }
    if x == y {
        return Some(0);
    }
    let mut seen = [HashMap::new(), HashMap::new()];
    let mut frontier = [vec![x], vec![y]];
    seen[0].insert(x, 0u32);
    seen[1].insert(y, 0u32);
    loop {
        // expand the smaller side
        let s = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
        if frontier[s].is_empty() {
            return None;
        }
        let mut next = Vec::new();
        let mut best: Option<u32> = None;
        for &u in &frontier[s] {
            let du = seen[s][&u];
            for v in neighbours(u) {
                if let Some(&dv) = seen[1 - s].get(&v) {
                    let total = du + 1 + dv;
                    best = Some(best.map_or(total, |b| b.min(total)));
                }
                if !seen[s].contains_key(&v) {
                    seen[s].insert(v, du + 1);
                    next.push(v);
                }
            }
        }
        if best.is_some() {
            return best;
        }
        frontier[s] = next;
    }
}

/// `α(X)`: moves needed to reach `∅`; `None` is infinity.
pub fn alpha(x: SiteSet) -> Option<u32> {
    if x.len() % 2 == 1 {
        return None;
    }
    if x.n_sites() <= 20 {
        AlphaTable::shared(x.n_sites()).get(x)
    } else {
        alpha_between(x, SiteSet::empty(x.n_sites()))
    }
}

/// `β_m = α(T^m ∅)`, infinite for odd `m`.
pub fn beta(n_sites: usize, m: i64) -> Option<u32> {
    alpha(SiteSet::empty(n_sites).gen_translate(m))
}
