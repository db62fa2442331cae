//! Ground-state Kirkwood–Thomas solver for the uniform antiferromagnetic
//! chains in the transformed frame, `H = Σ_j [-XX + εZZ (- εYY for XXZ)]`.
//!
//! With `ψ(σ) = exp[-½ Σ_X g(X) σ(X)]`, `Hψ/ψ` is a function of `σ` whose
//! `σ(X)` coefficients must vanish for `∅ ≠ X ≠ Λ`. Writing `E_j` for the
//! coefficients of `exp(Σ_{Y:j} g(Y)σ(Y))` and `R_j` for its part with two
//! or more factors:
//!
//! * XZ:  `|∂X| g(X) = -Σ_j R_j(X) + ε 1_nn(X)`
//! * XXZ: `|∂X| g(X) = -Σ_j R_j(X) + 2ε 1_nn(X) + ε Σ_j h_j(X △ {j,j+1})`,
//!   where `h_j = E_j - δ_∅`.
//!
//! The `∅` and `Λ` coefficients give `(E₊ + E₋)/2` and `(E₊ - E₋)/2`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{SiteSet, WeightTable};
use crate::model::{ModelKind, ModelSpec, TruncationPolicy};
use crate::scalar::Real;
use crate::series::seam_exponential;
use crate::transform::to_configs;

/// Largest chain the dense ground solver accepts.
pub const MAX_GROUND_SITES: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct GroundSolution<T: Real = f64> {
    pub model: ModelKind,
    pub n_sites: usize,
    pub epsilon: T,
    pub w_max: u32,
    /// Translation-class representatives only (see [`SiteSet::canonical`]).
    pub g: BTreeMap<SiteSet, T>,
    pub e_plus: T,
    pub e_minus: T,
    pub norm_g: T,
    pub iterations: usize,
    pub converged: bool,
    /// Sup-norm change per iteration.
    pub deltas: Vec<T>,
}

impl<T: Real> GroundSolution<T> {
    /// `g(X)` for any `X`, via its orbit representative.
    pub fn g_at(&self, x: SiteSet) -> T {
        self.g.get(&x.canonical()).copied().unwrap_or_else(T::zero)
    }

    /// `g` on all `2^N` subsets, indexed by [`SiteSet::index`].
    pub fn dense(&self) -> Vec<T> {
        let n = self.n_sites;
        let mut out = vec![T::zero(); 1 << n];
        for (&rep, &v) in &self.g {
            for t in 0..n {
                out[rep.shift(t as i64).index()] = v;
            }
        }
        out
    }

    /// Observed contraction ratios `δ_{k+1}/δ_k`.
    pub fn contraction_ratios(&self) -> Vec<T> {
        self.deltas
            .windows(2)
            .filter(|w| w[0] > T::zero())
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Per-sector maximum deviation of `Hψ/ψ` from a constant, with the
/// fitted constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroundResidual<T> {
    pub max_dev_even: T,
    pub max_dev_odd: T,
    pub e_plus: T,
    pub e_minus: T,
}

struct Orbits {
    /// Translation representatives, as dense indices.
    reps: Vec<usize>,
    /// For each representative, its orbit members.
    members: Vec<Vec<usize>>,
}

fn orbits(n: usize, keep: impl Fn(SiteSet) -> bool) -> Orbits {
    let mut seen = vec![false; 1 << n];
    let mut reps = Vec::new();
    let mut members = Vec::new();
    for idx in 0..1usize << n {
        if seen[idx] {
            continue;
        }
        let x = SiteSet::from_index(n, idx);
        let mut orbit: Vec<usize> = (0..n).map(|t| x.shift(t as i64).index()).collect();
        orbit.sort_unstable();
        orbit.dedup();
        for &m in &orbit {
            seen[m] = true;
        }
        if keep(x) {
            reps.push(idx);
            members.push(orbit);
        }
    }
    Orbits { reps, members }
}

/// Right-hand side pieces shared by the update and the energies.
struct Sums<T> {
    /// `S_N`: full seam exponential including the constant term.
    s: Vec<T>,
}

impl<T: Real> Sums<T> {
    fn new(g: &[T], n: usize, n_max: u32) -> Self {
        Sums { s: seam_exponential(g, n, n_max) }
    }

    /// `R_N(Y)`: seam series with at least two factors.
    #[inline]
    fn r(&self, g: &[T], y: usize, n: usize) -> T {
        let mut v = self.s[y];
        if y == 0 {
            v = v - T::one();
        }
        if crate::series::crosses_seam(y, n) {
            v = v - g[y];
        }
        v
    }

    /// `h_N(Y) = S_N(Y) - δ_∅`.
    #[inline]
    fn h(&self, y: usize) -> T {
        if y == 0 {
            self.s[0] - T::one()
        } else {
            self.s[y]
        }
    }
}

fn is_nn_pair(x: SiteSet) -> bool {
    let n = x.n_sites();
    x.len() == 2 && (1..=n).any(|j| SiteSet::pair(n, j) == x)
}

fn check_ground_inputs<T: Real>(spec: &ModelSpec<T>, policy: &TruncationPolicy) -> Result<()> {
    policy.validate()?;
    spec.validate(policy.norm_m)?;
    if !spec.model.is_af() {
        return Err(Error::Model(format!("ground solver covers the antiferromagnets, not {}", spec.model)));
    }
    if !spec.is_uniform() {
        return Err(Error::Model("ground solve needs uniform couplings".into()));
    }
    if spec.n_sites > MAX_GROUND_SITES {
        return Err(Error::ChainLength(spec.n_sites, "3..=24 for the dense ground solver"));
    }
    Ok(())
}

/// Picard iteration of the coefficient equations from `g ≡ 0`.
pub fn solve_ground<T: Real>(spec: &ModelSpec<T>, policy: &TruncationPolicy) -> Result<GroundSolution<T>> {
    check_ground_inputs(spec, policy)?;
    let n = spec.n_sites;
    let eps = spec.epsilon;
    let nt = T::of_int(n as i64);
    let mut sol = GroundSolution {
        model: spec.model,
        n_sites: n,
        epsilon: eps,
        w_max: policy.w_max,
        g: BTreeMap::new(),
        e_plus: -nt,
        e_minus: -nt,
        norm_g: T::zero(),
        iterations: 1,
        converged: true,
        deltas: vec![T::zero()],
    };
    if eps == T::zero() {
        return Ok(sol);
    }

    let weights = WeightTable::new(n);
    let full = SiteSet::full(n);
    let orb = orbits(n, |x| !x.is_empty() && x != full && weights.w(x) <= policy.w_max);
    let n_max = policy.n_max();
    let xxz = spec.model == ModelKind::XxzAf;
    let seam_pair = SiteSet::pair(n, n).index();
    let two = T::of(2.0);

    // per representative: its translates X.shift(N-j) for j = 1..N, boundary size, nn flag
    let rows: Vec<(Vec<usize>, T, bool)> = orb
        .reps
        .iter()
        .map(|&idx| {
            let x = SiteSet::from_index(n, idx);
            let shifts = (1..=n).map(|j| x.shift((n - j) as i64).index()).collect();
            (shifts, T::of_int(x.boundary().len() as i64), is_nn_pair(x))
        })
        .collect();

    let mut g = vec![T::zero(); 1 << n];
    let mut next = g.clone();
    let tol = T::of(policy.tol);
    let mut deltas = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < policy.max_iter {
        iterations += 1;
        let sums = Sums::new(&g, n, n_max);
        let updates: Vec<T> = rows
            .par_iter()
            .map(|(shifts, nb, nn)| {
                let mut rhs = T::zero();
                for &y in shifts {
                    rhs = rhs - sums.r(&g, y, n);
                    if xxz {
                        rhs = rhs + eps * sums.h(y ^ seam_pair);
                    }
                }
                if *nn {
                    rhs = rhs + if xxz { two * eps } else { eps };
                }
                rhs / *nb
            })
            .collect();
        let mut delta = T::zero();
        for (k, &v) in updates.iter().enumerate() {
            let old = g[orb.reps[k]];
            delta = delta.max((v - old).abs());
            for &m in &orb.members[k] {
                next[m] = v;
            }
        }
        std::mem::swap(&mut g, &mut next);
        deltas.push(delta);
        if !delta.is_finite() {
            return Err(Error::Divergence { iterations, last_delta: delta.f64() });
        }
        if delta < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        let last = deltas.last().copied().unwrap_or_else(T::zero).f64();
        return Err(Error::Divergence { iterations, last_delta: last });
    }

    let (ep, em) = energies_from_dense(&g, spec.model, n, eps, n_max);
    sol.g = orb
        .reps
        .iter()
        .filter(|&&idx| g[idx] != T::zero())
        .map(|&idx| (SiteSet::from_index(n, idx), g[idx]))
        .collect();
    sol.e_plus = ep;
    sol.e_minus = em;
    sol.iterations = iterations;
    sol.converged = true;
    sol.deltas = deltas;
    sol.norm_g = g_norm(&sol, policy)?;
    Ok(sol)
}

fn energies_from_dense<T: Real>(g: &[T], model: ModelKind, n: usize, eps: T, n_max: u32) -> (T, T) {
    let sums = Sums::new(g, n, n_max);
    let nt = T::of_int(n as i64);
    let full = (1usize << n) - 1;
    let mut a = -nt - nt * sums.r(g, 0, n);
    let mut b = -nt * sums.r(g, full, n);
    if model == ModelKind::XxzAf {
        let p = SiteSet::pair(n, n).index();
        a = a + eps * nt * sums.h(p);
        b = b + eps * nt * sums.h(full ^ p);
    }
    (a + b, a - b)
}

/// `(E₊, E₋)` re-evaluated from the stored coefficients.
pub fn ground_energies<T: Real>(
    sol: &GroundSolution<T>,
    spec: &ModelSpec<T>,
    policy: &TruncationPolicy,
) -> Result<(T, T)> {
    if !sol.converged {
        return Err(Error::InvariantViolation("ground solution did not converge".into()));
    }
    if spec.n_sites != sol.n_sites {
        return Err(Error::SizeMismatch { left: spec.n_sites, right: sol.n_sites });
    }
    if sol.g.is_empty() {
        let nt = T::of_int(sol.n_sites as i64);
        return Ok((-nt, -nt));
    }
    Ok(energies_from_dense(&sol.dense(), spec.model, sol.n_sites, spec.epsilon, policy.n_max()))
}

/// `‖g‖ = Σ_{X : <1,2> ∈ ∂X} |g(X)| |∂X| (|ε|M)^{-w(X)}`.
pub fn g_norm<T: Real>(sol: &GroundSolution<T>, policy: &TruncationPolicy) -> Result<T> {
    if sol.g.values().all(|v| *v == T::zero()) {
        return Ok(T::zero());
    }
    let base = sol.epsilon.abs() * T::of(policy.norm_m);
    if base == T::zero() {
        return Err(Error::WeightUndefined);
    }
    let n = sol.n_sites;
    let mut total = T::zero();
    for (idx, &v) in sol.dense().iter().enumerate() {
        if v == T::zero() {
            continue;
        }
        let x = SiteSet::from_index(n, idx);
        let b = x.boundary();
        if b.contains(1) {
            let w = crate::lattice::weight_w(x) as i32;
            total = total + v.abs() * T::of_int(b.len() as i64) * base.powi(-w);
        }
    }
    Ok(total)
}

/// Evaluates `L(σ) = Hψ(σ)/ψ(σ)` at every configuration and reports how far
/// it is from constant on each parity sector.
pub fn residual_ground<T: Real>(sol: &GroundSolution<T>, spec: &ModelSpec<T>) -> Result<GroundResidual<T>> {
    let n = spec.n_sites;
    if n != sol.n_sites {
        return Err(Error::SizeMismatch { left: n, right: sol.n_sites });
    }
    if n > MAX_GROUND_SITES {
        return Err(Error::ChainLength(n, "3..=24 for pointwise residuals"));
    }
    let eps = spec.epsilon;
    let xxz = spec.model == ModelKind::XxzAf;
    // Φ(σ) = Σ_X g(X)σ(X), so ψ(σ') / ψ(σ) = exp[(Φ(σ) - Φ(σ'))/2]
    let phi = to_configs(&sol.dense());
    let half = T::of(0.5);
    let local: Vec<T> = (0..1usize << n)
        .into_par_iter()
        .map(|c| {
            let mut l = T::zero();
            for j in 0..n {
                let pair = (1usize << j) | (1usize << ((j + 1) % n));
                let zz = if (c & pair).count_ones() == 1 { -T::one() } else { T::one() };
                let hop = ((phi[c] - phi[c ^ pair]) * half).exp();
                l = l - hop + eps * zz;
                if xxz {
                    l = l + eps * zz * hop;
                }
            }
            l
        })
        .collect();
    let mut sums = [T::zero(); 2];
    let mut counts = [0usize; 2];
    for (c, &l) in local.iter().enumerate() {
        let s = (c.count_ones() % 2) as usize;
        sums[s] = sums[s] + l;
        counts[s] += 1;
    }
    let mean = [sums[0] / T::of_int(counts[0] as i64), sums[1] / T::of_int(counts[1] as i64)];
    let mut dev = [T::zero(); 2];
    for (c, &l) in local.iter().enumerate() {
        let s = (c.count_ones() % 2) as usize;
        dev[s] = dev[s].max((l - mean[s]).abs());
    }
    Ok(GroundResidual { max_dev_even: dev[0], max_dev_odd: dev[1], e_plus: mean[0], e_minus: mean[1] })
}
