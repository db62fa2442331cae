//! Interface (kink) expansion on odd chains with the seam bond flipped.
//!
//! The trial state is `Ω Σ_l e^{ikl} Σ_X e(X) σ(T^l X)` with `Ω` the uniform
//! ground state. Writing `G_j = 1 + Σ_Y h(Y)σ(Y+j)` for the ratio of `Ω`
//! across bond `j`, the eigenvalue equation becomes, coefficient by
//! coefficient,
//!
//! ```text
//! 2n(X)e(X) + 2S_h(X) - 2ε'S_ε(X) - 2ε'S_εh(X) = Σ_s e_s e(T^{-s}X)
//! S_h(X)  = Σ_{Z, j ∈ I(Z), Y} h(Y) e(Z) 1((Y+j) △ Z = X)
//! S_ε(X)  = Σ_{Z, j ∈ I(Z)} e(Z) 1(Z △ {j,j+1} = X)
//! S_εh(X) = Σ_{Z, j ∈ I(Z), Y} h(Y) e(Z) 1((Y+j) △ Z △ {j,j+1} = X)
//! ```
//!
//! with `ε' = 0` for XZ, `ε' = ε` for XXZ. The ferromagnet has `Ω = 1`, so
//! `h = 0` and `ε' = ε`. Rows with `n(X) = 0` are the kink sets `T^m ∅` and
//! fix `e_m`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ground::GroundSolution;
use crate::lattice::{kink_set, rotl, AlphaTable, SiteSet, WeightTable};
use crate::model::{ModelKind, ModelSpec, TruncationPolicy};
use crate::scalar::Real;
use crate::series::seam_exponential;
use crate::transform::{to_coeffs, to_configs};

/// Largest chain the dense interface solver accepts.
pub const MAX_INTERFACE_SITES: usize = 19;
/// Largest chain [`residual_interface`] enumerates.
pub const MAX_RESIDUAL_SITES: usize = 15;

/// `exp(Σ_{Y:N} g(Y)σ(Y)) = 1 + Σ_Y h(Y)σ(Y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeamExpansion<T: Real = f64> {
    pub model: ModelKind,
    pub n_sites: usize,
    pub epsilon: T,
    pub w_max: u32,
    pub h: BTreeMap<SiteSet, T>,
}

impl<T: Real> SeamExpansion<T> {
    /// `h ≡ 0`; what the ferromagnet uses.
    pub fn zero(model: ModelKind, n_sites: usize, epsilon: T) -> Self {
        SeamExpansion { model, n_sites, epsilon, w_max: 0, h: BTreeMap::new() }
    }

    pub fn get(&self, y: SiteSet) -> T {
        self.h.get(&y).copied().unwrap_or_else(T::zero)
    }

    pub fn dense(&self) -> Vec<T> {
        let mut out = vec![T::zero(); 1 << self.n_sites];
        for (y, &v) in &self.h {
            out[y.index()] = v;
        }
        out
    }
}

/// Seam coefficients from a converged uniform ground solution.
pub fn compute_h<T: Real>(ground: &GroundSolution<T>, policy: &TruncationPolicy) -> Result<SeamExpansion<T>> {
    if !ground.converged {
        return Err(Error::InvariantViolation("ground solution did not converge".into()));
    }
    let n = ground.n_sites;
    let mut seam = SeamExpansion::zero(ground.model, n, ground.epsilon);
    seam.w_max = policy.w_max;
    if ground.g.is_empty() {
        return Ok(seam);
    }
    let weights = WeightTable::new(n);
    let s = seam_exponential(&ground.dense(), n, policy.n_max());
    for (idx, &v) in s.iter().enumerate() {
        if idx == 0 {
            let c = v - T::one();
            if c != T::zero() {
                seam.h.insert(SiteSet::empty(n), c);
            }
            continue;
        }
        if v != T::zero() && weights.wn_at(idx) <= policy.w_max {
            seam.h.insert(SiteSet::from_index(n, idx), v);
        }
    }
    Ok(seam)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceSolution<T: Real = f64> {
    pub variant: ModelKind,
    pub n_sites: usize,
    pub epsilon: T,
    /// `e(X)` for `n(X) ≠ 0` inside the enumeration cutoff.
    pub e_map: BTreeMap<SiteSet, T>,
    /// `e_s` for `s = 1..2N` (`e_s[s-1]`).
    pub e_s: Vec<T>,
    pub norm_e: T,
    pub converged: bool,
    pub iterations: usize,
    pub deltas: Vec<T>,
}

impl<T: Real> InterfaceSolution<T> {
    /// `e(X)` including the normalization rows.
    pub fn e_at(&self, x: SiteSet) -> T {
        if x.is_empty() {
            return T::one();
        }
        self.e_map.get(&x).copied().unwrap_or_else(T::zero)
    }

    /// `e_s` with `s` read modulo `2N`.
    pub fn es(&self, s: i64) -> T {
        let m = 2 * self.n_sites as i64;
        let s = s.rem_euclid(m);
        let s = if s == 0 { m } else { s };
        self.e_s[s as usize - 1]
    }

    pub fn dense(&self) -> Vec<T> {
        let mut out = vec![T::zero(); 1 << self.n_sites];
        out[0] = T::one();
        for (x, &v) in &self.e_map {
            out[x.index()] = v;
        }
        out
    }

    pub fn contraction_ratios(&self) -> Vec<T> {
        self.deltas
            .windows(2)
            .filter(|w| w[0] > T::zero())
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Bit `j-1` set when `j ∈ I(X)`.
#[inline]
pub(crate) fn interface_mask(idx: usize, n: usize) -> usize {
    let c = idx as u64;
    ((c ^ rotl(c, n - 1, n)) ^ (1 << (n - 1))) as usize
}

#[inline]
fn bond_pair(j: usize, n: usize) -> usize {
    (1 << (j - 1)) | (1 << (j % n))
}

/// Everything the update and residual share for one chain length.
struct Layout {
    n: usize,
    /// `n(X)` per dense index.
    n_of: Vec<i32>,
    /// Dense index of `T^m ∅`, `m = 0..2N`.
    kinks: Vec<usize>,
}

impl Layout {
    fn new(n: usize) -> Self {
        let n_of = (0..1usize << n).map(|i| SiteSet::from_index(n, i).n_of()).collect();
        let kinks = (0..2 * n).map(|m| kink_set(n, m).index()).collect();
        Layout { n, n_of, kinks }
    }

    /// `T^{-s}X` for `s = 1..2N`.
    fn back_translates(&self, idx: usize) -> Vec<usize> {
        let x = SiteSet::from_index(self.n, idx);
        (1..=2 * self.n).map(|s| x.gen_translate(-(s as i64)).index()).collect()
    }

    fn bilinear<T: Real>(&self, e: &[T], e_s: &[T], back: &[usize]) -> T {
        back.iter().zip(e_s).map(|(&b, &es)| es * e[b]).sum()
    }
}

/// `S_ε(X) = Σ_{j ∈ I(X)} e(X △ {j,j+1})`; a move at `j` keeps `j ∈ I`.
fn s_eps<T: Real>(e: &[T], idx: usize, n: usize) -> T {
    let mask = interface_mask(idx, n);
    let mut acc = T::zero();
    for j in 1..=n {
        if mask >> (j - 1) & 1 == 1 {
            acc = acc + e[idx ^ bond_pair(j, n)];
        }
    }
    acc
}

/// Coefficients of `Σ_j H_j(σ) E_j(σ)(1 - ε'σ_jσ_{j+1})`, i.e. `S_h - ε'S_εh`,
/// with `H_j = Σ_Y h(Y)σ(Y+j)` and `E_j = Σ_{Z: j ∈ I(Z)} e(Z)σ(Z)`.
fn seam_sums<T: Real>(e: &[T], h_conf: &[T], n: usize, eps_x: T) -> Vec<T> {
    let len = 1usize << n;
    let masks: Vec<usize> = (0..len).map(|i| interface_mask(i, n)).collect();
    let terms = (1..=n)
        .into_par_iter()
        .map(|j| {
            let ej: Vec<T> = (0..len)
                .map(|i| if masks[i] >> (j - 1) & 1 == 1 { e[i] } else { T::zero() })
                .collect();
            let ej = to_configs(&ej);
            let pair = bond_pair(j, n);
            // H_j(σ) = H_N(σ') with σ'_i = σ_{i+j}
            let back = (n - j % n) % n;
            (0..len)
                .map(|c| {
                    let hj = h_conf[rotl(c as u64, back, n) as usize];
                    let zz = if (c & pair).count_ones() == 1 { -T::one() } else { T::one() };
                    hj * ej[c] * (T::one() - eps_x * zz)
                })
                .collect::<Vec<T>>()
        })
        .collect::<Vec<_>>();
    // summed in bond order so the result does not depend on the thread count
    let mut acc = vec![T::zero(); len];
    for term in terms {
        for (x, y) in acc.iter_mut().zip(term) {
            *x = *x + y;
        }
    }
    to_coeffs(&acc)
}

fn check_interface_inputs<T: Real>(
    seam: &SeamExpansion<T>,
    spec: &ModelSpec<T>,
    policy: &TruncationPolicy,
) -> Result<()> {
    policy.validate()?;
    spec.validate(policy.norm_m)?;
    let n = spec.n_sites;
    if n % 2 == 0 {
        return Err(Error::ChainLength(n, "odd lengths only for the interface solver"));
    }
    if n > MAX_INTERFACE_SITES {
        return Err(Error::ChainLength(n, "3..=19 for the dense interface solver"));
    }
    if !spec.is_seam_flipped() {
        return Err(Error::Model("interface solve needs J_N = -1 and all other couplings +1".into()));
    }
    if seam.n_sites != n {
        return Err(Error::SizeMismatch { left: n, right: seam.n_sites });
    }
    if seam.model != spec.model {
        return Err(Error::Model(format!("seam expansion is for {}, spec is {}", seam.model, spec.model)));
    }
    if (seam.epsilon - spec.epsilon).abs() > T::zero() {
        return Err(Error::Model("seam expansion and spec disagree on epsilon".into()));
    }
    Ok(())
}

/// Iterates the interface equations from `e = δ_∅`, `e_s = 0`.
///
/// The antiferromagnets take `seam` from [`compute_h`] on the uniform chain
/// of the same length; the ferromagnet ignores it.
pub fn solve_interface<T: Real>(
    seam: &SeamExpansion<T>,
    spec: &ModelSpec<T>,
    policy: &TruncationPolicy,
) -> Result<InterfaceSolution<T>> {
    check_interface_inputs(seam, spec, policy)?;
    let n = spec.n_sites;
    let mut sol = InterfaceSolution {
        variant: spec.model,
        n_sites: n,
        epsilon: spec.epsilon,
        e_map: BTreeMap::new(),
        e_s: vec![T::zero(); 2 * n],
        norm_e: T::zero(),
        converged: true,
        iterations: 1,
        deltas: vec![T::zero()],
    };
    if spec.epsilon == T::zero() {
        return Ok(sol);
    }
    match spec.model {
        ModelKind::XzAf | ModelKind::XxzAf => solve_af(&mut sol, seam, spec, policy)?,
        ModelKind::XxzFerro => solve_ferro(&mut sol, spec, policy)?,
    }
    sol.norm_e = e_norm(&sol, policy)?;
    Ok(sol)
}

fn finish<T: Real>(
    sol: &mut InterfaceSolution<T>,
    domain: &[usize],
    e: &[T],
    e_s: Vec<T>,
    deltas: Vec<T>,
    iterations: usize,
) {
    let n = sol.n_sites;
    sol.e_map = domain
        .iter()
        .filter(|&&i| e[i] != T::zero())
        .map(|&i| (SiteSet::from_index(n, i), e[i]))
        .collect();
    sol.e_s = e_s;
    sol.deltas = deltas;
    sol.iterations = iterations;
    sol.converged = true;
}

fn solve_af<T: Real>(
    sol: &mut InterfaceSolution<T>,
    seam: &SeamExpansion<T>,
    spec: &ModelSpec<T>,
    policy: &TruncationPolicy,
) -> Result<()> {
    let n = spec.n_sites;
    let eps = spec.epsilon;
    let eps_x = if spec.model == ModelKind::XxzAf { eps } else { T::zero() };
    let two = T::of(2.0);
    let layout = Layout::new(n);
    let weights = WeightTable::new(n);
    let domain: Vec<usize> = (0..1usize << n)
        .filter(|&i| layout.n_of[i] != 0 && weights.wn_at(i) <= policy.w_max)
        .collect();
    let back: Vec<Vec<usize>> = domain.par_iter().map(|&i| layout.back_translates(i)).collect();
    let h_conf = to_configs(&seam.dense());

    let mut e = vec![T::zero(); 1 << n];
    e[0] = T::one();
    let mut e_s = vec![T::zero(); 2 * n];
    let tol = T::of(policy.tol);
    let mut deltas = Vec::new();
    let mut iterations = 0;
    while iterations < policy.max_iter {
        iterations += 1;
        let comb = seam_sums(&e, &h_conf, n, eps_x);
        let fresh: Vec<T> = (1..=2 * n)
            .map(|m| {
                let k = layout.kinks[m % (2 * n)];
                two * comb[k] - two * eps_x * s_eps(&e, k, n)
            })
            .collect();
        let mut delta = fresh.iter().zip(&e_s).map(|(a, b)| (*a - *b).abs()).fold(T::zero(), T::max);
        let old_es = std::mem::replace(&mut e_s, fresh);
        let es_used = if policy.jacobi { &old_es } else { &e_s };
        let updates: Vec<T> = domain
            .par_iter()
            .zip(&back)
            .map(|(&i, b)| {
                let rhs = layout.bilinear(&e, es_used, b) - two * comb[i] + two * eps_x * s_eps(&e, i, n);
                rhs / (two * T::of_int(layout.n_of[i] as i64))
            })
            .collect();
        for (&i, v) in domain.iter().zip(updates) {
            delta = delta.max((v - e[i]).abs());
            e[i] = v;
        }
        deltas.push(delta);
        if !delta.is_finite() {
            return Err(Error::Divergence { iterations, last_delta: delta.f64() });
        }
        if delta < tol {
            finish(sol, &domain, &e, e_s, deltas, iterations);
            return Ok(());
        }
    }
    let last = deltas.last().copied().unwrap_or_else(T::zero).f64();
    Err(Error::Divergence { iterations, last_delta: last })
}

fn ferro_domain(n: usize, a_max: u32) -> Vec<usize> {
    let alpha = AlphaTable::shared(n);
    (0..1usize << n)
        .filter(|&i| {
            SiteSet::from_index(n, i).n_of() != 0 && alpha.at(i).is_some_and(|a| a <= a_max)
        })
        .collect()
}

fn solve_ferro<T: Real>(sol: &mut InterfaceSolution<T>, spec: &ModelSpec<T>, policy: &TruncationPolicy) -> Result<()> {
    let n = spec.n_sites;
    if n > AlphaTable::MAX_SITES {
        return Err(Error::ChainLength(n, "hopping distances need N <= 24"));
    }
    let eps = spec.epsilon;
    let two = T::of(2.0);
    let layout = Layout::new(n);
    let domain = ferro_domain(n, policy.a_max(n));
    let back: Vec<Vec<usize>> = domain.par_iter().map(|&i| layout.back_translates(i)).collect();

    let mut e = vec![T::zero(); 1 << n];
    e[0] = T::one();
    let mut e_s = vec![T::zero(); 2 * n];
    let tol = T::of(policy.tol);
    let mut deltas = Vec::new();
    let mut iterations = 0;
    while iterations < policy.max_iter {
        iterations += 1;
        // e_m = -2ε S_ε(T^m ∅); only the move at j = m reaches a kink set
        let fresh: Vec<T> = (1..=2 * n)
            .map(|m| -two * eps * s_eps(&e, layout.kinks[m % (2 * n)], n))
            .collect();
        let mut delta = fresh.iter().zip(&e_s).map(|(a, b)| (*a - *b).abs()).fold(T::zero(), T::max);
        let old_es = std::mem::replace(&mut e_s, fresh);
        let es_used = if policy.jacobi { &old_es } else { &e_s };
        let updates: Vec<T> = domain
            .par_iter()
            .zip(&back)
            .map(|(&i, b)| {
                let rhs = two * eps * s_eps(&e, i, n) + layout.bilinear(&e, es_used, b);
                rhs / (two * T::of_int(layout.n_of[i] as i64))
            })
            .collect();
        for (&i, v) in domain.iter().zip(updates) {
            delta = delta.max((v - e[i]).abs());
            e[i] = v;
        }
        deltas.push(delta);
        if !delta.is_finite() {
            return Err(Error::Divergence { iterations, last_delta: delta.f64() });
        }
        if delta < tol {
            finish(sol, &domain, &e, e_s, deltas, iterations);
            return Ok(());
        }
    }
    let last = deltas.last().copied().unwrap_or_else(T::zero).f64();
    Err(Error::Divergence { iterations, last_delta: last })
}

/// AF: `Σ_s |e_s|(|ε|M)^{-w_N(T^s∅)} + 2Σ |e(X)| n(X) (|ε|M)^{-w_N(X)}`;
/// ferro: the same with `β_s` and `α(X)`.
pub fn e_norm<T: Real>(sol: &InterfaceSolution<T>, policy: &TruncationPolicy) -> Result<T> {
    let zero = T::zero();
    if sol.e_map.values().all(|v| *v == zero) && sol.e_s.iter().all(|v| *v == zero) {
        return Ok(zero);
    }
    let base = sol.epsilon.abs() * T::of(policy.norm_m);
    if base == zero {
        return Err(Error::WeightUndefined);
    }
    let n = sol.n_sites;
    let two = T::of(2.0);
    let mut total = zero;
    if sol.variant.is_af() {
        for (s, &v) in (1..=2 * n).zip(&sol.e_s) {
            total = total + v.abs() * base.powi(-(crate::lattice::weight_wn(kink_set(n, s)) as i32));
        }
        for (x, &v) in &sol.e_map {
            let w = crate::lattice::weight_wn(*x) as i32;
            total = total + two * v.abs() * T::of_int(x.n_of() as i64) * base.powi(-w);
        }
        return Ok(total);
    }
    let alpha = AlphaTable::shared(n);
    for (s, &v) in (1..=2 * n).zip(&sol.e_s) {
        match alpha.beta(s as i64) {
            Some(b) => total = total + v.abs() * base.powi(-(b as i32)),
            None if v != zero => {
                return Err(Error::InvariantViolation(format!("e_{s} = {v} but β_{s} is infinite")));
            }
            None => {}
        }
    }
    for (x, &v) in &sol.e_map {
        match alpha.get(*x) {
            Some(a) => total = total + two * v.abs() * T::of_int(x.n_of() as i64) * base.powi(-(a as i32)),
            None if v != zero => {
                return Err(Error::InvariantViolation(format!("e({x}) = {v} but α is infinite")));
            }
            None => {}
        }
    }
    Ok(total)
}

/// Largest violation of the coefficient equations over every `X`, including
/// the kink rows that determine `e_m`. Sets outside the enumeration cutoff
/// count with `e(X) = 0`, so this measures truncation error as well.
pub fn residual_interface<T: Real>(
    sol: &InterfaceSolution<T>,
    seam: &SeamExpansion<T>,
    spec: &ModelSpec<T>,
) -> Result<T> {
    let n = spec.n_sites;
    if n != sol.n_sites || n != seam.n_sites {
        return Err(Error::SizeMismatch { left: n, right: sol.n_sites });
    }
    if n > MAX_RESIDUAL_SITES {
        return Err(Error::ChainLength(n, "3..=15 for interface residuals"));
    }
    let eps = spec.epsilon;
    let (eps_x, h) = match spec.model {
        ModelKind::XzAf => (T::zero(), seam.dense()),
        ModelKind::XxzAf => (eps, seam.dense()),
        ModelKind::XxzFerro => (eps, vec![T::zero(); 1 << n]),
    };
    let e = sol.dense();
    let comb = seam_sums(&e, &to_configs(&h), n, eps_x);
    let layout = Layout::new(n);
    let two = T::of(2.0);
    let worst = (0..1usize << n)
        .into_par_iter()
        .map(|i| {
            let lhs = two * T::of_int(layout.n_of[i] as i64) * e[i] + two * comb[i] - two * eps_x * s_eps(&e, i, n);
            let rhs = layout.bilinear(&e, &sol.e_s, &layout.back_translates(i));
            (lhs - rhs).abs()
        })
        .reduce(T::zero, T::max);
    Ok(worst)
}
