//! Block diagonalization by generalized momentum and parity.
//!
//! Basis states are grouped into orbits under the signed permutation `T`.
//! For a representative `r` with period `p` and `T^p|r⟩ = χ|r⟩`, the Bloch
//! state `Σ_l e^{ikl} T^l|r⟩` is non-zero iff `e^{ikp} χ = 1`, and is an
//! eigenvector of `T` with eigenvalue `e^{-ik}`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lanczos::{lanczos_lowest, random_start, LanczosOptions};
use super::sparse::OperatorMatrix;
use super::symmetry::SignedPerm;
use crate::error::{Error, Result};

/// Blocks above this size go to Lanczos instead of a dense solver.
pub const DENSE_LIMIT: usize = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorSpectrum {
    /// `k = π j / N`.
    pub k_index: usize,
    pub parity: i8,
    pub lowest_energy: Option<f64>,
    pub second_energy: Option<f64>,
    pub sector_dimension: usize,
}

/// Orbit data of a signed permutation.
#[derive(Clone, Debug)]
pub struct Orbits {
    pub reps: Vec<usize>,
    pub period: Vec<usize>,
    /// `χ` with `T^p|r⟩ = χ|r⟩`.
    pub chi: Vec<i8>,
    /// For each basis state `c`: orbit id, `l` and sign with `T^l|r⟩ = s|c⟩`.
    pub orbit_of: Vec<usize>,
    pub step: Vec<usize>,
    pub sign: Vec<i8>,
}

impl Orbits {
    pub fn new(t: &SignedPerm) -> Self {
        let dim = t.dim();
        let mut o = Orbits {
            reps: Vec::new(),
            period: Vec::new(),
            chi: Vec::new(),
            orbit_of: vec![usize::MAX; dim],
            step: vec![0; dim],
            sign: vec![0; dim],
        };
        for r in 0..dim {
            if o.orbit_of[r] != usize::MAX {
                continue;
            }
            let id = o.reps.len();
            let (mut c, mut s, mut l) = (r, 1i8, 0usize);
            loop {
                o.orbit_of[c] = id;
                o.step[c] = l;
                o.sign[c] = s;
                s *= t.sign[c];
                c = t.image[c];
                l += 1;
                if c == r {
                    break;
                }
            }
            o.reps.push(r);
            o.period.push(l);
            o.chi.push(s);
        }
        o
    }

    pub fn compatible(&self, orbit: usize, k: f64) -> bool {
        let phase = Complex64::from_polar(1.0, k * self.period[orbit] as f64) * self.chi[orbit] as f64;
        (phase - 1.0).norm() < 1e-9
    }
}

fn lowest_two(mut e: Vec<f64>) -> (Option<f64>, Option<f64>) {
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (e.first().copied(), e.get(1).copied())
}

/// Complex Hermitian sector matrix in the normalized Bloch basis.
pub fn sector_matrix(h: &OperatorMatrix, orb: &Orbits, members: &[usize], k: f64) -> DMatrix<Complex64> {
    let d = members.len();
    let mut pos = std::collections::HashMap::with_capacity(d);
    for (i, &o) in members.iter().enumerate() {
        pos.insert(o, i);
    }
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for (col, &o) in members.iter().enumerate() {
        let r = orb.reps[o];
        let pr = orb.period[o] as f64;
        // H symmetric: row r lists ⟨c|H|r⟩
        for (c, v) in h.row(r) {
            let oc = orb.orbit_of[c];
            if let Some(&row) = pos.get(&oc) {
                let phase = Complex64::from_polar(1.0, -k * orb.step[c] as f64);
                let scale = (pr / orb.period[oc] as f64).sqrt();
                m[(row, col)] += phase * (v * orb.sign[c] as f64 * scale);
            }
        }
    }
    m
}

fn sector_eigen(h: &OperatorMatrix, orb: &Orbits, members: &[usize], k: f64) -> Vec<f64> {
    let m = sector_matrix(h, orb, members, k);
    let d = members.len();
    if d <= DENSE_LIMIT {
        return m.symmetric_eigenvalues().iter().copied().collect();
    }
    let entries: Vec<Vec<(usize, Complex64)>> = (0..d)
        .map(|r| (0..d).filter(|&c| m[(r, c)].norm() > 0.0).map(|c| (c, m[(r, c)])).collect())
        .collect();
    let mv = |x: &[Complex64], y: &mut [Complex64]| {
        for (r, out) in y.iter_mut().enumerate() {
            *out = entries[r].iter().map(|&(c, v)| v * x[c]).sum();
        }
    };
    lanczos_lowest(mv, random_start(d, None, 17), &LanczosOptions::default())
}

/// Two lowest eigenvalues per `(k, parity)` block of `h`, for `k = πj/N`,
/// `j = 0..2N-1`. Empty momenta are reported with dimension 0.
pub fn sector_spectra(h: &OperatorMatrix, t: &OperatorMatrix) -> Result<Vec<SectorSpectrum>> {
    if h.dim() != t.dim() || !h.dim().is_power_of_two() {
        return Err(Error::SizeMismatch { left: h.dim(), right: t.dim() });
    }
    let n = h.dim().trailing_zeros() as usize;
    let tp = SignedPerm::from_matrix(t)?;
    let comm = super::symmetry::commutator_norm(h, &tp);
    if comm > 1e-12 {
        return Err(Error::SymmetryViolation(comm));
    }
    let orb = Orbits::new(&tp);
    let jobs: Vec<(usize, i8, Vec<usize>)> = (0..2 * n)
        .flat_map(|j| {
            let k = PI * j as f64 / n as f64;
            let mut out = Vec::new();
            for parity in [1i8, -1] {
                let members: Vec<usize> = (0..orb.reps.len())
                    .filter(|&o| {
                        let p = if orb.reps[o].count_ones() % 2 == 0 { 1 } else { -1 };
                        p == parity && orb.compatible(o, k)
                    })
                    .collect();
                if !members.is_empty() {
                    out.push((j, parity, members));
                }
            }
            if out.is_empty() {
                out.push((j, if j % 2 == 0 { 1 } else { -1 }, Vec::new()));
            }
            out
        })
        .collect();
    Ok(jobs
        .into_par_iter()
        .map(|(j, parity, members)| {
            let k = PI * j as f64 / n as f64;
            let (lo, hi) = if members.is_empty() { (None, None) } else { lowest_two(sector_eigen(h, &orb, &members, k)) };
            SectorSpectrum { k_index: j, parity, lowest_energy: lo, second_energy: hi, sector_dimension: members.len() }
        })
        .collect())
}

/// Lowest eigenvalue in the `P = +1` and `P = -1` blocks.
pub fn parity_energies(h: &OperatorMatrix, p: &OperatorMatrix) -> Result<(f64, f64)> {
    parity_energies_with(h, p, DENSE_LIMIT)
}

fn parity_energies_with(h: &OperatorMatrix, p: &OperatorMatrix, dense_limit: usize) -> Result<(f64, f64)> {
    let diag = p.as_diagonal().ok_or_else(|| Error::Model("parity operator must be diagonal".into()))?;
    let mut out = [0.0; 2];
    for (slot, s) in [(0usize, 1.0), (1, -1.0)] {
        let idx: Vec<usize> = (0..h.dim()).filter(|&c| diag[c] == s).collect();
        if idx.is_empty() {
            return Err(Error::InsufficientData(format!("empty parity block {s}")));
        }
        out[slot] = if idx.len() <= dense_limit {
            let mut pos = vec![usize::MAX; h.dim()];
            for (i, &c) in idx.iter().enumerate() {
                pos[c] = i;
            }
            let mut m = DMatrix::<f64>::zeros(idx.len(), idx.len());
            for (i, &c) in idx.iter().enumerate() {
                for (cc, v) in h.row(c) {
                    if pos[cc] != usize::MAX {
                        m[(i, pos[cc])] = v;
                    }
                }
            }
            m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
        } else {
            let mv = |x: &[Complex64], y: &mut [Complex64]| h.matvec_complex(x, y);
            let opts = LanczosOptions { n_eigen: 1, ..Default::default() };
            lanczos_lowest(mv, random_start(h.dim(), Some(&idx), 29), &opts)[0]
        };
    }
    Ok((out[0], out[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ed::frames::build_hamiltonian;
    use crate::ed::symmetry::{build_symmetries, transformed_frame};
    use crate::model::{ModelKind, ModelSpec};

    fn full_spectrum(h: &OperatorMatrix) -> Vec<f64> {
        let mut e: Vec<f64> = h.to_dense().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }

    /// Every sector's full spectrum, concatenated, is the full spectrum.
    #[test]
    fn sectors_partition_the_spectrum() {
        for model in ModelKind::ALL {
            for spec in [ModelSpec::interface(model, 5, 0.17), ModelSpec::uniform(model, 6, 0.17)] {
                let h = build_hamiltonian(&spec, transformed_frame(&spec)).unwrap();
                let (t, _) = build_symmetries(&spec).unwrap();
                let tp = SignedPerm::from_matrix(&t).unwrap();
                let orb = Orbits::new(&tp);
                let n = spec.n_sites;
                let mut all = Vec::new();
                let mut total = 0;
                for j in 0..2 * n {
                    let k = PI * j as f64 / n as f64;
                    let members: Vec<usize> = (0..orb.reps.len()).filter(|&o| orb.compatible(o, k)).collect();
                    total += members.len();
                    if members.is_empty() {
                        continue;
                    }
                    let m = sector_matrix(&h, &orb, &members, k);
                    assert!((m.adjoint() - &m).iter().all(|z| z.norm() < 1e-12));
                    all.extend(m.symmetric_eigenvalues().iter().copied());
                }
                assert_eq!(total, 1 << n);
                all.sort_by(|a, b| a.partial_cmp(b).unwrap());
                for (a, b) in all.iter().zip(full_spectrum(&h)) {
                    assert!((a - b).abs() < 1e-10, "{model}: {a} vs {b}");
                }
                let sec = sector_spectra(&h, &t).unwrap();
                assert_eq!(sec.iter().map(|s| s.sector_dimension).sum::<usize>(), 1 << n);
            }
        }
    }

    #[test]
    fn twisted_sectors_carry_matching_parity() {
        let spec = ModelSpec::interface(ModelKind::XzAf, 7, 0.1);
        let h = build_hamiltonian(&spec, transformed_frame(&spec)).unwrap();
        let (t, _) = build_symmetries(&spec).unwrap();
        let sec = sector_spectra(&h, &t).unwrap();
        assert_eq!(sec.len(), 14);
        for s in &sec {
            assert_eq!(s.parity, if s.k_index % 2 == 0 { 1 } else { -1 });
            assert!(s.lowest_energy.unwrap() <= s.second_energy.unwrap());
        }
    }

    #[test]
    fn ferro_flat_band_at_zero_coupling() {
        let n = 7;
        let spec = ModelSpec::interface(ModelKind::XxzFerro, n, 0.0);
        let h = build_hamiltonian(&spec, transformed_frame(&spec)).unwrap();
        let (t, _) = build_symmetries(&spec).unwrap();
        let e0 = full_spectrum(&h)[0];
        for s in sector_spectra(&h, &t).unwrap() {
            assert!((s.lowest_energy.unwrap() - e0).abs() < 1e-12);
        }
        assert!((e0 - (-(n as f64) + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn parity_energies_dense_and_lanczos_agree() {
        for model in [ModelKind::XzAf, ModelKind::XxzAf] {
            let spec = ModelSpec::uniform(model, 8, 0.1);
            let h = build_hamiltonian(&spec, transformed_frame(&spec)).unwrap();
            let (_, p) = build_symmetries(&spec).unwrap();
            let dense = parity_energies(&h, &p).unwrap();
            let krylov = parity_energies_with(&h, &p, 16).unwrap();
            assert!((dense.0 - krylov.0).abs() < 1e-9 && (dense.1 - krylov.1).abs() < 1e-9);
            let e0 = full_spectrum(&h)[0];
            assert!((dense.0.min(dense.1) - e0).abs() < 1e-12);
        }
    }
}
