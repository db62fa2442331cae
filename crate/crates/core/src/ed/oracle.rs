//! Dispersion and eigenvector checks for the expansions, straight from the
//! `2^N` Hamiltonians.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::frames::build_hamiltonian;
use super::sectors::{parity_energies, sector_spectra};
use super::symmetry::{build_symmetries, transformed_frame, translation};
use crate::dispersion::{fourier_extract, ground_band, DispersionSeries, Source};
use crate::error::{Error, Result};
use crate::ground::GroundSolution;
use crate::interface::InterfaceSolution;
use crate::lattice::SiteSet;
use crate::model::ModelSpec;
use crate::transform::to_configs;

/// Largest chain the oracle dispersion and wavefunction checks take.
pub const MAX_ORACLE_SITES: usize = 13;

/// Exact band pieces for one interface chain.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleBands {
    /// `E₁(k_j)`, `j = 0..2N-1`.
    pub e1: Vec<f64>,
    pub e_plus: f64,
    pub e_minus: f64,
}

fn check_oracle_spec(spec: &ModelSpec<f64>) -> Result<()> {
    let n = spec.n_sites;
    if n % 2 == 0 || n > MAX_ORACLE_SITES || n < 3 {
        return Err(Error::ChainLength(n, "odd 3..=13 for the oracle"));
    }
    if !spec.is_seam_flipped() {
        return Err(Error::Model("oracle expects the interface chain (J_N = -1)".into()));
    }
    Ok(())
}

/// `E₁(k)` from the interface chain and `E_±` from the uniform chain of the
/// same length.
pub fn oracle_bands(spec: &ModelSpec<f64>) -> Result<OracleBands> {
    check_oracle_spec(spec)?;
    let n = spec.n_sites;
    let h1 = build_hamiltonian(spec, transformed_frame(spec))?;
    let (t, _) = build_symmetries(spec)?;
    let sectors = sector_spectra(&h1, &t)?;
    let mut e1 = vec![f64::INFINITY; 2 * n];
    for s in &sectors {
        if let Some(e) = s.lowest_energy {
            e1[s.k_index] = e1[s.k_index].min(e);
        }
    }
    if let Some(j) = e1.iter().position(|e| !e.is_finite()) {
        return Err(Error::GridMismatch(format!("momentum sector {j} of the interface chain is empty")));
    }
    let uniform = ModelSpec::uniform(spec.model, n, spec.epsilon);
    let h0 = build_hamiltonian(&uniform, transformed_frame(&uniform))?;
    let (_, p) = build_symmetries(&uniform)?;
    let (e_plus, e_minus) = parity_energies(&h0, &p)?;
    Ok(OracleBands { e1, e_plus, e_minus })
}

/// `D(k) = E₁(k) - E₀(k)` sampled exactly and Fourier transformed.
pub fn oracle_dispersion(spec: &ModelSpec<f64>) -> Result<DispersionSeries<f64>> {
    let bands = oracle_bands(spec)?;
    let n = spec.n_sites;
    let e0 = ground_band(n, bands.e_plus, bands.e_minus);
    let samples: Vec<(f64, f64)> = (0..2 * n)
        .map(|j| (PI * j as f64 / n as f64, bands.e1[j] - e0[j]))
        .collect();
    let mut out = fourier_extract(&samples)?;
    out.source = Source::Ed;
    out.model = Some(spec.model);
    out.epsilon = Some(spec.epsilon);
    Ok(out)
}

/// `ψ_k(σ) = Ω(σ) Σ_{l=1}^{2N} e^{ikl} Σ_X e(X) σ(T^l X)`, `k = π k_index / N`.
pub fn interface_wavefunction(
    ground: Option<&GroundSolution<f64>>,
    sol: &InterfaceSolution<f64>,
    k_index: usize,
) -> Result<Vec<Complex64>> {
    let n = sol.n_sites;
    let dim = 1usize << n;
    let k = PI * k_index as f64 / n as f64;
    let omega: Vec<f64> = match ground {
        Some(g) if !g.g.is_empty() => {
            if g.n_sites != n {
                return Err(Error::SizeMismatch { left: n, right: g.n_sites });
            }
            to_configs(&g.dense()).into_iter().map(|phi| (-0.5 * phi).exp()).collect()
        }
        _ => vec![1.0; dim],
    };
    let e = sol.dense();
    let support: Vec<usize> = (0..dim).filter(|&i| e[i] != 0.0).collect();
    let terms: Vec<Vec<Complex64>> = (1..=2 * n)
        .into_par_iter()
        .map(|l| {
            // Σ_X e(X) σ(T^l X) as a coefficient array over T^l X
            let mut a = vec![0.0; dim];
            for &i in &support {
                a[SiteSet::from_index(n, i).gen_translate(l as i64).index()] += e[i];
            }
            let phase = Complex64::from_polar(1.0, k * l as f64);
            to_configs(&a).into_iter().map(|v| phase * v).collect()
        })
        .collect();
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    for t in terms {
        for (p, v) in psi.iter_mut().zip(t) {
            *p += v;
        }
    }
    for (p, w) in psi.iter_mut().zip(&omega) {
        *p *= *w;
    }
    Ok(psi)
}

/// `‖Hψ - ⟨H⟩ψ‖ / ‖ψ‖` and `⟨H⟩` for the reconstructed interface state,
/// after checking `Tψ = e^{-ik}ψ`. The antiferromagnets need the uniform
/// ground solution for `Ω`; the ferromagnet has `Ω = 1`.
pub fn wavefunction_residual(
    ground: Option<&GroundSolution<f64>>,
    sol: &InterfaceSolution<f64>,
    k_index: usize,
    spec: &ModelSpec<f64>,
) -> Result<(f64, f64)> {
    check_oracle_spec(spec)?;
    if sol.n_sites != spec.n_sites {
        return Err(Error::SizeMismatch { left: spec.n_sites, right: sol.n_sites });
    }
    let n = spec.n_sites;
    let omega = if spec.model.is_af() {
        Some(ground.ok_or_else(|| Error::Model("antiferromagnet needs its ground solution".into()))?)
    } else {
        None
    };
    let psi = interface_wavefunction(omega, sol, k_index)?;
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let scale = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if norm < 1e-12 || scale < 1e-12 {
        return Err(Error::DegenerateMomentum(k_index));
    }

    let t = translation(spec);
    let k = PI * k_index as f64 / n as f64;
    let eig = Complex64::from_polar(1.0, -k);
    let mut t_psi = vec![Complex64::new(0.0, 0.0); psi.len()];
    for (c, &v) in psi.iter().enumerate() {
        t_psi[t.image[c]] = v * t.sign[c] as f64;
    }
    let t_dev = t_psi.iter().zip(&psi).map(|(a, b)| (a - eig * b).norm()).fold(0.0, f64::max) / scale;
    if t_dev > 1e-9 {
        return Err(Error::InvariantViolation(format!("Tψ differs from e^(-ik)ψ by {t_dev:e}")));
    }

    let h = build_hamiltonian(spec, transformed_frame(spec))?;
    let mut h_psi = vec![Complex64::new(0.0, 0.0); psi.len()];
    h.matvec_complex(&psi, &mut h_psi);
    let rayleigh = psi.iter().zip(&h_psi).map(|(a, b)| a.conj() * b).sum::<Complex64>().re / (norm * norm);
    let res = h_psi
        .iter()
        .zip(&psi)
        .map(|(hp, p)| (hp - p * rayleigh).norm_sqr())
        .sum::<f64>()
        .sqrt()
        / norm;
    Ok((res, rayleigh))
}
