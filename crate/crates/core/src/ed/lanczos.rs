//! Lanczos with full reorthogonalization for the bottom of a Hermitian
//! spectrum. Degenerate eigenvalues show up once per start vector.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    pub n_eigen: usize,
    pub tol: f64,
    pub max_steps: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { n_eigen: 2, tol: 1e-11, max_steps: 400, seed: 0x5eed }
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Random start vector restricted to `support` (all of `0..dim` if `None`).
pub fn random_start(dim: usize, support: Option<&[usize]>, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    match support {
        Some(idx) => {
            for &i in idx {
                v[i] = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
        }
        None => {
            for x in v.iter_mut() {
                *x = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
        }
    }
    v
}

/// Lowest Ritz values, ascending. Stops when every wanted Ritz pair has
/// residual bound `|β_m s_{m,i}|` below `tol`, or the Krylov space closes.
pub fn lanczos_lowest<F>(matvec: F, start: Vec<Complex64>, opts: &LanczosOptions) -> Vec<f64>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    let dim = start.len();
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let s = norm(&start);
    if s == 0.0 {
        return Vec::new();
    }
    let mut v: Vec<Complex64> = start.iter().map(|x| x / s).collect();
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let steps = opts.max_steps.min(dim);
    let mut ritz = Vec::new();
    for m in 0..steps {
        matvec(&v, &mut w);
        let a = dot(&v, &w).re;
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= vi * a;
        }
        if let Some(prev) = basis.last() {
            let b = betas[m - 1];
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= pi * b;
            }
        }
        basis.push(v.clone());
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= qi * c;
                }
            }
        }
        alphas.push(a);
        let b = norm(&w);
        let k = alphas.len();
        let check = k >= opts.n_eigen && (k % 4 == 0 || b < 1e-13 || m + 1 == steps);
        if check {
            let mut t = DMatrix::<f64>::zeros(k, k);
            for i in 0..k {
                t[(i, i)] = alphas[i];
                if i + 1 < k {
                    t[(i, i + 1)] = betas[i];
                    t[(i + 1, i)] = betas[i];
                }
            }
            let eig = SymmetricEigen::new(t);
            let mut order: Vec<usize> = (0..k).collect();
            order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
            let wanted = &order[..opts.n_eigen.min(k)];
            let fresh: Vec<f64> = wanted.iter().map(|&i| eig.eigenvalues[i]).collect();
            let settled = fresh.len() == ritz.len()
                && fresh.iter().zip(&ritz).all(|(a, b): (&f64, &f64)| (a - b).abs() < opts.tol);
            ritz = fresh;
            let done = settled && wanted.iter().all(|&i| (b * eig.eigenvectors[(k - 1, i)]).abs() < opts.tol);
            if done || b < 1e-13 {
                return ritz;
            }
        }
        if b < 1e-13 {
            break;
        }
        betas.push(b);
        v = w.iter().map(|x| x / b).collect();
    }
    ritz
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_bottom_of_a_known_spectrum() {
        let dim = 300;
        // symmetric tridiagonal with a known-ish spectrum: compare with dense
        let mut m = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = (i as f64).sqrt() + 0.3 * (i as f64).sin();
            if i + 1 < dim {
                m[(i, i + 1)] = 0.5;
                m[(i + 1, i)] = 0.5;
            }
        }
        let mut exact: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
        exact.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mv = |x: &[Complex64], y: &mut [Complex64]| {
            for i in 0..dim {
                y[i] = (0..dim).filter(|&j| m[(i, j)] != 0.0).map(|j| x[j] * m[(i, j)]).sum();
            }
        };
        let opts = LanczosOptions { max_steps: 300, ..Default::default() };
        let got = lanczos_lowest(mv, random_start(dim, None, 1), &opts);
        assert!((got[0] - exact[0]).abs() < 1e-9, "{} vs {}", got[0], exact[0]);
        assert!((got[1] - exact[1]).abs() < 1e-9, "{} vs {}", got[1], exact[1]);
    }
}
