//! Truncated exponential series `Σ_{n<=n_max} (1/n!) Σ_{X_1..X_n : N} Π g(X_k)`
//! over the sets crossing the seam bond `<N,1>`.
//!
//! The convolution over `△` is a pointwise product in configuration space,
//! so the series is evaluated exactly (within `n_max`) as a truncated Taylor
//! polynomial of `F(σ) = Σ_{X:N} g(X)σ(X)`.

use crate::scalar::Real;
use crate::transform::{to_coeffs, to_configs};

/// Whether the dense index crosses the seam (exactly one of sites `N`, `1`).
#[inline]
pub(crate) fn crosses_seam(idx: usize, n: usize) -> bool {
    ((idx ^ (idx >> (n - 1))) & 1) == 1
}

/// Dense coefficients of the truncated `exp`, including the `n = 0` term.
pub(crate) fn seam_exponential<T: Real>(g: &[T], n: usize, n_max: u32) -> Vec<T> {
    let seam: Vec<T> = g
        .iter()
        .enumerate()
        .map(|(i, &v)| if crosses_seam(i, n) { v } else { T::zero() })
        .collect();
    let f = to_configs(&seam);
    let poly: Vec<T> = f
        .iter()
        .map(|&x| {
            // Horner on Σ x^m/m!
            let mut acc = T::one();
            for m in (1..=n_max).rev() {
                acc = T::one() + acc * x / T::of_int(m as i64);
            }
            acc
        })
        .collect();
    to_coeffs(&poly)
}
