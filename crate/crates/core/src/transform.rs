//! Walsh–Hadamard transform between subset coefficients `f(X)` and
//! configuration functions `F(σ) = Σ_X f(X) σ(X)`.
//!
//! Index `i` of a configuration array has bit `j-1` set when `σ_j = -1`,
//! which is also the [`SiteSet`](crate::SiteSet) dense index, so
//! `σ(X) = (-1)^{popcount(X & i)}`.

use crate::scalar::Real;

/// In-place unnormalized transform; applying it twice multiplies by `2^N`.
pub fn wht<T: Real>(a: &mut [T]) {
    let len = a.len();
    assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for block in a.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = u + v;
                *y = u - v;
            }
        }
        h *= 2;
    }
}

/// `F(σ)` from coefficients `f(X)`.
pub fn to_configs<T: Real>(coeffs: &[T]) -> Vec<T> {
    let mut a = coeffs.to_vec();
    wht(&mut a);
    a
}

/// Coefficients `f(X)` from `F(σ)`.
pub fn to_coeffs<T: Real>(values: &[T]) -> Vec<T> {
    let mut a = values.to_vec();
    wht(&mut a);
    let scale = T::one() / T::of_int(a.len() as i64);
    a.iter_mut().for_each(|x| *x = *x * scale);
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_character_sums() {
        let n = 6;
        let coeffs: Vec<f64> = (0..1 << n).map(|i| ((i * 37 % 11) as f64 - 5.0) / 7.0).collect();
        let vals = to_configs(&coeffs);
        for s in 0..1usize << n {
            let direct: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(x, c)| if (x & s).count_ones() % 2 == 0 { *c } else { -*c })
                .sum();
            assert!((vals[s] - direct).abs() < 1e-12);
        }
        let back = to_coeffs(&vals);
        for (a, b) in back.iter().zip(&coeffs) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
