//! Interface dispersion `D(k) = E₁(k) - E₀(k)` on the grid `k = πj/N`,
//! `j = 0..2N-1`, stored as Fourier coefficients `D(k) = Σ_s c_s e^{iks}`.
//!
//! The expansion gives `D(k) = 2 + Σ_{s=1}^{2N} e_s e^{-iks}`, so `c_{-s} = e_s`
//! after folding `s` into the window `[-N+1, N]`.

use std::f64::consts::PI;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interface::InterfaceSolution;
use crate::model::ModelKind;
use crate::scalar::Real;

/// Imaginary residues below this are discarded silently.
pub const IMAG_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Source {
    Kt,
    Ed,
    Extrapolated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionSeries<T: Real = f64> {
    pub n_sites: usize,
    pub model: Option<ModelKind>,
    pub epsilon: Option<T>,
    /// Smallest `s` held in `coeffs`.
    pub s_min: i64,
    /// `c_s` for `s = s_min, s_min + 1, ...`.
    pub coeffs: Vec<T>,
    /// `(k, D(k))` on the grid, when known.
    pub samples: Option<Vec<(T, T)>>,
    pub source: Source,
    /// Largest imaginary part dropped while extracting coefficients.
    pub imag_residue: T,
    pub warnings: Vec<String>,
}

/// `k_j = πj/N`.
pub fn grid<T: Real>(n_sites: usize) -> Vec<T> {
    (0..2 * n_sites).map(|j| T::of(PI * j as f64 / n_sites as f64)).collect()
}

/// Fold `s` into `[-N+1, N]`.
pub fn recentre(s: i64, n_sites: usize) -> i64 {
    let n = n_sites as i64;
    let r = (s + n - 1).rem_euclid(2 * n);
    r - n + 1
}

impl<T: Real> DispersionSeries<T> {
    fn window(n_sites: usize, source: Source) -> Self {
        DispersionSeries {
            n_sites,
            model: None,
            epsilon: None,
            s_min: 1 - n_sites as i64,
            coeffs: vec![T::zero(); 2 * n_sites],
            samples: None,
            source,
            imag_residue: T::zero(),
            warnings: Vec::new(),
        }
    }

    pub fn s_max(&self) -> i64 {
        self.s_min + self.coeffs.len() as i64 - 1
    }

    /// `c_s`, zero outside the stored window.
    pub fn coeff(&self, s: i64) -> T {
        if s < self.s_min || s > self.s_max() {
            return T::zero();
        }
        self.coeffs[(s - self.s_min) as usize]
    }

    fn coeff_mut(&mut self, s: i64) -> &mut T {
        let i = (s - self.s_min) as usize;
        &mut self.coeffs[i]
    }

    pub fn evaluate_complex(&self, k: T) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (i, &c) in self.coeffs.iter().enumerate() {
            let s = T::of_int(self.s_min + i as i64);
            acc = acc + Complex::from_polar(c, k * s);
        }
        acc
    }

    /// `Re D(k)`.
    pub fn evaluate(&self, k: T) -> T {
        self.evaluate_complex(k).re
    }

    /// `D` at every grid point.
    pub fn evaluate_grid(&self) -> Vec<(T, T)> {
        grid::<T>(self.n_sites).into_iter().map(|k| (k, self.evaluate(k))).collect()
    }

    /// `max_s |c_s - c_{-s}|`; zero for a dispersion even in `k`.
    pub fn symmetry_defect(&self) -> T {
        (self.s_min..=self.s_max())
            .map(|s| {
                let partner = recentre(-s, self.n_sites);
                (self.coeff(s) - self.coeff(partner)).abs()
            })
            .fold(T::zero(), T::max)
    }

    /// `max_k D - min_k D` over the grid.
    pub fn bandwidth(&self) -> T {
        let vals: Vec<T> = self.evaluate_grid().into_iter().map(|(_, v)| v).collect();
        let hi = vals.iter().copied().fold(T::neg_infinity(), T::max);
        let lo = vals.iter().copied().fold(T::infinity(), T::min);
        hi - lo
    }

    /// `Σ_{s ≠ 0} |c_s|`.
    pub fn off_constant_weight(&self) -> T {
        (self.s_min..=self.s_max()).filter(|&s| s != 0).map(|s| self.coeff(s).abs()).sum()
    }

    fn flag_asymmetry(&mut self) {
        let defect = self.symmetry_defect();
        if defect.f64() > IMAG_TOL {
            self.warnings.push(format!("coefficients not even in s: max |c_s - c_-s| = {:e}", defect.f64()));
        }
    }
}

/// `D(k) = 2 + Σ_s e_s e^{-iks}` from a converged interface solution. Pair
/// with [`e1_samples`] for the band itself.
pub fn from_interface<T: Real>(sol: &InterfaceSolution<T>) -> Result<DispersionSeries<T>> {
    if !sol.converged {
        return Err(Error::InvariantViolation("interface solution did not converge".into()));
    }
    let n = sol.n_sites;
    let mut out = DispersionSeries::window(n, Source::Kt);
    out.model = Some(sol.variant);
    out.epsilon = Some(sol.epsilon);
    *out.coeff_mut(0) = T::of(2.0);
    for (s, &v) in (1..=2 * n as i64).zip(&sol.e_s) {
        let c = out.coeff_mut(recentre(-s, n));
        *c = *c + v;
    }
    out.samples = Some(out.evaluate_grid());
    out.flag_asymmetry();
    Ok(out)
}

/// `E₀(k_j)`: `E₊` when `e^{-ik_j N} = (-1)^j` is `+1`, `E₋` otherwise.
pub fn ground_band<T: Real>(n_sites: usize, e_plus: T, e_minus: T) -> Vec<T> {
    (0..2 * n_sites).map(|j| if j % 2 == 0 { e_plus } else { e_minus }).collect()
}

/// `E₁(k_j) = E₀(k_j) + D(k_j)`.
pub fn e1_samples<T: Real>(series: &DispersionSeries<T>, e_plus: T, e_minus: T) -> Vec<(T, T)> {
    series
        .evaluate_grid()
        .into_iter()
        .zip(ground_band(series.n_sites, e_plus, e_minus))
        .map(|((k, d), e0)| (k, e0 + d))
        .collect()
}

/// Inverse transform of samples on the full `2N` grid (any order).
pub fn fourier_extract<T: Real>(samples: &[(T, T)]) -> Result<DispersionSeries<T>> {
    if samples.is_empty() || samples.len() % 2 == 1 {
        return Err(Error::GridMismatch(format!("{} samples; need 2N", samples.len())));
    }
    let n = samples.len() / 2;
    let step = PI / n as f64;
    let mut values: Vec<Option<T>> = vec![None; 2 * n];
    for &(k, v) in samples {
        let x = k.f64() / step;
        let j = x.round();
        if (x - j).abs() > 1e-6 || j < 0.0 || j >= 2.0 * n as f64 {
            return Err(Error::GridMismatch(format!("k = {k} is not of the form πj/{n}")));
        }
        let slot = &mut values[j as usize];
        if slot.is_some() {
            return Err(Error::GridMismatch(format!("k = {k} sampled twice")));
        }
        *slot = Some(v);
    }
    let values: Vec<f64> = values.into_iter().map(|v| v.expect("every slot filled").f64()).collect();

    let mut out = DispersionSeries::window(n, Source::Ed);
    let mut imag = 0.0f64;
    for s in out.s_min..=out.s_max() {
        let mut acc = Complex::new(0.0, 0.0);
        for (j, &v) in values.iter().enumerate() {
            let k = step * j as f64;
            acc += Complex::from_polar(v, -k * s as f64);
        }
        acc /= 2.0 * n as f64;
        imag = imag.max(acc.im.abs());
        *out.coeff_mut(s) = T::of(acc.re);
    }
    out.imag_residue = T::of(imag);
    if imag > IMAG_TOL {
        out.warnings.push(format!("imaginary residue {imag:e} discarded"));
    }
    out.samples = Some(samples.to_vec());
    out.flag_asymmetry();
    Ok(out)
}

/// One coefficient followed across chain lengths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTrack<T: Real = f64> {
    pub s: i64,
    /// `(N, c_s^N)` in increasing `N`.
    pub values: Vec<(usize, T)>,
    pub estimate: T,
    /// Geometric mean of `|Δ_{i+1}| / |Δ_i|`; zero when the sequence is constant.
    pub rate: T,
    /// Successive differences never grow.
    pub cauchy: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation<T: Real = f64> {
    pub estimate: DispersionSeries<T>,
    pub tracks: Vec<CoefficientTrack<T>>,
}

/// Last-`N` estimates with observed convergence rates.
pub fn extrapolate<T: Real>(series: &[DispersionSeries<T>]) -> Result<Extrapolation<T>> {
    extrapolate_with(series, false)
}

/// As [`extrapolate`]; `aitken` replaces the last value by the Aitken `Δ²`
/// estimate from the final three lengths where that is well defined.
pub fn extrapolate_with<T: Real>(series: &[DispersionSeries<T>], aitken: bool) -> Result<Extrapolation<T>> {
    let mut sorted: Vec<&DispersionSeries<T>> = series.iter().collect();
    sorted.sort_by_key(|d| d.n_sites);
    sorted.dedup_by_key(|d| d.n_sites);
    if sorted.len() < 3 {
        return Err(Error::InsufficientData(format!("{} chain lengths; need at least 3", sorted.len())));
    }
    let first = sorted[0];
    for d in &sorted[1..] {
        if d.model != first.model {
            return Err(Error::Model("extrapolation mixes models".into()));
        }
        let same_eps = match (d.epsilon, first.epsilon) {
            (Some(a), Some(b)) => (a - b).abs() <= T::zero(),
            (None, None) => true,
            _ => false,
        };
        if !same_eps {
            return Err(Error::Model("extrapolation mixes couplings".into()));
        }
    }
    let s_min = sorted.iter().map(|d| d.s_min).max().unwrap_or(0);
    let s_max = sorted.iter().map(|d| d.s_max()).min().unwrap_or(0);
    let last = sorted[sorted.len() - 1];

    let mut tracks = Vec::new();
    for s in s_min..=s_max {
        let values: Vec<(usize, T)> = sorted.iter().map(|d| (d.n_sites, d.coeff(s))).collect();
        // differences at rounding level count as zero
        let scale = values.iter().map(|v| v.1.abs()).fold(T::one(), T::max);
        let floor = T::of(1000.0) * T::epsilon() * scale;
        let diffs: Vec<T> = values
            .windows(2)
            .map(|w| (w[1].1 - w[0].1).abs())
            .map(|d| if d < floor { T::zero() } else { d })
            .collect();
        let cauchy = diffs.windows(2).all(|w| w[1] <= w[0]);
        let ratios: Vec<T> = diffs.windows(2).filter(|w| w[0] > T::zero()).map(|w| w[1] / w[0]).collect();
        let rate = if ratios.is_empty() {
            T::zero()
        } else {
            let logsum: T = ratios.iter().map(|r| r.max(T::min_positive_value()).ln()).sum();
            (logsum / T::of_int(ratios.len() as i64)).exp()
        };
        let mut estimate = values[values.len() - 1].1;
        if aitken {
            let m = values.len();
            let (a, b, c) = (values[m - 3].1, values[m - 2].1, values[m - 1].1);
            let denom = c - b - (b - a);
            if denom.abs() > T::epsilon() * (a.abs() + b.abs() + c.abs()) {
                estimate = c - (c - b) * (c - b) / denom;
            }
        }
        tracks.push(CoefficientTrack { s, values, estimate, rate, cauchy });
    }

    let mut est = DispersionSeries {
        n_sites: last.n_sites,
        model: last.model,
        epsilon: last.epsilon,
        s_min,
        coeffs: tracks.iter().map(|t| t.estimate).collect(),
        samples: None,
        source: Source::Extrapolated,
        imag_residue: T::zero(),
        warnings: Vec::new(),
    };
    for t in tracks.iter().filter(|t| !t.cauchy) {
        est.warnings.push(format!("c_{} is not Cauchy across N", t.s));
    }
    Ok(Extrapolation { estimate: est, tracks })
}
