//! Model selection, couplings and truncation policy.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::MAX_SITES;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    XzAf,
    XxzAf,
    XxzFerro,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::XzAf, ModelKind::XxzAf, ModelKind::XxzFerro];

    pub fn is_af(self) -> bool {
        !matches!(self, ModelKind::XxzFerro)
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::XzAf => "xz-af",
            ModelKind::XxzAf => "xxz-af",
            ModelKind::XxzFerro => "xxz-ferro",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "xz-af" | "xz" => Ok(ModelKind::XzAf),
            "xxz-af" => Ok(ModelKind::XxzAf),
            "xxz-ferro" | "ferro" => Ok(ModelKind::XxzFerro),
            other => Err(Error::Model(format!("unknown model `{other}`"))),
        }
    }
}

/// A chain in the transformed frame: `couplings[j-1]` is `J_j` for bond `<j, j+1>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec<T: Real = f64> {
    pub model: ModelKind,
    pub n_sites: usize,
    pub epsilon: T,
    pub couplings: Vec<i8>,
}

impl<T: Real> ModelSpec<T> {
    /// All `J_j = +1`; the chain whose ground sector energies are `E_±`.
    pub fn uniform(model: ModelKind, n_sites: usize, epsilon: T) -> Self {
        ModelSpec { model, n_sites, epsilon, couplings: vec![1; n_sites] }
    }

    /// The chain carrying one interface. For the antiferromagnets the
    /// sublattice rotation leaves `J_N = -1` exactly when `N` is odd; the
    /// ferromagnet has its seam coupling flipped by hand.
    pub fn interface(model: ModelKind, n_sites: usize, epsilon: T) -> Self {
        let mut spec = Self::uniform(model, n_sites, epsilon);
        if !model.is_af() || n_sites % 2 == 1 {
            spec.couplings[n_sites - 1] = -1;
        }
        spec
    }

    pub fn coupling(&self, bond: usize) -> i8 {
        self.couplings[bond - 1]
    }

    pub fn is_uniform(&self) -> bool {
        self.couplings.iter().all(|&j| j == 1)
    }

    /// Seam-flipped: `J_N = -1`, all others `+1`.
    pub fn is_seam_flipped(&self) -> bool {
        let n = self.n_sites;
        self.couplings[..n - 1].iter().all(|&j| j == 1) && self.couplings[n - 1] == -1
    }

    pub fn validate(&self, norm_m: f64) -> Result<()> {
        let n = self.n_sites;
        if !(3..=MAX_SITES).contains(&n) {
            return Err(Error::ChainLength(n, "3..=62"));
        }
        if self.couplings.len() != n {
            return Err(Error::SizeMismatch { left: n, right: self.couplings.len() });
        }
        if self.couplings.iter().any(|&j| j != 1 && j != -1) {
            return Err(Error::Model("couplings must be +1 or -1".into()));
        }
        let eps = self.epsilon.f64();
        if !eps.is_finite() {
            return Err(Error::Model(format!("epsilon {eps} is not finite")));
        }
        check_domain(eps, norm_m)
    }

    pub fn cast<U: Real>(&self) -> ModelSpec<U> {
        ModelSpec {
            model: self.model,
            n_sites: self.n_sites,
            epsilon: U::of(self.epsilon.f64()),
            couplings: self.couplings.clone(),
        }
    }
}

pub(crate) fn check_domain(epsilon: f64, norm_m: f64) -> Result<()> {
    let product = epsilon.abs() * norm_m;
    if product > 1.0 {
        Err(Error::ParameterDomain { epsilon, norm_m, product })
    } else {
        Ok(())
    }
}

/// Truncation and iteration controls shared by the ground and interface solvers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub w_max: u32,
    /// Highest power kept in the exponential series; `None` means `w_max + 2`.
    pub n_max: Option<u32>,
    pub tol: f64,
    pub max_iter: usize,
    pub norm_m: f64,
    /// Ferro enumeration cutoff on `α`; `None` means `N - 1`.
    pub a_max: Option<u32>,
    /// Update every row from the previous generation only.
    pub jacobi: bool,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            w_max: 6,
            n_max: None,
            tol: 1e-13,
            max_iter: 500,
            norm_m: 10.0,
            a_max: None,
            jacobi: false,
        }
    }
}

impl TruncationPolicy {
    pub fn with_w_max(w_max: u32) -> Self {
        TruncationPolicy { w_max, ..Default::default() }
    }

    pub fn n_max(&self) -> u32 {
        self.n_max.unwrap_or(self.w_max + 2)
    }

    pub fn a_max(&self, n_sites: usize) -> u32 {
        self.a_max.unwrap_or(n_sites as u32 - 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.w_max < 1 {
            return Err(Error::Policy("w_max must be at least 1".into()));
        }
        if self.n_max() < 2 {
            return Err(Error::Policy("n_max must be at least 2".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Policy(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Policy("max_iter must be positive".into()));
        }
        if !(self.norm_m > 0.0) {
            return Err(Error::Policy(format!("norm_m must be positive, got {}", self.norm_m)));
        }
        Ok(())
    }
}
