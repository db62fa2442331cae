//! Kirkwood–Thomas cluster expansions for the ground states and interface
//! dispersion of periodic XZ / XXZ spin-1/2 chains, plus an exact
//! diagonalization oracle to check them against.

pub mod dispersion;
pub mod ed;
pub mod error;
pub mod ground;
pub mod interface;
pub mod lattice;
pub mod model;
pub mod scalar;
mod series;
pub mod transform;

pub use dispersion::{
    extrapolate, extrapolate_with, fourier_extract, from_interface, DispersionSeries, Extrapolation, Source,
};
pub use error::{Error, Result};
pub use ground::{g_norm, ground_energies, residual_ground, solve_ground, GroundResidual, GroundSolution};
pub use interface::{
    compute_h, e_norm, residual_interface, solve_interface, InterfaceSolution, SeamExpansion,
};
pub use lattice::{BondSet, SiteSet};
pub use model::{ModelKind, ModelSpec, TruncationPolicy};
pub use scalar::Real;

pub type GroundSolutionF64 = GroundSolution<f64>;
pub type GroundSolutionF32 = GroundSolution<f32>;
pub type SeamExpansionF64 = SeamExpansion<f64>;
pub type SeamExpansionF32 = SeamExpansion<f32>;
pub type InterfaceSolutionF64 = InterfaceSolution<f64>;
pub type InterfaceSolutionF32 = InterfaceSolution<f32>;
pub type DispersionSeriesF64 = DispersionSeries<f64>;
pub type DispersionSeriesF32 = DispersionSeries<f32>;
pub type ModelSpecF32 = ModelSpec<f32>;
