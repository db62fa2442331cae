//! Exact diagonalization oracle on the full `2^N` product space.

pub mod frames;
pub mod lanczos;
pub mod oracle;
pub mod pauli;
pub mod sectors;
pub mod sparse;
pub mod symmetry;

pub use frames::{build_hamiltonian, hamiltonian_terms, Frame, MAX_ED_SITES};
pub use oracle::{
    interface_wavefunction, oracle_bands, oracle_dispersion, wavefunction_residual, OracleBands,
    MAX_ORACLE_SITES,
};
pub use sectors::{parity_energies, sector_spectra, SectorSpectrum};
pub use sparse::{CsrMatrix, OperatorMatrix};
pub use symmetry::{build_symmetries, transformed_frame, SignedPerm};
