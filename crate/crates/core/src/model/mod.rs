//! Chain model: bases, Hamiltonians, symmetry sectors and spectra.

pub mod basis;
pub mod hamiltonian;
pub mod lattice;
pub mod params;
pub mod perturbative;
pub mod sectors;
pub mod spectrum;

pub use basis::{cp_image, format_config, parse_config, FockBasis};
pub use hamiltonian::build_hamiltonian;
pub use lattice::LatticeModel;
pub use params::ModelParams;
pub use sectors::{cp_sectors, number_sectors, sector_hamiltonian, SectorBasis, SectorLabel};
pub use spectrum::{find_avoided_crossings, sweep_spectrum, SpectrumSweep};
