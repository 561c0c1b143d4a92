//! Lindblad dynamics of the boundary-driven chain and its steady-state observables.

pub mod decomposition;
pub mod density;
pub mod ness;
pub mod observables;
pub mod rectification;
pub mod superop;

pub use decomposition::{eigenbasis_decomposition, sector_eigenbases, EigenbasisDecomposition, SectorEigenbasis};
pub use density::DensityMatrix;
pub use ness::{ness, solve_ness, solve_system, NessMethod};
pub use observables::{observables, NessObservables};
pub use rectification::{rectification, Rectification};
pub use superop::{build_superoperator, Superoperator};

use crate::error::Result;
use crate::model::basis::occupied;
use crate::model::lattice::{string_sign, LatticeModel};
use crate::model::params::ModelParams;

/// Jump operator `√rate c†_m` (`create`) or `√rate c_m` on 1-based mode `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub mode: usize,
    pub create: bool,
    pub rate: f64,
}

impl Jump {
    /// `c†_m |s⟩` or `c_m |s⟩` as `(target, sign)`, without the rate.
    #[inline]
    pub fn apply(&self, s: u64) -> Option<(u64, f64)> {
        if occupied(s, self.mode) == self.create {
            return None;
        }
        Some((s ^ (1 << (self.mode - 1)), string_sign(s, self.mode)))
    }
}

/// Hamiltonian plus jump operators over `n_modes` fermionic modes.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenSystem {
    pub model: LatticeModel,
    pub jumps: Vec<Jump>,
}

impl OpenSystem {
    /// Chain driven by injection/ejection at sites 1 and `N`.
    pub fn boundary_driven(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let n = params.n_sites;
        let (g, f) = (params.coupling, params.driving);
        let jumps = vec![
            Jump { mode: 1, create: true, rate: g * (1.0 + f) / 8.0 },
            Jump { mode: 1, create: false, rate: g * (1.0 - f) / 8.0 },
            Jump { mode: n, create: true, rate: g * (1.0 - f) / 8.0 },
            Jump { mode: n, create: false, rate: g * (1.0 + f) / 8.0 },
        ];
        Ok(Self {
            model: LatticeModel::chain(params),
            jumps: jumps.into_iter().filter(|j| j.rate > 0.0).collect(),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.model.n_modes
    }
}
