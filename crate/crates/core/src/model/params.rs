use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Hamiltonian and boundary-driving parameters of the tilted chain.
///
/// `chem_potential: None` selects the CP-symmetric value `-E(N+1)/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub n_sites: usize,
    #[serde(default = "one")]
    pub hopping: f64,
    #[serde(default)]
    pub interaction: f64,
    #[serde(default)]
    pub tilt: f64,
    #[serde(default)]
    pub chem_potential: Option<f64>,
    #[serde(default = "one")]
    pub coupling: f64,
    #[serde(default = "one")]
    pub driving: f64,
}

fn one() -> f64 {
    1.0
}

impl ModelParams {
    pub fn new(n_sites: usize) -> Self {
        Self {
            n_sites,
            hopping: 1.0,
            interaction: 0.0,
            tilt: 0.0,
            chem_potential: None,
            coupling: 1.0,
            driving: 1.0,
        }
    }

    pub fn with_hopping(mut self, j: f64) -> Self {
        self.hopping = j;
        self
    }

    pub fn with_interaction(mut self, delta: f64) -> Self {
        self.interaction = delta;
        self
    }

    pub fn with_tilt(mut self, e: f64) -> Self {
        self.tilt = e;
        self
    }

    pub fn with_chem_potential(mut self, mu: f64) -> Self {
        self.chem_potential = Some(mu);
        self
    }

    /// Drops an explicit chemical potential so the CP-symmetric default applies.
    pub fn with_default_chem_potential(mut self) -> Self {
        self.chem_potential = None;
        self
    }

    pub fn with_coupling(mut self, gamma: f64) -> Self {
        self.coupling = gamma;
        self
    }

    pub fn with_driving(mut self, f: f64) -> Self {
        self.driving = f;
        self
    }

    /// `-E(N+1)/4`.
    pub fn cp_chem_potential(&self) -> f64 {
        -self.tilt * (self.n_sites as f64 + 1.0) / 4.0
    }

    pub fn chem_potential(&self) -> f64 {
        self.chem_potential.unwrap_or_else(|| self.cp_chem_potential())
    }

    pub fn is_cp_symmetric(&self, tol: f64) -> bool {
        (self.chem_potential() - self.cp_chem_potential()).abs() <= tol
    }

    /// Onsite energy `μ + (E/2) j` of site `j` (1-based).
    pub fn onsite(&self, site: usize) -> f64 {
        self.chem_potential() + 0.5 * self.tilt * site as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(invalid(format!("n_sites must be >= 2, got {}", self.n_sites)));
        }
        if !(self.driving.abs() <= 1.0) {
            return Err(invalid(format!("|driving| must be <= 1, got {}", self.driving)));
        }
        if !(self.coupling > 0.0) || !self.coupling.is_finite() {
            return Err(invalid(format!("coupling must be > 0, got {}", self.coupling)));
        }
        let finite = [self.hopping, self.interaction, self.tilt, self.chem_potential()];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(invalid("model parameters must be finite"));
        }
        Ok(())
    }
}
