//! Driving through finitely many damped lead modes at finite temperature and bias.
//!
//! Lead modes are extra fermionic modes attached outside sites 1 and `N`. Each
//! mode is coupled to its own Markovian bath that fills it with rate `γ f(ε)` and
//! empties it with rate `γ (1 - f(ε))`, where `f` is the Fermi-Dirac occupation of
//! the reservoir it represents.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lindblad::observables::{bond_current, impurity, populations};
use crate::lindblad::superop::SPARSE_LIMIT;
use crate::lindblad::{solve_system, DensityMatrix, Jump, NessMethod, OpenSystem, Rectification, Superoperator};
use crate::model::lattice::{Hop, LatticeModel};
use crate::model::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadMode {
    pub energy: f64,
    pub coupling: f64,
    pub damping: f64,
    pub side: Side,
}

impl LeadMode {
    pub fn new(side: Side, energy: f64) -> Self {
        Self { energy, coupling: 1.0, damping: 1.0, side }
    }

    pub fn with_coupling(mut self, kappa: f64) -> Self {
        self.coupling = kappa;
        self
    }

    pub fn with_damping(mut self, gamma: f64) -> Self {
        self.damping = gamma;
        self
    }

    /// Lorentzian contribution `κ² γ / ((ω - ε)² + (γ/2)²)`.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        let w = omega - self.energy;
        self.coupling * self.coupling * self.damping / (w * w + 0.25 * self.damping * self.damping)
    }
}

/// Temperature and chemical potential of one reservoir.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reservoir {
    pub temperature: f64,
    pub chem_potential: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeadSpec {
    pub modes: Vec<LeadMode>,
    pub left: Reservoir,
    pub right: Reservoir,
}

impl LeadSpec {
    /// The same mode energies on both sides with `μ_L = bias`, `μ_R = -bias`.
    pub fn symmetric(energies: &[f64], temperature: f64, bias: f64) -> Self {
        let modes = [Side::Left, Side::Right]
            .into_iter()
            .flat_map(|side| energies.iter().map(move |&e| LeadMode::new(side, e)))
            .collect();
        Self {
            modes,
            left: Reservoir { temperature, chem_potential: bias },
            right: Reservoir { temperature, chem_potential: -bias },
        }
    }

    pub fn with_coupling(mut self, kappa: f64) -> Self {
        self.modes.iter_mut().for_each(|m| m.coupling = kappa);
        self
    }

    pub fn with_damping(mut self, gamma: f64) -> Self {
        self.modes.iter_mut().for_each(|m| m.damping = gamma);
        self
    }

    /// Both chemical potentials negated.
    pub fn reversed_bias(&self) -> Self {
        let mut out = self.clone();
        out.left.chem_potential = -self.left.chem_potential;
        out.right.chem_potential = -self.right.chem_potential;
        out
    }

    pub fn reservoir(&self, side: Side) -> Reservoir {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    pub fn side_modes(&self, side: Side) -> impl Iterator<Item = &LeadMode> + '_ {
        self.modes.iter().filter(move |m| m.side == side)
    }

    pub fn count(&self, side: Side) -> usize {
        self.side_modes(side).count()
    }

    pub fn effective_spectral_density(&self, omega: f64, side: Side) -> f64 {
        self.side_modes(side).map(|m| m.spectral_density(omega)).sum()
    }

    pub fn validate(&self) -> Result<()> {
        for m in &self.modes {
            if !(m.damping > 0.0) || !m.damping.is_finite() {
                return Err(invalid(format!("lead damping must be positive, got {}", m.damping)));
            }
            if !m.energy.is_finite() || !m.coupling.is_finite() {
                return Err(invalid("lead mode energy and coupling must be finite"));
            }
        }
        for r in [self.left, self.right] {
            if !(r.temperature > 0.0) {
                return Err(invalid(format!("temperature must be positive, got {}", r.temperature)));
            }
            if !r.chem_potential.is_finite() {
                return Err(invalid("chemical potential must be finite"));
            }
        }
        Ok(())
    }
}

/// `1 / (e^{(ω-μ)/T} + 1)` without overflow for large `|ω-μ|/T`.
pub fn fermi_dirac(omega: f64, temperature: f64, chem_potential: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(invalid(format!("temperature must be positive, got {temperature}")));
    }
    let x = (omega - chem_potential) / temperature;
    Ok(if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    })
}

/// Chain plus lead modes, laid out as left modes, sites `1..=N`, right modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedModel {
    pub system: ModelParams,
    pub leads: LeadSpec,
}

impl ExtendedModel {
    pub fn new(system: ModelParams, leads: LeadSpec) -> Result<Self> {
        system.validate()?;
        leads.validate()?;
        let model = Self { system, leads };
        let total = model.n_modes();
        if total > SPARSE_LIMIT {
            return Err(Error::TooLarge { sites: total, limit: SPARSE_LIMIT, backend: "mesoscopic-leads" });
        }
        Ok(model)
    }

    pub fn n_modes(&self) -> usize {
        self.system.n_sites + self.leads.modes.len()
    }

    /// Mode index of system site `j`.
    pub fn site_mode(&self, j: usize) -> usize {
        self.leads.count(Side::Left) + j
    }

    /// Mode indices of the lead modes in the order of `leads.modes`.
    pub fn lead_mode_indices(&self) -> Vec<usize> {
        let n_left = self.leads.count(Side::Left);
        let (mut left, mut right) = (0, 0);
        self.leads
            .modes
            .iter()
            .map(|m| match m.side {
                Side::Left => {
                    left += 1;
                    left
                }
                Side::Right => {
                    right += 1;
                    n_left + self.system.n_sites + right
                }
            })
            .collect()
    }

    pub fn with_tilt(&self, e: f64) -> Self {
        Self { system: self.system.with_tilt(e), leads: self.leads.clone() }
    }

    pub fn with_system(&self, system: ModelParams) -> Self {
        Self { system, leads: self.leads.clone() }
    }

    pub fn with_leads(&self, leads: LeadSpec) -> Self {
        Self { system: self.system, leads }
    }

    pub fn open_system(&self) -> Result<OpenSystem> {
        let n = self.system.n_sites;
        let chain = LatticeModel::chain(&self.system);
        let offset = self.leads.count(Side::Left);
        let total = self.n_modes();

        let mut onsite = vec![0.0; total];
        let shift = |j: usize| j + offset;
        for (j, e) in chain.onsite.iter().enumerate() {
            onsite[offset + j] = *e;
        }
        let mut density: Vec<_> = chain.density.iter().map(|&(a, b, v)| (shift(a), shift(b), v)).collect();
        density.retain(|d| d.2 != 0.0);
        let mut hops: Vec<_> = chain.hops.iter().map(|h| Hop { a: shift(h.a), b: shift(h.b), t: h.t }).collect();

        let mut jumps = Vec::new();
        for (mode, lead) in self.lead_mode_indices().into_iter().zip(&self.leads.modes) {
            let site = match lead.side {
                Side::Left => self.site_mode(1),
                Side::Right => self.site_mode(n),
            };
            onsite[mode - 1] = lead.energy;
            if lead.coupling != 0.0 {
                hops.push(Hop { a: mode, b: site, t: lead.coupling });
            }
            let r = self.leads.reservoir(lead.side);
            let f = fermi_dirac(lead.energy, r.temperature, r.chem_potential)?;
            for (create, rate) in [(true, lead.damping * f), (false, lead.damping * (1.0 - f))] {
                if rate > 0.0 {
                    jumps.push(Jump { mode, create, rate });
                }
            }
        }
        Ok(OpenSystem { model: LatticeModel { n_modes: total, onsite, density, hops }, jumps })
    }

    pub fn superoperator(&self) -> Result<Superoperator> {
        Superoperator::from_system(self.open_system()?)
    }
}

/// Validated model and its Lindbladian.
pub fn build_extended_model(system: ModelParams, leads: LeadSpec) -> Result<(ExtendedModel, Superoperator)> {
    let model = ExtendedModel::new(system, leads)?;
    let superop = model.superoperator()?;
    Ok((model, superop))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeadObservables {
    /// `⟨n_j⟩` on the system sites.
    pub populations: Vec<f64>,
    /// `⟨n_k⟩` on the lead modes, in the order of `LeadSpec::modes`.
    pub lead_populations: Vec<f64>,
    /// Currents on the system bonds `j → j+1`.
    pub bond_currents: Vec<f64>,
    /// Mean system bond current; positive from site 1 towards site `N`.
    pub current: f64,
    pub impurity: f64,
}

impl LeadObservables {
    pub fn homogeneity_defect(&self) -> f64 {
        self.bond_currents.iter().map(|c| (c - self.current).abs()).fold(0.0, f64::max)
    }
}

pub fn lead_observables(rho: &DensityMatrix, model: &ExtendedModel) -> Result<LeadObservables> {
    if rho.n_modes() != model.n_modes() {
        return Err(Error::DimensionMismatch { basis: rho.n_modes(), model: model.n_modes() });
    }
    let n = model.system.n_sites;
    let all = populations(rho);
    let t = 0.5 * model.system.hopping;
    let bond_currents: Vec<f64> =
        (1..n).map(|j| bond_current(rho, model.site_mode(j), model.site_mode(j + 1), t)).collect();
    let current = if bond_currents.is_empty() {
        0.0
    } else {
        bond_currents.iter().sum::<f64>() / bond_currents.len() as f64
    };
    Ok(LeadObservables {
        populations: (1..=n).map(|j| all[model.site_mode(j) - 1]).collect(),
        lead_populations: model.lead_mode_indices().into_iter().map(|m| all[m - 1]).collect(),
        bond_currents,
        current,
        impurity: impurity(rho),
    })
}

pub fn solve_extended(model: &ExtendedModel, method: NessMethod) -> Result<LeadObservables> {
    let rho = solve_system(&model.open_system()?, method)?;
    lead_observables(&rho, model)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadRecord {
    pub tilt: f64,
    pub rectification: Rectification,
}

/// Forward current with the given bias, reverse current with both chemical potentials negated.
pub fn lead_rectification(model: &ExtendedModel, method: NessMethod) -> Result<Rectification> {
    let forward = solve_extended(model, method)?.current;
    let reverse = solve_extended(&model.with_leads(model.leads.reversed_bias()), method)?.current;
    Ok(Rectification::from_currents(forward, reverse))
}

pub fn mesoleads_rectification(model: &ExtendedModel, tilts: &[f64], method: NessMethod) -> Result<Vec<LeadRecord>> {
    tilts
        .iter()
        .map(|&e| Ok(LeadRecord { tilt: e, rectification: lead_rectification(&model.with_tilt(e), method)? }))
        .collect()
}

/// Forward current of the homogeneous noninteracting chain (`Δ = E = 0`) with the same leads.
pub fn reference_current(model: &ExtendedModel, method: NessMethod) -> Result<f64> {
    let free = model.system.with_interaction(0.0).with_tilt(0.0);
    Ok(solve_extended(&model.with_system(free), method)?.current)
}
