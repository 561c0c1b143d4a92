//! Sweep configuration read from TOML.

use std::path::Path;

use serde::{Deserialize, Serialize};
use tiltdiode::lindblad::NessMethod;
use tiltdiode::mesoleads::LeadSpec;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Lindblad,
    Noninteracting,
    Ansatz,
    Mesoleads,
    Spectrum,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Lindblad => "lindblad",
            Solver::Noninteracting => "noninteracting",
            Solver::Ansatz => "ansatz",
            Solver::Mesoleads => "mesoleads",
            Solver::Spectrum => "spectrum",
        }
    }
}

/// Either explicit values or an inclusive `start..=stop` range with `step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>> {
        let pts = match self {
            Grid::Values(v) => v.clone(),
            Grid::Range { start, stop, step } => {
                if !(*step > 0.0) || !(stop >= start) {
                    return Err(CliError::Config(format!("bad range {start}..{stop} step {step}")));
                }
                // Round the count so that accumulated steps do not drop the endpoint.
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| start + step * i as f64).collect()
            }
        };
        if pts.is_empty() {
            return Err(CliError::Config("grid is empty".into()));
        }
        if pts.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Config("grid contains non-finite values".into()));
        }
        if pts.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(CliError::Config("grid must be strictly ascending".into()));
        }
        Ok(pts)
    }
}

/// What to fit `ln |J|` against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitAxis {
    NSites,
    Tilt,
    RescaledTilt,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub x: FitAxis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceConfig {
    #[serde(default = "default_prominence")]
    pub prominence: f64,
}

fn default_prominence() -> f64 {
    crate::analysis::DEFAULT_PROMINENCE
}

impl Default for ResonanceConfig {
    fn default() -> Self {
        Self { prominence: default_prominence() }
    }
}

/// Lead modes shared by both sides, `μ_L = bias`, `μ_R = -bias`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeadsConfig {
    pub energies: Vec<f64>,
    pub temperature: f64,
    pub bias: f64,
    #[serde(default = "one")]
    pub coupling: f64,
    #[serde(default = "one")]
    pub damping: f64,
}

impl LeadsConfig {
    pub fn spec(&self) -> LeadSpec {
        LeadSpec::symmetric(&self.energies, self.temperature, self.bias)
            .with_coupling(self.coupling)
            .with_damping(self.damping)
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub solver: Option<Solver>,
    pub n_sites: Vec<usize>,
    #[serde(default = "zero_list")]
    pub interaction: Vec<f64>,
    pub tilt: Option<Grid>,
    pub rescaled_tilt: Option<Grid>,
    #[serde(default = "one")]
    pub driving: f64,
    #[serde(default = "one")]
    pub coupling: f64,
    #[serde(default = "one")]
    pub hopping: f64,
    /// Fixed chemical potential; the CP value is used when absent.
    pub chem_potential: Option<f64>,
    /// Forward and reverse currents and `R`.
    #[serde(default)]
    pub rectification: bool,
    /// Append site populations to every row.
    #[serde(default)]
    pub populations: bool,
    pub digits: Option<usize>,
    #[serde(default)]
    pub method: NessMethod,
    #[serde(default)]
    pub resonances: ResonanceConfig,
    pub fit: Option<FitConfig>,
    pub leads: Option<LeadsConfig>,
    /// Spectrum sector label such as `halfe`, `halfo`, `pair1e` or `n2`; defaults to `halfe`.
    pub sector: Option<String>,
}

fn zero_list() -> Vec<f64> {
    vec![0.0]
}

/// One point of the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub n_sites: usize,
    pub interaction: f64,
    pub tilt: f64,
}

impl Point {
    pub fn rescaled_tilt(&self) -> f64 {
        self.tilt * self.n_sites as f64
    }
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// The configured solver, or `forced` when the subcommand names one.
    pub fn resolve_solver(&self, forced: Option<Solver>) -> Result<Solver> {
        match (self.solver, forced) {
            (Some(a), Some(b)) if a != b => Err(CliError::Config(format!(
                "config selects solver '{}' but the subcommand runs '{}'",
                a.name(),
                b.name()
            ))),
            (_, Some(s)) | (Some(s), None) => Ok(s),
            (None, None) => Err(CliError::Config("no solver selected".into())),
        }
    }

    pub fn validate(&self, solver: Solver) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.n_sites.is_empty() {
            return bad("n_sites is empty".into());
        }
        if self.n_sites.windows(2).any(|w| w[0] >= w[1]) {
            return bad("n_sites must be strictly ascending".into());
        }
        if self.interaction.is_empty() {
            return bad("interaction is empty".into());
        }
        if self.interaction.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("interaction must be strictly ascending".into());
        }
        match (&self.tilt, &self.rescaled_tilt) {
            (Some(_), Some(_)) => return bad("tilt and rescaled_tilt are mutually exclusive".into()),
            (None, None) => return bad("one of tilt or rescaled_tilt is required".into()),
            (Some(g), None) | (None, Some(g)) => {
                g.points()?;
            }
        }
        if !(self.coupling > 0.0) {
            return bad(format!("coupling must be positive, got {}", self.coupling));
        }
        if !(-1.0..=1.0).contains(&self.driving) {
            return bad(format!("driving must lie in [-1, 1], got {}", self.driving));
        }
        if self.rectification && self.driving == 0.0 {
            return bad("rectification needs nonzero driving".into());
        }
        if !(self.resonances.prominence > 1.0) {
            return bad("resonance prominence must exceed 1".into());
        }
        match solver {
            Solver::Mesoleads if self.leads.is_none() => return bad("mesoleads needs a [leads] section".into()),
            Solver::Noninteracting if self.interaction.iter().any(|&d| d != 0.0) => {
                return bad("noninteracting solver needs interaction = [0]".into())
            }
            _ => {}
        }
        Ok(())
    }

    /// Grid points in output order: `N`, then `Δ`, then tilt.
    pub fn points(&self) -> Result<Vec<Point>> {
        let mut out = Vec::new();
        for &n in &self.n_sites {
            let tilts: Vec<f64> = match (&self.tilt, &self.rescaled_tilt) {
                (Some(g), _) => g.points()?,
                (None, Some(g)) => g.points()?.into_iter().map(|v| v / n as f64).collect(),
                (None, None) => return Err(CliError::Config("no tilt grid".into())),
            };
            for &d in &self.interaction {
                out.extend(tilts.iter().map(|&e| Point { n_sites: n, interaction: d, tilt: e }));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_keeps_endpoint() {
        let g = Grid::Range { start: 0.01, stop: 16.0, step: 0.05 };
        let p = g.points().unwrap();
        assert_eq!(p.len(), 320);
        assert!((p[319] - 15.96).abs() < 1e-12);
        let g = Grid::Range { start: 0.0, stop: 1.0, step: 0.1 };
        assert_eq!(g.points().unwrap().len(), 11);
    }

    #[test]
    fn parses_both_grid_forms() {
        let c = SweepConfig::from_toml(
            "solver = \"lindblad\"\nn_sites = [4]\ninteraction = [5.0]\ntilt = { start = 0.0, stop = 1.0, step = 0.5 }\n",
        )
        .unwrap();
        assert_eq!(c.points().unwrap().len(), 3);
        let c = SweepConfig::from_toml("n_sites = [10, 20]\nrescaled_tilt = [6.0]\n").unwrap();
        let p = c.points().unwrap();
        assert_eq!(p[1].tilt, 0.3);
        assert_eq!(c.interaction, vec![0.0]);
    }

    #[test]
    fn validation() {
        let base = "solver = \"lindblad\"\nn_sites = [4]\n";
        let empty = SweepConfig::from_toml(&format!("{base}tilt = []\n")).unwrap();
        assert!(empty.validate(Solver::Lindblad).is_err());
        let both = SweepConfig::from_toml(&format!("{base}tilt = [1.0]\nrescaled_tilt = [1.0]\n")).unwrap();
        assert!(both.validate(Solver::Lindblad).is_err());
        let desc = SweepConfig::from_toml(&format!("{base}tilt = [2.0, 1.0]\n")).unwrap();
        assert!(desc.validate(Solver::Lindblad).is_err());
        let ok = SweepConfig::from_toml(&format!("{base}tilt = [1.0, 2.0]\n")).unwrap();
        assert!(ok.validate(Solver::Lindblad).is_ok());
        assert!(ok.validate(Solver::Mesoleads).is_err());
        assert!(ok.resolve_solver(Some(Solver::Ansatz)).is_err());
        assert!(SweepConfig::from_toml("n_sites = [4]\nbogus = 1\n").is_err());
    }
}
