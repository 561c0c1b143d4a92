//! Sector spectra as a function of tilt and avoided-crossing detection.

use faer::Side;

use super::params::ModelParams;
use super::sectors::{sector_hamiltonian, SectorBasis, SectorLabel};
use crate::error::{invalid, Error, Result};

/// Convergence tolerance in `E` of the golden-section gap refinement.
pub const CROSSING_TOLERANCE: f64 = 1e-6;

/// Sorted sector eigenvalues on an ascending tilt grid.
///
/// `μ` is re-derived at every grid point (CP point) unless the template fixes it
/// and the sector is a pure particle-number sector.
#[derive(Debug, Clone)]
pub struct SpectrumSweep {
    pub template: ModelParams,
    pub sector: SectorBasis,
    pub tilt_grid: Vec<f64>,
    pub energies: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvoidedCrossing {
    /// Lower band index (0-based); the pair is `(band, band + 1)`.
    pub band: usize,
    pub tilt: f64,
    pub gap: f64,
}

fn params_at(template: &ModelParams, sector: &SectorBasis, tilt: f64) -> ModelParams {
    let p = template.with_tilt(tilt);
    if matches!(sector.label, SectorLabel::Number(_)) {
        p
    } else {
        p.with_default_chem_potential()
    }
}

/// Sorted eigenvalues of the sector Hamiltonian at one tilt.
pub fn sector_eigenvalues(template: &ModelParams, sector: &SectorBasis, tilt: f64) -> Result<Vec<f64>> {
    let p = params_at(template, sector, tilt);
    let h = sector_hamiltonian::<f64>(&p, sector)?;
    let mut ev = h
        .matrix
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver { tilt, reason: format!("{e:?}") })?;
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

pub fn sweep_spectrum(template: &ModelParams, sector: &SectorBasis, tilt_grid: &[f64]) -> Result<SpectrumSweep> {
    if tilt_grid.is_empty() {
        return Err(invalid("tilt grid is empty"));
    }
    if tilt_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("tilt grid must be strictly increasing"));
    }
    let energies = tilt_grid
        .iter()
        .map(|&e| sector_eigenvalues(template, sector, e))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumSweep {
        template: *template,
        sector: sector.clone(),
        tilt_grid: tilt_grid.to_vec(),
        energies,
    })
}

impl SpectrumSweep {
    pub fn n_bands(&self) -> usize {
        self.sector.dim()
    }

    /// Gap between bands `band` and `band + 1` at each grid point.
    pub fn gaps(&self, band: usize) -> Vec<f64> {
        self.energies.iter().map(|ev| (ev[band + 1] - ev[band]).abs()).collect()
    }

    /// Smallest gap of each adjacent band pair over the grid, as `(tilt, gap)`.
    pub fn min_gaps(&self) -> Vec<(f64, f64)> {
        (0..self.n_bands().saturating_sub(1))
            .map(|b| {
                self.gaps(b)
                    .into_iter()
                    .zip(&self.tilt_grid)
                    .map(|(g, &e)| (e, g))
                    .min_by(|x, y| x.1.total_cmp(&y.1))
                    .expect("grid is non-empty")
            })
            .collect()
    }

    fn gap_at(&self, band: usize, tilt: f64) -> Result<f64> {
        let ev = sector_eigenvalues(&self.template, &self.sector, tilt)?;
        Ok(ev[band + 1] - ev[band])
    }
}

/// Interior local minima of every adjacent-band gap, refined by golden-section search.
///
/// Returned sorted by tilt. Monotone gaps contribute nothing.
pub fn find_avoided_crossings(sweep: &SpectrumSweep) -> Result<Vec<AvoidedCrossing>> {
    let grid = &sweep.tilt_grid;
    let mut out = Vec::new();
    for band in 0..sweep.n_bands().saturating_sub(1) {
        let gaps = sweep.gaps(band);
        for i in 1..gaps.len().saturating_sub(1) {
            if gaps[i] <= gaps[i - 1] && gaps[i] < gaps[i + 1] {
                let (tilt, gap) = golden_min(|e| sweep.gap_at(band, e), grid[i - 1], grid[i + 1])?;
                out.push(AvoidedCrossing { band, tilt, gap });
            }
        }
    }
    out.sort_by(|a, b| a.tilt.total_cmp(&b.tilt));
    Ok(out)
}

fn golden_min(mut f: impl FnMut(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > CROSSING_TOLERANCE {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}
