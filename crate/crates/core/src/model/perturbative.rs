//! Strong-coupling (small `J`) energies of domain configurations.

use super::params::ModelParams;
use crate::error::{invalid, Error, Result};

/// Absolute tolerance on perturbative denominators.
pub const POLE_TOLERANCE: f64 = 1e-9;

fn guard(name: &'static str, value: f64) -> Result<f64> {
    if value.abs() < POLE_TOLERANCE {
        Err(Error::Pole { name, value, tolerance: POLE_TOLERANCE })
    } else {
        Ok(value)
    }
}

/// Bare and second-order energies of the `n`-particle domains pinned left and right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainEnergies {
    pub bare_left: f64,
    pub bare_right: f64,
    pub corrected_left: f64,
    pub corrected_right: f64,
}

pub fn perturbative_energies(params: &ModelParams, n: usize) -> Result<DomainEnergies> {
    params.validate()?;
    let nn = params.n_sites;
    if n > nn {
        return Err(invalid(format!("particle number {n} exceeds n_sites {nn}")));
    }
    let (j, d, e) = (params.hopping, params.interaction, params.tilt);
    let base = d * (nn as f64 - 3.0);
    let split = e * (n * (nn - n)) as f64;
    let bare_left = 0.25 * (base - split);
    let bare_right = 0.25 * (base + split);
    let dl = guard("4Δ-2E", 4.0 * d - 2.0 * e)?;
    let dr = guard("4Δ+2E", 4.0 * d + 2.0 * e)?;
    Ok(DomainEnergies {
        bare_left,
        bare_right,
        corrected_left: bare_left + j * j / dl,
        corrected_right: bare_right + j * j / dr,
    })
}

/// Second-order energies of the remaining half-filled even configurations of `N = 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct N4Energies {
    pub e1010: f64,
    pub e0101: f64,
    pub e1001_plus: f64,
}

pub fn perturbative_energies_n4(params: &ModelParams) -> Result<N4Energies> {
    params.validate()?;
    if params.n_sites != 4 {
        return Err(invalid(format!("closed forms need n_sites = 4, got {}", params.n_sites)));
    }
    let (j, d, e) = (params.hopping, params.interaction, params.tilt);
    let j2 = j * j;
    let e_m_2d = guard("E-2Δ", e - 2.0 * d)?;
    let e_p_d = guard("E+Δ", e + d)?;
    let e_m_d = guard("E-Δ", e - d)?;
    let e_p_2d = guard("E+2Δ", e + 2.0 * d)?;
    Ok(N4Energies {
        e1010: -0.25 * (2.0 * e + 3.0 * d) + 0.5 * j2 * (1.0 / e_m_2d - 2.0 / e_p_d),
        e0101: 0.25 * (2.0 * e - 3.0 * d) + 0.5 * j2 * (2.0 / e_m_d - 1.0 / e_p_2d),
        e1001_plus: -0.25 * d + j2 * (1.0 / e_p_d - 1.0 / e_m_d),
    })
}

/// First tilt in `(lo, hi)` where the corrected `1100` and `1001,+` energies of `N = 4` cross.
///
/// Scans on a uniform grid of `steps` intervals and bisects the first sign change.
pub fn n4_domain_crossing(params: &ModelParams, lo: f64, hi: f64, steps: usize) -> Result<Option<f64>> {
    let diff = |e: f64| -> Result<f64> {
        let p = params.with_tilt(e).with_default_chem_potential();
        Ok(perturbative_energies(&p, 2)?.corrected_left - perturbative_energies_n4(&p)?.e1001_plus)
    };
    let h = (hi - lo) / steps as f64;
    let mut a = lo;
    let mut fa = diff(a)?;
    for i in 1..=steps {
        let b = lo + h * i as f64;
        let fb = diff(b)?;
        if fa == 0.0 {
            return Ok(Some(a));
        }
        if fa.signum() != fb.signum() {
            let (mut x0, mut x1, mut f0) = (a, b, fa);
            while x1 - x0 > 1e-12 {
                let m = 0.5 * (x0 + x1);
                let fm = diff(m)?;
                if fm.signum() == f0.signum() {
                    x0 = m;
                    f0 = fm;
                } else {
                    x1 = m;
                }
            }
            return Ok(Some(0.5 * (x0 + x1)));
        }
        a = b;
        fa = fb;
    }
    Ok(None)
}
