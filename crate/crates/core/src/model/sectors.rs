//! Particle-number and CP symmetry sectors.
//!
//! The CP map sends `n_j -> 1 - n_{N-j+1}`. For hardcore bosons it acts on
//! configurations as complement-of-reflection with no phase.

use std::collections::HashMap;
use std::fmt;

use faer::Mat;

use super::basis::{cp_image, format_config, FockBasis};
use super::lattice::LatticeModel;
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Absolute tolerance on `μ` when checking the CP-symmetric point.
pub const CP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    fn suffix(self) -> char {
        match self {
            Parity::Even => 'e',
            Parity::Odd => 'o',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SectorLabel {
    /// Fixed particle number, no CP resolution.
    Number(usize),
    /// Half filling with definite CP parity.
    Half(Parity),
    /// CP parity sector mixing `n_low` and `N - n_low` particles.
    Paired { n_low: usize, parity: Parity },
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SectorLabel::Number(n) => write!(f, "n{n}"),
            SectorLabel::Half(p) => write!(f, "half{}", p.suffix()),
            SectorLabel::Paired { n_low, parity } => write!(f, "pair{n_low}{}", parity.suffix()),
        }
    }
}

/// One basis vector `(|r⟩ + s|U r⟩)/√2` (period 2) or `|r⟩` (period 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectorElement {
    pub representative: u64,
    pub period: u8,
    pub parity: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    pub n_sites: usize,
    pub label: SectorLabel,
    pub elements: Vec<SectorElement>,
}

impl SectorBasis {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    /// Fock-space components of element `i`.
    pub fn components(&self, i: usize) -> Vec<(u64, f64)> {
        let e = self.elements[i];
        if e.period == 1 {
            vec![(e.representative, 1.0)]
        } else {
            let c = std::f64::consts::FRAC_1_SQRT_2;
            vec![
                (e.representative, c),
                (cp_image(e.representative, self.n_sites), c * e.parity as f64),
            ]
        }
    }

    /// Ket label such as `1001,+`.
    pub fn element_label(&self, i: usize) -> String {
        let e = self.elements[i];
        let s = format_config(e.representative, self.n_sites);
        match (e.period, e.parity) {
            (1, _) => s,
            (_, 1) => format!("{s},+"),
            _ => format!("{s},-"),
        }
    }

    fn coefficient_map(&self) -> HashMap<u64, (usize, f64)> {
        let mut map = HashMap::new();
        for i in 0..self.dim() {
            for (s, c) in self.components(i) {
                map.insert(s, (i, c));
            }
        }
        map
    }
}

/// Lexicographic key of the site-1-first string (site 1 most significant).
fn string_key(state: u64, n_sites: usize) -> u64 {
    super::basis::reflect(state, n_sites)
}

/// Canonical element order: period-2 classes first, then descending string.
fn sort_elements(elements: &mut [SectorElement], n_sites: usize) {
    elements.sort_by(|a, b| {
        b.period
            .cmp(&a.period)
            .then(string_key(b.representative, n_sites).cmp(&string_key(a.representative, n_sites)))
    });
}

/// Representative of the CP class of `s`: the lexicographically larger string.
pub fn cp_representative(s: u64, n_sites: usize) -> u64 {
    let u = cp_image(s, n_sites);
    if string_key(u, n_sites) > string_key(s, n_sites) {
        u
    } else {
        s
    }
}

/// Sectors of fixed particle number, one per `n = 0..=N`.
pub fn number_sectors(n_sites: usize) -> Result<Vec<SectorBasis>> {
    (0..=n_sites)
        .map(|n| {
            let basis = FockBasis::new(n_sites, Some(n))?;
            let mut elements: Vec<_> = basis
                .states()
                .iter()
                .map(|&s| SectorElement { representative: s, period: 1, parity: 1 })
                .collect();
            sort_elements(&mut elements, n_sites);
            Ok(SectorBasis { n_sites, label: SectorLabel::Number(n), elements })
        })
        .collect()
}

/// CP-resolved sectors of the chain; requires the CP-symmetric chemical potential.
///
/// For even `N` the half-filled sector is split by parity; every other particle
/// number `n < N/2` is combined with `N - n` into an even and an odd sector.
/// Empty sectors are omitted, so the dimensions always sum to `2^N`.
pub fn cp_sectors(params: &ModelParams) -> Result<Vec<SectorBasis>> {
    params.validate()?;
    if !params.is_cp_symmetric(CP_TOLERANCE) {
        return Err(Error::NotCpSymmetric {
            mu: params.chem_potential(),
            expected: params.cp_chem_potential(),
        });
    }
    let n_sites = params.n_sites;
    let mut sectors = Vec::new();
    if n_sites % 2 == 0 {
        let half = FockBasis::new(n_sites, Some(n_sites / 2))?;
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for &s in half.states() {
            if cp_representative(s, n_sites) != s {
                continue;
            }
            if cp_image(s, n_sites) == s {
                even.push(SectorElement { representative: s, period: 1, parity: 1 });
            } else {
                even.push(SectorElement { representative: s, period: 2, parity: 1 });
                odd.push(SectorElement { representative: s, period: 2, parity: -1 });
            }
        }
        for (parity, mut elements) in [(Parity::Even, even), (Parity::Odd, odd)] {
            if elements.is_empty() {
                continue;
            }
            sort_elements(&mut elements, n_sites);
            sectors.push(SectorBasis { n_sites, label: SectorLabel::Half(parity), elements });
        }
    }
    for n_low in 0..(n_sites + 1) / 2 {
        let low = FockBasis::new(n_sites, Some(n_low))?;
        let reps: Vec<u64> = low.states().iter().map(|&s| cp_representative(s, n_sites)).collect();
        for parity in [Parity::Even, Parity::Odd] {
            let mut elements: Vec<_> = reps
                .iter()
                .map(|&r| SectorElement { representative: r, period: 2, parity: parity.sign() as i8 })
                .collect();
            sort_elements(&mut elements, n_sites);
            sectors.push(SectorBasis { n_sites, label: SectorLabel::Paired { n_low, parity }, elements });
        }
    }
    Ok(sectors)
}

/// Hamiltonian projected on a symmetry sector.
#[derive(Debug, Clone)]
pub struct SectorHamiltonian<T> {
    pub sector: SectorBasis,
    pub matrix: Mat<T>,
}

/// `V† H V` for the sector's orthonormal basis `V`.
///
/// The sector must be invariant under `H`; CP sectors need the CP-symmetric `μ`.
pub fn sector_hamiltonian<T: Real>(
    params: &ModelParams,
    sector: &SectorBasis,
) -> Result<SectorHamiltonian<T>> {
    params.validate()?;
    if sector.n_sites != params.n_sites {
        return Err(Error::DimensionMismatch { basis: sector.n_sites, model: params.n_sites });
    }
    if !matches!(sector.label, SectorLabel::Number(_)) && !params.is_cp_symmetric(CP_TOLERANCE) {
        return Err(Error::NotCpSymmetric {
            mu: params.chem_potential(),
            expected: params.cp_chem_potential(),
        });
    }
    let model = LatticeModel::chain(params);
    let map = sector.coefficient_map();
    let dim = sector.dim();
    let mut h = vec![0.0f64; dim * dim];
    for a in 0..dim {
        for (s, ca) in sector.components(a) {
            let (b, cb) = map[&s];
            h[b * dim + a] += cb * ca * model.diagonal(s);
            for (t, amp) in model.off_diagonal(s) {
                if let Some(&(b, cb)) = map.get(&t) {
                    h[b * dim + a] += cb * ca * amp;
                }
            }
        }
    }
    let matrix = Mat::from_fn(dim, dim, |i, j| T::lit(h[i * dim + j]));
    Ok(SectorHamiltonian { sector: sector.clone(), matrix })
}
