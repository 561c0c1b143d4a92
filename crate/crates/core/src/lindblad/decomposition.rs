//! Steady state and current resolved in the Hamiltonian eigenbasis, sector by sector.

use faer::{c64, Mat, Side};

use super::density::DensityMatrix;
use crate::error::{invalid, Error, Result};
use crate::model::basis::occupied;
use crate::model::params::ModelParams;
use crate::model::sectors::{cp_sectors, number_sectors, sector_hamiltonian, SectorBasis, CP_TOLERANCE};

/// Largest Gram residual `max |VᵀV - I|` accepted for an eigenbasis.
pub const GRAM_TOLERANCE: f64 = 1e-10;

/// Eigenpairs of one sector; `vectors` holds Fock-space eigenvectors as columns,
/// ordered by ascending energy.
#[derive(Debug, Clone)]
pub struct SectorEigenbasis {
    pub sector: SectorBasis,
    pub energies: Vec<f64>,
    pub vectors: Mat<f64>,
}

/// CP sectors at the CP-symmetric point, particle-number sectors otherwise.
pub fn sector_eigenbases(params: &ModelParams) -> Result<Vec<SectorEigenbasis>> {
    let sectors = if params.is_cp_symmetric(CP_TOLERANCE) {
        cp_sectors(params)?
    } else {
        number_sectors(params.n_sites)?
    };
    let d = 1usize << params.n_sites;
    sectors
        .into_iter()
        .map(|sector| {
            let h = sector_hamiltonian::<f64>(params, &sector)?.matrix;
            let evd = h
                .self_adjoint_eigen(Side::Lower)
                .map_err(|e| Error::Eigensolver { tilt: params.tilt, reason: format!("{e:?}") })?;
            let u = evd.U();
            let energies: Vec<f64> = (0..sector.dim()).map(|k| evd.S()[k]).collect();
            let mut vectors = Mat::<f64>::zeros(d, sector.dim());
            for k in 0..sector.dim() {
                for (s, c) in sector.components(k) {
                    for nu in 0..sector.dim() {
                        vectors[(s as usize, nu)] += c * u[(k, nu)];
                    }
                }
            }
            Ok(SectorEigenbasis { sector, energies, vectors })
        })
        .collect()
}

/// One sector's share of the decomposition; indices are eigenstate numbers.
#[derive(Debug, Clone)]
pub struct SectorDecomposition {
    pub sector: SectorBasis,
    pub energies: Vec<f64>,
    /// `ρ_{μν} = ⟨μ|ρ|ν⟩`.
    pub rho: Mat<c64>,
    /// `J_{νμ} = ⟨ν|𝒥_q|μ⟩`, stored at `[(ν, μ)]`.
    pub current: Mat<c64>,
}

impl SectorDecomposition {
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.rho.nrows()).map(|m| self.rho[(m, m)].re).collect()
    }

    /// `ρ_{μν} J_{νμ}`, stored at `[(μ, ν)]`.
    pub fn contribution(&self, mu: usize, nu: usize) -> c64 {
        self.rho[(mu, nu)] * self.current[(nu, mu)]
    }

    pub fn current_sum(&self) -> f64 {
        let n = self.rho.nrows();
        let mut s = c64::new(0.0, 0.0);
        for mu in 0..n {
            for nu in 0..n {
                s += self.contribution(mu, nu);
            }
        }
        s.re
    }
}

#[derive(Debug, Clone)]
pub struct EigenbasisDecomposition {
    pub bond: usize,
    pub sectors: Vec<SectorDecomposition>,
}

impl EigenbasisDecomposition {
    pub fn total_probability(&self) -> f64 {
        self.sectors.iter().flat_map(|s| s.probabilities()).sum()
    }

    /// `Σ_s Σ_{μν} ρ^s_{μν} J^s_{νμ}`.
    pub fn reassembled_current(&self) -> f64 {
        self.sectors.iter().map(SectorDecomposition::current_sum).sum()
    }
}

/// Dense `𝒥_q = i(J/2)(c†_q c_{q+1} - c†_{q+1} c_q)`.
pub fn bond_current_operator(n_sites: usize, q: usize, hopping: f64) -> Mat<c64> {
    let d = 1usize << n_sites;
    let mut m = Mat::<c64>::zeros(d, d);
    let t = 0.5 * hopping;
    for s in 0..d as u64 {
        if occupied(s, q + 1) && !occupied(s, q) {
            let u = s ^ (1 << (q - 1)) ^ (1 << q);
            // c†_q c_{q+1}|s⟩ = |u⟩ and its adjoint
            m[(u as usize, s as usize)] += c64::new(0.0, t);
            m[(s as usize, u as usize)] += c64::new(0.0, -t);
        }
    }
    m
}

fn project(v: &Mat<f64>, m: &Mat<c64>) -> Mat<c64> {
    let vc = Mat::from_fn(v.nrows(), v.ncols(), |i, j| c64::new(v[(i, j)], 0.0));
    vc.transpose() * m * &vc
}

fn gram_residual(v: &Mat<f64>) -> f64 {
    let g = v.transpose() * v;
    let mut worst = 0.0f64;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            worst = worst.max((g[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    worst
}

pub fn eigenbasis_decomposition(
    rho: &DensityMatrix,
    bases: &[SectorEigenbasis],
    params: &ModelParams,
    bond: usize,
) -> Result<EigenbasisDecomposition> {
    let n = params.n_sites;
    if rho.n_modes() != n {
        return Err(Error::DimensionMismatch { basis: rho.n_modes(), model: n });
    }
    if bond < 1 || bond >= n {
        return Err(invalid(format!("bond {bond} outside 1..{n}")));
    }
    let total = bases.iter().map(|b| b.vectors.ncols()).sum::<usize>();
    let mut all = Mat::<f64>::zeros(1 << n, total);
    let mut col = 0;
    for b in bases {
        for k in 0..b.vectors.ncols() {
            for i in 0..b.vectors.nrows() {
                all[(i, col)] = b.vectors[(i, k)];
            }
            col += 1;
        }
    }
    let residual = gram_residual(&all);
    if residual > GRAM_TOLERANCE {
        return Err(Error::NotOrthonormal { residual });
    }
    let j_op = bond_current_operator(n, bond, params.hopping);
    let sectors = bases
        .iter()
        .map(|b| SectorDecomposition {
            sector: b.sector.clone(),
            energies: b.energies.clone(),
            rho: project(&b.vectors, rho.matrix()),
            current: project(&b.vectors, &j_op),
        })
        .collect();
    Ok(EigenbasisDecomposition { bond, sectors })
}
