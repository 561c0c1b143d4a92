use faer::{c64, Mat};

use super::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::model::basis::occupied;
use crate::model::lattice::hop_sign;
use crate::model::params::ModelParams;

/// Steady-state observables of the boundary-driven chain.
#[derive(Debug, Clone, PartialEq)]
pub struct NessObservables {
    /// `⟨n_j⟩` for `j = 1..=N`.
    pub populations: Vec<f64>,
    /// `⟨𝒥_j⟩` for bonds `j = 1..N`.
    pub bond_currents: Vec<f64>,
    /// Mean bond current; positive means transport from site 1 towards site `N`.
    pub current: f64,
    /// `(Γ/8)(f + 1 - 2⟨n_1⟩)`.
    pub current_from_n1: f64,
    pub impurity: f64,
    pub osee: f64,
}

impl NessObservables {
    /// Largest deviation of a bond current from the mean.
    pub fn homogeneity_defect(&self) -> f64 {
        self.bond_currents.iter().map(|c| (c - self.current).abs()).fold(0.0, f64::max)
    }
}

pub fn observables(rho: &DensityMatrix, params: &ModelParams) -> Result<NessObservables> {
    let n = params.n_sites;
    if rho.n_modes() != n {
        return Err(Error::DimensionMismatch { basis: rho.n_modes(), model: n });
    }
    let populations = populations(rho);
    let bond_currents: Vec<f64> = (1..n).map(|j| bond_current(rho, j, j + 1, 0.5 * params.hopping)).collect();
    let current = bond_currents.iter().sum::<f64>() / bond_currents.len() as f64;
    let current_from_n1 = params.coupling / 8.0 * (params.driving + 1.0 - 2.0 * populations[0]);
    Ok(NessObservables {
        populations,
        bond_currents,
        current,
        current_from_n1,
        impurity: impurity(rho),
        osee: osee(rho, n / 2)?,
    })
}

/// `⟨n_m⟩` for every mode.
pub fn populations(rho: &DensityMatrix) -> Vec<f64> {
    let m = rho.n_modes();
    let mut out = vec![0.0; m];
    for s in 0..1u64 << m {
        let p = rho.get(s, s).re;
        for (k, o) in out.iter_mut().enumerate() {
            if occupied(s, k + 1) {
                *o += p;
            }
        }
    }
    out
}

/// `⟨c†_a c_b⟩` with the Jordan-Wigner sign of the modes between `a` and `b`.
pub fn hop_expectation(rho: &DensityMatrix, a: usize, b: usize) -> c64 {
    let mut z = c64::new(0.0, 0.0);
    for s in 0..1u64 << rho.n_modes() {
        if occupied(s, b) && !occupied(s, a) {
            let t = s ^ (1 << (a - 1)) ^ (1 << (b - 1));
            z += rho.get(s, t) * hop_sign(s, a, b);
        }
    }
    z
}

/// `⟨i t (c†_a c_b - c†_b c_a)⟩`, the particle current from `a` to `b` of a hop `t`.
pub fn bond_current(rho: &DensityMatrix, a: usize, b: usize, t: f64) -> f64 {
    -2.0 * t * hop_expectation(rho, a, b).im
}

/// `1 - Tr ρ²`.
pub fn impurity(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let mut purity = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            purity += m[(i, j)].norm_sqr();
        }
    }
    1.0 - purity
}

/// Operator-space entanglement entropy (bits) across the cut after `left` modes.
///
/// The operator is reshaped so that rows index (ket, bra) of the first `left`
/// modes and columns the rest, then its normalized Schmidt spectrum is used.
pub fn osee(rho: &DensityMatrix, left: usize) -> Result<f64> {
    let m = rho.n_modes();
    let dl = 1usize << left;
    let dr = 1usize << (m - left);
    let r = rho.matrix();
    let reshaped = Mat::from_fn(dl * dl, dr * dr, |row, col| {
        let (ka, ba) = (row % dl, row / dl);
        let (kb, bb) = (col % dr, col / dr);
        r[(ka + kb * dl, ba + bb * dl)]
    });
    let sv = reshaped
        .singular_values()
        .map_err(|e| Error::InvalidDensityMatrix(format!("Schmidt decomposition failed: {e:?}")))?;
    let norm2: f64 = sv.iter().map(|s| s * s).sum();
    Ok(sv
        .iter()
        .map(|s| s * s / norm2)
        .filter(|&w| w > 0.0)
        .map(|w| -w * w.log2())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::basis::parse_config;

    #[test]
    fn product_states() {
        let p = ModelParams::new(4);
        let rho = DensityMatrix::pure_configuration(4, parse_config("1100").unwrap());
        let o = observables(&rho, &p).unwrap();
        assert_eq!(o.populations, vec![1.0, 1.0, 0.0, 0.0]);
        assert!(o.impurity.abs() < 1e-15);
        assert!(o.osee.abs() < 1e-12);
        assert!(o.bond_currents.iter().all(|&c| c == 0.0));

        let mixed = observables(&DensityMatrix::maximally_mixed(4), &p).unwrap();
        assert!((mixed.impurity - (1.0 - 1.0 / 16.0)).abs() < 1e-15);
        assert!(mixed.osee.abs() < 1e-12);
    }

    #[test]
    fn bell_like_operator_has_entanglement() {
        // (|10⟩ + |01⟩)/√2 across a one-mode cut: four equal Schmidt weights.
        let mut m = Mat::<c64>::zeros(4, 4);
        for &(i, j) in &[(1, 1), (1, 2), (2, 1), (2, 2)] {
            m[(i, j)] = c64::new(0.5, 0.0);
        }
        let rho = DensityMatrix::new(2, m).unwrap();
        assert!((osee(&rho, 1).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn current_sign_convention() {
        let mut m = Mat::<c64>::zeros(4, 4);
        let (a, b) = (parse_config("10").unwrap() as usize, parse_config("01").unwrap() as usize);
        m[(a, a)] = c64::new(0.5, 0.0);
        m[(b, b)] = c64::new(0.5, 0.0);
        m[(a, b)] = c64::new(0.0, -0.5);
        m[(b, a)] = c64::new(0.0, 0.5);
        let rho = DensityMatrix::new(2, m).unwrap();
        // ⟨c†_1 c_2⟩ = ρ_{01,10} = i/2, so ⟨𝒥⟩ = -J Im = -J/2.
        assert!((bond_current(&rho, 1, 2, 0.5) + 0.5).abs() < 1e-15);
    }
}
