use faer::Mat;

use super::basis::FockBasis;
use super::lattice::LatticeModel;
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense matrix of the chain Hamiltonian in `basis`.
pub fn build_hamiltonian<T: Real>(params: &ModelParams, basis: &FockBasis) -> Result<Mat<T>> {
    params.validate()?;
    if basis.n_sites() != params.n_sites {
        return Err(Error::DimensionMismatch { basis: basis.n_sites(), model: params.n_sites });
    }
    Ok(lattice_matrix(&LatticeModel::chain(params), basis))
}

/// Dense matrix of an arbitrary lattice model restricted to `basis`.
///
/// Hops leaving the basis (e.g. out of a fixed particle-number sector) are dropped,
/// which is exact for number-conserving models and number-filtered bases.
pub fn lattice_matrix<T: Real>(model: &LatticeModel, basis: &FockBasis) -> Mat<T> {
    let dim = basis.dim();
    let mut h = Mat::<T>::zeros(dim, dim);
    for (i, &s) in basis.states().iter().enumerate() {
        h[(i, i)] = T::lit(model.diagonal(s));
        for (target, amp) in model.off_diagonal(s) {
            if let Some(j) = basis.index_of(target) {
                h[(j, i)] = h[(j, i)] + T::lit(amp);
            }
        }
    }
    h
}

/// Largest `|H_ij - H_ji|` relative to the largest entry.
pub fn symmetry_defect<T: Real>(h: &Mat<T>) -> T {
    let mut scale = T::zero();
    let mut defect = T::zero();
    for j in 0..h.ncols() {
        for i in 0..h.nrows() {
            scale = scale.max(h[(i, j)].abs());
            defect = defect.max((h[(i, j)] - h[(j, i)]).abs());
        }
    }
    if scale == T::zero() {
        defect
    } else {
        defect / scale
    }
}
