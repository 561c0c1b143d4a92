//! Steady-state solve.
//!
//! The steady state is found inside the zero-charge operator block, written in
//! real coordinates of Hermitian operators, by replacing one population equation
//! with the trace condition and solving the resulting nonsingular system by LU,
//! followed by iterative refinement.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use super::superop::{check_modes, unit_image, ChargeBlock, Superoperator, SPARSE_LIMIT};
use super::OpenSystem;
use crate::error::{Error, Result};
use crate::model::params::ModelParams;

/// Largest block dimension factorized densely under [`NessMethod::Auto`].
pub const DENSE_BLOCK_LIMIT: usize = 1000;
/// Bound on `‖𝓛ρ‖ / (‖𝓛‖ ‖ρ‖)` accepted for a steady state.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
const REFINEMENT_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NessMethod {
    /// Dense below [`DENSE_BLOCK_LIMIT`], sparse above.
    #[default]
    Auto,
    /// Dense LU with a singular-value check for a degenerate null space.
    Dense,
    /// Sparse LU.
    Sparse,
}

pub fn ness(params: &ModelParams, method: NessMethod) -> Result<DensityMatrix> {
    solve_system(&OpenSystem::boundary_driven(params)?, method)
}

pub fn solve_ness(superop: &Superoperator, method: NessMethod) -> Result<DensityMatrix> {
    solve_system(&superop.system, method)
}

type Sparse = SparseColMat<usize, f64>;

fn sparse(n: usize, t: &[Triplet<usize, usize, f64>]) -> Result<Sparse> {
    SparseColMat::try_new_from_triplets(n, n, t).map_err(|e| Error::Singular(format!("assembly: {e:?}")))
}

fn max_abs(v: &Mat<f64>) -> f64 {
    (0..v.nrows()).map(|i| v[(i, 0)].abs()).fold(0.0, f64::max)
}

fn one_norm(a: &Sparse) -> f64 {
    (0..a.ncols()).map(|c| a.val_of_col(c).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn solve_system(system: &OpenSystem, method: NessMethod) -> Result<DensityMatrix> {
    let modes = system.n_modes();
    check_modes(modes, SPARSE_LIMIT, "steady-state")?;
    let block = ChargeBlock::new(modes);
    let n = block.dim();

    let lt = hermitian_triplets(system, &block);
    // Row 0 is the population equation of the empty state; swap it for Tr ρ = 1.
    let mut bt: Vec<_> = lt.iter().filter(|t| t.row != 0).copied().collect();
    bt.extend((0..1u64 << modes).map(|s| Triplet::new(0, block.index(s, s), 1.0)));
    let l = sparse(n, &lt)?;
    let b = sparse(n, &bt)?;
    let mut rhs = Mat::<f64>::zeros(n, 1);
    rhs[(0, 0)] = 1.0;

    let dense = match method {
        NessMethod::Auto => n <= DENSE_BLOCK_LIMIT,
        NessMethod::Dense => true,
        NessMethod::Sparse => false,
    };
    let x = if dense {
        check_null_space(&l)?;
        let lu = b.to_dense().partial_piv_lu();
        refine(&b, &rhs, |r| lu.solve(r))
    } else {
        let lu = b.sp_lu().map_err(|e| Error::Singular(format!("sparse LU: {e:?}")))?;
        refine(&b, &rhs, |r| lu.solve(r))
    };
    if (0..n).any(|i| !x[(i, 0)].is_finite()) {
        return Err(Error::Singular("steady-state system is singular".into()));
    }
    let residual = max_abs(&(&l * &x)) / (one_norm(&l) * max_abs(&x));
    if !(residual <= RESIDUAL_TOLERANCE) {
        return Err(Error::NotConverged { residual, tolerance: RESIDUAL_TOLERANCE });
    }

    let d = 1usize << modes;
    let mut rho = Mat::<c64>::zeros(d, d);
    for (c, &(i, j)) in block.pairs.iter().enumerate() {
        let (i, j) = (i as usize, j as usize);
        if i == j {
            rho[(i, i)] = c64::new(x[(c, 0)], 0.0);
        } else if i < j {
            rho[(i, j)].re = x[(c, 0)];
            rho[(j, i)].re = x[(c, 0)];
        } else {
            rho[(j, i)].im = x[(c, 0)];
            rho[(i, j)].im = -x[(c, 0)];
        }
    }
    DensityMatrix::from_unnormalized(modes, rho)
}

/// The Lindbladian restricted to Hermitian operators of the zero-charge block, as a real matrix.
///
/// Unknown `(i, i)` is `ρ_ii`; for `i < j`, unknown `(i, j)` is `Re ρ_ij` and unknown
/// `(j, i)` is `Im ρ_ij`. Equations are labelled the same way.
fn hermitian_triplets(system: &OpenSystem, block: &ChargeBlock) -> Vec<Triplet<usize, usize, f64>> {
    let mut out = Vec::with_capacity(block.dim() * 16);
    let mut push = |c: usize, k: u64, l: u64, v: c64| {
        if k == l {
            out.push(Triplet::new(block.index(k, k), c, v.re));
        } else if k < l {
            out.push(Triplet::new(block.index(k, l), c, v.re));
            out.push(Triplet::new(block.index(l, k), c, v.im));
        }
    };
    for (c, &(i, j)) in block.pairs.iter().enumerate() {
        if i == j {
            unit_image(system, i, i, |k, l, v| push(c, k, l, v));
            continue;
        }
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        // Re part: |lo⟩⟨hi| + |hi⟩⟨lo|; Im part: i|lo⟩⟨hi| - i|hi⟩⟨lo|.
        let phase = if i < j { c64::new(1.0, 0.0) } else { c64::new(0.0, 1.0) };
        unit_image(system, lo, hi, |k, l, v| push(c, k, l, phase * v));
        unit_image(system, hi, lo, |k, l, v| push(c, k, l, phase.conj() * v));
    }
    out
}

fn refine(a: &Sparse, rhs: &Mat<f64>, solve: impl Fn(&Mat<f64>) -> Mat<f64>) -> Mat<f64> {
    let mut x = solve(rhs);
    for _ in 0..REFINEMENT_STEPS {
        let r = rhs - a * &x;
        x += solve(&r);
    }
    x
}

/// Rejects Lindbladians whose numerical null space has more than one dimension.
///
/// Singular values within a factor 10 of the smallest one (or at round-off level)
/// count towards the null space.
fn check_null_space(l: &Sparse) -> Result<()> {
    let sv = l
        .to_dense()
        .singular_values()
        .map_err(|e| Error::Singular(format!("singular values: {e:?}")))?;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let threshold = 10.0 * min.max(f64::EPSILON * max);
    let dimension = sv.iter().filter(|&&s| s <= threshold).count();
    if dimension > 1 {
        return Err(Error::DegenerateSteadyState { dimension });
    }
    Ok(())
}
