//! Vectorized Lindbladian.
//!
//! `ρ` is column-stacked: the matrix unit `|i⟩⟨j|` sits at index `i + j·2^M`.

use faer::sparse::{SparseColMat, Triplet};
use faer::{c64, Mat};

use super::OpenSystem;
use crate::error::{Error, Result};
use crate::model::params::ModelParams;

/// Largest mode count for a dense superoperator.
pub const DENSE_LIMIT: usize = 6;
/// Largest mode count for any superoperator or steady-state solve.
pub const SPARSE_LIMIT: usize = 9;

/// Calls `emit(k, l, value)` for every nonzero `⟨k|𝓛(|i⟩⟨j|)|l⟩`.
pub(crate) fn unit_image(system: &OpenSystem, i: u64, j: u64, mut emit: impl FnMut(u64, u64, c64)) {
    let m = &system.model;
    let mut diag = c64::new(0.0, m.diagonal(j) - m.diagonal(i));
    for (k, amp) in m.off_diagonal(i) {
        emit(k, j, c64::new(0.0, -amp));
    }
    for (k, amp) in m.off_diagonal(j) {
        emit(i, k, c64::new(0.0, amp));
    }
    for jump in &system.jumps {
        let ti = jump.apply(i);
        let tj = jump.apply(j);
        if let (Some((a, sa)), Some((b, sb))) = (ti, tj) {
            emit(a, b, c64::new(jump.rate * sa * sb, 0.0));
        }
        let lost = ti.is_some() as u8 + tj.is_some() as u8;
        diag.re -= 0.5 * jump.rate * lost as f64;
    }
    emit(i, j, diag);
}

pub(crate) fn check_modes(modes: usize, limit: usize, backend: &'static str) -> Result<()> {
    if modes > limit {
        Err(Error::TooLarge { sites: modes, limit, backend })
    } else {
        Ok(())
    }
}

/// Full `4^M × 4^M` Lindbladian.
#[derive(Debug, Clone)]
pub struct Superoperator {
    pub params: Option<ModelParams>,
    pub system: OpenSystem,
    pub matrix: SparseColMat<usize, c64>,
}

pub fn build_superoperator(params: &ModelParams) -> Result<Superoperator> {
    let mut s = Superoperator::from_system(OpenSystem::boundary_driven(params)?)?;
    s.params = Some(*params);
    Ok(s)
}

impl Superoperator {
    pub fn from_system(system: OpenSystem) -> Result<Self> {
        let modes = system.n_modes();
        check_modes(modes, SPARSE_LIMIT, "sparse superoperator")?;
        let d = 1u64 << modes;
        let mut triplets = Vec::new();
        for j in 0..d {
            for i in 0..d {
                let col = (i + j * d) as usize;
                unit_image(&system, i, j, |k, l, v| {
                    triplets.push(Triplet::new((k + l * d) as usize, col, v));
                });
            }
        }
        let n = (d * d) as usize;
        let matrix = SparseColMat::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::Singular(format!("superoperator assembly: {e:?}")))?;
        Ok(Self { params: None, system, matrix })
    }

    pub fn n_modes(&self) -> usize {
        self.system.n_modes()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn to_dense(&self) -> Result<Mat<c64>> {
        check_modes(self.n_modes(), DENSE_LIMIT, "dense superoperator")?;
        Ok(self.matrix.to_dense())
    }

    /// `𝓛ρ` for a `2^M × 2^M` matrix.
    pub fn apply(&self, rho: &Mat<c64>) -> Mat<c64> {
        let d = 1usize << self.n_modes();
        let v = Mat::from_fn(d * d, 1, |k, _| rho[(k % d, k / d)]);
        let w = &self.matrix * &v;
        Mat::from_fn(d, d, |i, j| w[(i + j * d, 0)])
    }

    /// Largest `|Σ_i 𝓛_{(ii),c}|` over columns `c`: zero iff the identity is a left null vector.
    pub fn trace_residual(&self) -> f64 {
        let d = 1usize << self.n_modes();
        let m = self.matrix.as_ref();
        let mut worst = 0.0f64;
        for c in 0..self.dim() {
            let rows = m.row_idx_of_col_raw(c);
            let vals = m.val_of_col(c);
            let mut s = c64::new(0.0, 0.0);
            for (&r, v) in rows.iter().zip(vals) {
                if r % d == r / d {
                    s += v;
                }
            }
            worst = worst.max(s.norm());
        }
        worst
    }
}

/// Index of the zero-charge operator block `{|i⟩⟨j| : popcount(i) = popcount(j)}`.
///
/// The steady state of a number-conserving Hamiltonian with single-particle jumps
/// lives in this block, of dimension `binomial(2M, M)`.
#[derive(Debug, Clone)]
pub(crate) struct ChargeBlock {
    rank: Vec<u32>,
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    pub pairs: Vec<(u64, u64)>,
}

impl ChargeBlock {
    pub fn new(modes: usize) -> Self {
        let d = 1u64 << modes;
        let mut groups: Vec<Vec<u64>> = vec![Vec::new(); modes + 1];
        let mut rank = vec![0u32; d as usize];
        for s in 0..d {
            let g = &mut groups[s.count_ones() as usize];
            rank[s as usize] = g.len() as u32;
            g.push(s);
        }
        let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
        let mut offsets = Vec::with_capacity(modes + 1);
        let mut pairs = Vec::new();
        for g in &groups {
            offsets.push(pairs.len());
            for &a in g {
                for &b in g {
                    pairs.push((a, b));
                }
            }
        }
        Self { rank, sizes, offsets, pairs }
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    #[inline]
    pub fn index(&self, i: u64, j: u64) -> usize {
        let n = i.count_ones() as usize;
        debug_assert_eq!(n, j.count_ones() as usize);
        self.offsets[n] + self.rank[i as usize] as usize * self.sizes[n] + self.rank[j as usize] as usize
    }
}
