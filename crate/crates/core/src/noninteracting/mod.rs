//! Exact steady-state observables of the noninteracting (`Δ = 0`) tilted chain.

mod analytic;
mod profile;
mod system;

use faer::linalg::solvers::Solve;
use faer::Mat;

pub use analytic::{analytic_reference, AnalyticReference, Regime};
pub use profile::{profile, Profile};
pub use system::{assemble_system, assemble_system_with, representative, representatives, unknown_count, LinearSystem, QuadraticChain, Unknown};

use crate::error::{Error, Result};
use crate::linalg::solve_banded;
use crate::scalar::{BigReal, DoubleDouble, Scalar};

const REFINEMENT_STEPS: usize = 2;

/// `2Γf / (Γ² + 16)`, the current of the untilted chain at unit hopping.
pub fn ballistic_current(coupling: f64, driving: f64) -> f64 {
    2.0 * coupling * driving / (coupling * coupling + 16.0)
}

/// Full set of expansion coefficients with the symmetry partners filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    pub chain: QuadraticChain,
    a: Vec<f64>,
    /// `h[l][k]` for `2 <= l <= N`, `1 <= k <= N - l + 1`; other slots are zero.
    h: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
}

impl CoefficientSet {
    pub fn n_sites(&self) -> usize {
        self.chain.n_sites
    }

    /// `a_k = ⟨2n_k - 1⟩`, `k = 1..=N`.
    pub fn a(&self, k: usize) -> f64 {
        self.a[k - 1]
    }

    pub fn a_all(&self) -> &[f64] {
        &self.a
    }

    /// `h_k^(l) = 2 Re⟨c†_k c_{k+l-1}⟩`.
    pub fn h(&self, l: usize, k: usize) -> f64 {
        self.h[l][k]
    }

    /// `b_k^(l) = 2 Im⟨c†_k c_{k+l-1}⟩`.
    pub fn b(&self, l: usize, k: usize) -> f64 {
        self.b[l][k]
    }

    /// The homogeneous nearest-neighbour coefficient `b^(2)`.
    pub fn b2(&self) -> f64 {
        self.b[2][1]
    }

    pub fn populations(&self) -> Vec<f64> {
        self.a.iter().map(|a| 0.5 * (a + 1.0)).collect()
    }

    /// `𝒥 = -J b^(2) / 2`.
    pub fn current(&self) -> f64 {
        -0.5 * self.chain.hopping * self.b2()
    }

    /// `Γ(f - a_1)/8`; equal to [`Self::current`] but loses relative accuracy
    /// once `a_1` approaches `f`.
    pub fn current_from_boundary(&self) -> f64 {
        self.chain.coupling * (self.chain.driving - self.a[0]) / 8.0
    }

    /// Iterates over every `(l, k, h, b)` with `l >= 2`.
    pub fn off_diagonal(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        let n = self.n_sites();
        (2..=n).flat_map(move |l| (1..=n + 1 - l).map(move |k| (l, k, self.h[l][k], self.b[l][k])))
    }
}

/// Solves the reduced system by sparse LU with iterative refinement.
///
/// Coefficients are accurate to double precision relative to the largest one,
/// which is too coarse for the currents of long, strongly tilted chains
/// (below about `1e-18`); use [`solve_extended`] there.
pub fn solve(system: &LinearSystem) -> Result<CoefficientSet> {
    let nu = system.unknown_count();
    let m = system.matrix()?;
    let lu = m.sp_lu().map_err(|e| Error::Singular(format!("sparse LU: {e:?}")))?;
    let rhs = Mat::from_fn(nu, 1, |i, _| system.rhs[i]);
    let mut x = lu.solve(&rhs);
    for _ in 0..REFINEMENT_STEPS {
        let r = &rhs - &m * &x;
        x += lu.solve(&r);
    }
    let x: Vec<f64> = (0..nu).map(|i| x[(i, 0)]).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("noninteracting system is singular".into()));
    }
    Ok(expand(system, &x))
}

/// Gaussian elimination with partial pivoting carried out in the arithmetic of `T`.
///
/// Equations and unknowns are ordered by operator range and site, which keeps
/// every row within a band of width `O(N)` around the diagonal.
pub fn solve_precise<T: Scalar>(system: &LinearSystem<T>) -> Result<CoefficientSet> {
    let nu = system.unknown_count();
    let key = |range: usize, site: usize| (std::cmp::Reverse(range.max(2)), site);
    let mut col_order: Vec<usize> = (0..nu).collect();
    col_order.sort_by_key(|&c| {
        let u = system.unknowns[c];
        let (range, site, kind) = match u {
            Unknown::A(k) => (1, k, 0),
            Unknown::H(l, k) => (l, k, 1),
            Unknown::B(l, k) => (l, k, 2),
        };
        (key(range, site), kind)
    });
    let mut col_pos = vec![0usize; nu];
    for (pos, &c) in col_order.iter().enumerate() {
        col_pos[c] = pos;
    }
    let mut row_order: Vec<usize> = (0..nu).collect();
    row_order.sort_by_key(|&r| {
        let (range, site) = system.row_keys[r];
        key(range, site)
    });
    let rows: Vec<Vec<(usize, T)>> = row_order
        .iter()
        .map(|&r| system.rows[r].iter().map(|(c, v)| (col_pos[*c], v.clone())).collect())
        .collect();
    let rhs: Vec<T> = row_order.iter().map(|&r| system.rhs[r].clone()).collect();
    let y = solve_banded(&rows, &rhs)?;
    let x: Vec<f64> = (0..nu).map(|c| y[col_pos[c]].to_f64()).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("noninteracting system is singular".into()));
    }
    Ok(expand(system, &x))
}

/// Assembles and eliminates in [`DoubleDouble`] arithmetic.
pub fn solve_extended(chain: &QuadraticChain) -> Result<CoefficientSet> {
    let system = assemble_system_with(chain, |x| DoubleDouble::from_f64_digits(x, 0))?;
    solve_precise(&system)
}

/// Picks the arithmetic from the requested significant digits: double precision
/// up to 16, double-double up to 32, [`BigReal`] beyond.
pub fn solve_with_digits(chain: &QuadraticChain, digits: usize) -> Result<CoefficientSet> {
    match digits {
        0..=16 => solve_chain(chain),
        17..=32 => solve_extended(chain),
        _ => {
            let system = assemble_system_with(chain, |x| BigReal::from_f64_digits(x, digits))?;
            solve_precise(&system)
        }
    }
}

/// Assembles and solves in double precision.
pub fn solve_chain(chain: &QuadraticChain) -> Result<CoefficientSet> {
    solve(&assemble_system(chain)?)
}

fn expand<T: Scalar>(system: &LinearSystem<T>, x: &[f64]) -> CoefficientSet {
    let n = system.chain.n_sites;
    let mut index = std::collections::HashMap::new();
    for (i, u) in system.unknowns.iter().enumerate() {
        index.insert(*u, x[i]);
    }
    let a = (1..=n)
        .map(|k| representative(n, 1, k).map_or(0.0, |(r, s)| s * index[&Unknown::A(r)]))
        .collect();
    let mut h = vec![Vec::new(); n + 1];
    let mut b = vec![Vec::new(); n + 1];
    for l in 2..=n {
        h[l] = vec![0.0; n + 2 - l];
        b[l] = vec![0.0; n + 2 - l];
        for k in 1..=n + 1 - l {
            if let Some((r, s)) = representative(n, l, k) {
                h[l][k] = s * index[&Unknown::H(l, r)];
                b[l][k] = s * index[&Unknown::B(l, if l == 2 { 1 } else { r })];
            }
        }
    }
    CoefficientSet { chain: system.chain, a, h, b }
}
