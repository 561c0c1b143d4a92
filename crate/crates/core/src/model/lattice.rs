//! Number-conserving lattice Hamiltonians acting on occupation bitstrings.

use super::basis::occupied;
use super::params::ModelParams;

/// Symmetric hopping `t (c†_a c_b + c†_b c_a)` between 1-based modes `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hop {
    pub a: usize,
    pub b: usize,
    pub t: f64,
}

/// Quadratic-plus-density Hamiltonian
/// `Σ ε_a (n_a - ½) + Σ V_ab (n_a - ½)(n_b - ½) + Σ t_ab (c†_a c_b + h.c.)`.
///
/// Hopping carries the Jordan-Wigner sign of the modes strictly between its two
/// ends, so modes that are not adjacent in the bit ordering behave as fermions.
/// Nearest-neighbour hops have no sign and coincide with the hardcore-boson form.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeModel {
    pub n_modes: usize,
    pub onsite: Vec<f64>,
    pub density: Vec<(usize, usize, f64)>,
    pub hops: Vec<Hop>,
}

impl LatticeModel {
    /// The tilted chain of `params` with sites `1..=N` on modes `1..=N`.
    pub fn chain(params: &ModelParams) -> Self {
        let n = params.n_sites;
        Self {
            n_modes: n,
            onsite: (1..=n).map(|j| params.onsite(j)).collect(),
            density: (1..n).map(|j| (j, j + 1, params.interaction)).collect(),
            hops: (1..n)
                .map(|j| Hop { a: j, b: j + 1, t: 0.5 * params.hopping })
                .collect(),
        }
    }

    /// Diagonal matrix element `⟨s|H|s⟩`.
    pub fn diagonal(&self, s: u64) -> f64 {
        let half = |m: usize| if occupied(s, m) { 0.5 } else { -0.5 };
        let onsite: f64 = self.onsite.iter().enumerate().map(|(i, e)| e * half(i + 1)).sum();
        let density: f64 = self.density.iter().map(|&(a, b, v)| v * half(a) * half(b)).sum();
        onsite + density
    }

    /// Off-diagonal images `H|s⟩ = Σ amp |s'⟩` excluding the diagonal.
    pub fn off_diagonal(&self, s: u64) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.hops.iter().filter_map(move |h| {
            let (oa, ob) = (occupied(s, h.a), occupied(s, h.b));
            if oa == ob || h.t == 0.0 {
                return None;
            }
            let target = s ^ (1 << (h.a - 1)) ^ (1 << (h.b - 1));
            Some((target, h.t * hop_sign(s, h.a, h.b)))
        })
    }
}

/// Jordan-Wigner sign `(-1)^{# occupied modes strictly between a and b}`.
#[inline]
pub fn hop_sign(s: u64, a: usize, b: usize) -> f64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if hi - lo < 2 {
        return 1.0;
    }
    // bits lo..hi-2 hold modes lo+1..hi-1
    let mask = ((1u64 << (hi - lo - 1)) - 1) << lo;
    if (s & mask).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Jordan-Wigner sign of a single creation/annihilation on mode `m`.
#[inline]
pub fn string_sign(s: u64, m: usize) -> f64 {
    let mask = (1u64 << (m - 1)) - 1;
    if (s & mask).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}
