use crate::error::{invalid, Result};

/// Largest chain handled by bitstring-encoded bases.
pub const MAX_BASIS_SITES: usize = 24;

/// Occupation-number basis, optionally restricted to a fixed particle number.
///
/// State `s` encodes site `j` (1-based) in bit `j - 1`. States are stored in
/// strictly increasing integer order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    n_sites: usize,
    states: Vec<u64>,
    particles: Option<usize>,
}

impl FockBasis {
    pub fn new(n_sites: usize, particles: Option<usize>) -> Result<Self> {
        if n_sites < 2 {
            return Err(invalid(format!("n_sites must be >= 2, got {n_sites}")));
        }
        if n_sites > MAX_BASIS_SITES {
            return Err(invalid(format!("n_sites {n_sites} exceeds basis limit {MAX_BASIS_SITES}")));
        }
        if let Some(n) = particles {
            if n > n_sites {
                return Err(invalid(format!("particle number {n} exceeds n_sites {n_sites}")));
            }
        }
        let states = (0..1u64 << n_sites)
            .filter(|s| particles.map_or(true, |n| s.count_ones() as usize == n))
            .collect();
        Ok(Self { n_sites, states, particles })
    }

    pub fn full(n_sites: usize) -> Result<Self> {
        Self::new(n_sites, None)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn particles(&self) -> Option<usize> {
        self.particles
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn state(&self, i: usize) -> u64 {
        self.states[i]
    }

    pub fn index_of(&self, state: u64) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }
}

/// Occupation of site `j` (1-based) in `state`.
#[inline]
pub fn occupied(state: u64, site: usize) -> bool {
    state >> (site - 1) & 1 == 1
}

/// Parses a configuration written site 1 first, e.g. `"1100"`.
pub fn parse_config(s: &str) -> Result<u64> {
    let mut state = 0u64;
    for (j, c) in s.chars().enumerate() {
        match c {
            '1' => state |= 1 << j,
            '0' => {}
            other => return Err(invalid(format!("bad occupation character {other:?} in {s:?}"))),
        }
    }
    Ok(state)
}

/// Renders `state` site 1 first.
pub fn format_config(state: u64, n_sites: usize) -> String {
    (1..=n_sites)
        .map(|j| if occupied(state, j) { '1' } else { '0' })
        .collect()
}

/// Image of `state` under `n_j -> 1 - n_{N-j+1}`.
pub fn cp_image(state: u64, n_sites: usize) -> u64 {
    let mask = (1u64 << n_sites) - 1;
    let reversed = state.reverse_bits() >> (64 - n_sites);
    !reversed & mask
}

/// Mirror `j -> N - j + 1` without particle-hole exchange.
pub fn reflect(state: u64, n_sites: usize) -> u64 {
    state.reverse_bits() >> (64 - n_sites)
}
