//! Insulating-domain ansatz for reverse-driven chains (`f = -1`).
//!
//! Each particle-number sector `n` contributes its domain eigenstate, the right
//! domain `|0…0 1…1⟩` dressed perturbatively with single break-away
//! configurations: the innermost particle moved `k` sites to the left, or the
//! innermost hole moved `k` sites to the right. The steady state is the mixture
//! `Σ p_n |Ψ_n⟩⟨Ψ_n|` with `p_n` fixed by detailed balance between neighbouring
//! sectors. All arithmetic is generic over [`Scalar`] so that currents far below
//! double precision stay resolvable with [`BigReal`].

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::solve_banded;
use crate::model::params::ModelParams;
use crate::scalar::{BigReal, Scalar, DEFAULT_DIGITS, MIN_DIGITS};

/// Parameters of the reverse-driven chain seen by the ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzParams {
    pub n_sites: usize,
    pub hopping: f64,
    pub interaction: f64,
    pub tilt: f64,
    pub coupling: f64,
}

impl AnsatzParams {
    pub fn new(n_sites: usize, interaction: f64, tilt: f64) -> Self {
        Self { n_sites, hopping: 1.0, interaction, tilt, coupling: 1.0 }
    }

    /// Takes `N, J, Δ, E, Γ` from `params`; the driving is fixed to `f = -1`.
    pub fn from_model(params: &ModelParams) -> Self {
        Self {
            n_sites: params.n_sites,
            hopping: params.hopping,
            interaction: params.interaction,
            tilt: params.tilt,
            coupling: params.coupling,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_sites;
        if n < 4 || n % 2 != 0 {
            return Err(invalid(format!("ansatz needs an even chain with N >= 4, got N = {n}")));
        }
        if !(self.hopping > 0.0 && self.hopping.is_finite()) {
            return Err(invalid(format!("hopping must be positive, got {}", self.hopping)));
        }
        if !(self.interaction >= 0.0 && self.tilt >= 0.0) || !self.interaction.is_finite() || !self.tilt.is_finite() {
            return Err(invalid(format!(
                "ansatz needs Δ >= 0 and E >= 0, got Δ = {} and E = {}",
                self.interaction, self.tilt
            )));
        }
        if self.interaction == 0.0 && self.tilt == 0.0 {
            return Err(Error::Gapless);
        }
        if !(self.coupling > 0.0 && self.coupling.is_finite()) {
            return Err(invalid(format!("coupling must be positive, got {}", self.coupling)));
        }
        Ok(())
    }

    /// `ξ(Q) = 1/ln(Q/J)` with `Q = E` for `Δ = 0` and `Q = 2Δ` for `E = 0`.
    pub fn localization_length(&self) -> Option<f64> {
        let q = if self.interaction == 0.0 {
            self.tilt
        } else if self.tilt == 0.0 {
            2.0 * self.interaction
        } else {
            return None;
        };
        Some(1.0 / (q / self.hopping).ln())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Carrier {
    /// Innermost particle moving left, towards site 1.
    Particle,
    /// Innermost hole moving right, towards site `N`.
    Hole,
}

/// Number of hops after which `carrier` reaches the boundary in sector `n`.
pub fn reach(n_sites: usize, n: usize, carrier: Carrier) -> usize {
    match carrier {
        Carrier::Particle => n_sites - n,
        Carrier::Hole => n,
    }
}

fn lift<T: Scalar>(x: f64, digits: usize) -> T {
    T::from_f64_digits(x, digits)
}

/// `J^k / ((2Δ + E)(2Δ + 2E)⋯(2Δ + kE))`, the amplitude without boundary factor.
pub fn bare_amplitude<T: Scalar>(p: &AnsatzParams, k: usize, digits: usize) -> T {
    let j = lift::<T>(p.hopping, digits);
    let two_delta = lift::<T>(2.0 * p.interaction, digits);
    let e = lift::<T>(p.tilt, digits);
    let mut d = lift::<T>(1.0, digits);
    for i in 1..=k {
        let i = lift::<T>(i as f64, digits);
        d = d * j.clone() / (two_delta.clone() + i * e.clone());
    }
    d
}

/// Boundary factor `f_j` for `carrier` in sector `n` after `k` hops: the last
/// energy denominator loses half of its interaction part when the carrier
/// reaches site 1 (particle) or site `N` (hole).
pub fn boundary_factor<T: Scalar>(p: &AnsatzParams, n: usize, k: usize, carrier: Carrier, digits: usize) -> T {
    let m = reach(p.n_sites, n, carrier);
    if k != m {
        return lift(1.0, digits);
    }
    let delta = lift::<T>(p.interaction, digits);
    let me = lift::<T>(m as f64 * p.tilt, digits);
    (delta.clone() + delta.clone() + me.clone()) / (delta + me)
}

/// Break-away amplitude `d_k` of `carrier` in sector `n`, including `f_j`.
pub fn amplitude_dk<T: Scalar>(p: &AnsatzParams, n: usize, k: usize, carrier: Carrier, digits: usize) -> Result<T> {
    p.validate()?;
    if n > p.n_sites {
        return Err(invalid(format!("sector n = {n} exceeds N = {}", p.n_sites)));
    }
    let m = reach(p.n_sites, n, carrier);
    if k == 0 || k > m {
        return Err(invalid(format!("{carrier:?} in sector {n} moves 1..={m} sites, not {k}")));
    }
    Ok(bare_amplitude::<T>(p, k, digits) * boundary_factor(p, n, k, carrier, digits))
}

/// One configuration of a dark state other than the bare domain.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakAway<T> {
    pub carrier: Carrier,
    pub hops: usize,
    /// Site left empty relative to the domain.
    pub emptied: usize,
    /// Site newly occupied relative to the domain.
    pub filled: usize,
    pub amplitude: T,
}

/// Perturbative domain eigenstate of sector `n`, normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct DarkState<T> {
    pub n_sites: usize,
    pub particles: usize,
    pub breakaways: Vec<BreakAway<T>>,
    /// `1 + Σ d²`.
    pub norm: T,
}

impl<T: Scalar> DarkState<T> {
    /// Normalized weight of a break-away configuration.
    pub fn weight(&self, b: &BreakAway<T>) -> T {
        b.amplitude.clone() * b.amplitude.clone() / self.norm.clone()
    }

    fn domain_occupied(&self, site: usize) -> bool {
        site > self.n_sites - self.particles
    }

    /// `⟨n_j⟩` for `j = 1..=N`.
    pub fn populations(&self, digits: usize) -> Vec<T> {
        let mut out: Vec<T> = (1..=self.n_sites)
            .map(|j| lift(if self.domain_occupied(j) { 1.0 } else { 0.0 }, digits))
            .collect();
        for b in &self.breakaways {
            let w = self.weight(b);
            out[b.emptied - 1] = out[b.emptied - 1].clone() - w.clone();
            out[b.filled - 1] = out[b.filled - 1].clone() + w;
        }
        out
    }

    /// `⟨n_1⟩`.
    pub fn first_occupation(&self, digits: usize) -> T {
        if self.particles == self.n_sites {
            return lift(1.0, digits);
        }
        self.breakaways
            .iter()
            .filter(|b| b.filled == 1)
            .fold(lift(0.0, digits), |acc, b| acc + self.weight(b))
    }

    /// `⟨1 - n_N⟩`.
    pub fn last_vacancy(&self, digits: usize) -> T {
        if self.particles == 0 {
            return lift(1.0, digits);
        }
        self.breakaways
            .iter()
            .filter(|b| b.emptied == self.n_sites)
            .fold(lift(0.0, digits), |acc, b| acc + self.weight(b))
    }

    /// Weight of configurations that the reverse driving acts on.
    pub fn bright_weight(&self, digits: usize) -> T {
        self.first_occupation(digits) + self.last_vacancy(digits)
    }
}

/// Builds the dark state of sector `n`, keeping break-aways up to `order` hops
/// (`None` keeps all of them).
pub fn dark_state<T: Scalar>(p: &AnsatzParams, n: usize, order: Option<usize>, digits: usize) -> Result<DarkState<T>> {
    p.validate()?;
    let big_n = p.n_sites;
    if n > big_n {
        return Err(invalid(format!("sector n = {n} exceeds N = {big_n}")));
    }
    if let Some(k) = order {
        if k > big_n {
            return Err(Error::UnsupportedOrder { requested: k as u32, max: big_n as u32 });
        }
    }
    let limit = order.unwrap_or(big_n);
    let mut breakaways: Vec<BreakAway<T>> = Vec::new();
    if n > 0 {
        let inner = big_n - n + 1;
        for k in 1..=reach(big_n, n, Carrier::Particle).min(limit) {
            // One hop of either carrier gives the same configuration; count it once.
            let amplitude: T = if k == 1 && n == 1 {
                amplitude_dk(p, n, 1, Carrier::Hole, digits)?
            } else {
                amplitude_dk(p, n, k, Carrier::Particle, digits)?
            };
            breakaways.push(BreakAway { carrier: Carrier::Particle, hops: k, emptied: inner, filled: inner - k, amplitude });
        }
    }
    if n < big_n {
        let hole = big_n - n;
        for k in 2..=reach(big_n, n, Carrier::Hole).min(limit) {
            let amplitude = amplitude_dk(p, n, k, Carrier::Hole, digits)?;
            breakaways.push(BreakAway { carrier: Carrier::Hole, hops: k, emptied: hole + k, filled: hole, amplitude });
        }
    }
    let norm = breakaways
        .iter()
        .fold(lift::<T>(1.0, digits), |acc, b| acc + b.amplitude.clone() * b.amplitude.clone());
    Ok(DarkState { n_sites: big_n, particles: n, breakaways, norm })
}

/// Closed-form mixture weights, normalized, indexed by particle number `0..=N`:
/// `p_{N/2+m} ∝ (J/E)^{2m²} / Π_{|j|<|m|} (2Δ/E + N/2 + j)^{2(|m|-|j|)}`.
pub fn probabilities_closed_form<T: Scalar>(p: &AnsatzParams, digits: usize) -> Result<Vec<T>> {
    p.validate()?;
    if p.tilt == 0.0 {
        return Err(invalid("closed-form sector weights need E > 0"));
    }
    let half = p.n_sites / 2;
    let ratio = lift::<T>(p.hopping, digits) / lift::<T>(p.tilt, digits);
    let shift = lift::<T>(2.0 * p.interaction, digits) / lift::<T>(p.tilt, digits) + lift::<T>(half as f64, digits);
    let mut weights = Vec::with_capacity(p.n_sites + 1);
    for n in 0..=p.n_sites {
        let m = n.abs_diff(half) as i64;
        let mut denom = lift::<T>(1.0, digits);
        for j in (1 - m)..m {
            let base = shift.clone() + lift::<T>(j as f64, digits);
            denom = denom * base.powi(2 * (m - j.abs()) as u32);
        }
        weights.push(ratio.powi(2 * (m * m) as u32) / denom);
    }
    Ok(normalize(weights, digits))
}

fn normalize<T: Scalar>(w: Vec<T>, digits: usize) -> Vec<T> {
    let total = w.iter().fold(lift::<T>(0.0, digits), |acc, x| acc + x.clone());
    w.into_iter().map(|x| x / total.clone()).collect()
}

/// Inter-sector rates fed to the detailed-balance solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateModel {
    /// Rates from the normalized dark states, including boundary factors.
    #[default]
    DarkState,
    /// Squared bare amplitudes of the configurations reaching the boundary,
    /// the leading-order rates behind the closed form.
    LeadingOrder,
}

/// Sector weights from the balance equations `P_{n→n±1}`, solved as a linear
/// system with the half-filling row replaced by `p_{N/2} = 1`, then normalized.
pub fn probabilities_detailed_balance<T: Scalar>(
    p: &AnsatzParams,
    rates: RateModel,
    order: Option<usize>,
    digits: usize,
) -> Result<Vec<T>> {
    p.validate()?;
    let big_n = p.n_sites;
    // up[n]: injection at site N; down[n]: ejection at site 1. Γ/4 cancels.
    let (up, down): (Vec<T>, Vec<T>) = match rates {
        RateModel::DarkState => {
            let states = (0..=big_n).map(|n| dark_state::<T>(p, n, order, digits)).collect::<Result<Vec<_>>>()?;
            (
                states.iter().map(|s| s.last_vacancy(digits)).collect(),
                states.iter().map(|s| s.first_occupation(digits)).collect(),
            )
        }
        RateModel::LeadingOrder => {
            let sq = |k: usize| {
                let d = bare_amplitude::<T>(p, k, digits);
                d.clone() * d
            };
            let zero = || lift::<T>(0.0, digits);
            (
                (0..=big_n).map(|n| if n < big_n { sq(n) } else { zero() }).collect(),
                (0..=big_n).map(|n| if n > 0 { sq(big_n - n) } else { zero() }).collect(),
            )
        }
    };
    // Eliminate from both ends towards the half-filled sector, where the
    // weight is pinned to one; the other order cancels catastrophically.
    let half = big_n / 2;
    let order: Vec<usize> = (0..half).chain((half + 1..=big_n).rev()).chain([half]).collect();
    let mut pos = vec![0; big_n + 1];
    for (i, &n) in order.iter().enumerate() {
        pos[n] = i;
    }
    let zero = lift::<T>(0.0, digits);
    let mut rows: Vec<Vec<(usize, T)>> = Vec::with_capacity(big_n + 1);
    let mut rhs = vec![zero.clone(); big_n + 1];
    for &n in &order {
        if n == half {
            rows.push(vec![(pos[n], lift(1.0, digits))]);
            rhs[pos[n]] = lift(1.0, digits);
            continue;
        }
        let mut row = vec![(pos[n], zero.clone() - up[n].clone() - down[n].clone())];
        if n > 0 {
            row.push((pos[n - 1], up[n - 1].clone()));
        }
        if n < big_n {
            row.push((pos[n + 1], down[n + 1].clone()));
        }
        rows.push(row);
    }
    let x = solve_banded(&rows, &rhs)?;
    Ok(normalize((0..=big_n).map(|n| x[pos[n]].clone()).collect(), digits))
}

/// How sector weights are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weights {
    /// Detailed balance with the given rate model.
    #[default]
    Balance,
    /// The closed-form product.
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzOptions {
    pub digits: usize,
    /// Largest break-away distance kept; `None` keeps all.
    pub order: Option<usize>,
    pub weights: Weights,
    pub rates: RateModel,
}

impl Default for AnsatzOptions {
    fn default() -> Self {
        Self { digits: DEFAULT_DIGITS, order: None, weights: Weights::Balance, rates: RateModel::DarkState }
    }
}

/// Ansatz steady state of the reverse-driven chain.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzSolution<T> {
    pub params: AnsatzParams,
    pub probabilities: Vec<T>,
    pub states: Vec<DarkState<T>>,
    /// `⟨n_j⟩`, `j = 1..=N`.
    pub populations: Vec<T>,
    /// Reverse current `(Γ/8)(f + 1 - 2⟨n_1⟩)` at `f = -1`; negative.
    pub current: T,
}

impl<T: Scalar> AnsatzSolution<T> {
    /// Site-reflected profile. For `Δ = 0` this is the `f = +1` profile.
    pub fn mirrored_populations(&self) -> Vec<T> {
        self.populations.iter().rev().cloned().collect()
    }
}

pub fn solve_ansatz<T: Scalar>(p: &AnsatzParams, options: &AnsatzOptions) -> Result<AnsatzSolution<T>> {
    p.validate()?;
    let digits = options.digits;
    if p.tilt == 0.0 {
        warn!("ansatz at E = 0: left and right domains are degenerate; using the right domain with E -> 0 amplitudes");
    }
    let probabilities = match options.weights {
        Weights::Balance => probabilities_detailed_balance::<T>(p, options.rates, options.order, digits)?,
        Weights::ClosedForm => probabilities_closed_form::<T>(p, digits)?,
    };
    let states = (0..=p.n_sites)
        .map(|n| dark_state::<T>(p, n, options.order, digits))
        .collect::<Result<Vec<_>>>()?;
    let mut populations = vec![lift::<T>(0.0, digits); p.n_sites];
    for (w, s) in probabilities.iter().zip(&states) {
        for (acc, x) in populations.iter_mut().zip(s.populations(digits)) {
            *acc = acc.clone() + w.clone() * x;
        }
    }
    let current = zero_minus(lift::<T>(p.coupling / 4.0, digits) * populations[0].clone(), digits);
    Ok(AnsatzSolution { params: *p, probabilities, states, populations, current })
}

fn zero_minus<T: Scalar>(x: T, digits: usize) -> T {
    lift::<T>(0.0, digits) - x
}

/// [`solve_ansatz`] in [`BigReal`] with at least the minimum supported digits.
pub fn solve_ansatz_big(p: &AnsatzParams, options: &AnsatzOptions) -> Result<AnsatzSolution<BigReal>> {
    if options.digits < MIN_DIGITS {
        return Err(invalid(format!("ansatz needs at least {MIN_DIGITS} digits, got {}", options.digits)));
    }
    solve_ansatz(p, options)
}

/// Reverse current of the ansatz in [`BigReal`] at the default options.
pub fn ansatz_current(p: &AnsatzParams) -> Result<BigReal> {
    Ok(solve_ansatz_big(p, &AnsatzOptions::default())?.current)
}
