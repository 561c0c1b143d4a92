//! Closed linear system for the correlation coefficients of the quadratic chain.
//!
//! Unknowns are `a_k = ⟨2n_k - 1⟩`, `h_k^(l) = 2 Re⟨c†_k c_{k+l-1}⟩` and
//! `b_k^(l) = 2 Im⟨c†_k c_{k+l-1}⟩`, reduced by the reflection symmetry of the
//! driven chain. Rows are the real and imaginary parts of the stationarity
//! conditions `d⟨c†_i c_j⟩/dt = 0`.

use std::fmt;

use faer::sparse::{SparseColMat, Triplet};

use crate::error::{invalid, Error, Result};
use crate::model::params::ModelParams;
use crate::scalar::Scalar;

/// Independent coefficient of the reduced system; `(l, k)` follows the operator
/// range `l` and left site `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Unknown {
    A(usize),
    H(usize, usize),
    B(usize, usize),
}

impl Unknown {
    /// Operator range `l`; populations have range 1.
    pub fn range(&self) -> usize {
        match *self {
            Unknown::A(_) => 1,
            Unknown::H(l, _) | Unknown::B(l, _) => l,
        }
    }
}

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unknown::A(k) => write!(f, "a_{k}"),
            Unknown::H(l, k) => write!(f, "h_{k}^({l})"),
            Unknown::B(2, _) => write!(f, "b^(2)"),
            Unknown::B(l, k) => write!(f, "b_{k}^({l})"),
        }
    }
}

/// Parameters of the quadratic chain; the chemical potential drops out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticChain {
    pub n_sites: usize,
    pub hopping: f64,
    pub tilt: f64,
    pub coupling: f64,
    pub driving: f64,
}

impl QuadraticChain {
    pub fn new(n_sites: usize, tilt: f64, coupling: f64, driving: f64) -> Self {
        Self { n_sites, hopping: 1.0, tilt, coupling, driving }
    }

    /// Rejects interacting parameter sets.
    pub fn from_params(p: &ModelParams) -> Result<Self> {
        p.validate()?;
        if p.interaction != 0.0 {
            return Err(invalid(format!(
                "the noninteracting solver needs Δ = 0, got {}",
                p.interaction
            )));
        }
        Ok(Self { n_sites: p.n_sites, hopping: p.hopping, tilt: p.tilt, coupling: p.coupling, driving: p.driving })
    }

    pub fn validate(&self) -> Result<()> {
        let p = ModelParams::new(self.n_sites)
            .with_hopping(self.hopping)
            .with_tilt(self.tilt)
            .with_coupling(self.coupling)
            .with_driving(self.driving);
        p.validate()
    }

    pub fn with_driving(mut self, f: f64) -> Self {
        self.driving = f;
        self
    }
}

/// Symmetry-reduced index: the representative site and the sign relating the
/// coefficient to it, or `None` when the coefficient vanishes by symmetry.
///
/// `l = 1` encodes the populations `a_k = -a_{N-k+1}`; for `l >= 2` the
/// partner of `k` is `N - l - k + 2` with sign `(-1)^l`.
pub fn representative(n: usize, l: usize, k: usize) -> Option<(usize, f64)> {
    let m = if l == 1 { n + 1 - k } else { n + 2 - l - k };
    let flip = if l == 1 { -1.0 } else if l % 2 == 0 { 1.0 } else { -1.0 };
    if m == k {
        return if flip < 0.0 { None } else { Some((k, 1.0)) };
    }
    Some(if k < m { (k, 1.0) } else { (m, flip) })
}

/// Representative sites of range `l >= 2` carrying an unknown.
pub fn representatives(n: usize, l: usize) -> Vec<usize> {
    (1..=n + 1 - l).filter(|&k| matches!(representative(n, l, k), Some((r, _)) if r == k)).collect()
}

pub fn unknown_count(n: usize) -> usize {
    if n % 2 == 0 {
        n * n / 2 + 1
    } else {
        (n - 1) * (n - 1) / 2 + 1
    }
}

/// Sparse square system `M x = rhs` over [`LinearSystem::unknowns`].
#[derive(Debug, Clone)]
pub struct LinearSystem<T = f64> {
    pub chain: QuadraticChain,
    pub unknowns: Vec<Unknown>,
    /// Row-wise `(column, value)` entries.
    pub rows: Vec<Vec<(usize, T)>>,
    pub rhs: Vec<T>,
    /// `(l, k)` of each row's equation; the boundary relation is `(1, 1)`.
    pub row_keys: Vec<(usize, usize)>,
}

impl<T: Scalar> LinearSystem<T> {
    pub fn unknown_count(&self) -> usize {
        self.unknowns.len()
    }

    /// The matrix rounded to double precision.
    pub fn matrix(&self) -> Result<SparseColMat<usize, f64>> {
        let n = self.unknowns.len();
        let t: Vec<_> = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| Triplet::new(r, *c, v.to_f64())))
            .collect();
        SparseColMat::try_new_from_triplets(n, n, &t).map_err(|e| Error::Singular(format!("assembly: {e:?}")))
    }

    /// `rhs - M x`.
    pub fn residual(&self, x: &[T]) -> Vec<T> {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| {
                let mut r = b.clone();
                for (c, v) in row {
                    r = r - v.clone() * x[*c].clone();
                }
                r
            })
            .collect()
    }
}

/// Affine form `Σ c_u x_u + constant`.
#[derive(Debug, Clone)]
struct Affine<T> {
    terms: Vec<(usize, T)>,
    constant: T,
}

impl<T: Scalar> Affine<T> {
    fn constant(c: T) -> Self {
        Self { terms: Vec::new(), constant: c }
    }

    fn unknown(index: usize, c: T, zero: T) -> Self {
        Self { terms: vec![(index, c)], constant: zero }
    }

    fn add_scaled(&mut self, other: &Affine<T>, s: &T) {
        self.terms.extend(other.terms.iter().map(|(u, c)| (*u, c.clone() * s.clone())));
        self.constant = self.constant.clone() + other.constant.clone() * s.clone();
    }
}

struct Layout {
    n: usize,
    a: Vec<Option<usize>>,
    h: Vec<Vec<Option<usize>>>,
    b: Vec<Vec<Option<usize>>>,
    unknowns: Vec<Unknown>,
}

impl Layout {
    fn new(n: usize) -> Self {
        let mut unknowns = Vec::new();
        let mut a = vec![None; n + 1];
        for (k, slot) in a.iter_mut().enumerate().take(n / 2 + 1).skip(1) {
            *slot = Some(unknowns.len());
            unknowns.push(Unknown::A(k));
        }
        let mut h = vec![Vec::new(); n + 1];
        let mut b = vec![Vec::new(); n + 1];
        for l in 2..=n {
            h[l] = vec![None; n + 2 - l];
            for k in representatives(n, l) {
                h[l][k] = Some(unknowns.len());
                unknowns.push(Unknown::H(l, k));
            }
        }
        for l in 2..=n {
            b[l] = vec![None; n + 2 - l];
            if l == 2 {
                let idx = unknowns.len();
                unknowns.push(Unknown::B(2, 1));
                for slot in b[2].iter_mut().skip(1) {
                    *slot = Some(idx);
                }
                continue;
            }
            for k in representatives(n, l) {
                b[l][k] = Some(unknowns.len());
                unknowns.push(Unknown::B(l, k));
            }
        }
        Self { n, a, h, b, unknowns }
    }

    /// Real and imaginary parts of `⟨c†_i c_j⟩` as affine forms.
    fn correlation<T: Scalar>(&self, i: usize, j: usize, lift: &impl Fn(f64) -> T) -> Option<(Affine<T>, Affine<T>)> {
        let n = self.n;
        if i == 0 || j == 0 || i > n || j > n {
            return None;
        }
        let zero = || Affine::constant(lift(0.0));
        if i == j {
            let mut re = Affine::constant(lift(0.5));
            if let Some((r, s)) = representative(n, 1, i) {
                re.terms.push((self.a[r].expect("population unknown"), lift(0.5 * s)));
            }
            return Some((re, zero()));
        }
        let (lo, hi, conj) = if i < j { (i, j, false) } else { (j, i, true) };
        let l = hi - lo + 1;
        let (re, im) = match representative(n, l, lo) {
            None => (zero(), zero()),
            Some((r, s)) => {
                let b = if l == 2 { self.b[2][1] } else { self.b[l][r] };
                let sb = if conj { -s } else { s };
                (
                    Affine::unknown(self.h[l][r].expect("h unknown"), lift(0.5 * s), lift(0.0)),
                    Affine::unknown(b.expect("b unknown"), lift(0.5 * sb), lift(0.0)),
                )
            }
        };
        Some((re, im))
    }
}

/// Assembles the reduced stationarity conditions in double precision.
pub fn assemble_system(chain: &QuadraticChain) -> Result<LinearSystem> {
    assemble_system_with(chain, |x| x)
}

/// Assembles the reduced stationarity conditions with coefficients in `T`.
///
/// `lift` converts the double-precision parameters; every coefficient is then
/// formed in `T`. Row set: the real part of the site-1 population equation (the
/// boundary relation between `a_1` and `b^(2)`), then the real and imaginary
/// parts of the `⟨c†_k c_{k+l-1}⟩` equation for every representative `(l, k)`.
/// Equations of self-mapped odd-range pairs vanish identically and are omitted.
pub fn assemble_system_with<T: Scalar>(chain: &QuadraticChain, lift: impl Fn(f64) -> T) -> Result<LinearSystem<T>> {
    chain.validate()?;
    let n = chain.n_sites;
    let layout = Layout::new(n);
    let nu = layout.unknowns.len();
    debug_assert_eq!(nu, unknown_count(n));

    let zero = lift(0.0);
    let two = lift(2.0);
    let eight = lift(8.0);
    let gamma = lift(chain.coupling);
    let f = lift(chain.driving);
    let half_tilt = lift(chain.tilt) / two.clone();
    let t = lift(chain.hopping) / two.clone();
    let quarter_gamma = gamma.clone() / lift(4.0);
    let damping = |s: usize| if s == 1 || s == n { quarter_gamma.clone() } else { zero.clone() };
    let gain1 = gamma.clone() * (lift(1.0) + f.clone()) / eight.clone();

    let mut rows = Vec::with_capacity(nu);
    let mut rhs = Vec::with_capacity(nu);
    let mut row_keys = Vec::with_capacity(nu);
    // d⟨c†_i c_j⟩/dt = i(J/2)(G_{i-1,j} + G_{i+1,j} - G_{i,j-1} - G_{i,j+1})
    //   + [i(E/2)(i - j) - (λ_i + λ_j)/2] G_ij + P_i δ_ij
    let mut push = |i: usize, j: usize, source: T, real: bool| {
        let diag_re = -(damping(i) + damping(j)) / two.clone();
        let diag_im = half_tilt.clone() * lift(i as f64 - j as f64);
        let terms = [
            ((zero.clone(), t.clone()), (i.wrapping_sub(1), j)),
            ((zero.clone(), t.clone()), (i + 1, j)),
            ((zero.clone(), -t.clone()), (i, j.wrapping_sub(1))),
            ((zero.clone(), -t.clone()), (i, j + 1)),
            ((diag_re, diag_im), (i, j)),
        ];
        let mut acc = Affine::constant(zero.clone());
        for ((cr, ci), (r, c)) in terms {
            if let Some((gre, gim)) = layout.correlation(r, c, &lift) {
                if real {
                    acc.add_scaled(&gre, &cr);
                    acc.add_scaled(&gim, &-ci);
                } else {
                    acc.add_scaled(&gim, &cr);
                    acc.add_scaled(&gre, &ci);
                }
            }
        }
        if real {
            acc.constant = acc.constant + source;
        }
        acc.terms.sort_by_key(|(u, _)| *u);
        let mut row: Vec<(usize, T)> = Vec::with_capacity(acc.terms.len());
        for (u, c) in acc.terms {
            match row.last_mut() {
                Some(last) if last.0 == u => last.1 = last.1.clone() + c,
                _ => row.push((u, c)),
            }
        }
        row.retain(|(_, c)| !c.is_zero());
        rows.push(row);
        rhs.push(-acc.constant);
    };

    push(1, 1, gain1, true);
    row_keys.push((1, 1));
    for l in 2..=n {
        for k in representatives(n, l) {
            let j = k + l - 1;
            push(k, j, zero.clone(), true);
            push(k, j, zero.clone(), false);
            row_keys.extend([(l, k), (l, k)]);
        }
    }
    if rows.len() != nu {
        return Err(Error::Singular(format!("{} equations for {nu} unknowns", rows.len())));
    }
    Ok(LinearSystem { chain: *chain, unknowns: layout.unknowns, rows, rhs, row_keys })
}
