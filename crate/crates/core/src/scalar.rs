//! Scalar abstractions.
//!
//! Model assembly, spectra and closed-form energies are written against [`Real`],
//! which covers `f32` and `f64`. The domain ansatz needs arithmetic far below double
//! precision, so it is written against the smaller [`Scalar`] contract that is also
//! satisfied by the decimal big float [`BigReal`] and the double-double
//! [`DoubleDouble`].

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};
use std::str::FromStr;

use dashu_float::DBig;
use num_traits::{Float, FromPrimitive, Num, One, Zero};
use twofloat::TwoFloat;

/// Decimal arbitrary-precision float used by the extended-precision solvers.
pub type BigReal = DBig;

/// Unevaluated sum of two doubles, about 32 significant decimal digits.
///
/// Wraps [`twofloat::TwoFloat`]; division adds one correction step because the
/// wrapped quotient is only accurate to about double precision.
#[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd)]
pub struct DoubleDouble(pub TwoFloat);

impl DoubleDouble {
    pub fn hi(&self) -> f64 {
        self.0.hi()
    }

    pub fn lo(&self) -> f64 {
        self.0.lo()
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self(TwoFloat::from(x))
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let q = self.0 / rhs.0;
        let r = self.0 - q * rhs.0;
        Self(q + r.hi() / rhs.0.hi())
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        let q = (self / rhs).0.trunc();
        Self(self.0 - q * rhs.0)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self(TwoFloat::from(0.0))
    }
    fn is_zero(&self) -> bool {
        self.0.hi() == 0.0 && self.0.lo() == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self(TwoFloat::from(1.0))
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = <TwoFloat as Num>::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        TwoFloat::from_str_radix(s, radix).map(Self)
    }
}

impl Display for DoubleDouble {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::LowerExp::fmt(&self.0, f)
    }
}

/// Default number of significant decimal digits for [`BigReal`] computations.
pub const DEFAULT_DIGITS: usize = 50;

/// Smallest precision accepted by the extended-precision code paths.
pub const MIN_DIGITS: usize = 32;

/// Hardware floating-point types usable for model assembly and dense spectra.
pub trait Real:
    Float + FromPrimitive + faer::traits::RealField + Debug + Display + Send + Sync + 'static
{
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Field arithmetic shared by `f64` and [`BigReal`].
pub trait Scalar: Num + Neg<Output = Self> + Clone + PartialOrd + Debug + Display + Send + Sync {
    /// Lifts a double to this type with `digits` significant decimal digits.
    ///
    /// Doubles are read through their shortest round-trip decimal form so that a
    /// parameter written as `0.1` becomes the decimal 0.1 rather than its binary
    /// neighbour.
    fn from_f64_digits(x: f64, digits: usize) -> Self;
    fn to_f64(&self) -> f64;
    fn powi(&self, n: u32) -> Self;
    fn abs(&self) -> Self;
    /// Full-precision decimal rendering.
    fn to_decimal_string(&self) -> String;
}

impl Scalar for f64 {
    fn from_f64_digits(x: f64, _digits: usize) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn powi(&self, n: u32) -> Self {
        f64::powi(*self, n as i32)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn to_decimal_string(&self) -> String {
        format!("{self:.16e}")
    }
}

impl Scalar for BigReal {
    fn from_f64_digits(x: f64, digits: usize) -> Self {
        assert!(x.is_finite(), "cannot lift non-finite value {x}");
        let exact = DBig::from_str(&format!("{x:e}")).expect("shortest repr parses");
        exact.with_precision(digits).value()
    }
    fn to_f64(&self) -> f64 {
        DBig::to_f64(self).value()
    }
    fn powi(&self, n: u32) -> Self {
        let mut acc = DBig::ONE.with_precision(self.precision()).value();
        for _ in 0..n {
            acc *= self;
        }
        acc
    }
    fn abs(&self) -> Self {
        if self < &DBig::ZERO {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn to_decimal_string(&self) -> String {
        self.to_string()
    }
}

impl Scalar for DoubleDouble {
    /// Exact lift of the binary double; `digits` is ignored.
    fn from_f64_digits(x: f64, _digits: usize) -> Self {
        DoubleDouble::from(x)
    }
    fn to_f64(&self) -> f64 {
        self.hi() + self.lo()
    }
    fn powi(&self, n: u32) -> Self {
        let mut acc = DoubleDouble::one();
        for _ in 0..n {
            acc = acc * *self;
        }
        acc
    }
    fn abs(&self) -> Self {
        if self.hi() < 0.0 {
            -*self
        } else {
            *self
        }
    }
    fn to_decimal_string(&self) -> String {
        format!("{self}")
    }
}

/// Decimal digits carried by a [`BigReal`], or `None` for unlimited precision.
pub fn big_precision(x: &BigReal) -> Option<usize> {
    match x.precision() {
        0 => None,
        p => Some(p),
    }
}
