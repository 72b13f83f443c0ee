//! Scalar abstraction over exact rationals and binary floats.
//!
//! Every model, matrix and polyhedron in this crate is generic over a
//! [`Scalar`]. Two implementations exist: [`Rational`] (exact mode) and
//! `f64` (float mode). A model never mixes the two.

use alloc::vec::Vec;
use core::fmt::{Debug, Display};
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Arithmetic mode carried by a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Float,
}

impl Display for Mode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const MODE: Mode;

    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact for rationals (every finite double is a dyadic rational).
    fn from_f64(v: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    fn to_rational(&self) -> Option<Rational>;
    fn from_rational(v: &Rational) -> Self;
    fn abs(&self) -> Self;
    fn is_finite(&self) -> bool;

    /// Slack used for structural tests (row sum equal to one, entry
    /// positive, generator deduplication). Zero in exact mode.
    fn structural_eps() -> Self;
    /// Default active-set / convergence tolerance.
    fn default_tol() -> Self;

    /// `log Σ_j w_j e^{x_j}`; `None` when the mode cannot represent it.
    fn log_sum_exp(weights: &[Self], x: &[Self]) -> Option<Self>;
    /// Gradient of [`Scalar::log_sum_exp`] with respect to `x`.
    fn log_sum_exp_gradient(weights: &[Self], x: &[Self]) -> Option<Vec<Self>>;

    fn is_positive(&self) -> bool {
        *self > Self::structural_eps()
    }

    fn is_negative(&self) -> bool {
        *self < -Self::structural_eps()
    }

    /// `a` and `b` agree up to [`Scalar::structural_eps`].
    fn near(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).abs() <= Self::structural_eps()
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Option<Rational> {
        BigRational::from_float(*self)
    }

    fn from_rational(v: &Rational) -> Self {
        rational_to_f64(v)
    }

    fn abs(&self) -> Self {
        libm::fabs(*self)
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn structural_eps() -> Self {
        1e-12
    }

    fn default_tol() -> Self {
        1e-9
    }

    fn log_sum_exp(weights: &[Self], x: &[Self]) -> Option<Self> {
        let shift = support_max(weights, x)?;
        let sum: f64 = weights
            .iter()
            .zip(x)
            .filter(|(w, _)| **w > 0.0)
            .map(|(w, xj)| w * libm::exp(xj - shift))
            .sum();
        Some(shift + libm::log(sum))
    }

    fn log_sum_exp_gradient(weights: &[Self], x: &[Self]) -> Option<Vec<Self>> {
        let shift = support_max(weights, x)?;
        let terms: Vec<f64> = weights
            .iter()
            .zip(x)
            .map(|(w, xj)| if *w > 0.0 { w * libm::exp(xj - shift) } else { 0.0 })
            .collect();
        let total: f64 = terms.iter().sum();
        Some(terms.into_iter().map(|t| t / total).collect())
    }
}

fn support_max(weights: &[f64], x: &[f64]) -> Option<f64> {
    weights
        .iter()
        .zip(x)
        .filter(|(w, _)| **w > 0.0)
        .map(|(_, xj)| *xj)
        .reduce(f64::max)
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn from_rational(v: &Rational) -> Self {
        v.clone()
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn structural_eps() -> Self {
        Zero::zero()
    }

    fn default_tol() -> Self {
        Zero::zero()
    }

    fn log_sum_exp(_: &[Self], _: &[Self]) -> Option<Self> {
        None
    }

    fn log_sum_exp_gradient(_: &[Self], _: &[Self]) -> Option<Vec<Self>> {
        None
    }
}

/// Nearest-ish double of a big rational, robust to huge numerators and
/// denominators.
pub fn rational_to_f64(v: &Rational) -> f64 {
    if let Some(x) = ToPrimitive::to_f64(v) {
        if x.is_finite() {
            return x;
        }
    }
    // Shift both sides down to 64 significant bits before dividing.
    let num = v.numer();
    let den = v.denom();
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let ns = (nb - 64).max(0);
    let ds = (db - 64).max(0);
    let n = (num >> ns as usize).to_f64().unwrap_or(0.0);
    let d = (den >> ds as usize).to_f64().unwrap_or(1.0);
    libm::ldexp(n / d, (ns - ds) as i32)
}

/// Parse `"a/b"`, `"a"` or a decimal literal such as `"-0.25"` into an
/// exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        let negative = int.starts_with('-');
        let digits = alloc::format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let mut n: BigInt = digits.parse().ok()?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Some(BigRational::new(n, d));
    }
    text.parse::<BigInt>().ok().map(BigRational::from_integer)
}

/// Render an exact rational as `"a/b"` or `"a"`.
pub fn format_rational(v: &Rational) -> alloc::string::String {
    if v.denom().is_one() {
        alloc::format!("{}", v.numer())
    } else {
        alloc::format!("{}/{}", v.numer(), v.denom())
    }
}
