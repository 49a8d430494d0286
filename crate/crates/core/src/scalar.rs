//! Scalar backends.
//!
//! Three fields are supported: complex floating point ([`C64`]), exact
//! rationals ([`BigRational`]) and prime fields ([`Gf`]). Exact backends never
//! consult a tolerance; the float backend makes every rank decision relative
//! to [`DEFAULT_TOL`] unless the caller overrides it.

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde_json::Value;

use crate::error::{AdhmError, Result};

pub type C64 = Complex64;

/// Default relative tolerance for rank decisions in the float backend.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Which field a scalar type lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Complex,
    Rational,
    Prime(u64),
}

impl Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Complex => f.write_str("complex"),
            Backend::Rational => f.write_str("rational"),
            Backend::Prime(p) => write!(f, "gf({p})"),
        }
    }
}

impl FromStr for Backend {
    type Err = AdhmError;

    /// Accepts `complex`, `rational`, `gf(p)` and the CLI spelling `gf:p`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "complex" => return Ok(Backend::Complex),
            "rational" => return Ok(Backend::Rational),
            _ => {}
        }
        let inner = s
            .strip_prefix("gf(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| s.strip_prefix("gf:"))
            .ok_or_else(|| AdhmError::Parse(format!("unknown backend `{s}`")))?;
        let p: u64 = inner
            .parse()
            .map_err(|_| AdhmError::Parse(format!("bad prime in backend `{s}`")))?;
        if !is_prime(p) {
            return Err(AdhmError::Parse(format!("{p} is not prime")));
        }
        Ok(Backend::Prime(p))
    }
}

/// A field element usable by every algorithm in the crate.
pub trait Scalar:
    Num + Neg<Output = Self> + Clone + Debug + PartialEq + Send + Sync + 'static
{
    fn backend() -> Backend;

    fn is_exact() -> bool {
        Self::backend() != Backend::Complex
    }

    /// Absolute value as a float, used for pivoting and scale estimates.
    /// Prime-field elements report 0 or 1.
    fn modulus(&self) -> f64;

    fn from_i64(v: i64) -> Self;

    /// Embedding into the complex numbers; `None` for prime fields.
    fn to_c64(&self) -> Option<C64>;

    /// Only the float backend can absorb arbitrary complex values.
    fn from_c64(z: C64) -> Option<Self>;

    fn conj(&self) -> Self {
        self.clone()
    }

    fn to_json(&self) -> Value;

    fn from_json(v: &Value) -> Result<Self>;

    /// A small random element, for campaigns and property tests.
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Tolerance-aware zero test: exact backends compare literally, the float
    /// backend compares the modulus against `tol * scale`.
    fn is_negligible(&self, tol: f64, scale: f64) -> bool {
        if Self::is_exact() {
            self.is_zero()
        } else {
            self.modulus() <= tol * scale
        }
    }
}

impl Scalar for C64 {
    fn backend() -> Backend {
        Backend::Complex
    }

    fn modulus(&self) -> f64 {
        self.norm()
    }

    fn from_i64(v: i64) -> Self {
        C64::new(v as f64, 0.0)
    }

    fn to_c64(&self) -> Option<C64> {
        Some(*self)
    }

    fn from_c64(z: C64) -> Option<Self> {
        Some(z)
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn to_json(&self) -> Value {
        serde_json::json!([self.re, self.im])
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Array(parts) if parts.len() == 2 => {
                let re = parts[0].as_f64();
                let im = parts[1].as_f64();
                match (re, im) {
                    (Some(re), Some(im)) => Ok(C64::new(re, im)),
                    _ => Err(AdhmError::Parse(format!("bad complex entry {v}"))),
                }
            }
            Value::Number(n) => n
                .as_f64()
                .map(|re| C64::new(re, 0.0))
                .ok_or_else(|| AdhmError::Parse(format!("bad complex entry {v}"))),
            _ => Err(AdhmError::Parse(format!("bad complex entry {v}"))),
        }
    }

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }
}

impl Scalar for BigRational {
    fn backend() -> Backend {
        Backend::Rational
    }

    fn modulus(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn to_c64(&self) -> Option<C64> {
        self.to_f64().map(|re| C64::new(re, 0.0))
    }

    fn from_c64(_: C64) -> Option<Self> {
        None
    }

    fn to_json(&self) -> Value {
        Value::String(format!("{}/{}", self.numer(), self.denom()))
    }

    fn from_json(v: &Value) -> Result<Self> {
        let bad = || AdhmError::Parse(format!("bad rational entry {v}"));
        match v {
            Value::String(s) => {
                let (num, den) = match s.split_once('/') {
                    Some((a, b)) => (a.trim(), b.trim()),
                    None => (s.trim(), "1"),
                };
                let num: BigInt = num.parse().map_err(|_| bad())?;
                let den: BigInt = den.parse().map_err(|_| bad())?;
                if den.is_zero() {
                    return Err(bad());
                }
                Ok(BigRational::new(num, den))
            }
            Value::Number(n) => n.as_i64().map(Self::from_i64).ok_or_else(bad),
            _ => Err(bad()),
        }
    }

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_i64(rng.gen_range(-3..=3))
    }
}

/// Residue class modulo the prime `P`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Gf<const P: u64>(u64);

impl<const P: u64> Gf<P> {
    const PRIME_CHECK: () = assert!(is_prime(P), "Gf modulus must be prime");

    pub fn new(v: i64) -> Self {
        #[allow(clippy::let_unit_value)]
        let _ = Self::PRIME_CHECK;
        Gf(v.rem_euclid(P as i64) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let mut base = self;
        let mut acc = Gf(1 % P);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }

    pub fn inverse(self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(P - 2))
        }
    }

    /// All elements, zero first.
    pub fn elements() -> impl Iterator<Item = Self> {
        (0..P).map(Gf)
    }
}

impl<const P: u64> Debug for Gf<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {P})", self.0)
    }
}

impl<const P: u64> Display for Gf<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Add for Gf<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Gf((self.0 + rhs.0) % P)
    }
}

impl<const P: u64> Sub for Gf<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Gf((self.0 + P - rhs.0) % P)
    }
}

impl<const P: u64> Mul for Gf<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Gf(((self.0 as u128 * rhs.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Div for Gf<P> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.inverse().expect("division by zero in prime field")
    }
}

impl<const P: u64> Rem for Gf<P> {
    type Output = Self;
    /// Fields have no nontrivial remainder.
    fn rem(self, rhs: Self) -> Self {
        assert!(rhs.0 != 0, "remainder by zero in prime field");
        Gf(0)
    }
}

impl<const P: u64> Neg for Gf<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Gf((P - self.0) % P)
    }
}

impl<const P: u64> Zero for Gf<P> {
    fn zero() -> Self {
        Gf(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Gf<P> {
    fn one() -> Self {
        Gf(1 % P)
    }
}

impl<const P: u64> Num for Gf<P> {
    type FromStrRadixErr = std::num::ParseIntError;
    fn from_str_radix(s: &str, radix: u32) -> std::result::Result<Self, Self::FromStrRadixErr> {
        i64::from_str_radix(s, radix).map(Gf::new)
    }
}

impl<const P: u64> Scalar for Gf<P> {
    fn backend() -> Backend {
        Backend::Prime(P)
    }

    fn modulus(&self) -> f64 {
        if self.0 == 0 {
            0.0
        } else {
            1.0
        }
    }

    fn from_i64(v: i64) -> Self {
        Gf::new(v)
    }

    fn to_c64(&self) -> Option<C64> {
        None
    }

    fn from_c64(_: C64) -> Option<Self> {
        None
    }

    fn to_json(&self) -> Value {
        Value::from(self.0)
    }

    fn from_json(v: &Value) -> Result<Self> {
        v.as_i64()
            .map(Gf::new)
            .ok_or_else(|| AdhmError::Parse(format!("bad residue entry {v}")))
    }

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Gf(rng.gen_range(0..P))
    }
}

pub const fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `(cos(πk/(c+1)), sin(πk/(c+1)))` in the backend `S`.
///
/// Quarter turns are produced exactly in every backend; all other angles are
/// irrational and only the float backend can represent them (`None`
/// otherwise).
pub fn rotation<S: Scalar>(k: i64, c: usize) -> Option<(S, S)> {
    let den = c as i64 + 1;
    if (2 * k).rem_euclid(den) == 0 {
        let quarter = (2 * k / den).rem_euclid(4);
        let (cos, sin) = match quarter {
            0 => (1, 0),
            1 => (0, 1),
            2 => (-1, 0),
            _ => (0, -1),
        };
        return Some((S::from_i64(cos), S::from_i64(sin)));
    }
    let angle = std::f64::consts::PI * k as f64 / den as f64;
    let cos = S::from_c64(C64::new(angle.cos(), 0.0))?;
    let sin = S::from_c64(C64::new(angle.sin(), 0.0))?;
    Some((cos, sin))
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// `base^exp` by repeated multiplication.
pub fn spow<S: Scalar>(base: &S, exp: usize) -> S {
    let mut acc = S::one();
    for _ in 0..exp {
        acc = acc * base.clone();
    }
    acc
}
