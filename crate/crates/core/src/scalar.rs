//! Exact arithmetic in the real field Q(√2, √3).
//!
//! A [`Scalar`] is stored as four reduced rationals over the basis
//! `(1, √2, √3, √6)`. The basis is linearly independent over Q, so equality
//! and hashing are structural and a zero test is a component check.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept reduced with a positive denominator.
pub type Rational = BigRational;

/// Basis labels. Index bit 0 carries √2, bit 1 carries √3.
const BASIS: [&str; 4] = ["", "√2", "√3", "√6"];

/// An element `a + b√2 + c√3 + d√6` of Q(√2, √3).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    parts: [Rational; 4],
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

impl Scalar {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Scalar {
            parts: [a, b, c, d],
        }
    }

    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_rational(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// The rational `num/den`. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::from_rational(rat(num, den))
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut s = Scalar::zero();
        s.parts[0] = q;
        s
    }

    pub fn sqrt2() -> Self {
        Scalar::basis(1)
    }

    pub fn sqrt3() -> Self {
        Scalar::basis(2)
    }

    pub fn sqrt6() -> Self {
        Scalar::basis(3)
    }

    fn basis(i: usize) -> Self {
        let mut s = Scalar::zero();
        s.parts[i] = Rational::one();
        s
    }

    /// Components in basis order `(1, √2, √3, √6)`.
    pub fn parts(&self) -> &[Rational; 4] {
        &self.parts
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.parts[0].is_one() && self.parts[1..].iter().all(Zero::is_zero)
    }

    /// True when the value lies in Q.
    pub fn is_rational(&self) -> bool {
        self.parts[1..].iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then(|| &self.parts[0])
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            parts: [
                &self.parts[0] * q,
                &self.parts[1] * q,
                &self.parts[2] * q,
                &self.parts[3] * q,
            ],
        }
    }

    /// Multiplicative inverse.
    ///
    /// Writes `x = u + v√3` with `u, v` in Q(√2) and uses
    /// `x⁻¹ = (u − v√3) / (u² − 3v²)`, then inverts the Q(√2) norm the same way.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let [a, b, c, d] = &self.parts;
        // conj3 = u - v√3
        let conj3 = Scalar::new(a.clone(), b.clone(), -c, -d);
        // n = x * conj3 = u² - 3v², lies in Q(√2)
        let n = self * &conj3;
        debug_assert!(n.parts[2].is_zero() && n.parts[3].is_zero());
        let (s, t) = (&n.parts[0], &n.parts[1]);
        let norm2 = s * s - t * t * rat(2, 1);
        // norm2 is nonzero because √2 is irrational and n ≠ 0
        let n_inv = Scalar::new(
            s / &norm2,
            -(t / &norm2),
            Rational::zero(),
            Rational::zero(),
        );
        Ok(&conj3 * &n_inv)
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Scalar::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exact square root of a non-negative rational times a basis element,
    /// returned when it lies in the field: `√q = √(qk)/k · √k` for `k ∈ {1,2,3,6}`.
    pub fn sqrt_rational(&self) -> Option<Self> {
        let q = self.as_rational()?;
        if q.is_negative() {
            return None;
        }
        if q.is_zero() {
            return Some(Scalar::zero());
        }
        for (idx, k) in [(0usize, 1i64), (1, 2), (2, 3), (3, 6)] {
            let qk = q * rat(k, 1);
            if let Some(root) = rational_sqrt(&qk) {
                let mut s = Scalar::zero();
                s.parts[idx] = root / rat(k, 1);
                return Some(s);
            }
        }
        None
    }

    /// Sign of the real number, computed exactly.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        // to_f64 is correctly signed: the adaptive evaluation never rounds a
        // nonzero value to the wrong side of zero.
        match self.to_f64() {
            Ok(v) if v > 0.0 => 1,
            Ok(v) if v < 0.0 => -1,
            _ => {
                let v = self.approx_big(1024);
                if v.is_positive() {
                    1
                } else {
                    -1
                }
            }
        }
    }

    /// Nearest double to the exact value, within a few units in the last place.
    ///
    /// The irrational parts are evaluated with integer square roots at a
    /// working precision that doubles until cancellation is ruled out.
    pub fn to_f64(&self) -> Result<f64> {
        if self.is_rational() {
            return finite(self.parts[0].to_f64());
        }
        let mut bits = 128u64;
        loop {
            let approx = self.approx_big(bits);
            // the unreduced numerator carries at most 3 units of truncation
            // error; 2^74 of magnitude leaves far less than one ulp.
            if approx.numer().abs().bits() >= 74 || bits > 1 << 16 {
                return finite(approx.to_f64());
            }
            bits *= 2;
        }
    }

    /// Rational approximation with absolute error below `4 / (den * 2^bits)`.
    fn approx_big(&self, bits: u64) -> Rational {
        let den = self
            .parts
            .iter()
            .fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
        let shift = BigInt::one() << bits;
        let mut total = BigInt::zero();
        for (idx, radicand) in [(0usize, 1u32), (1, 2), (2, 3), (3, 6)] {
            let p = &self.parts[idx];
            if p.is_zero() {
                continue;
            }
            let coeff = p.numer() * (&den / p.denom());
            if idx == 0 {
                total += coeff * &shift;
            } else {
                // floor(|coeff| * √radicand * 2^bits)
                let mag = coeff.abs();
                let sq = &mag * &mag * BigInt::from(radicand) * &shift * &shift;
                let root = sq.sqrt();
                match coeff.sign() {
                    Sign::Minus => total -= root,
                    _ => total += root,
                }
            }
        }
        Rational::new_raw(total, den * shift)
    }
}

fn finite(v: Option<f64>) -> Result<f64> {
    match v {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(Error::Overflow),
    }
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Structure constant of the basis product `e_i * e_j = factor * e_(i xor j)`.
fn basis_factor(i: usize, j: usize) -> i64 {
    let shared = i & j;
    let mut f = 1;
    if shared & 1 != 0 {
        f *= 2;
    }
    if shared & 2 != 0 {
        f *= 3;
    }
    f
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn mul(self, rhs: &'a Scalar) -> Scalar {
        if self.is_rational() {
            return rhs.scale(&self.parts[0]);
        }
        if rhs.is_rational() {
            return self.scale(&rhs.parts[0]);
        }
        let mut out = Scalar::zero();
        for i in 0..4 {
            if self.parts[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                if rhs.parts[j].is_zero() {
                    continue;
                }
                let mut term = &self.parts[i] * &rhs.parts[j];
                let f = basis_factor(i, j);
                if f != 1 {
                    term *= BigInt::from(f);
                }
                out.parts[i ^ j] += term;
            }
        }
        out
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn add(self, rhs: &'a Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn sub(self, rhs: &'a Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> AddAssign<&'a Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &'a Scalar) {
        for (l, r) in self.parts.iter_mut().zip(rhs.parts.iter()) {
            if !r.is_zero() {
                *l += r;
            }
        }
    }
}

impl<'a> SubAssign<&'a Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &'a Scalar) {
        for (l, r) in self.parts.iter_mut().zip(rhs.parts.iter()) {
            if !r.is_zero() {
                *l -= r;
            }
        }
    }
}

impl<'a> MulAssign<&'a Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &'a Scalar) {
        *self = &*self * rhs;
    }
}

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        Scalar {
            parts: self.parts.map(|p| -p),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        -self.clone()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;

    /// Panics on division by zero; use [`Scalar::checked_div`] otherwise.
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero Scalar")
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::from_rational(q)
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, q: &Rational) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    /// Renders e.g. `3/2√3` or `1 - √2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (idx, p) in self.parts.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let mag = p.abs();
            if first {
                if p.is_negative() {
                    write!(f, "-")?;
                }
            } else if p.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            if idx == 0 || !mag.is_one() {
                write_rational(f, &mag)?;
            }
            write!(f, "{}", BASIS[idx])?;
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

fn json_int(n: &BigInt) -> serde_json::Number {
    n.to_string()
        .parse()
        .expect("integer literal is a valid JSON number")
}

impl Serialize for Scalar {
    /// `[a_num, a_den, b_num, b_den, c_num, c_den, d_num, d_den]`.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(8))?;
        for p in &self.parts {
            seq.serialize_element(&json_int(p.numer()))?;
            seq.serialize_element(&json_int(p.denom()))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<serde_json::Number> = Vec::deserialize(deserializer)?;
        Scalar::from_wire(&raw).map_err(de::Error::custom)
    }
}

impl Scalar {
    fn from_wire(raw: &[serde_json::Number]) -> Result<Self> {
        if raw.len() != 8 {
            return Err(Error::Parse(format!(
                "scalar needs 8 integers, got {}",
                raw.len()
            )));
        }
        let ints = raw
            .iter()
            .map(|n| {
                n.to_string()
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("not an integer: {n}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut parts: [Rational; 4] = Default::default();
        for (i, slot) in parts.iter_mut().enumerate() {
            let (num, den) = (&ints[2 * i], &ints[2 * i + 1]);
            if !den.is_positive() {
                return Err(Error::Parse(format!("denominator {den} must be positive")));
            }
            if !num.gcd(den).is_one() {
                return Err(Error::Parse(format!("{num}/{den} is not reduced")));
            }
            *slot = Rational::new_raw(num.clone(), den.clone());
        }
        Ok(Scalar { parts })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(a: i64, b: i64, c: i64, d: i64) -> Scalar {
        Scalar::new(rat(a, 1), rat(b, 1), rat(c, 1), rat(d, 1))
    }

    #[test]
    fn defining_relations() {
        assert_eq!(Scalar::sqrt2() * Scalar::sqrt2(), Scalar::from_int(2));
        assert_eq!(Scalar::sqrt2() * Scalar::sqrt3(), Scalar::sqrt6());
        assert_eq!(Scalar::sqrt3() * Scalar::sqrt3(), Scalar::from_int(3));
        assert_eq!(Scalar::sqrt6() * Scalar::sqrt6(), Scalar::from_int(6));
        assert_eq!(Scalar::sqrt2() * Scalar::sqrt6(), s(0, 0, 2, 0));
        assert_eq!(Scalar::sqrt3() * Scalar::sqrt6(), s(0, 3, 0, 0));
        assert_eq!(s(1, 1, 0, 0) * s(-1, 1, 0, 0), Scalar::one());
    }

    #[test]
    fn inverses() {
        assert_eq!(Scalar::one().inv().unwrap(), Scalar::one());
        assert_eq!(s(1, 1, 0, 0).inv().unwrap(), s(-1, 1, 0, 0));
        assert_eq!(Scalar::from_int(2).inv().unwrap(), Scalar::ratio(1, 2));
        assert_eq!(Scalar::zero().inv(), Err(Error::DivisionByZero));
        let x = s(3, -2, 5, 7);
        assert!((&x * &x.inv().unwrap()).is_one());
    }

    #[test]
    fn float_values() {
        let sqrt3 = Scalar::sqrt3().to_f64().unwrap();
        assert_eq!(sqrt3, 3f64.sqrt());
        assert_eq!(Scalar::zero().to_f64().unwrap(), 0.0);
        let v = (Scalar::ratio(3, 2) * Scalar::sqrt3()).to_f64().unwrap();
        assert!((v - 2.598_076_211_353_316).abs() < 1e-15);
    }

    #[test]
    fn float_under_cancellation() {
        // 99/70 is a convergent of √2, so √2 - 99/70 ≈ -7.2e-5
        let x = Scalar::new(rat(-99, 70), rat(1, 1), rat(0, 1), rat(0, 1));
        let got = x.to_f64().unwrap();
        let expected = -7.215_191_261_923_691e-5;
        assert!(((got - expected) / expected).abs() < 1e-14, "{got}");
    }

    #[test]
    fn overflow_is_reported() {
        let huge = Scalar::from_rational(Rational::from_integer(BigInt::from(10).pow(400)));
        assert_eq!(huge.to_f64(), Err(Error::Overflow));
    }

    #[test]
    fn exact_rational_square_roots() {
        assert_eq!(
            Scalar::ratio(1, 2).sqrt_rational(),
            Some(Scalar::sqrt2().scale(&rat(1, 2)))
        );
        assert_eq!(
            Scalar::ratio(3, 4).sqrt_rational(),
            Some(Scalar::sqrt3().scale(&rat(1, 2)))
        );
        assert_eq!(
            Scalar::from_int(4).sqrt_rational(),
            Some(Scalar::from_int(2))
        );
        assert_eq!(Scalar::from_int(5).sqrt_rational(), None);
        assert_eq!(Scalar::from_int(-1).sqrt_rational(), None);
    }

    #[test]
    fn signum_matches_value() {
        assert_eq!(s(-99, 70, 0, 0).signum(), -1);
        assert_eq!(s(-140, 99, 0, 0).signum(), 1);
        assert_eq!(
            Scalar::new(rat(-99, 70), rat(1, 1), rat(0, 1), rat(0, 1)).signum(),
            -1
        );
        assert_eq!(Scalar::zero().signum(), 0);
    }

    #[test]
    fn display() {
        assert_eq!((Scalar::ratio(3, 2) * Scalar::sqrt3()).to_string(), "3/2√3");
        assert_eq!(s(1, -1, 0, 0).to_string(), "1 - √2");
        assert_eq!(s(0, 0, 0, -2).to_string(), "-2√6");
    }

    #[test]
    fn json_is_canonical() {
        let x = Scalar::new(rat(-3, 4), rat(0, 1), rat(5, 1), rat(1, 6));
        let text = serde_json::to_string(&x).unwrap();
        assert_eq!(text, "[-3,4,0,1,5,1,1,6]");
        let back: Scalar = serde_json::from_str(&text).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<Scalar>("[2,4,0,1,0,1,0,1]").is_err());
        assert!(serde_json::from_str::<Scalar>("[1,-2,0,1,0,1,0,1]").is_err());
        assert!(serde_json::from_str::<Scalar>("[1,0,0,1,0,1,0,1]").is_err());
        assert!(serde_json::from_str::<Scalar>("[1,1,0,1]").is_err());
    }

    #[test]
    fn big_integers_survive_json() {
        let big = BigInt::from(7).pow(60);
        let x = Scalar::from_rational(Rational::new(big, BigInt::from(2)));
        let text = serde_json::to_string(&x).unwrap();
        assert_eq!(serde_json::from_str::<Scalar>(&text).unwrap(), x);
    }
}
