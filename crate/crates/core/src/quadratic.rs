//! Exact arithmetic in real quadratic fields `Q(√d)`.
//!
//! A [`QuadraticNumber`] is `a + b√d` with rational `a`, `b` and a square-free
//! `d ≥ 2`. Signs, comparisons and floors are decided with rational
//! arithmetic only (compare `a²` against `b²d`), never through floating point.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `a + b√d`. Numbers with `b = 0` are plain rationals and combine with any field.
#[derive(Clone, Debug)]
pub struct QuadraticNumber {
    a: BigRational,
    b: BigRational,
    d: u64,
}

pub fn rational(n: i64, m: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(m))
}

pub fn integer(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Largest square `f²` dividing `n`, returned as `(f, n / f²)`.
pub fn square_free_split(n: u64) -> (u64, u64) {
    let mut f = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        while rest % (p * p) == 0 {
            rest /= p * p;
            f *= p;
        }
        p += 1;
    }
    (f, rest)
}

impl QuadraticNumber {
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Self {
        assert!(d >= 2, "quadratic field needs d >= 2");
        debug_assert_eq!(square_free_split(d).0, 1, "d must be square-free");
        QuadraticNumber { a, b, d }
    }

    pub fn from_rational(a: BigRational) -> Self {
        QuadraticNumber { a, b: BigRational::zero(), d: 0 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(integer(n))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// `√n` for a positive integer `n`, written over its square-free part.
    pub fn sqrt_of(n: u64) -> Self {
        let (f, d) = square_free_split(n);
        if d == 1 {
            return Self::from_int(f as i64);
        }
        Self::new(BigRational::zero(), integer(f), d)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    /// Discriminant carrier; 0 for plain rationals.
    pub fn field(&self) -> u64 {
        if self.b.is_zero() {
            0
        } else {
            self.d
        }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn common_field(&self, other: &Self) -> u64 {
        match (self.field(), other.field()) {
            (0, d) | (d, 0) => d,
            (d, e) => {
                assert_eq!(d, e, "mixing Q(√{d}) and Q(√{e})");
                d
            }
        }
    }

    fn build(a: BigRational, b: BigRational, d: u64) -> Self {
        if b.is_zero() {
            QuadraticNumber { a, b, d: 0 }
        } else {
            QuadraticNumber { a, b, d }
        }
    }

    /// Galois conjugate `a − b√d`.
    pub fn conjugate(&self) -> Self {
        Self::build(self.a.clone(), -self.b.clone(), self.d)
    }

    /// Field norm `a² − b²d`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * integer(self.d)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let n = self.norm();
        Ok(Self::build(&self.a / &n, -(&self.b / &n), self.d))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::build(&self.a * r, &self.b * r, self.d)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Exact sign.
    pub fn signum(&self) -> Ordering {
        let zero = BigRational::zero();
        let sa = self.a.cmp(&zero);
        let sb = self.b.cmp(&zero);
        match (sa, sb) {
            (s, Ordering::Equal) | (Ordering::Equal, s) => s,
            (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
            (Ordering::Less, Ordering::Less) => Ordering::Less,
            (Ordering::Greater, Ordering::Less) => {
                // a > 0 > b√d
                (&self.a * &self.a).cmp(&(&self.b * &self.b * integer(self.d)))
            }
            (Ordering::Less, Ordering::Greater) => {
                (&self.b * &self.b * integer(self.d)).cmp(&(&self.a * &self.a))
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact `⌊a + b√d⌋`.
    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.floor().to_integer();
        }
        // |b|√d = √(p²d)/q with s ≤ √(p²d) < s + 1
        let p = self.b.numer().abs();
        let q = self.b.denom().clone();
        let s = (&p * &p * BigInt::from(self.d)).sqrt();
        let low = BigRational::new(s.clone(), q.clone());
        let high = BigRational::new(s + 1, q);
        let (lo, hi) = if self.b.is_positive() {
            (&self.a + low, &self.a + high)
        } else {
            (&self.a - high, &self.a - low)
        };
        let f_lo = lo.floor().to_integer();
        let mut f = hi.floor().to_integer();
        while f > f_lo {
            if (self - &Self::from_rational(BigRational::from_integer(f.clone()))).signum()
                != Ordering::Less
            {
                return f;
            }
            f -= 1;
        }
        f_lo
    }

    /// Approximate value, for display and bounding boxes only.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        a + self.b.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt()
    }
}

impl PartialEq for QuadraticNumber {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && self.field() == other.field()
    }
}

impl Eq for QuadraticNumber {}

impl Hash for QuadraticNumber {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
        self.field().hash(state);
    }
}

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadraticNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl<'a> Add<&'a QuadraticNumber> for &'a QuadraticNumber {
    type Output = QuadraticNumber;
    fn add(self, rhs: &QuadraticNumber) -> QuadraticNumber {
        let d = self.common_field(rhs);
        QuadraticNumber::build(&self.a + &rhs.a, &self.b + &rhs.b, d)
    }
}

impl<'a> Sub<&'a QuadraticNumber> for &'a QuadraticNumber {
    type Output = QuadraticNumber;
    fn sub(self, rhs: &QuadraticNumber) -> QuadraticNumber {
        let d = self.common_field(rhs);
        QuadraticNumber::build(&self.a - &rhs.a, &self.b - &rhs.b, d)
    }
}

impl<'a> Mul<&'a QuadraticNumber> for &'a QuadraticNumber {
    type Output = QuadraticNumber;
    fn mul(self, rhs: &QuadraticNumber) -> QuadraticNumber {
        let d = self.common_field(rhs);
        let a = &self.a * &rhs.a + &self.b * &rhs.b * integer(d);
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        QuadraticNumber::build(a, b, d)
    }
}

impl Neg for &QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        QuadraticNumber::build(-self.a.clone(), -self.b.clone(), self.d)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QuadraticNumber {
            type Output = QuadraticNumber;
            fn $m(self, rhs: QuadraticNumber) -> QuadraticNumber {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        -&self
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}+{}√{}", self.a, self.b, self.d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: (i64, i64), b: (i64, i64)) -> QuadraticNumber {
        QuadraticNumber::new(rational(a.0, a.1), rational(b.0, b.1), 5)
    }

    #[test]
    fn unit_times_root() {
        let one = q((1, 1), (0, 1));
        let root = q((0, 1), (1, 1));
        assert_eq!(&one * &root, root);
    }

    #[test]
    fn three_minus_root_five_is_positive() {
        assert_eq!(q((3, 1), (-1, 1)).signum(), Ordering::Greater);
        assert_eq!(q((2, 1), (-1, 1)).signum(), Ordering::Less);
        assert_eq!(q((-3, 1), (1, 1)).signum(), Ordering::Less);
    }

    #[test]
    fn additive_inverse() {
        let x = q((7, 3), (-2, 9));
        assert!((&x + &(-&x)).is_zero());
    }

    #[test]
    fn zero_has_no_inverse() {
        assert!(matches!(QuadraticNumber::zero().inv(), Err(Error::ZeroInverse)));
    }

    #[test]
    fn inverse_of_golden_ratio() {
        let phi = q((1, 2), (1, 2));
        let inv = phi.inv().unwrap();
        assert_eq!(&phi * &inv, QuadraticNumber::one());
        assert_eq!(inv, q((-1, 2), (1, 2)));
    }

    #[test]
    fn floors() {
        // (3 + √5)/2 ≈ 2.618
        assert_eq!(q((3, 2), (1, 2)).floor(), BigInt::from(2));
        // −√5 ≈ −2.236
        assert_eq!(q((0, 1), (-1, 1)).floor(), BigInt::from(-3));
        // 1/3 − √5/7 ≈ 0.014
        assert_eq!(q((1, 3), (-1, 7)).floor(), BigInt::from(0));
        assert_eq!(QuadraticNumber::from_rational(rational(-7, 2)).floor(), BigInt::from(-4));
    }

    #[test]
    fn sqrt_of_composite() {
        let r = QuadraticNumber::sqrt_of(12);
        assert_eq!(r.field(), 3);
        assert_eq!(&r * &r, QuadraticNumber::from_int(12));
        assert_eq!(QuadraticNumber::sqrt_of(9), QuadraticNumber::from_int(3));
    }

    #[test]
    fn rationals_mix_with_any_field() {
        let x = QuadraticNumber::from_int(2);
        let y = q((0, 1), (1, 1));
        assert_eq!((&x * &y).field(), 5);
        assert_eq!((&(&x * &y) - &(&y * &x)).field(), 0);
    }
}
