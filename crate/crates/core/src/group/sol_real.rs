use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};

use super::{Generator, Length, LengthBounds, LogTerm, MarkedGroup};

/// A point `(a, b, s)` of `SOL_ℝ` with rational `a, b` and integer height `s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SolRealPoint {
    pub a: BigRational,
    pub b: BigRational,
    pub s: i64,
}

impl SolRealPoint {
    pub fn new(a: BigRational, b: BigRational, s: i64) -> Self {
        SolRealPoint { a, b, s }
    }

    /// `‖(a, b)‖∞`
    pub fn sup_norm(&self) -> BigRational {
        self.a.abs().max(self.b.abs())
    }
}

impl fmt::Display for SolRealPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{};{}", self.a, self.b, self.s)
    }
}

/// `SOL_ℝ = ℝ² ⋊ ℝ`, `s·(a, b) = (k^s a, k^{-s} b)`, restricted to rational
/// points at integer heights. Used as a metric space, so it carries no
/// finite generating set.
#[derive(Clone, Debug)]
pub struct SolReal {
    k: u32,
}

impl SolReal {
    pub fn new(k: u32) -> Self {
        assert!(k >= 2);
        SolReal { k }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `k^s` as a rational.
    pub fn kpow(&self, s: i64) -> BigRational {
        let p = Pow::pow(BigInt::from(self.k), s.unsigned_abs());
        if s >= 0 {
            BigRational::from_integer(p)
        } else {
            BigRational::new(BigInt::one(), p)
        }
    }
}

impl MarkedGroup for SolReal {
    type Elem = SolRealPoint;

    fn identity(&self) -> SolRealPoint {
        SolRealPoint::new(BigRational::zero(), BigRational::zero(), 0)
    }

    fn mul(&self, x: &SolRealPoint, y: &SolRealPoint) -> SolRealPoint {
        SolRealPoint {
            a: &x.a + self.kpow(x.s) * &y.a,
            b: &x.b + self.kpow(-x.s) * &y.b,
            s: x.s + y.s,
        }
    }

    fn inv(&self, x: &SolRealPoint) -> SolRealPoint {
        SolRealPoint { a: -(self.kpow(-x.s) * &x.a), b: -(self.kpow(x.s) * &x.b), s: -x.s }
    }

    fn generators(&self) -> &[Generator<SolRealPoint>] {
        &[]
    }

    fn descriptor(&self) -> String {
        format!("sol-real k={}", self.k)
    }

    fn parse_elem(&self, s: &str) -> Result<SolRealPoint> {
        let bad = || Error::Invalid(format!("bad SOL_ℝ point `{s}`"));
        let (v, h) = s.trim().split_once(';').ok_or_else(bad)?;
        let (a, b) = v.split_once(',').ok_or_else(bad)?;
        let r = |x: &str| x.trim().parse::<BigRational>().map_err(|_| bad());
        Ok(SolRealPoint::new(r(a)?, r(b)?, h.trim().parse().map_err(|_| bad())?))
    }

    /// `max{log_k ‖x‖∞, |s|} ≤ |g| ≤ 2 log_k(1 + ‖x‖∞) + 2|s|`.
    fn length_bounds(&self, g: &SolRealPoint) -> Result<LengthBounds> {
        let norm = g.sup_norm();
        let s = g.s.unsigned_abs();
        Ok(LengthBounds {
            lower: Length::MaxLog { term: LogTerm { coeff: 1, base: self.k, arg: norm.clone() }, int: s },
            upper: Length::SumLog {
                term: LogTerm { coeff: 2, base: self.k, arg: norm + BigRational::one() },
                int: 2 * s,
            },
        })
    }
}
