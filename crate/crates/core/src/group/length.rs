use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};

/// `coeff · log_base(arg)` with `arg ≥ 0`; `arg = 0` is `-∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogTerm {
    pub coeff: u32,
    pub base: u32,
    pub arg: BigRational,
}

impl LogTerm {
    /// Exact comparison with the integer `m`.
    pub fn cmp_int(&self, m: i64) -> Ordering {
        if self.arg.is_zero() || self.coeff == 0 {
            return 0.cmp(&m).min(if self.arg.is_zero() { Ordering::Less } else { Ordering::Greater });
        }
        // arg^coeff vs base^m
        let lhs = Pow::pow(&self.arg, self.coeff);
        let b = BigInt::from(self.base);
        let rhs = if m >= 0 {
            BigRational::from_integer(Pow::pow(&b, m as u64))
        } else {
            BigRational::new(BigInt::one(), Pow::pow(&b, m.unsigned_abs()))
        };
        lhs.cmp(&rhs)
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.arg.to_f64().unwrap_or(f64::INFINITY);
        self.coeff as f64 * a.ln() / (self.base as f64).ln()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Length {
    Exact(u64),
    /// `max(term, int)`
    MaxLog { term: LogTerm, int: u64 },
    /// `term + int`
    SumLog { term: LogTerm, int: u64 },
}

impl Length {
    pub fn cmp_int(&self, q: i64) -> Ordering {
        match self {
            Length::Exact(v) => (*v as i128).cmp(&(q as i128)),
            Length::MaxLog { term, int } => term.cmp_int(q).max((*int as i128).cmp(&(q as i128))),
            Length::SumLog { term, int } => term.cmp_int(q - *int as i64),
        }
    }

    pub fn le_int(&self, q: i64) -> bool {
        self.cmp_int(q) != Ordering::Greater
    }

    pub fn ge_int(&self, q: i64) -> bool {
        self.cmp_int(q) != Ordering::Less
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Length::Exact(v) => *v as f64,
            Length::MaxLog { term, int } => term.to_f64().max(*int as f64),
            Length::SumLog { term, int } => term.to_f64() + *int as f64,
        }
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Length::Exact(v) => write!(f, "{v}"),
            other => write!(f, "{:.6}", other.to_f64()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthBounds {
    pub lower: Length,
    pub upper: Length,
}

impl LengthBounds {
    pub fn exact(lower: u64, upper: u64) -> Self {
        LengthBounds { lower: Length::Exact(lower), upper: Length::Exact(upper) }
    }

    /// Whether `lower ≤ q ≤ upper`.
    pub fn brackets(&self, q: u64) -> bool {
        self.lower.le_int(q as i64) && self.upper.ge_int(q as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::rational;

    #[test]
    fn log_term_compares_exactly() {
        let t = LogTerm { coeff: 2, base: 2, arg: rational(2, 1) };
        assert_eq!(t.cmp_int(2), Ordering::Equal);
        assert_eq!(t.cmp_int(1), Ordering::Greater);
        let half = LogTerm { coeff: 1, base: 2, arg: rational(1, 2) };
        assert_eq!(half.cmp_int(-1), Ordering::Equal);
        let zero = LogTerm { coeff: 1, base: 2, arg: rational(0, 1) };
        assert_eq!(zero.cmp_int(-100), Ordering::Less);
    }

    #[test]
    fn combined_lengths() {
        let t = LogTerm { coeff: 1, base: 2, arg: rational(8, 1) };
        let m = Length::MaxLog { term: t.clone(), int: 2 };
        assert_eq!(m.cmp_int(3), Ordering::Equal);
        let s = Length::SumLog { term: t, int: 2 };
        assert_eq!(s.cmp_int(5), Ordering::Equal);
        assert!(s.le_int(6) && !s.le_int(4));
    }
}
