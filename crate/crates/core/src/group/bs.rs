use std::fmt;

use crate::error::{Error, Result};

use super::{parse_fraction, pair_generators, Generator, LengthBounds, MarkedGroup};

/// `(num / k^exp, shift)` in `Z[1/k] ⋊ Z`; `k ∤ num` whenever `exp > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BsElement {
    pub num: i128,
    pub exp: u32,
    pub shift: i64,
}

/// `BS(1,k)` with generators `a = (1,0)`, `A = (-1,0)`, `t = (0,1)`, `T = (0,-1)`.
#[derive(Clone, Debug)]
pub struct BaumslagSolitar {
    k: u32,
    gens: Vec<Generator<BsElement>>,
}

fn kpow(k: u32, e: u32) -> i128 {
    (k as i128).checked_pow(e).expect("BS(1,k) arithmetic overflow")
}

impl BaumslagSolitar {
    pub fn new(k: u32) -> Self {
        assert!(k >= 2, "BS(1,k) needs k >= 2");
        let e = |num, shift| BsElement { num, exp: 0, shift };
        let list = vec![
            ("a".to_string(), e(1, 0)),
            ("A".to_string(), e(-1, 0)),
            ("t".to_string(), e(0, 1)),
            ("T".to_string(), e(0, -1)),
        ];
        let gens = pair_generators(list, |g| BaumslagSolitar::inv_raw(k, g));
        BaumslagSolitar { k, gens }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `num / k^exp` in lowest terms.
    pub fn element(&self, mut num: i128, mut exp: u32, shift: i64) -> BsElement {
        let k = self.k as i128;
        if num == 0 {
            exp = 0;
        }
        while exp > 0 && num % k == 0 {
            num /= k;
            exp -= 1;
        }
        BsElement { num, exp, shift }
    }

    /// `num/k^exp · k^j` as a fraction over `k^e` for a given `e`.
    fn rescale(&self, num: i128, exp: u32, j: i64, e: u32) -> i128 {
        // num · k^{j + e − exp}
        let p = j + e as i64 - exp as i64;
        debug_assert!(p >= 0);
        num.checked_mul(kpow(self.k, p as u32)).expect("BS(1,k) arithmetic overflow")
    }

    fn inv_raw(k: u32, g: &BsElement) -> BsElement {
        // (x, j)^{-1} = (−k^{−j} x, −j)
        let b = BaumslagSolitar { k, gens: vec![] };
        if g.shift >= 0 {
            b.element(-g.num, g.exp + g.shift as u32, -g.shift)
        } else {
            let m = g.shift.unsigned_abs() as u32;
            if m <= g.exp {
                b.element(-g.num, g.exp - m, -g.shift)
            } else {
                b.element(-g.num * kpow(k, m - g.exp), 0, -g.shift)
            }
        }
    }

    fn digits(&self, mut n: u128) -> Vec<u32> {
        let mut d = Vec::new();
        while n > 0 {
            d.push((n % self.k as u128) as u32);
            n /= self.k as u128;
        }
        d
    }
}

impl fmt::Display for BsElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.num)?;
        if self.exp > 0 {
            write!(f, "/k^{}", self.exp)?;
        }
        write!(f, ";{}", self.shift)
    }
}

impl MarkedGroup for BaumslagSolitar {
    type Elem = BsElement;

    fn identity(&self) -> BsElement {
        BsElement { num: 0, exp: 0, shift: 0 }
    }

    fn mul(&self, a: &BsElement, b: &BsElement) -> BsElement {
        // (x, j)(x', j') = (x + k^j x', j + j')
        let e = (a.exp as i64).max(b.exp as i64 - a.shift).max(0) as u32;
        let lhs = self.rescale(a.num, a.exp, 0, e);
        let rhs = self.rescale(b.num, b.exp, a.shift, e);
        self.element(lhs.checked_add(rhs).expect("BS(1,k) arithmetic overflow"), e, a.shift + b.shift)
    }

    fn inv(&self, a: &BsElement) -> BsElement {
        BaumslagSolitar::inv_raw(self.k, a)
    }

    fn generators(&self) -> &[Generator<BsElement>] {
        &self.gens
    }

    fn descriptor(&self) -> String {
        format!("bs k={}", self.k)
    }

    fn parse_elem(&self, s: &str) -> Result<BsElement> {
        let bad = || Error::Invalid(format!("bad BS(1,k) element `{s}`"));
        let (x, j) = s.trim().split_once(';').ok_or_else(bad)?;
        let shift: i64 = j.trim().parse().map_err(|_| bad())?;
        let (num, exp) = match x.split_once("/k^") {
            Some((n, e)) => (n.trim().parse().map_err(|_| bad())?, e.trim().parse().map_err(|_| bad())?),
            None => {
                let (p, q) = parse_fraction(x)?;
                if q != 1 {
                    return Err(bad());
                }
                (p, 0)
            }
        };
        let el = self.element(num, exp, shift);
        if el.num != num || el.exp != exp {
            return Err(bad());
        }
        Ok(el)
    }

    /// For `x = p/k^e` and shift `j`:
    /// lower is the largest of `|j|`, `1 + ⌈log_k |x|⌉` and `1 + e + |j + e|` (the
    /// last two only when they apply), upper is the shorter of the Horner word
    /// `t^{-e} a^{d_0} t a^{d_1} … t a^{d_D} t^{j-D+e}` and, for integer `x`,
    /// `a^p t^j`.
    fn length_bounds(&self, g: &BsElement) -> Result<LengthBounds> {
        let j = g.shift;
        if g.num == 0 {
            return Ok(LengthBounds::exact(j.unsigned_abs(), j.unsigned_abs()));
        }
        let e = g.exp as i64;
        let p = g.num.unsigned_abs();
        let k = self.k as u128;
        // |x| ≤ k^{ℓ−1} is forced by the growth of a word of length ℓ
        let mut growth = 1u64;
        let mut pow = 1u128;
        while pow.saturating_mul(kpow(self.k, g.exp) as u128) < p {
            pow = pow.saturating_mul(k);
            growth += 1;
        }
        let mut lower = j.unsigned_abs().max(growth);
        if e > 0 {
            lower = lower.max(1 + (e + (j + e).abs()) as u64);
        }
        let digits = self.digits(p);
        let d_top = digits.len() as i64 - 1;
        let horner = e + digits.iter().map(|&d| d as i64).sum::<i64>() + d_top + (j - d_top + e).abs();
        let mut upper = horner as u64;
        if e == 0 {
            upper = upper.min(p as u64 + j.unsigned_abs());
        }
        Ok(LengthBounds::exact(lower, upper))
    }
}
