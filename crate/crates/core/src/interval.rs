//! Rigorous rational enclosures of natural logarithms.
//!
//! Values are computed in binary fixed point with every rounding directed
//! outward, so the returned `[lo, hi]` always contains the true value.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::quadratic::QuadraticNumber;

/// Closed rational interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Enclosure {
    pub fn point(x: BigRational) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        ((&self.lo + &self.hi) / BigRational::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    /// Quotient of two enclosures of positive numbers.
    pub fn div_positive(&self, other: &Enclosure) -> Enclosure {
        assert!(self.lo.is_positive() && other.lo.is_positive());
        Enclosure { lo: &self.lo / &other.hi, hi: &self.hi / &other.lo }
    }

    pub fn mul_int(&self, n: i64) -> Enclosure {
        let f = BigRational::from_integer(n.into());
        if n >= 0 {
            Enclosure { lo: &self.lo * &f, hi: &self.hi * &f }
        } else {
            Enclosure { lo: &self.hi * &f, hi: &self.lo * &f }
        }
    }
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn div_floor(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// `2·atanh(z)` for `z = num/2^p` with `0 ≤ z ≤ 1/3`, rounded down (`upper = false`)
/// or up (`upper = true`), as a fixed-point numerator over `2^p`.
fn two_atanh_fixed(z: &BigInt, p: u32, upper: bool) -> BigInt {
    let scale = pow2(p);
    let z2 = if upper { div_ceil(&(z * z), &scale) } else { div_floor(&(z * z), &scale) };
    let mut power = z.clone();
    let mut sum = BigInt::zero();
    let mut i: u64 = 0;
    loop {
        let den = BigInt::from(2 * i + 1);
        let term = if upper { div_ceil(&power, &den) } else { div_floor(&power, &den) };
        if term.is_zero() && !upper {
            break;
        }
        sum += &term;
        let next = if upper { div_ceil(&(&power * &z2), &scale) } else { div_floor(&(&power * &z2), &scale) };
        if upper && next <= BigInt::one() {
            // remaining tail Σ z^{2j+1}/(2j+1) ≤ z^{2i+3}·9/8, at most two units
            sum += BigInt::from(2);
            break;
        }
        power = next;
        i += 1;
    }
    sum * 2
}

/// Enclosure of `ln 2` at `p` fractional bits.
fn ln2_fixed(p: u32) -> (BigInt, BigInt) {
    // ln 2 = 2·atanh(1/3)
    let scale = pow2(p);
    let lo_z = div_floor(&scale, &BigInt::from(3));
    let hi_z = div_ceil(&scale, &BigInt::from(3));
    (two_atanh_fixed(&lo_z, p, false), two_atanh_fixed(&hi_z, p, true))
}

fn bit_len(n: &BigInt) -> i64 {
    n.bits() as i64
}

/// Enclosure of `ln x` for rational `x > 0`, accurate to roughly `bits` bits.
pub fn ln_enclosure(x: &BigRational, bits: u32) -> Enclosure {
    assert!(x.is_positive(), "logarithm of a non-positive number");
    let p = bits + 24;
    // x = 2^e · y with y ∈ [1, 2)
    let mut e = bit_len(x.numer()) - bit_len(x.denom());
    let two = BigRational::from_integer(2.into());
    let shift = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(pow2(e as u32))
        } else {
            BigRational::new(BigInt::one(), pow2((-e) as u32))
        }
    };
    let mut y = x / shift(e);
    while y >= two {
        y /= &two;
        e += 1;
    }
    while y < BigRational::one() {
        y *= &two;
        e -= 1;
    }
    // z = (y − 1)/(y + 1) ∈ [0, 1/3)
    let z = (&y - BigRational::one()) / (&y + BigRational::one());
    let scale = pow2(p);
    let zs = z * BigRational::from_integer(scale.clone());
    let z_lo = zs.floor().to_integer();
    let z_hi = zs.ceil().to_integer();
    let a_lo = two_atanh_fixed(&z_lo, p, false);
    let a_hi = two_atanh_fixed(&z_hi, p, true);
    let (l2_lo, l2_hi) = ln2_fixed(p);
    let eb = BigInt::from(e);
    let (lo, hi) = if e >= 0 {
        (&eb * &l2_lo + a_lo, &eb * &l2_hi + a_hi)
    } else {
        (&eb * &l2_hi + a_lo, &eb * &l2_lo + a_hi)
    };
    Enclosure { lo: BigRational::new(lo, scale.clone()), hi: BigRational::new(hi, scale) }
}

/// Rational enclosure of a real quadratic number with width at most `2^-bits`.
pub fn quadratic_enclosure(x: &QuadraticNumber, bits: u32) -> Enclosure {
    let a = x.rational_part().clone();
    let b = x.irrational_part();
    if b.is_zero() {
        return Enclosure::point(a);
    }
    let d = BigInt::from(x.field());
    // √(b²d) enclosed via integer square roots at 2^p scale
    let p = bits + 4 + b.numer().bits() as u32;
    let scale = pow2(p);
    let radicand = b.numer() * b.numer() * d * &scale * &scale;
    let s = radicand.sqrt();
    let den = b.denom() * &scale;
    let low = BigRational::new(s.clone(), den.clone());
    let high = BigRational::new(s + 1, den);
    if b.is_positive() {
        Enclosure { lo: &a + low, hi: a + high }
    } else {
        Enclosure { lo: &a - high, hi: a - low }
    }
}

/// Enclosure of `ln x` for a positive quadratic number.
pub fn ln_quadratic(x: &QuadraticNumber, bits: u32) -> Enclosure {
    let e = quadratic_enclosure(x, bits + 8);
    let lo = ln_enclosure(&e.lo, bits);
    let hi = ln_enclosure(&e.hi, bits);
    Enclosure { lo: lo.lo, hi: hi.hi }
}
