use std::fmt;

use crate::error::{Error, Result};
use crate::quadratic::QuadraticNumber;

use super::{pair_generators, Generator, LengthBounds, MarkedGroup};

pub type Matrix2 = [[i64; 2]; 2];

/// `(m, j)` in `Z² ⋊_A Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SolLatticeElement {
    pub vec: [i64; 2],
    pub shift: i64,
}

impl SolLatticeElement {
    pub const fn new(m1: i64, m2: i64, shift: i64) -> Self {
        SolLatticeElement { vec: [m1, m2], shift }
    }
}

impl fmt::Display for SolLatticeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{};{}", self.vec[0], self.vec[1], self.shift)
    }
}

pub(crate) fn mat_mul(a: &Matrix2, b: &Matrix2) -> Option<Matrix2> {
    let mut c = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let v = (a[i][0] as i128) * (b[0][j] as i128) + (a[i][1] as i128) * (b[1][j] as i128);
            c[i][j] = i64::try_from(v).ok()?;
        }
    }
    Some(c)
}

pub(crate) fn mat_vec(a: &Matrix2, v: [i64; 2]) -> [i64; 2] {
    let r = |i: usize| {
        let x = (a[i][0] as i128) * (v[0] as i128) + (a[i][1] as i128) * (v[1] as i128);
        i64::try_from(x).expect("SOL_A arithmetic overflow")
    };
    [r(0), r(1)]
}

/// Eigenbasis of a hyperbolic `A` with `det A = 1` and `tr A > 2`.
///
/// `v_plus = (1, p)`, `v_minus = (1, q)`, eigenvalues `λ > 1` and `λ^{-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenBasis {
    pub matrix: Matrix2,
    pub lambda: QuadraticNumber,
    pub v_plus: [QuadraticNumber; 2],
    pub v_minus: [QuadraticNumber; 2],
    pub det_basis: QuadraticNumber,
}

impl EigenBasis {
    pub fn new(a: Matrix2) -> Result<Self> {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let tr = a[0][0] + a[1][1];
        if det != 1 || tr <= 2 {
            return Err(Error::DegenerateMatrix(a));
        }
        let disc = (tr * tr - 4) as u64;
        // λ = (tr + √disc)/2
        let root = QuadraticNumber::sqrt_of(disc);
        let lambda = &QuadraticNumber::from_int(tr) + &root;
        let lambda = lambda.scale(&crate::quadratic::rational(1, 2));
        let lambda_inv = lambda.inv()?;
        let a11 = QuadraticNumber::from_int(a[0][0]);
        let inv_a12 = crate::quadratic::rational(1, a[0][1]);
        let p = (&lambda - &a11).scale(&inv_a12);
        let q = (&lambda_inv - &a11).scale(&inv_a12);
        let one = QuadraticNumber::one();
        let det_basis = &q - &p;
        Ok(EigenBasis {
            matrix: a,
            lambda,
            v_plus: [one.clone(), p],
            v_minus: [one, q],
            det_basis,
        })
    }

    /// `(α, β)` with `x = α v_plus + β v_minus`.
    pub fn coords(&self, x: &[QuadraticNumber; 2]) -> [QuadraticNumber; 2] {
        let inv = self.det_basis.inv().expect("eigenbasis is a basis");
        let p = &self.v_plus[1];
        let q = &self.v_minus[1];
        let alpha = &(&(&x[0] * q) - &x[1]) * &inv;
        let beta = &(&x[1] - &(p * &x[0])) * &inv;
        [alpha, beta]
    }

    pub fn coords_int(&self, m: [i64; 2]) -> [QuadraticNumber; 2] {
        self.coords(&[QuadraticNumber::from_int(m[0]), QuadraticNumber::from_int(m[1])])
    }

    /// `a v_plus + b v_minus`.
    pub fn combine(&self, a: &QuadraticNumber, b: &QuadraticNumber) -> [QuadraticNumber; 2] {
        [
            &(a * &self.v_plus[0]) + &(b * &self.v_minus[0]),
            &(a * &self.v_plus[1]) + &(b * &self.v_minus[1]),
        ]
    }
}

/// `SOL_A = Z² ⋊_A Z` with `(v, j)(v', j') = (v + A^j v', j + j')`.
#[derive(Clone, Debug)]
pub struct SolLattice {
    matrix: Matrix2,
    inverse: Matrix2,
    /// `A^j` for `j ∈ [-reach, reach]`, at index `j + reach`.
    powers: Vec<Matrix2>,
    reach: i64,
    gens: Vec<Generator<SolLatticeElement>>,
    standard: bool,
    basis: Option<EigenBasis>,
}

impl SolLattice {
    /// Standard generators `x, X, y, Y, t, T` (`±e1`, `±e2`, `±t`).
    pub fn new(a: Matrix2) -> Result<Self> {
        let list = vec![
            ("x".to_string(), SolLatticeElement::new(1, 0, 0)),
            ("X".to_string(), SolLatticeElement::new(-1, 0, 0)),
            ("y".to_string(), SolLatticeElement::new(0, 1, 0)),
            ("Y".to_string(), SolLatticeElement::new(0, -1, 0)),
            ("t".to_string(), SolLatticeElement::new(0, 0, 1)),
            ("T".to_string(), SolLatticeElement::new(0, 0, -1)),
        ];
        let mut g = Self::with_generators(a, list)?;
        g.standard = true;
        Ok(g)
    }

    /// Custom symmetric generating set. Length bounds are only provided for
    /// the standard set.
    pub fn with_generators(a: Matrix2, list: Vec<(String, SolLatticeElement)>) -> Result<Self> {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det.abs() != 1 {
            return Err(Error::DegenerateMatrix(a));
        }
        let inverse = [[det * a[1][1], -det * a[0][1]], [-det * a[1][0], det * a[0][0]]];
        let mut forward = vec![[[1, 0], [0, 1]]];
        let mut backward = vec![[[1, 0], [0, 1]]];
        let cap = 1i64 << 40;
        loop {
            let (Some(f), Some(b)) = (
                mat_mul(forward.last().unwrap(), &a),
                mat_mul(backward.last().unwrap(), &inverse),
            ) else {
                break;
            };
            let big = |m: &Matrix2| m.iter().flatten().any(|x| x.abs() > cap);
            if big(&f) || big(&b) || forward.len() > 200 {
                break;
            }
            forward.push(f);
            backward.push(b);
        }
        let reach = forward.len() as i64 - 1;
        let mut powers: Vec<Matrix2> = backward.into_iter().skip(1).rev().collect();
        powers.extend(forward);
        let mut g = SolLattice {
            matrix: a,
            inverse,
            powers,
            reach,
            gens: vec![],
            standard: false,
            basis: EigenBasis::new(a).ok(),
        };
        let gens = pair_generators(list, |x| g.inv(x));
        g.gens = gens;
        Ok(g)
    }

    pub fn matrix(&self) -> Matrix2 {
        self.matrix
    }

    pub fn basis(&self) -> Option<&EigenBasis> {
        self.basis.as_ref()
    }

    pub fn is_standard(&self) -> bool {
        self.standard
    }

    /// `A^j`; panics if an entry leaves `i64`.
    pub fn power(&self, j: i64) -> Matrix2 {
        if j.abs() <= self.reach {
            return self.powers[(j + self.reach) as usize];
        }
        let (base, step) = if j > 0 { (self.matrix, 1) } else { (self.inverse, -1) };
        let mut m = self.powers[(self.reach * step + self.reach) as usize];
        let mut e = self.reach * step;
        while e != j {
            m = mat_mul(&m, &base).expect("SOL_A matrix power overflow");
            e += step;
        }
        m
    }

    pub fn act(&self, j: i64, v: [i64; 2]) -> [i64; 2] {
        mat_vec(&self.power(j), v)
    }

    pub fn generator_labels(&self) -> String {
        self.gens.iter().map(|g| format!("{}={}", g.label, g.element)).collect::<Vec<_>>().join(" ")
    }
}

impl MarkedGroup for SolLattice {
    type Elem = SolLatticeElement;

    fn identity(&self) -> SolLatticeElement {
        SolLatticeElement::new(0, 0, 0)
    }

    fn mul(&self, a: &SolLatticeElement, b: &SolLatticeElement) -> SolLatticeElement {
        let w = self.act(a.shift, b.vec);
        SolLatticeElement { vec: [a.vec[0] + w[0], a.vec[1] + w[1]], shift: a.shift + b.shift }
    }

    fn inv(&self, a: &SolLatticeElement) -> SolLatticeElement {
        let w = self.act(-a.shift, a.vec);
        SolLatticeElement { vec: [-w[0], -w[1]], shift: -a.shift }
    }

    fn generators(&self) -> &[Generator<SolLatticeElement>] {
        &self.gens
    }

    fn descriptor(&self) -> String {
        let a = self.matrix;
        let gens = if self.standard { "standard".to_string() } else { format!("[{}]", self.generator_labels()) };
        format!("sol-lattice A={},{},{},{} gens={}", a[0][0], a[0][1], a[1][0], a[1][1], gens)
    }

    fn parse_elem(&self, s: &str) -> Result<SolLatticeElement> {
        let bad = || Error::Invalid(format!("bad SOL_A element `{s}`"));
        let (v, j) = s.trim().split_once(';').ok_or_else(bad)?;
        let (m1, m2) = v.split_once(',').ok_or_else(bad)?;
        let p = |x: &str| x.trim().parse::<i64>().map_err(|_| bad());
        Ok(SolLatticeElement::new(p(m1)?, p(m2)?, p(j)?))
    }

    /// Standard generators, `det A = 1`, `tr A > 2`. With eigen-coordinates
    /// `(α, β)` of `m` and `E` the largest eigen-coordinate of `e1`, `e2`, a word
    /// with `a` lattice letters and `b` height letters reaches at most
    /// `a·E·λ^b ≤ E·λ^{ℓ-1}` (using `λ ≥ 2`), so `ℓ ≥ min{ℓ : E·λ^{ℓ-1} ≥ ‖(α,β)‖∞}`.
    /// The upper bound is the word `x^{m1} y^{m2} t^j`.
    fn length_bounds(&self, g: &SolLatticeElement) -> Result<LengthBounds> {
        let basis = match &self.basis {
            Some(b) if self.standard => b,
            _ => return Err(Error::UnsupportedGroup(self.descriptor())),
        };
        let j = g.shift.unsigned_abs();
        let upper = g.vec[0].unsigned_abs() + g.vec[1].unsigned_abs() + j;
        if g.vec == [0, 0] {
            return Ok(LengthBounds::exact(j, upper));
        }
        let e1 = basis.coords_int([1, 0]);
        let e2 = basis.coords_int([0, 1]);
        let big = e1.iter().chain(e2.iter()).map(|x| x.abs()).max().unwrap();
        let [alpha, beta] = basis.coords_int(g.vec);
        let target = alpha.abs().max(beta.abs());
        let mut reach = big;
        let mut ell = 1u64;
        while reach < target {
            reach = &reach * &basis.lambda;
            ell += 1;
        }
        Ok(LengthBounds::exact(ell.max(j + 1), upper))
    }
}
