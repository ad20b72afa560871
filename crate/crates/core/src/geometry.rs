//! Eigen-coordinates, the digit map into `SOL_ℝ`, the `Γ_t` tiling and the
//! lattice Følner sets.
//!
//! Chart conventions: a point `(a, b, s)` of `SOL_ℝ` has `A`-chart coordinates
//! `X = (a v_+ + b v_-)/t` and `τ = s / c` with `c = log_k λ`, so that
//! `λ^τ = k^s`. The lattice element `(m, j)` sits at `(t α(m), t β(m), c j)`
//! where `(α, β)` are the eigen-coordinates of `m`. The tile of `(m, j)` is the
//! set of points with `A^{-j}(X - m) ∈ [0,1)²` and `τ - j ∈ [0,1)`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::group::{EigenBasis, LamplighterElement, Matrix2, MarkedGroup, SolLattice, SolLatticeElement, SolRealPoint};
use crate::interval::{ln_enclosure, ln_quadratic, quadratic_enclosure, Enclosure};
use crate::quadratic::{integer, QuadraticNumber};

/// Eigen data of `A` paired with the lamplighter base `k`.
#[derive(Clone, Debug)]
pub struct EigenData {
    pub basis: EigenBasis,
    pub k: u32,
    pub warnings: Vec<String>,
    ratio: Enclosure,
}

const DEFAULT_BITS: u32 = 128;

impl EigenData {
    pub fn new(a: Matrix2, k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::Invalid("k must be at least 2".into()));
        }
        let basis = EigenBasis::new(a)?;
        let mut warnings = Vec::new();
        if QuadraticNumber::from_int(k as i64) < basis.lambda {
            warnings.push(format!("k = {k} is smaller than λ ≈ {:.6}", basis.lambda.to_f64()));
        }
        let ratio = ratio_enclosure(&basis.lambda, k, DEFAULT_BITS);
        Ok(EigenData { basis, k, warnings, ratio })
    }

    pub fn matrix(&self) -> Matrix2 {
        self.basis.matrix
    }

    pub fn lambda(&self) -> &QuadraticNumber {
        &self.basis.lambda
    }

    /// Enclosure of `c = log λ / log k` of width about `2^{-bits}`.
    pub fn log_ratio_bounds(&self, bits: u32) -> Enclosure {
        if bits <= DEFAULT_BITS {
            self.ratio.clone()
        } else {
            ratio_enclosure(&self.basis.lambda, self.k, bits)
        }
    }

    pub fn c_f64(&self) -> f64 {
        self.ratio.midpoint_f64()
    }

    /// `λ^j`; negative powers use `λ^{-1} = λ̄`.
    pub fn lambda_pow(&self, j: i64) -> QuadraticNumber {
        let base = if j >= 0 { self.basis.lambda.clone() } else { self.basis.lambda.conjugate() };
        base.pow(j.unsigned_abs() as u32)
    }

    pub fn kpow(&self, s: i64) -> BigRational {
        let p = Pow::pow(BigInt::from(self.k), s.unsigned_abs());
        if s >= 0 {
            BigRational::from_integer(p)
        } else {
            BigRational::new(BigInt::one(), p)
        }
    }

    /// Compares `λ^j` with `k^s` exactly.
    pub fn cmp_levels(&self, j: i64, s: i64) -> Ordering {
        (&self.lambda_pow(j) - &QuadraticNumber::from_rational(self.kpow(s))).signum()
    }

    /// `⌊τ⌋ = ⌊s / c⌋`: the largest `j` with `λ^j ≤ k^s`.
    pub fn level_of_height(&self, s: i64) -> i64 {
        let mut j = (s as f64 / self.c_f64()).floor() as i64;
        while self.cmp_levels(j, s) == Ordering::Greater {
            j -= 1;
        }
        while self.cmp_levels(j + 1, s) != Ordering::Greater {
            j += 1;
        }
        j
    }

    /// Eigen-coordinates `(α, β)` of an integer vector.
    pub fn coords(&self, m: [i64; 2]) -> [QuadraticNumber; 2] {
        self.basis.coords_int(m)
    }

    /// Largest eigen-coordinate over the corners of `[0,1]²`.
    pub fn corner_extent(&self) -> QuadraticNumber {
        [[1, 0], [0, 1], [1, 1]]
            .iter()
            .flat_map(|&m| self.coords(m).into_iter().map(|x| x.abs()))
            .max()
            .unwrap()
    }

    /// `vol(D_t) = t² · c / |det V|` for Lebesgue measure in `(a, b, s)`.
    pub fn fundamental_volume(&self, t: &BigRational, bits: u32) -> Enclosure {
        let c = self.log_ratio_bounds(bits);
        let det = quadratic_enclosure(&self.basis.det_basis.abs(), bits + 8);
        let t2 = t * t;
        Enclosure { lo: &t2 * &c.lo / &det.hi, hi: &t2 * &c.hi / &det.lo }
    }

    /// Smallest integer `C` with `(1 + t·E)² ≤ k^C`, `E` the corner extent. Every
    /// image tile then passes the thickened-box test, so `u(F_n^ℒ) ⊂ ℋ_n`.
    pub fn image_thickening(&self, t: &BigRational) -> i64 {
        let one_plus = &QuadraticNumber::one() + &self.corner_extent().scale(t);
        let sq = &one_plus * &one_plus;
        let mut c = 0i64;
        while sq > QuadraticNumber::from_rational(self.kpow(c)) {
            c += 1;
        }
        c
    }

    /// Upper bound for the paper's constant `C` with `D_t ⊂ B(e, C/2)`:
    /// `C/2 ≥ 2 log_k(1 + tE) + 2c` from the upper length bound over the tile.
    pub fn domain_radius_bound(&self, t: &BigRational, bits: u32) -> BigRational {
        let one_plus = &QuadraticNumber::one() + &self.corner_extent().scale(t);
        let l = ln_quadratic(&one_plus, bits);
        let lk = ln_enclosure(&integer(self.k), bits);
        let c = self.log_ratio_bounds(bits);
        let four = BigRational::from_integer(4.into());
        &four * (&l.hi / &lk.lo) + &four * &c.hi
    }
}

fn ratio_enclosure(lambda: &QuadraticNumber, k: u32, bits: u32) -> Enclosure {
    let ll = ln_quadratic(lambda, bits + 8);
    let lk = ln_enclosure(&integer(k), bits + 8);
    ll.div_positive(&lk)
}

/// Which digit map to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DigitMap {
    /// `𝔳`.
    Standard,
    /// `𝔳` with the exponent of lamp `i` raised by one in both coordinates
    /// (`k^{i+1}` and `k^{-i-1}`). A negative control.
    Displaced(i64),
}

/// `𝔳(x, m) = (Σ ε_i k^i, Σ ε_i k^{-i}, m)`.
pub fn digit_map(g: &LamplighterElement, k: u32) -> SolRealPoint {
    digit_map_with(g, k, DigitMap::Standard)
}

pub fn digit_map_with(g: &LamplighterElement, k: u32, map: DigitMap) -> SolRealPoint {
    let kr = |e: i64| {
        let p = Pow::pow(BigInt::from(k), e.unsigned_abs());
        if e >= 0 {
            BigRational::from_integer(p)
        } else {
            BigRational::new(BigInt::one(), p)
        }
    };
    let mut a = BigRational::zero();
    let mut b = BigRational::zero();
    for &(i, v) in &g.lamps {
        let e = if map == DigitMap::Displaced(i) { i + 1 } else { i };
        let v = BigRational::from_integer(v.into());
        a += &v * kr(e);
        b += &v * kr(-e);
    }
    SolRealPoint::new(a, b, g.cursor)
}

fn apply(m: &Matrix2, x: &[QuadraticNumber; 2]) -> [QuadraticNumber; 2] {
    let q = |v: i64| QuadraticNumber::from_int(v);
    [
        &(&q(m[0][0]) * &x[0]) + &(&q(m[0][1]) * &x[1]),
        &(&q(m[1][0]) * &x[0]) + &(&q(m[1][1]) * &x[1]),
    ]
}

/// Chart coordinates `(X, j)` of `w`: `X = (a v_+ + b v_-)/t`, `j = ⌊s/c⌋`.
pub fn chart(w: &SolRealPoint, t: &BigRational, e: &EigenData) -> ([QuadraticNumber; 2], i64) {
    let inv_t = t.recip();
    let a = QuadraticNumber::from_rational(&w.a * &inv_t);
    let b = QuadraticNumber::from_rational(&w.b * &inv_t);
    (e.basis.combine(&a, &b), e.level_of_height(w.s))
}

/// The unique `γ ∈ Γ_t` with `w ∈ γ D_t`.
///
/// Heights are integers, so `τ = s/c` is irrational unless `s = 0`; the
/// height floor never sits on a tile boundary and no boundary case arises.
pub fn tile_locate(w: &SolRealPoint, t: &BigRational, e: &EigenData, lattice: &SolLattice) -> SolLatticeElement {
    let (x, j) = chart(w, t, e);
    let y = apply(&lattice.power(-j), &x);
    let f = [y[0].floor(), y[1].floor()];
    let fl = [f[0].to_i64().expect("tile index overflow"), f[1].to_i64().expect("tile index overflow")];
    let m = lattice.act(j, fl);
    SolLatticeElement::new(m[0], m[1], j)
}

/// Exact check that `γ^{-1} w ∈ D_t`.
pub fn in_tile(w: &SolRealPoint, gamma: &SolLatticeElement, t: &BigRational, e: &EigenData, lattice: &SolLattice) -> bool {
    let j = gamma.shift;
    // j ≤ τ < j + 1  ⟺  λ^j ≤ k^s < λ^{j+1}
    if e.cmp_levels(j, w.s) == Ordering::Greater || e.cmp_levels(j + 1, w.s) != Ordering::Greater {
        return false;
    }
    let (x, _) = chart(w, t, e);
    let d = [&x[0] - &QuadraticNumber::from_int(gamma.vec[0]), &x[1] - &QuadraticNumber::from_int(gamma.vec[1])];
    let y = apply(&lattice.power(-j), &d);
    let one = QuadraticNumber::one();
    y.iter().all(|c| c.signum() != Ordering::Less && *c < one)
}

/// Parameters of the lattice Følner set `ℋ'_n = (F_n^SOL B(e, C) ∩ Γ_t) B_Γ(e, L)`.
#[derive(Clone, Debug)]
pub struct SolBoxParams {
    pub t: BigRational,
    pub n: u32,
    /// Thickening radius `C`, measured with the upper length bound.
    pub thickening: BigRational,
    /// Enlargement radius `L` in the lattice word metric.
    pub enlargement: u32,
    pub cap: u128,
}

/// Membership rule on one lattice level.
struct LevelRule {
    j: i64,
    /// `k^{-s_f}` and `k^{s_f}` for the clamped height `s_f`.
    fa: QuadraticNumber,
    fb: QuadraticNumber,
    test: RadiusTest,
    /// Bounds for `(a, b)` in floating point, used only as a filter.
    rho_f: f64,
}

enum RadiusTest {
    /// `(1 + M)^{2q} ≤ k^p` for `C = p/q`.
    Power { p: i64, q: u32 },
    /// `M ≤ ρ` for a rational `ρ` below the true radius.
    Rational(BigRational),
}

/// Lattice elements of `F_n^SOL B(e, C) ∩ Γ_t`, in canonical order.
///
/// A point `γ` is kept when its upper-bound distance to the clamped point of
/// `F_n^SOL` (box coordinates clamped to `[0, k^{n+1}]`, height clamped to
/// `[0, n]`) is at most `C`. Heights outside the slab use an upper enclosure
/// of `c`, so the test only ever shrinks the set.
pub fn sol_box_core(e: &EigenData, lattice: &SolLattice, p: &SolBoxParams) -> Result<Vec<SolLatticeElement>> {
    let k = e.k as i64;
    let n = p.n as i64;
    let big_k = e.kpow(n + 1);
    let big_k_f = big_k.to_f64().unwrap();
    let c_enc = e.log_ratio_bounds(DEFAULT_BITS);
    let cth = &p.thickening;
    if cth.is_negative() {
        return Err(Error::config("thickening", "must be non-negative"));
    }
    let (cp, cq) = (cth.numer().to_i64().unwrap(), cth.denom().to_u32().unwrap());
    let half_c = cth.to_f64().unwrap() / 2.0;
    let c_lo = c_enc.lo.to_f64().unwrap();

    let mut rules = Vec::new();
    let j_lo = -((half_c / c_lo).floor() as i64) - 1;
    let j_hi = e.level_of_height(n) + (half_c / c_lo).floor() as i64 + 1;
    for j in j_lo..=j_hi {
        let in_slab = j >= 0 && e.cmp_levels(j, n) != Ordering::Greater;
        if in_slab {
            rules.push(LevelRule {
                j,
                fa: e.lambda_pow(-j),
                fb: e.lambda_pow(j),
                test: RadiusTest::Power { p: cp, q: cq },
                rho_f: (k as f64).powf(half_c) - 1.0,
            });
            continue;
        }
        // Δs ≤ c_hi·|j| below the slab, c_hi·j − n above it
        let ds = if j < 0 {
            &c_enc.hi * integer(-j)
        } else {
            &c_enc.hi * integer(j) - integer(n)
        };
        let r = cth - &ds * integer(2);
        if r.is_negative() {
            continue;
        }
        let rho = radius_below(k, &r);
        let s_f = if j < 0 { 0 } else { n };
        rules.push(LevelRule {
            j,
            fa: QuadraticNumber::from_rational(e.kpow(-s_f)),
            fb: QuadraticNumber::from_rational(e.kpow(s_f)),
            rho_f: rho.to_f64().unwrap(),
            test: RadiusTest::Rational(rho),
        });
    }

    let pv = e.basis.v_plus[1].to_f64();
    let qv = e.basis.v_minus[1].to_f64();
    let det = qv - pv;
    let t_f = p.t.to_f64().unwrap();
    let mut out = Vec::new();
    for rule in &rules {
        let fa = rule.fa.to_f64();
        let fb = rule.fb.to_f64();
        let (a_lo, a_hi) = (-rule.rho_f / fa, big_k_f + rule.rho_f / fa);
        let (b_lo, b_hi) = (-rule.rho_f / fb, big_k_f + rule.rho_f / fb);
        // α, β ranges of the eigen-coordinates
        let (al0, al1) = (a_lo / t_f, a_hi / t_f);
        let (be0, be1) = (b_lo / t_f, b_hi / t_f);
        let corners = [(al0, be0), (al0, be1), (al1, be0), (al1, be1)];
        let m1s: Vec<f64> = corners.iter().map(|(a, b)| a + b).collect();
        let m1_min = m1s.iter().cloned().fold(f64::INFINITY, f64::min).floor() as i64 - 1;
        let m1_max = m1s.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ceil() as i64 + 1;
        let scale = big_k_f + rule.rho_f / fa.min(fb) + 1.0;
        let tol = 1e-9 * scale;
        for m1 in m1_min..=m1_max {
            let m1f = m1 as f64;
            // α = (m1 q − m2)/det, β = (m2 − p m1)/det
            let r_alpha = [m1f * qv - al0 * det, m1f * qv - al1 * det];
            let r_beta = [pv * m1f + be0 * det, pv * m1f + be1 * det];
            let lo = r_alpha[0].min(r_alpha[1]).max(r_beta[0].min(r_beta[1]));
            let hi = r_alpha[0].max(r_alpha[1]).min(r_beta[0].max(r_beta[1]));
            if lo > hi + 2.0 {
                continue;
            }
            for m2 in (lo.floor() as i64 - 1)..=(hi.ceil() as i64 + 1) {
                let m2f = m2 as f64;
                let a = t_f * (m1f * qv - m2f) / det;
                let b = t_f * (m2f - pv * m1f) / det;
                let slack = (a - a_lo).min(a_hi - a).min(b - b_lo).min(b_hi - b);
                let keep = if slack > tol {
                    true
                } else if slack < -tol {
                    false
                } else {
                    exact_member(e, rule, [m1, m2], &p.t, &big_k)
                };
                if keep {
                    out.push(SolLatticeElement::new(m1, m2, rule.j));
                    if out.len() as u128 > p.cap {
                        return Err(Error::CapExceeded { what: "lattice Følner set", size: out.len() as u128, cap: p.cap });
                    }
                }
            }
        }
    }
    let _ = lattice;
    out.sort_unstable();
    Ok(out)
}

fn exact_member(e: &EigenData, rule: &LevelRule, m: [i64; 2], t: &BigRational, big_k: &BigRational) -> bool {
    let [alpha, beta] = e.coords(m);
    let kq = QuadraticNumber::from_rational(big_k.clone());
    let dist = |x: &QuadraticNumber| {
        let x = x.scale(t);
        if x.signum() == Ordering::Less {
            -x
        } else if x > kq {
            &x - &kq
        } else {
            QuadraticNumber::zero()
        }
    };
    let m_val = (&rule.fa * &dist(&alpha)).max(&rule.fb * &dist(&beta));
    match &rule.test {
        RadiusTest::Power { p, q } => {
            let lhs = (&QuadraticNumber::one() + &m_val).pow(2 * q);
            lhs <= QuadraticNumber::from_rational(e.kpow(*p))
        }
        RadiusTest::Rational(rho) => m_val <= QuadraticNumber::from_rational(rho.clone()),
    }
}

/// A rational `ρ ≥ 0` with `2 log_k(1 + ρ) ≤ r`, close to the largest such.
fn radius_below(k: i64, r: &BigRational) -> BigRational {
    // r' = ⌊64 r⌋/64 ≤ r, then (1 + ρ)^{128} ≤ k^{64 r'}
    let num = (r * integer(64)).floor().to_integer();
    let kp = Pow::pow(BigInt::from(k), num.to_u64().unwrap_or(0));
    let bound = BigRational::from_integer(kp);
    let guess = (k as f64).powf(num.to_f64().unwrap() / 128.0) - 1.0;
    let mut rho = BigRational::from_float(guess.max(0.0) * (1.0 - 1e-9)).unwrap_or_else(BigRational::zero);
    let one = BigRational::one();
    while rho.is_positive() && Pow::pow(&(&one + &rho), 128u32) > bound {
        rho = &rho * BigRational::new(999.into(), 1000.into());
    }
    rho
}

/// `core · B_Γ(e, L)`, in canonical order.
pub fn enlarge(lattice: &SolLattice, core: &[SolLatticeElement], radius: u32) -> Result<Vec<SolLatticeElement>> {
    let ball = crate::metric::bfs_ball(lattice, radius, crate::metric::DEFAULT_BALL_CAP)?;
    let mut set: FxHashSet<SolLatticeElement> = FxHashSet::default();
    set.reserve(core.len() * 2);
    for g in core {
        for (w, _) in ball.iter() {
            set.insert(lattice.mul(g, w));
        }
    }
    let mut v: Vec<_> = set.into_iter().collect();
    v.sort_unstable();
    Ok(v)
}
