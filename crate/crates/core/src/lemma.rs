//! Digit-level model of `F_n^ℒ` and the quantitative statements about the
//! digit map `𝔳`: the Lipschitz certificate, preimages of balls, the
//! expansivity decay and the digit-pattern claim behind it.
//!
//! A vertex `(x, m)` is stored as `m·k^{2n+1} + N_a` with
//! `N_a = Σ ε_i k^{i+n}`, so `𝔳(x, m) = (N_a k^{-n}, N_b k^{-n}, m)` where
//! `N_b = Σ ε_i k^{n-i}` is the digit reversal of `N_a`.

use num_integer::Roots;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::lamplighter::lamplighter_length;
pub use crate::geometry::DigitMap;
use crate::group::LamplighterElement;

/// Cap on `k^{2n+1}` for the reversal table.
pub const DIGIT_BOX_CAP: u64 = 1 << 26;

#[derive(Clone, Debug)]
pub struct DigitBox {
    k: u32,
    n: u32,
    width: u32,
    configs: u64,
    map: DigitMap,
    /// Image coordinates `a·k^n`, `b·k^n` per configuration.
    va: Vec<u64>,
    vb: Vec<u64>,
    /// Configurations sorted by `vb`, and the sorted `vb` values.
    by_b: Vec<u32>,
    vb_sorted: Vec<u64>,
}

impl DigitBox {
    pub fn new(k: u32, n: u32) -> Result<Self> {
        Self::with_map(k, n, DigitMap::Standard)
    }

    pub fn with_map(k: u32, n: u32, map: DigitMap) -> Result<Self> {
        if k < 2 {
            return Err(Error::Invalid("k must be at least 2".into()));
        }
        let width = 2 * n + 1;
        let configs = (k as u64)
            .checked_pow(width)
            .filter(|&c| c <= DIGIT_BOX_CAP)
            .ok_or(Error::CapExceeded { what: "digit box", size: (k as u128).pow(width), cap: DIGIT_BOX_CAP as u128 })?;
        if let DigitMap::Displaced(i) = map {
            if i < -(n as i64) || i >= n as i64 {
                return Err(Error::Invalid(format!("displaced lamp {i} must lie in [-n, n)")));
            }
        }
        let kk = k as u64;
        let (va, vb): (Vec<u64>, Vec<u64>) = (0..configs)
            .into_par_iter()
            .map(|mut c| {
                let (mut a, mut b) = (0u64, 0u64);
                for p in 0..width as i64 {
                    let d = c % kk;
                    c /= kk;
                    let i = p - n as i64;
                    let e = if map == DigitMap::Displaced(i) { i + 1 } else { i };
                    a += d * kk.pow((e + n as i64) as u32);
                    b += d * kk.pow((n as i64 - e) as u32);
                }
                (a, b)
            })
            .unzip();
        let mut by_b: Vec<u32> = (0..configs as u32).collect();
        by_b.par_sort_unstable_by_key(|&c| (vb[c as usize], c));
        let vb_sorted = by_b.iter().map(|&c| vb[c as usize]).collect();
        Ok(DigitBox { k, n, width, configs, map, va, vb, by_b, vb_sorted })
    }

    pub fn map(&self) -> DigitMap {
        self.map
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn configs(&self) -> u64 {
        self.configs
    }

    pub fn len(&self) -> u64 {
        self.configs * (self.n as u64 + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn split(&self, v: u64) -> (u32, u32) {
        ((v % self.configs) as u32, (v / self.configs) as u32)
    }

    pub fn join(&self, na: u32, m: u32) -> u64 {
        m as u64 * self.configs + na as u64
    }

    /// `(a·k^n, b·k^n)` for the image of a configuration.
    pub fn image(&self, na: u32) -> (u64, u64) {
        (self.va[na as usize], self.vb[na as usize])
    }

    /// Digit `ε_i`, `i ∈ [-n, n]`.
    pub fn digit(&self, na: u32, i: i64) -> u32 {
        let p = (i + self.n as i64) as u32;
        (na / self.k.pow(p)) % self.k
    }

    pub fn element(&self, v: u64) -> LamplighterElement {
        let (mut na, m) = self.split(v);
        let mut lamps = Vec::new();
        for p in 0..self.width {
            let d = na % self.k;
            na /= self.k;
            if d != 0 {
                lamps.push((p as i64 - self.n as i64, d));
            }
        }
        LamplighterElement { lamps, cursor: m as i64 }
    }

    pub fn index_of(&self, g: &LamplighterElement) -> Option<u64> {
        if g.cursor < 0 || g.cursor > self.n as i64 {
            return None;
        }
        let mut na = 0u32;
        for &(i, d) in &g.lamps {
            if i.abs() > self.n as i64 {
                return None;
            }
            na += d * self.k.pow((i + self.n as i64) as u32);
        }
        Some(self.join(na, g.cursor as u32))
    }

    /// Lamp indices where the two configurations differ.
    fn diff_hull(&self, a: u32, b: u32) -> Option<(u64, i64, i64)> {
        if a == b {
            return None;
        }
        if self.k == 2 {
            let x = a ^ b;
            let lo = x.trailing_zeros() as i64 - self.n as i64;
            let hi = 31 - x.leading_zeros() as i64 - self.n as i64;
            return Some((x.count_ones() as u64, lo, hi));
        }
        let (mut a, mut b) = (a, b);
        let (mut count, mut lo, mut hi) = (0u64, i64::MAX, i64::MIN);
        for p in 0..self.width as i64 {
            if a % self.k != b % self.k {
                count += 1;
                lo = lo.min(p - self.n as i64);
                hi = hi.max(p - self.n as i64);
            }
            a /= self.k;
            b /= self.k;
        }
        Some((count, lo, hi))
    }

    /// Ambient word distance in `ℒ_k`.
    pub fn distance(&self, u: u64, v: u64) -> u64 {
        let (a, m) = self.split(u);
        let (b, m2) = self.split(v);
        let j = m2 as i64 - m as i64;
        match self.diff_hull(a, b) {
            None => j.unsigned_abs(),
            Some((count, lo, hi)) => {
                let (lo, hi) = ((lo - m as i64).min(0), (hi - m as i64).max(0));
                lamplighter_length(count, lo, hi, j)
            }
        }
    }

    /// Neighbours `v·s` inside the box, one per generator in the order
    /// `a_1, …, a_{k-1}, t, T`.
    pub fn neighbours(&self, v: u64) -> impl Iterator<Item = u64> + '_ {
        let (na, m) = self.split(v);
        let place = self.k.pow(m + self.n);
        let d = (na / place) % self.k;
        let lamps = (1..self.k).map(move |c| {
            let nd = (d + c) % self.k;
            self.join(na - d * place + nd * place, m)
        });
        let up = (m < self.n).then(|| self.join(na, m + 1));
        let down = (m > 0).then(|| self.join(na, m - 1));
        lamps.chain(up).chain(down)
    }

    /// Whether `𝔳(v)^{-1} 𝔳(w)` has upper length bound `≤ q`.
    pub fn within_upper(&self, v: u64, w: u64, q: u32) -> bool {
        let (a, m) = self.split(v);
        let (b, m2) = self.split(w);
        let dm = (m2 as i64 - m as i64).unsigned_abs() as u32;
        if 2 * dm > q {
            return false;
        }
        let big_q = q - 2 * dm;
        let da = self.va[a as usize].abs_diff(self.va[b as usize]) as u128;
        let db = self.vb[a as usize].abs_diff(self.vb[b as usize]) as u128;
        let k = self.k as u128;
        // (1 + k^{-e} Δ)² ≤ k^Q  ⟺  (k^e + Δ)² ≤ k^{Q + 2e}
        let fits = |e: u32, d: u128| {
            let lhs = k.pow(e) + d;
            lhs * lhs <= k.pow(big_q + 2 * e)
        };
        fits(m + self.n, da) && fits(self.n - m, db)
    }

    /// `𝔳^{-1}(B(𝔳(v), q)) ∩ F_n^ℒ` under the upper length bound, sorted.
    pub fn preimage_of_ball(&self, v: u64, q: u32) -> Vec<u64> {
        let (a, m) = self.split(v);
        let nb = self.vb[a as usize];
        let k = self.k as u128;
        let mut out = Vec::new();
        for dm in -(q as i64 / 2)..=(q as i64 / 2) {
            let m2 = m as i64 + dm;
            if m2 < 0 || m2 > self.n as i64 {
                continue;
            }
            let big_q = q - 2 * dm.unsigned_abs() as u32;
            // |Δb·k^n| ≤ √(k^{Q + 2(n-m)}) - k^{n-m}
            let e = self.n - m;
            let radius = (k.pow(big_q + 2 * e).sqrt() - k.pow(e)) as u64;
            let lo = self.vb_sorted.partition_point(|&x| x < nb.saturating_sub(radius));
            let hi = self.vb_sorted.partition_point(|&x| x <= nb + radius);
            for &c in &self.by_b[lo..hi] {
                let w = self.join(c, m2 as u32);
                if self.within_upper(v, w, q) {
                    out.push(w);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Upper length bound of `𝔳(v)^{-1}𝔳(w)` is `≤ 2` for every edge.
    pub fn lipschitz_certificate(&self) -> LipschitzCertificate {
        let (edges, worst) = (0..self.len())
            .into_par_iter()
            .map(|v| {
                let mut edges = 0u64;
                let mut bad = None;
                for w in self.neighbours(v) {
                    edges += 1;
                    if bad.is_none() && !self.within_upper(v, w, 2) {
                        bad = Some((v, w));
                    }
                }
                (edges, bad)
            })
            .reduce(|| (0, None), |x, y| (x.0 + y.0, x.1.or(y.1)));
        LipschitzCertificate { k: self.k, n: self.n, edges, violation: worst }
    }

    /// Size and ambient diameter of every preimage of a `q`-ball.
    pub fn preimage_stats(&self, q: u32) -> Vec<(u32, u32)> {
        (0..self.len())
            .into_par_iter()
            .map(|v| {
                let set = self.preimage_of_ball(v, q);
                let mut diam = 0;
                for (i, &x) in set.iter().enumerate() {
                    for &y in &set[i + 1..] {
                        diam = diam.max(self.distance(x, y));
                    }
                }
                (set.len() as u32, diam as u32)
            })
            .collect()
    }

    /// Whether the pair `(g, g')` shows the constant-digit pattern on `J_±`.
    pub fn claim_j_holds(&self, v: u64, w: u64, q: u32) -> bool {
        let (a, j) = self.split(v);
        let (b, _) = self.split(w);
        let Some((_, lm, lp)) = self.diff_hull(a, b) else { return true };
        let j = j as i64;
        let q = q as i64;
        let top = self.k - 1;
        let constant = |lo: i64, hi: i64| {
            if lo > hi {
                return true;
            }
            let d0 = self.digit(a, lo);
            let e0 = self.digit(b, lo);
            if !((d0 == 0 && e0 == top) || (d0 == top && e0 == 0)) {
                return false;
            }
            (lo..=hi).all(|i| self.digit(a, i) == d0 && self.digit(b, i) == e0)
        };
        constant(lm + 1, j - q - 1) && constant(j + q + 1, lp - 1)
    }

    /// Checks the digit-pattern claim on every pair `(g, g')` with upper-bound
    /// image distance `≤ q` (which forces `|cursor difference| ≤ q/2 ≤ q`).
    pub fn claim_j_oracle(&self, q: u32) -> ClaimReport {
        let (pairs, violations, example) = (0..self.len())
            .into_par_iter()
            .map(|v| {
                let mut pairs = 0u64;
                let mut bad = 0u64;
                let mut ex = None;
                for w in self.preimage_of_ball(v, q) {
                    pairs += 1;
                    if !self.claim_j_holds(v, w, q) {
                        bad += 1;
                        ex.get_or_insert((v, w));
                    }
                }
                (pairs, bad, ex)
            })
            .reduce(|| (0, 0, None), |x, y| (x.0 + y.0, x.1 + y.1, x.2.or(y.2)));
        ClaimReport { k: self.k, n: self.n, q, map: self.map, pairs, violations, example }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LipschitzCertificate {
    pub k: u32,
    pub n: u32,
    pub edges: u64,
    pub violation: Option<(u64, u64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClaimReport {
    pub k: u32,
    pub n: u32,
    pub q: u32,
    pub map: DigitMap,
    pub pairs: u64,
    pub violations: u64,
    pub example: Option<(u64, u64)>,
}

/// One row of the expansivity decay check.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayRow {
    pub m: u32,
    pub threshold: u32,
    pub count: u64,
    pub total: u64,
    /// `4 k^{1-m}` as `(numerator, denominator)`.
    pub bound: (u64, u64),
}

impl DecayRow {
    pub fn fraction(&self) -> f64 {
        self.count as f64 / self.total as f64
    }

    /// `count/total ≤ 4k^{1-m}`, exactly.
    pub fn pass(&self) -> bool {
        self.count as u128 * self.bound.1 as u128 <= self.bound.0 as u128 * self.total as u128
    }
}

/// Fraction of `g ∈ F_n^ℒ` whose preimage of the `q`-ball has diameter
/// `≥ 2m + 3q`, for each `m`, against `4k^{-m+1}`.
pub fn expansivity_decay(stats: &[(u32, u32)], k: u32, q: u32, ms: &[u32]) -> Vec<DecayRow> {
    ms.iter()
        .map(|&m| {
            let threshold = 2 * m + 3 * q;
            let count = stats.iter().filter(|s| s.1 >= threshold).count() as u64;
            let bound = if m >= 1 { (4, (k as u64).pow(m - 1)) } else { (4 * k as u64, 1) };
            DecayRow { m, threshold, count, total: stats.len() as u64, bound }
        })
        .collect()
}

/// `(2q+1) k^{2q+1}`
pub fn fiber_bound(k: u32, q: u32) -> u64 {
    (2 * q as u64 + 1) * (k as u64).pow(2 * q + 1)
}
