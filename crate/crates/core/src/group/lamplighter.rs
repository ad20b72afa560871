use std::fmt;

use crate::error::{Error, Result};

use super::{pair_generators, Generator, LengthBounds, MarkedGroup};

/// `(x, m)` with `x` a finitely supported lamp configuration and `m` the cursor.
///
/// `lamps` is sorted by position and never stores a zero value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LamplighterElement {
    pub lamps: Vec<(i64, u32)>,
    pub cursor: i64,
}

impl LamplighterElement {
    pub fn new(mut lamps: Vec<(i64, u32)>, cursor: i64, k: u32) -> Self {
        lamps.sort_unstable();
        let mut out: Vec<(i64, u32)> = Vec::with_capacity(lamps.len());
        for (p, v) in lamps {
            match out.last_mut() {
                Some((q, w)) if *q == p => *w = (*w + v) % k,
                _ => out.push((p, v % k)),
            }
        }
        out.retain(|&(_, v)| v != 0);
        LamplighterElement { lamps: out, cursor }
    }

    pub fn lamp(&self, pos: i64) -> u32 {
        self.lamps.binary_search_by_key(&pos, |&(p, _)| p).map(|i| self.lamps[i].1).unwrap_or(0)
    }

    /// `(min, max)` of `supp x ∪ {0}`.
    pub fn support_hull(&self) -> (i64, i64) {
        let lo = self.lamps.first().map_or(0, |&(p, _)| p.min(0));
        let hi = self.lamps.last().map_or(0, |&(p, _)| p.max(0));
        (lo, hi)
    }
}

impl fmt::Display for LamplighterElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (p, v)) in self.lamps.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}:{v}")?;
        }
        write!(f, ";{}", self.cursor)
    }
}

/// The lamplighter group `Z/kZ ≀ Z` with generators `a1..a(k-1)` (lamp value
/// `c` added at the cursor) and `t`, `T` (cursor moves).
#[derive(Clone, Debug)]
pub struct Lamplighter {
    k: u32,
    gens: Vec<Generator<LamplighterElement>>,
}

impl Lamplighter {
    pub fn new(k: u32) -> Self {
        assert!(k >= 2, "lamplighter needs k >= 2");
        let mut list: Vec<(String, LamplighterElement)> =
            (1..k).map(|c| (format!("a{c}"), LamplighterElement { lamps: vec![(0, c)], cursor: 0 })).collect();
        list.push(("t".into(), LamplighterElement { lamps: vec![], cursor: 1 }));
        list.push(("T".into(), LamplighterElement { lamps: vec![], cursor: -1 }));
        let gens = pair_generators(list, |g| invert(g, k));
        Lamplighter { k, gens }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn element(&self, lamps: Vec<(i64, u32)>, cursor: i64) -> LamplighterElement {
        LamplighterElement::new(lamps, cursor, self.k)
    }
}

fn invert(g: &LamplighterElement, k: u32) -> LamplighterElement {
    let lamps = g.lamps.iter().map(|&(p, v)| (p - g.cursor, (k - v) % k)).collect();
    LamplighterElement { lamps, cursor: -g.cursor }
}

/// Exact word length of `(x, j)` for the standard generators: one toggle per
/// support point plus the shortest cursor tour from 0 covering the support and
/// ending at `j`.
pub(crate) fn lamplighter_length(support_len: u64, lo: i64, hi: i64, j: i64) -> u64 {
    let span = hi - lo;
    let left_first = -lo + span + (hi - j).abs();
    let right_first = hi + span + (j - lo).abs();
    support_len + left_first.min(right_first) as u64
}

impl MarkedGroup for Lamplighter {
    type Elem = LamplighterElement;

    fn identity(&self) -> LamplighterElement {
        LamplighterElement { lamps: vec![], cursor: 0 }
    }

    fn mul(&self, a: &LamplighterElement, b: &LamplighterElement) -> LamplighterElement {
        let mut lamps = Vec::with_capacity(a.lamps.len() + b.lamps.len());
        let (mut i, mut j) = (0, 0);
        while i < a.lamps.len() || j < b.lamps.len() {
            let pa = a.lamps.get(i).map(|x| x.0);
            let pb = b.lamps.get(j).map(|x| x.0 + a.cursor);
            match (pa, pb) {
                (Some(p), Some(q)) if p == q => {
                    let v = (a.lamps[i].1 + b.lamps[j].1) % self.k;
                    if v != 0 {
                        lamps.push((p, v));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(p), Some(q)) if p < q => {
                    lamps.push(a.lamps[i]);
                    i += 1;
                }
                (Some(_), None) => {
                    lamps.push(a.lamps[i]);
                    i += 1;
                }
                (_, Some(q)) => {
                    lamps.push((q, b.lamps[j].1));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        LamplighterElement { lamps, cursor: a.cursor + b.cursor }
    }

    fn inv(&self, a: &LamplighterElement) -> LamplighterElement {
        invert(a, self.k)
    }

    fn generators(&self) -> &[Generator<LamplighterElement>] {
        &self.gens
    }

    fn descriptor(&self) -> String {
        format!("lamplighter k={}", self.k)
    }

    fn parse_elem(&self, s: &str) -> Result<LamplighterElement> {
        let bad = || Error::Invalid(format!("bad lamplighter element `{s}`"));
        let (lamps, cursor) = s.trim().split_once(';').ok_or_else(bad)?;
        let cursor: i64 = cursor.trim().parse().map_err(|_| bad())?;
        let mut out = Vec::new();
        for item in lamps.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (p, v) = item.split_once(':').ok_or_else(bad)?;
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let v: u32 = v.trim().parse().map_err(|_| bad())?;
            if v == 0 || v >= self.k {
                return Err(bad());
            }
            out.push((p, v));
        }
        if out.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(bad());
        }
        Ok(LamplighterElement { lamps: out, cursor })
    }

    fn word_length_closed_form(&self, g: &LamplighterElement) -> Option<u64> {
        let (lo, hi) = g.support_hull();
        Some(lamplighter_length(g.lamps.len() as u64, lo, hi, g.cursor))
    }

    /// `max(diam, |j|) ≤ |g| ≤ 2·diam + |j| + #supp`, where diam is the diameter of
    /// `supp x ∪ {0}`. The `#supp` term counts toggles.
    fn length_bounds(&self, g: &LamplighterElement) -> Result<LengthBounds> {
        let (lo, hi) = g.support_hull();
        let diam = (hi - lo) as u64;
        let j = g.cursor.unsigned_abs();
        Ok(LengthBounds::exact(diam.max(j), 2 * diam + j + g.lamps.len() as u64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l2() -> Lamplighter {
        Lamplighter::new(2)
    }

    #[test]
    fn semidirect_law() {
        let g = l2();
        let d0 = g.element(vec![(0, 1)], 0);
        let t = g.element(vec![], 1);
        assert_eq!(g.mul(&d0, &t), g.element(vec![(0, 1)], 1));
        assert_eq!(g.mul(&t, &d0), g.element(vec![(1, 1)], 1));
    }

    #[test]
    fn inverse_shifts_support() {
        let g = Lamplighter::new(3);
        let x = g.element(vec![(0, 1)], 1);
        let y = g.inv(&x);
        assert_eq!(y, g.element(vec![(-1, 2)], -1));
        assert_eq!(g.mul(&x, &y), g.identity());
    }

    #[test]
    fn closed_form_lengths() {
        let g = l2();
        assert_eq!(g.word_length_closed_form(&g.element(vec![(0, 1), (1, 1)], 0)), Some(4));
        assert_eq!(g.word_length_closed_form(&g.element(vec![(5, 1)], 0)), Some(11));
        assert_eq!(g.word_length_closed_form(&g.element(vec![(3, 1)], -2)), Some(9));
        assert_eq!(g.word_length_closed_form(&g.identity()), Some(0));
    }

    #[test]
    fn normalization_drops_zero_lamps() {
        let g = l2();
        let x = g.element(vec![(2, 1), (2, 1), (-1, 3)], 0);
        assert_eq!(x.lamps, vec![(-1, 1)]);
    }

    #[test]
    fn generator_pairing() {
        let g = Lamplighter::new(4);
        let labels: Vec<_> = g.generators().iter().map(|s| (s.label.as_str(), g.generators()[s.inverse].label.as_str())).collect();
        assert!(labels.contains(&("a1", "a3")));
        assert!(labels.contains(&("a2", "a2")));
        assert!(labels.contains(&("t", "T")));
    }

    #[test]
    fn parse_rejects_malformed() {
        let g = l2();
        assert!(g.parse_elem("0:1").is_err());
        assert!(g.parse_elem("0:2;0").is_err());
        assert!(g.parse_elem("1:1,0:1;0").is_err());
        assert_eq!(g.parse_elem(";3").unwrap(), g.element(vec![], 3));
    }
}
