//! Marked groups: a group law, a symmetric labeled generating set, and a
//! canonical total order on normal forms.

use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};

mod bs;
mod integers;
pub(crate) mod lamplighter;
mod length;
mod sol_lattice;
mod sol_real;

pub use bs::{BaumslagSolitar, BsElement};
pub use integers::Integers;
pub use lamplighter::{Lamplighter, LamplighterElement};
pub use length::{Length, LengthBounds, LogTerm};
pub use sol_lattice::{EigenBasis, Matrix2, SolLattice, SolLatticeElement};
pub use sol_real::{SolReal, SolRealPoint};

/// A generator with a stable label; `inverse` is the index of its inverse in the
/// same list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator<E> {
    pub label: String,
    pub element: E,
    pub inverse: usize,
}

pub trait MarkedGroup: Send + Sync {
    /// Normal form. `Ord` is the canonical order used for every tie-break.
    type Elem: Clone + Eq + Hash + Ord + fmt::Debug + fmt::Display + Send + Sync;

    fn identity(&self) -> Self::Elem;

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    /// Finite symmetric generating set. Empty for groups that are only used
    /// as metric spaces (SOL over the reals).
    fn generators(&self) -> &[Generator<Self::Elem>];

    /// Short text naming the group and its parameters, e.g. `lamplighter k=2`.
    fn descriptor(&self) -> String;

    fn parse_elem(&self, s: &str) -> Result<Self::Elem>;

    /// Word length by formula, where one exists.
    fn word_length_closed_form(&self, _g: &Self::Elem) -> Option<u64> {
        None
    }

    /// Two-sided estimate of the word length.
    fn length_bounds(&self, _g: &Self::Elem) -> Result<LengthBounds> {
        Err(Error::UnsupportedGroup(self.descriptor()))
    }

    fn generator_index(&self, label: &str) -> Option<usize> {
        self.generators().iter().position(|g| g.label == label)
    }

    /// Product of a word given as generator indices.
    fn eval_word(&self, word: &[usize]) -> Self::Elem {
        let gens = self.generators();
        word.iter().fold(self.identity(), |acc, &i| self.mul(&acc, &gens[i].element))
    }

    /// Parses a whitespace- or `*`-separated word of generator labels; `e` or
    /// an empty string is the identity.
    fn parse_word(&self, s: &str) -> Result<Vec<usize>> {
        let mut word = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
            if tok == "e" {
                continue;
            }
            let i = self
                .generator_index(tok)
                .ok_or_else(|| Error::Invalid(format!("unknown generator `{tok}` in {}", self.descriptor())))?;
            word.push(i);
        }
        Ok(word)
    }
}

/// Pairs each generator with its inverse.
///
/// Panics if the list is not closed under inversion.
pub fn pair_generators<E, F>(list: Vec<(String, E)>, inv: F) -> Vec<Generator<E>>
where
    E: Clone + Eq,
    F: Fn(&E) -> E,
{
    let elems: Vec<E> = list.iter().map(|(_, e)| e.clone()).collect();
    list.into_iter()
        .map(|(label, element)| {
            let target = inv(&element);
            let inverse = elems
                .iter()
                .position(|e| *e == target)
                .unwrap_or_else(|| panic!("generating set is not symmetric: `{label}` has no inverse"));
            Generator { label, element, inverse }
        })
        .collect()
}

/// Parses `p` or `p/q` into an `i128` fraction.
pub(crate) fn parse_fraction(s: &str) -> Result<(i128, i128)> {
    let bad = || Error::Invalid(format!("bad fraction `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => Ok((p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?)),
        None => Ok((s.trim().parse().map_err(|_| bad())?, 1)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_axioms<G: MarkedGroup>(g: &G, a: &G::Elem, b: &G::Elem, c: &G::Elem) {
        let e = g.identity();
        assert_eq!(g.mul(&g.mul(a, b), c), g.mul(a, &g.mul(b, c)));
        assert_eq!(g.mul(a, &e), *a);
        assert_eq!(g.mul(&e, a), *a);
        assert_eq!(g.mul(a, &g.inv(a)), e);
        assert_eq!(g.mul(&g.inv(a), a), e);
    }

    fn words(n_gens: usize) -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(0..n_gens, 0..12)
    }

    proptest! {
        #[test]
        fn lamplighter_axioms(k in 2u32..5, w1 in words(8), w2 in words(8), w3 in words(8)) {
            let g = Lamplighter::new(k);
            let n = g.generators().len();
            let el = |w: &[usize]| g.eval_word(&w.iter().map(|i| i % n).collect::<Vec<_>>());
            check_axioms(&g, &el(&w1), &el(&w2), &el(&w3));
        }

        #[test]
        fn bs_axioms(k in 2u32..5, w1 in words(4), w2 in words(4), w3 in words(4)) {
            let g = BaumslagSolitar::new(k);
            check_axioms(&g, &g.eval_word(&w1), &g.eval_word(&w2), &g.eval_word(&w3));
        }

        #[test]
        fn sol_lattice_axioms(w1 in words(6), w2 in words(6), w3 in words(6)) {
            let g = SolLattice::new([[2, 1], [1, 1]]).unwrap();
            check_axioms(&g, &g.eval_word(&w1), &g.eval_word(&w2), &g.eval_word(&w3));
        }

        #[test]
        fn sol_real_axioms(
            pts in prop::collection::vec((-20i64..20, 1i64..9, -20i64..20, 1i64..9, -4i64..4), 3)
        ) {
            let g = SolReal::new(2);
            let el: Vec<SolRealPoint> = pts
                .iter()
                .map(|&(a, b, c, d, s)| SolRealPoint::new(
                    crate::quadratic::rational(a, b),
                    crate::quadratic::rational(c, d),
                    s,
                ))
                .collect();
            check_axioms(&g, &el[0], &el[1], &el[2]);
        }

        #[test]
        fn elements_round_trip_through_text(w in words(8)) {
            let g = Lamplighter::new(3);
            let x = g.eval_word(&w.iter().map(|i| i % g.generators().len()).collect::<Vec<_>>());
            prop_assert_eq!(g.parse_elem(&x.to_string()).unwrap(), x);
            let b = BaumslagSolitar::new(3);
            let y = b.eval_word(&w.iter().map(|i| i % 4).collect::<Vec<_>>());
            prop_assert_eq!(b.parse_elem(&y.to_string()).unwrap(), y);
            let s = SolLattice::new([[2, 1], [1, 1]]).unwrap();
            let z = s.eval_word(&w.iter().map(|i| i % 6).collect::<Vec<_>>());
            prop_assert_eq!(s.parse_elem(&z.to_string()).unwrap(), z);
        }
    }

    #[test]
    #[should_panic(expected = "not symmetric")]
    fn asymmetric_generating_set_rejected() {
        let g = Integers::new();
        pair_generators(vec![("t".to_string(), 1i64)], |x| g.inv(x));
    }

    #[test]
    fn words_parse_by_label() {
        let g = Lamplighter::new(2);
        let w = g.parse_word("a1 t a1 T").unwrap();
        assert_eq!(g.eval_word(&w).to_string(), "0:1,1:1;0");
        assert!(g.parse_word("zz").is_err());
        assert!(g.parse_word("e").unwrap().is_empty());
    }
}
