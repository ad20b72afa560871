use crate::error::{Error, Result};

use super::{pair_generators, Generator, LengthBounds, MarkedGroup};

/// The integers with generators `±1`.
#[derive(Clone, Debug)]
pub struct Integers {
    gens: Vec<Generator<i64>>,
}

impl Integers {
    pub fn new() -> Self {
        let gens = pair_generators(vec![("t".into(), 1), ("T".into(), -1)], |x| -x);
        Integers { gens }
    }
}

impl Default for Integers {
    fn default() -> Self {
        Self::new()
    }
}

impl MarkedGroup for Integers {
    type Elem = i64;

    fn identity(&self) -> i64 {
        0
    }

    fn mul(&self, a: &i64, b: &i64) -> i64 {
        a + b
    }

    fn inv(&self, a: &i64) -> i64 {
        -a
    }

    fn generators(&self) -> &[Generator<i64>] {
        &self.gens
    }

    fn descriptor(&self) -> String {
        "integers".into()
    }

    fn parse_elem(&self, s: &str) -> Result<i64> {
        s.trim().parse().map_err(|_| Error::Invalid(format!("bad integer `{s}`")))
    }

    fn word_length_closed_form(&self, g: &i64) -> Option<u64> {
        Some(g.unsigned_abs())
    }

    fn length_bounds(&self, g: &i64) -> Result<LengthBounds> {
        Ok(LengthBounds::exact(g.unsigned_abs(), g.unsigned_abs()))
    }
}
