//! Builders shared by the command line, the examples and the tests: the
//! lamplighter domain, the lattice target `ℋ'_n` and the coupling between them.

use std::sync::Arc;

use num_rational::BigRational;
use serde::Serialize;

use crate::coupling::{sol_coupling, CouplingMap};
use crate::error::Result;
use crate::geometry::{enlarge, sol_box_core, EigenData, SolBoxParams};
use crate::graph::{folner_lamplighter, FolnerGraph, DEFAULT_VERTEX_CAP};
use crate::group::{Lamplighter, Matrix2, SolLattice};
use crate::quadratic::integer;

/// Parameters of the lamplighter/SOL pair.
#[derive(Clone, Debug)]
pub struct SolSetup {
    pub k: u32,
    pub eigen: EigenData,
    pub lattice: Arc<SolLattice>,
    pub t: BigRational,
}

impl SolSetup {
    pub fn new(k: u32, a: Matrix2, t: BigRational) -> Result<Self> {
        Ok(SolSetup { k, eigen: EigenData::new(a, k)?, lattice: Arc::new(SolLattice::new(a)?), t })
    }

    /// Default thickening `C` of `ℋ_n`.
    pub fn default_thickening(&self) -> BigRational {
        integer(self.eigen.image_thickening(&self.t))
    }

    pub fn domain(&self, n: u32) -> Result<Arc<FolnerGraph<Lamplighter>>> {
        Ok(Arc::new(folner_lamplighter(self.k, n, DEFAULT_VERTEX_CAP)?))
    }

    /// `ℋ'_n` as an induced graph, together with `#ℋ_n`.
    pub fn target(&self, n: u32, thickening: &BigRational, enlargement: u32) -> Result<SolTarget> {
        let p = SolBoxParams {
            t: self.t.clone(),
            n,
            thickening: thickening.clone(),
            enlargement,
            cap: DEFAULT_VERTEX_CAP,
        };
        let core = sol_box_core(&self.eigen, &self.lattice, &p)?;
        let core_len = core.len();
        let verts = if enlargement == 0 { core } else { enlarge(&self.lattice, &core, enlargement)? };
        let mut g = FolnerGraph::induced(self.lattice.clone(), n as i64, verts);
        g.set_meta("thickening", thickening);
        g.set_meta("enlargement", enlargement);
        g.set_meta("t", &self.t);
        Ok(SolTarget { core_len, graph: Arc::new(g) })
    }

    /// The coupling into the lattice group.
    pub fn coupling(&self, domain: Arc<FolnerGraph<Lamplighter>>) -> Result<CouplingMap<Lamplighter, SolLattice>> {
        sol_coupling(domain, &self.t, &self.eigen, self.lattice.clone())
    }
}

#[derive(Clone)]
pub struct SolTarget {
    pub core_len: usize,
    pub graph: Arc<FolnerGraph<SolLattice>>,
}

/// Sizes of one scale of the pair.
#[derive(Clone, Debug, Serialize)]
pub struct ScaleSummary {
    pub n: u32,
    pub domain: usize,
    pub core: usize,
    pub target: usize,
    pub image: usize,
    pub multi_fibers: usize,
    pub max_fiber: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::rational;

    #[test]
    fn image_lies_in_the_target() {
        let s = SolSetup::new(2, [[2, 1], [1, 1]], rational(1, 4)).unwrap();
        for n in 1..=3 {
            let d = s.domain(n).unwrap();
            let tg = s.target(n, &s.default_thickening(), 1).unwrap();
            let m = s.coupling(d).unwrap();
            assert!(m.values().iter().all(|v| tg.graph.index_of(v).is_some()), "n = {n}");
            assert!(tg.core_len <= tg.graph.len());
        }
    }
}
