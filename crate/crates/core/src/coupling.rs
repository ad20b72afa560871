//! Coupling maps `u_n : 𝒢_n → H` with fiber indexing `ρ_n`.

use std::collections::VecDeque;
use std::io::{BufRead, Write};
use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::geometry::{digit_map, tile_locate, EigenData};
use crate::graph::{FolnerGraph, Lines, NONE};
use crate::group::{Lamplighter, MarkedGroup, SolLattice};
use crate::metric::{BallCache, Bounded};
use num_rational::BigRational;

/// Where target distances are measured.
#[derive(Clone, Debug)]
pub enum Codomain<H: MarkedGroup> {
    /// Word metric of `H`.
    Group,
    /// Intrinsic metric of a finite graph over `H` containing every value.
    Graph(Arc<FolnerGraph<H>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InjectivityReport {
    pub image: usize,
    /// Fibers with at least two points.
    pub multi_fibers: usize,
    pub max_fiber: usize,
}

pub struct CouplingMap<G: MarkedGroup, H: MarkedGroup> {
    pub id: String,
    domain: Arc<FolnerGraph<G>>,
    target: Arc<H>,
    codomain: Codomain<H>,
    values: Vec<H::Elem>,
    rho: Vec<u32>,
    fibers: FxHashMap<H::Elem, Vec<u32>>,
    target_index: Vec<u32>,
    cache: BallCache<H>,
}

impl<G: MarkedGroup, H: MarkedGroup> CouplingMap<G, H> {
    /// Tabulated map; `ρ` ranks each fiber by canonical order of the domain
    /// elements.
    pub fn new(id: impl Into<String>, domain: Arc<FolnerGraph<G>>, target: Arc<H>, values: Vec<H::Elem>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::Invalid(format!("{} values for {} vertices", values.len(), domain.len())));
        }
        let mut fibers: FxHashMap<H::Elem, Vec<u32>> = FxHashMap::default();
        for (v, h) in values.iter().enumerate() {
            fibers.entry(h.clone()).or_default().push(v as u32);
        }
        let mut rho = vec![0u32; values.len()];
        for members in fibers.values_mut() {
            members.sort_by(|&a, &b| domain.vertex(a).cmp(domain.vertex(b)));
            for (i, &v) in members.iter().enumerate() {
                rho[v as usize] = i as u32;
            }
        }
        let cache = BallCache::new(target.clone());
        Ok(CouplingMap { id: id.into(), domain, target, codomain: Codomain::Group, values, rho, fibers, target_index: Vec::new(), cache })
    }

    /// Measures target distances inside `graph`, which must contain every value.
    pub fn with_codomain(mut self, graph: Arc<FolnerGraph<H>>) -> Result<Self> {
        let mut idx = Vec::with_capacity(self.values.len());
        for (v, h) in self.values.iter().enumerate() {
            match graph.index_of(h) {
                Some(i) => idx.push(i),
                None => {
                    return Err(Error::Invalid(format!(
                        "value {h} of vertex {v} ({}) is not a vertex of the target graph",
                        self.domain.vertex(v as u32)
                    )))
                }
            }
        }
        self.target_index = idx;
        self.codomain = Codomain::Graph(graph);
        Ok(self)
    }

    pub fn domain(&self) -> &Arc<FolnerGraph<G>> {
        &self.domain
    }

    pub fn target(&self) -> &Arc<H> {
        &self.target
    }

    pub fn codomain(&self) -> &Codomain<H> {
        &self.codomain
    }

    pub fn target_graph(&self) -> Option<&Arc<FolnerGraph<H>>> {
        match &self.codomain {
            Codomain::Graph(g) => Some(g),
            Codomain::Group => None,
        }
    }

    pub fn target_cache(&self) -> &BallCache<H> {
        &self.cache
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, v: u32) -> &H::Elem {
        &self.values[v as usize]
    }

    pub fn values(&self) -> &[H::Elem] {
        &self.values
    }

    pub fn rho(&self, v: u32) -> u32 {
        self.rho[v as usize]
    }

    /// Domain vertices mapping to `h`, in `ρ` order.
    pub fn fiber(&self, h: &H::Elem) -> &[u32] {
        self.fibers.get(h).map_or(&[], |f| f.as_slice())
    }

    pub fn fibers(&self) -> impl Iterator<Item = (&H::Elem, &[u32])> {
        self.fibers.iter().map(|(h, f)| (h, f.as_slice()))
    }

    pub fn image_len(&self) -> usize {
        self.fibers.len()
    }

    /// Target-graph vertex of `u(v)`, when the codomain is a graph.
    pub fn target_vertex(&self, v: u32) -> Option<u32> {
        self.target_index.get(v as usize).copied()
    }

    pub fn injectivity(&self) -> InjectivityReport {
        let sizes = self.fibers.values().map(Vec::len);
        InjectivityReport {
            image: self.fibers.len(),
            multi_fibers: sizes.clone().filter(|&s| s >= 2).count(),
            max_fiber: sizes.max().unwrap_or(0),
        }
    }

    /// Target distance `d(a, b)`, capped.
    pub fn target_distance(&self, a: &H::Elem, b: &H::Elem, cap: u32) -> Result<Bounded> {
        match &self.codomain {
            Codomain::Group => self.cache.distance(a, b, cap),
            Codomain::Graph(g) => {
                let ia = g.index_of(a).ok_or_else(|| Error::Invalid(format!("{a} is not a target vertex")))?;
                let ib = g.index_of(b).ok_or_else(|| Error::Invalid(format!("{b} is not a target vertex")))?;
                Ok(g.intrinsic_distance(ia, ib, cap))
            }
        }
    }

    /// `d(y, u(𝒢_n))`, capped.
    pub fn nearest_image_distance(&self, y: &H::Elem, cap: u32) -> Result<Bounded> {
        if self.fibers.is_empty() {
            return Err(Error::Empty("image"));
        }
        if self.fibers.contains_key(y) {
            return Ok(Bounded::Exact(0));
        }
        match &self.codomain {
            Codomain::Group => {
                let ball = self.cache.ball_at_least(cap)?;
                for (w, d) in ball.iter() {
                    if d > cap {
                        break;
                    }
                    if self.fibers.contains_key(&self.target.mul(y, w)) {
                        return Ok(Bounded::Exact(d));
                    }
                }
                Ok(Bounded::Exceeds(cap))
            }
            Codomain::Graph(g) => {
                let start = g.index_of(y).ok_or_else(|| Error::Invalid(format!("{y} is not a target vertex")))?;
                let mut dist = FxHashMap::default();
                dist.insert(start, 0u32);
                let mut queue = VecDeque::from([start]);
                while let Some(x) = queue.pop_front() {
                    let d = dist[&x];
                    if self.fibers.contains_key(g.vertex(x)) {
                        return Ok(Bounded::Exact(d));
                    }
                    if d == cap {
                        continue;
                    }
                    for s in 0..g.group().generators().len() {
                        let z = g.edge(s, x).unwrap_or(NONE);
                        if z != NONE && !dist.contains_key(&z) {
                            dist.insert(z, d + 1);
                            queue.push_back(z);
                        }
                    }
                }
                Ok(Bounded::Exceeds(cap))
            }
        }
    }

    /// Distance to the image for every target-graph vertex, by one
    /// multi-source search; `None` for vertices not reached.
    pub fn image_distances(&self) -> Result<Vec<Option<u32>>> {
        let g = self.target_graph().ok_or(Error::Invalid("image distances need a target graph".into()))?;
        let mut dist = vec![None; g.len()];
        let mut queue = VecDeque::new();
        for &i in &self.target_index {
            if dist[i as usize].is_none() {
                dist[i as usize] = Some(0);
                queue.push_back(i);
            }
        }
        let gens = g.group().generators().len();
        while let Some(x) = queue.pop_front() {
            let d = dist[x as usize].unwrap();
            for s in 0..gens {
                if let Some(z) = g.edge(s, x) {
                    if dist[z as usize].is_none() {
                        dist[z as usize] = Some(d + 1);
                        queue.push_back(z);
                    }
                }
            }
        }
        Ok(dist)
    }

    /// One record per domain vertex: domain element, value, `ρ`.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "sofic-me coupling 1")?;
        writeln!(w, "id {}", self.id)?;
        writeln!(w, "domain {}", self.domain.group().descriptor())?;
        writeln!(w, "target {}", self.target.descriptor())?;
        writeln!(w, "vertices {}", self.len())?;
        for v in 0..self.len() as u32 {
            writeln!(w, "x {} {} {}", self.domain.vertex(v), self.value(v), self.rho(v))?;
        }
        writeln!(w, "end")?;
        Ok(())
    }

    /// Reads a map written by `write` over the same domain graph. Stored ranks
    /// are checked against the recomputed ones.
    pub fn read<R: BufRead>(domain: Arc<FolnerGraph<G>>, target: Arc<H>, r: R) -> Result<Self> {
        let mut lines = Lines::new(r);
        lines.expect_exact("sofic-me coupling 1")?;
        let id = lines.field("id")?;
        let d = lines.field("domain")?;
        if d != domain.group().descriptor() {
            return Err(Error::parse(lines.no, format!("domain `{d}` does not match")));
        }
        let t = lines.field("target")?;
        if t != target.descriptor() {
            return Err(Error::parse(lines.no, format!("target `{t}` does not match")));
        }
        let n: usize = lines.parsed("vertices")?;
        if n != domain.len() {
            return Err(Error::parse(lines.no, format!("{n} records for a domain of {} vertices", domain.len())));
        }
        let mut values = Vec::with_capacity(n);
        let mut ranks = Vec::with_capacity(n);
        for v in 0..n as u32 {
            let l = lines.field("x")?;
            let parts: Vec<&str> = l.split(' ').collect();
            if parts.len() != 3 {
                return Err(Error::parse(lines.no, "expected `x <domain> <value> <rho>`"));
            }
            let x = domain.group().parse_elem(parts[0]).map_err(|e| Error::parse(lines.no, e.to_string()))?;
            if &x != domain.vertex(v) {
                return Err(Error::parse(lines.no, format!("record {v} names {x}, expected {}", domain.vertex(v))));
            }
            values.push(target.parse_elem(parts[1]).map_err(|e| Error::parse(lines.no, e.to_string()))?);
            ranks.push(parts[2].parse::<u32>().map_err(|_| Error::parse(lines.no, "bad rank"))?);
        }
        lines.expect_exact("end")?;
        let map = CouplingMap::new(id, domain, target, values)?;
        if map.rho != ranks {
            return Err(Error::parse(lines.no, "stored ranks disagree with canonical fiber order"));
        }
        Ok(map)
    }
}

impl<G: MarkedGroup> CouplingMap<G, G> {
    /// `u = id` with the domain graph as codomain.
    pub fn identity(domain: Arc<FolnerGraph<G>>) -> Self {
        let values = domain.vertices().to_vec();
        let group = domain.group().clone();
        CouplingMap::new("identity", domain.clone(), group, values)
            .and_then(|m| m.with_codomain(domain))
            .expect("identity map is well formed")
    }
}

/// The coupling `u = tile_locate ∘ 𝔳` from `F_n^ℒ` into `Γ_t`.
pub fn sol_coupling(
    domain: Arc<FolnerGraph<Lamplighter>>,
    t: &BigRational,
    e: &EigenData,
    lattice: Arc<SolLattice>,
) -> Result<CouplingMap<Lamplighter, SolLattice>> {
    let k = domain.group().k();
    if k != e.k {
        return Err(Error::Invalid(format!("domain has k = {k}, eigen data k = {}", e.k)));
    }
    if lattice.matrix() != e.matrix() {
        return Err(Error::Invalid("lattice and eigen data use different matrices".into()));
    }
    let values: Vec<_> =
        domain.vertices().par_iter().map(|g| tile_locate(&digit_map(g, k), t, e, &lattice)).collect();
    CouplingMap::new("sol", domain, lattice, values)
}
