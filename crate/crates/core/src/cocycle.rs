//! The almost-cocycle `T_n`, the relation sets `𝒞_n(g, g')`, checks on the
//! fiber indexing `ρ_n` and cylinder-set measures.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::coupling::{Codomain, CouplingMap};
use crate::error::{Error, Result};
use crate::graph::{FolnerGraph, GoodSet, GraphKind, NONE};
use crate::group::MarkedGroup;
use crate::metric::{bfs_ball, Ball, Bounded, DEFAULT_BALL_CAP};

/// `count / total` with exact integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Fraction {
    pub count: u64,
    pub total: u64,
}

impl Fraction {
    pub fn new(count: u64, total: u64) -> Self {
        Fraction { count, total }
    }

    pub fn value(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count as f64 / self.total as f64
        }
    }

    pub fn is_one(&self) -> bool {
        self.count == self.total
    }
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.count, self.total)
    }
}

/// A ball of the source group together with the good sets it determines.
pub struct DomainContext<G: MarkedGroup> {
    pub ball: Arc<Ball<G::Elem>>,
    /// `good[r]` is `𝒢^{(r)}`, `r = 0..=radius`.
    pub good: Vec<GoodSet>,
}

impl<G: MarkedGroup> DomainContext<G> {
    pub fn new(graph: &FolnerGraph<G>, radius: u32) -> Result<Self> {
        let ball = Arc::new(bfs_ball(graph.group().as_ref(), radius, DEFAULT_BALL_CAP)?);
        let good = (0..=radius).map(|r| graph.good_set(&ball, r)).collect();
        Ok(DomainContext { ball, good })
    }

    pub fn radius(&self) -> u32 {
        self.ball.radius()
    }

    /// `|g|`, which must be within the ball.
    pub fn length(&self, g: &G::Elem) -> Result<u32> {
        self.ball
            .distance(g)
            .ok_or_else(|| Error::Invalid(format!("{g} lies outside the ball of radius {}", self.radius())))
    }

    pub fn is_good(&self, x: u32, r: u32) -> bool {
        self.good[r as usize].contains(x)
    }
}

/// `T_n(g, x)`: a target element, or `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Transfer<E> {
    Finite(E),
    Infinite,
}

impl<E> Transfer<E> {
    pub fn finite(self) -> Option<E> {
        match self {
            Transfer::Finite(e) => Some(e),
            Transfer::Infinite => None,
        }
    }
}

/// Settings for transfers into a graph codomain.
pub struct TargetContext<H: MarkedGroup> {
    ball: Arc<Ball<H::Elem>>,
}

impl<H: MarkedGroup> TargetContext<H> {
    /// Target distances are searched up to `cap`.
    pub fn new<G: MarkedGroup>(map: &CouplingMap<G, H>, cap: u32) -> Result<Self> {
        Ok(TargetContext { ball: map.target_cache().ball_at_least(cap)? })
    }

    pub fn cap(&self) -> u32 {
        self.ball.radius()
    }
}

/// `h` with `u(xg) = u(x) h`, recovered inside the target graph: `r = d(y, y')`
/// is found by search, `y` must be good at radius `r`, and `h` is read off the
/// labeled ball at `y`.
fn graph_transfer<H: MarkedGroup>(
    graph: &FolnerGraph<H>,
    tctx: &TargetContext<H>,
    y: u32,
    y2: u32,
) -> Transfer<H::Elem> {
    let r = match graph.intrinsic_distance(y, y2, tctx.cap()) {
        Bounded::Exact(r) => r,
        Bounded::Exceeds(_) => return Transfer::Infinite,
    };
    let ball = &tctx.ball;
    let end = ball.count_within(r);
    let mut phi = Vec::with_capacity(end);
    phi.push(y);
    for i in 1..end {
        let (p, s) = ball.parent(i).unwrap();
        let x = phi[p];
        phi.push(if x == NONE { NONE } else { graph.edge(s, x).unwrap_or(NONE) });
    }
    let good = match graph.kind() {
        GraphKind::Induced => !phi.contains(&NONE),
        GraphKind::General => graph.ball_isomorphic(y, &ball.truncate(r)),
    };
    if !good {
        return Transfer::Infinite;
    }
    match phi.iter().position(|&z| z == y2) {
        Some(i) => Transfer::Finite(ball.element(i).clone()),
        None => Transfer::Infinite,
    }
}

/// `T_n(g, x)`. Finite iff `x ∈ 𝒢^{(|g|)}` and, for a graph codomain, `u(x)` is
/// good at radius `d(u(x), u(xg))`.
pub fn transfer<G: MarkedGroup, H: MarkedGroup>(
    map: &CouplingMap<G, H>,
    ctx: &DomainContext<G>,
    tctx: Option<&TargetContext<H>>,
    g: &G::Elem,
    x: u32,
) -> Result<Transfer<H::Elem>> {
    let len = ctx.length(g)?;
    if !ctx.is_good(x, len) {
        return Ok(Transfer::Infinite);
    }
    let Some(xg) = map.domain().almost_action(x, g, &ctx.ball)? else {
        return Ok(Transfer::Infinite);
    };
    Ok(match map.codomain() {
        Codomain::Group => {
            let h = map.target();
            Transfer::Finite(h.mul(&h.inv(map.value(x)), map.value(xg)))
        }
        Codomain::Graph(graph) => {
            let tctx = tctx.ok_or(Error::Invalid("graph codomain needs a target context".into()))?;
            let (y, y2) = (map.target_vertex(x).unwrap(), map.target_vertex(xg).unwrap());
            graph_transfer(graph, tctx, y, y2)
        }
    })
}

/// Fraction of `x ∈ 𝒢_n` in `𝒞_n(g, g')`: `T(gg', x)`, `T(g, x)`, `T(g', xg)`
/// finite and `T(gg', x) = T(g, x) T(g', xg)`.
pub fn cocycle_defect<G: MarkedGroup, H: MarkedGroup>(
    map: &CouplingMap<G, H>,
    ctx: &DomainContext<G>,
    tctx: Option<&TargetContext<H>>,
    g: &G::Elem,
    g2: &G::Elem,
) -> Result<Fraction> {
    let group = map.domain().group();
    let gg = group.mul(g, g2);
    ctx.length(&gg)?;
    ctx.length(g2)?;
    let h = map.target();
    let count = (0..map.len() as u32)
        .into_par_iter()
        .map(|x| -> Result<u64> {
            let Transfer::Finite(t1) = transfer(map, ctx, tctx, &gg, x)? else { return Ok(0) };
            let Transfer::Finite(t2) = transfer(map, ctx, tctx, g, x)? else { return Ok(0) };
            let Some(xg) = map.domain().almost_action(x, g, &ctx.ball)? else { return Ok(0) };
            let Transfer::Finite(t3) = transfer(map, ctx, tctx, g2, xg)? else { return Ok(0) };
            Ok((t1 == h.mul(&t2, &t3)) as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(Fraction::new(count, map.len() as u64))
}

/// The three `ρ_n` statements, each as a fraction of all vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RhoChecks {
    /// `ρ(x) ≤ N`.
    pub bounded: Fraction,
    /// No `g ≠ e`, `|g| ≤ R`, with `u(xg) = u(x)` and `ρ(xg) = ρ(x)`.
    pub separated: Fraction,
    /// Some `g`, `|g| ≤ R`, with `u(xg) = u(x)` and `ρ(xg) = 0`.
    pub reaches_zero: Fraction,
}

pub fn rho_checks<G: MarkedGroup, H: MarkedGroup>(
    map: &CouplingMap<G, H>,
    ctx: &DomainContext<G>,
    bound: u32,
    radius: u32,
) -> Result<RhoChecks> {
    if radius > ctx.radius() {
        return Err(Error::Invalid(format!("radius {radius} exceeds the context ball")));
    }
    let dom = map.domain();
    let end = ctx.ball.count_within(radius);
    let (a, b, c) = (0..map.len() as u32)
        .into_par_iter()
        .map_init(Vec::new, |phi, x| {
            dom.ball_image(x, &ctx.ball, phi);
            let u = map.value(x);
            let mut separated = true;
            let mut zero = false;
            for (i, &y) in phi[..end].iter().enumerate() {
                if y == NONE || map.value(y) != u {
                    continue;
                }
                if i > 0 && map.rho(y) == map.rho(x) {
                    separated = false;
                }
                if map.rho(y) == 0 {
                    zero = true;
                }
            }
            ((map.rho(x) <= bound) as u64, separated as u64, zero as u64)
        })
        .reduce(|| (0, 0, 0), |p, q| (p.0 + q.0, p.1 + q.1, p.2 + q.2));
    let n = map.len() as u64;
    Ok(RhoChecks { bounded: Fraction::new(a, n), separated: Fraction::new(b, n), reaches_zero: Fraction::new(c, n) })
}

/// A cylinder `W_{𝔞,Σ}`: `Σ ∋ e` with prescribed `𝔞_H` and `𝔞_ℕ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CylinderPattern<EG, EH> {
    pub sigma: Vec<EG>,
    pub a_h: Vec<EH>,
    pub a_n: Vec<u32>,
}

/// Whether `x` satisfies `u(xg) = u(x) 𝔞_H(e)^{-1} 𝔞_H(g)` and `ρ(xg) = 𝔞_ℕ(g)`
/// for all `g ∈ Σ`; `x` must be good at `max |g|`.
fn in_cylinder<G: MarkedGroup, H: MarkedGroup>(
    map: &CouplingMap<G, H>,
    ctx: &DomainContext<G>,
    p: &CylinderPattern<G::Elem, H::Elem>,
    base: &H::Elem,
    x: u32,
) -> Result<bool> {
    let h = map.target();
    for ((g, ah), &an) in p.sigma.iter().zip(&p.a_h).zip(&p.a_n) {
        let Some(xg) = map.domain().almost_action(x, g, &ctx.ball)? else { return Ok(false) };
        if map.rho(xg) != an || *map.value(xg) != h.mul(&h.mul(map.value(x), base), ah) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_sigma<G: MarkedGroup>(ctx: &DomainContext<G>, group: &G, sigma: &[G::Elem]) -> Result<u32> {
    if !sigma.contains(&group.identity()) {
        return Err(Error::Invalid("Σ must contain the identity".into()));
    }
    sigma.iter().map(|g| ctx.length(g)).try_fold(0, |m, l| l.map(|l| m.max(l)))
}

/// Fraction of all vertices lying in `𝒢^{(max|g|)}` and in the cylinder.
pub fn cylinder_measure<G: MarkedGroup, H: MarkedGroup>(
    map: &CouplingMap<G, H>,
    ctx: &DomainContext<G>,
    p: &CylinderPattern<G::Elem, H::Elem>,
) -> Result<Fraction> {
    let group = map.domain().group();
    if p.sigma.len() != p.a_h.len() || p.sigma.len() != p.a_n.len() {
        return Err(Error::Invalid("pattern arrays differ in length".into()));
    }
    let r = check_sigma(ctx, group.as_ref(), &p.sigma)?;
    let e_pos = p.sigma.iter().position(|g| *g == group.identity()).unwrap();
    let h = map.target();
    let base = h.inv(&p.a_h[e_pos]);
    let count = (0..map.len() as u32)
        .into_par_iter()
        .filter(|&x| ctx.is_good(x, r))
        .map(|x| in_cylinder(map, ctx, p, &base, x).map(|b| b as u64))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(Fraction::new(count, map.len() as u64))
}

/// Every pattern observed on good vertices, in canonical form
/// `𝔞_H(e) = e`, with its vertex count.
pub fn observed_patterns<G: MarkedGroup, H: MarkedGroup>(
    map: &CouplingMap<G, H>,
    ctx: &DomainContext<G>,
    sigma: &[G::Elem],
) -> Result<BTreeMap<CylinderPattern<G::Elem, H::Elem>, u64>> {
    let group = map.domain().group();
    let r = check_sigma(ctx, group.as_ref(), sigma)?;
    let h = map.target();
    let mut out = BTreeMap::new();
    for x in 0..map.len() as u32 {
        if !ctx.is_good(x, r) {
            continue;
        }
        let mut a_h = Vec::with_capacity(sigma.len());
        let mut a_n = Vec::with_capacity(sigma.len());
        let ux_inv = h.inv(map.value(x));
        for g in sigma {
            let xg = map.domain().almost_action(x, g, &ctx.ball)?.expect("good vertex");
            a_h.push(h.mul(&ux_inv, map.value(xg)));
            a_n.push(map.rho(xg));
        }
        *out.entry(CylinderPattern { sigma: sigma.to_vec(), a_h, a_n }).or_insert(0) += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::sol_coupling;
    use crate::geometry::EigenData;
    use crate::graph::{cyclic_quotient, folner_lamplighter};
    use crate::group::{Integers, Lamplighter, SolLattice};
    use crate::quadratic::rational;

    fn lamplighter_identity(n: u32) -> (CouplingMap<Lamplighter, Lamplighter>, DomainContext<Lamplighter>) {
        let f = Arc::new(folner_lamplighter(2, n, 1 << 20).unwrap());
        let ctx = DomainContext::new(&f, 4).unwrap();
        (CouplingMap::identity(f), ctx)
    }

    #[test]
    fn identity_transfer_returns_the_element() {
        let (m, ctx) = lamplighter_identity(3);
        let tctx = TargetContext::new(&m, 4).unwrap();
        let group = m.domain().group().clone();
        for (g, len) in ctx.ball.iter().take(40) {
            for x in 0..m.len() as u32 {
                let t = transfer(&m, &ctx, Some(&tctx), g, x).unwrap();
                if ctx.is_good(x, len) {
                    assert_eq!(t, Transfer::Finite(g.clone()));
                } else {
                    assert_eq!(t, Transfer::Infinite);
                }
            }
        }
        let e = group.identity();
        assert!((0..m.len() as u32)
            .all(|x| transfer(&m, &ctx, Some(&tctx), &e, x).unwrap() == Transfer::Finite(e.clone())));
    }

    #[test]
    fn trivial_defect_is_one() {
        let (m, ctx) = lamplighter_identity(2);
        let tctx = TargetContext::new(&m, 4).unwrap();
        let e = m.domain().group().identity();
        assert!(cocycle_defect(&m, &ctx, Some(&tctx), &e, &e).unwrap().is_one());
    }

    #[test]
    fn graph_and_group_transfers_agree() {
        let f = Arc::new(folner_lamplighter(2, 3, 1 << 20).unwrap());
        let e = EigenData::new([[2, 1], [1, 1]], 2).unwrap();
        let l = Arc::new(SolLattice::new([[2, 1], [1, 1]]).unwrap());
        let t = rational(1, 4);
        let group_map = sol_coupling(f.clone(), &t, &e, l.clone()).unwrap();
        let verts: Vec<_> = {
            let mut v: Vec<_> = group_map.values().to_vec();
            let ball = bfs_ball(l.as_ref(), 5, 1 << 20).unwrap();
            let base = v.clone();
            for y in &base {
                for (w, _) in ball.iter() {
                    v.push(l.mul(y, w));
                }
            }
            v
        };
        let graph = Arc::new(FolnerGraph::induced(l.clone(), 3, verts));
        let graph_map = sol_coupling(f.clone(), &t, &e, l).unwrap().with_codomain(graph).unwrap();
        let ctx = DomainContext::new(&f, 2).unwrap();
        let tctx = TargetContext::new(&graph_map, 5).unwrap();
        let mut compared = 0;
        for (g, _) in ctx.ball.iter() {
            for x in 0..f.len() as u32 {
                let a = transfer(&group_map, &ctx, None, g, x).unwrap();
                let b = transfer(&graph_map, &ctx, Some(&tctx), g, x).unwrap();
                if let Transfer::Finite(h) = b {
                    assert_eq!(a, Transfer::Finite(h));
                    compared += 1;
                }
            }
        }
        assert!(compared > 100);
    }

    #[test]
    fn rho_checks_on_injective_and_constant_maps() {
        let (m, ctx) = lamplighter_identity(2);
        let r = rho_checks(&m, &ctx, 0, 0).unwrap();
        assert!(r.bounded.is_one() && r.separated.is_one() && r.reaches_zero.is_one());
        let f = Arc::new(cyclic_quotient(6));
        let c = CouplingMap::new("const", f.clone(), Arc::new(Integers::new()), vec![0; 6]).unwrap();
        let ctx = DomainContext::new(&f, 3).unwrap();
        assert!(rho_checks(&c, &ctx, 5, 3).unwrap().reaches_zero.is_one());
        assert_eq!(rho_checks(&c, &ctx, 5, 1).unwrap().reaches_zero, Fraction::new(3, 6));
        assert_eq!(rho_checks(&c, &ctx, 2, 1).unwrap().bounded, Fraction::new(3, 6));
    }

    #[test]
    fn cylinders_on_injective_map() {
        let (m, ctx) = lamplighter_identity(2);
        let e = m.domain().group().identity();
        let p0 = CylinderPattern { sigma: vec![e.clone()], a_h: vec![e.clone()], a_n: vec![0] };
        assert!(cylinder_measure(&m, &ctx, &p0).unwrap().is_one());
        let p1 = CylinderPattern { a_n: vec![1], ..p0 };
        assert_eq!(cylinder_measure(&m, &ctx, &p1).unwrap().count, 0);
    }

    #[test]
    fn observed_patterns_partition_the_good_set() {
        let f = Arc::new(folner_lamplighter(2, 2, 1 << 20).unwrap());
        let e = EigenData::new([[2, 1], [1, 1]], 2).unwrap();
        let l = Arc::new(SolLattice::new([[2, 1], [1, 1]]).unwrap());
        let m = sol_coupling(f.clone(), &rational(1, 4), &e, l).unwrap();
        let ctx = DomainContext::new(&f, 1).unwrap();
        let g = f.group();
        for s in g.generators() {
            let sigma = vec![g.identity(), s.element.clone()];
            let pats = observed_patterns(&m, &ctx, &sigma).unwrap();
            let total: u64 = pats.keys().map(|p| cylinder_measure(&m, &ctx, p).unwrap().count).sum();
            assert_eq!(total as usize, ctx.good[1].count());
            assert_eq!(pats.values().sum::<u64>() as usize, ctx.good[1].count());
        }
    }
}
