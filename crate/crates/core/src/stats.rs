//! Statistical coarse-geometry profiles, integrability sums, fundamental-domain
//! masses and CSV export.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::cocycle::{DomainContext, Fraction};
use crate::coupling::{Codomain, CouplingMap};
use crate::error::{Error, Result};
use crate::graph::DomainMetric;
use crate::group::MarkedGroup;
use crate::metric::{Ball, BallCache, Bounded};

/// Which side of a distance sandwich a profile was measured with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSide {
    Exact,
    Upper,
    Lower,
}

impl BoundSide {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundSide::Exact => "exact",
            BoundSide::Upper => "upper",
            BoundSide::Lower => "lower",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(BoundSide::Exact),
            "upper" => Ok(BoundSide::Upper),
            "lower" => Ok(BoundSide::Lower),
            _ => Err(Error::Invalid(format!("unknown bound side `{s}`"))),
        }
    }
}

/// Histogram of a distance-valued statistic.
///
/// `bins` plus `overflow` always sum to `denominator`; `overflow` holds the
/// samples whose value exceeded the search cap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub experiment_id: String,
    pub n: u32,
    pub map_id: String,
    pub probe: String,
    pub good_radius: Option<u32>,
    pub bound_side: BoundSide,
    pub bins: BTreeMap<u32, u64>,
    pub overflow: u64,
    pub denominator: u64,
}

impl Profile {
    pub fn new(experiment_id: impl Into<String>, n: u32, map_id: impl Into<String>, probe: impl Into<String>) -> Self {
        Profile {
            experiment_id: experiment_id.into(),
            n,
            map_id: map_id.into(),
            probe: probe.into(),
            good_radius: None,
            bound_side: BoundSide::Exact,
            bins: BTreeMap::new(),
            overflow: 0,
            denominator: 0,
        }
    }

    pub fn with_good_radius(mut self, r: u32) -> Self {
        self.good_radius = Some(r);
        self
    }

    pub fn with_side(mut self, side: BoundSide) -> Self {
        self.bound_side = side;
        self
    }

    /// An empty profile carrying the same metadata.
    pub fn empty_like(&self) -> Self {
        Profile { bins: BTreeMap::new(), overflow: 0, denominator: 0, ..self.clone() }
    }

    pub fn record(&mut self, value: Bounded) {
        self.record_n(value, 1);
    }

    pub fn record_n(&mut self, value: Bounded, times: u64) {
        match value {
            Bounded::Exact(r) => *self.bins.entry(r).or_insert(0) += times,
            Bounded::Exceeds(_) => self.overflow += times,
        }
        self.denominator += times;
    }

    /// Monoid merge; metadata must agree.
    pub fn merge(&mut self, other: &Profile) -> Result<()> {
        if (&self.experiment_id, self.n, &self.probe, self.bound_side)
            != (&other.experiment_id, other.n, &other.probe, other.bound_side)
        {
            return Err(Error::Invalid(format!(
                "cannot merge profile `{}` into `{}`",
                other.probe, self.probe
            )));
        }
        for (&r, &c) in &other.bins {
            *self.bins.entry(r).or_insert(0) += c;
        }
        self.overflow += other.overflow;
        self.denominator += other.denominator;
        Ok(())
    }

    /// Builds a profile from values computed in parallel.
    pub fn collect<I>(mut self, values: I) -> Self
    where
        I: ParallelIterator<Item = Bounded>,
    {
        let hist = values
            .fold(
                || (BTreeMap::<u32, u64>::new(), 0u64),
                |(mut b, o), v| match v {
                    Bounded::Exact(r) => {
                        *b.entry(r).or_insert(0) += 1;
                        (b, o)
                    }
                    Bounded::Exceeds(_) => (b, o + 1),
                },
            )
            .reduce(
                || (BTreeMap::new(), 0),
                |(mut a, oa), (b, ob)| {
                    for (r, c) in b {
                        *a.entry(r).or_insert(0) += c;
                    }
                    (a, oa + ob)
                },
            );
        for (r, c) in hist.0 {
            self.record_n(Bounded::Exact(r), c);
        }
        if hist.1 > 0 {
            self.record_n(Bounded::Exceeds(u32::MAX), hist.1);
        }
        self
    }

    pub fn is_consistent(&self) -> bool {
        self.bins.values().sum::<u64>() + self.overflow == self.denominator
    }

    pub fn count(&self, r: u32) -> u64 {
        self.bins.get(&r).copied().unwrap_or(0)
    }

    /// Largest recorded value, ignoring overflow.
    pub fn max(&self) -> Option<u32> {
        self.bins.keys().next_back().copied()
    }

    /// Samples with value `≥ r`, overflow included.
    pub fn tail(&self, r: u32) -> u64 {
        self.bins.range(r..).map(|(_, c)| c).sum::<u64>() + self.overflow
    }

    pub fn tail_fraction(&self, r: u32) -> Fraction {
        Fraction::new(self.tail(r), self.denominator)
    }

    /// Mean over the finite bins.
    pub fn mean(&self) -> f64 {
        let finite = self.denominator - self.overflow;
        if finite == 0 {
            return 0.0;
        }
        self.bins.iter().map(|(&r, &c)| r as f64 * c as f64).sum::<f64>() / finite as f64
    }
}

/// `φ(δ r)` for the weights of the integrability conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightKind {
    /// `x^p`, `p ≥ 0`.
    Power(BigRational),
    /// `e^x`.
    Exponential,
    /// `0` below the threshold, `∞` at or above it.
    LInfinity { threshold: BigRational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightFn {
    pub kind: WeightKind,
    pub delta: BigRational,
}

impl WeightFn {
    pub fn new(kind: WeightKind, delta: BigRational) -> Result<Self> {
        if !delta.is_positive() {
            return Err(Error::config("delta", "must be positive"));
        }
        if let WeightKind::Power(p) = &kind {
            if p.is_negative() {
                return Err(Error::config("weight", "power must be non-negative"));
            }
        }
        Ok(WeightFn { kind, delta })
    }

    /// Parses `power:p`, `exp` or `linf:T`.
    pub fn parse(spec: &str, delta: BigRational) -> Result<Self> {
        let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
        let kind = match name {
            "power" => WeightKind::Power(parse_rational(arg).map_err(|m| Error::config("weight", m))?),
            "exp" => WeightKind::Exponential,
            "linf" => WeightKind::LInfinity {
                threshold: parse_rational(arg).map_err(|m| Error::config("weight", m))?,
            },
            _ => return Err(Error::config("weight", format!("unknown weight `{spec}`"))),
        };
        Self::new(kind, delta)
    }

    pub fn label(&self) -> String {
        let d = &self.delta;
        match &self.kind {
            WeightKind::Power(p) => format!("power:{p}@{d}"),
            WeightKind::Exponential => format!("exp@{d}"),
            WeightKind::LInfinity { threshold } => format!("linf:{threshold}@{d}"),
        }
    }

    pub fn eval(&self, r: u32) -> f64 {
        let x = &self.delta * BigRational::from_integer(r.into());
        match &self.kind {
            WeightKind::Power(p) => {
                if p.is_zero() {
                    1.0
                } else {
                    x.to_f64().unwrap().powf(p.to_f64().unwrap())
                }
            }
            WeightKind::Exponential => x.to_f64().unwrap().exp(),
            WeightKind::LInfinity { threshold } => {
                if x < *threshold {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(&self.kind, WeightKind::Power(p) if p.is_zero())
    }
}

/// Parses `p/q` or an integer.
pub fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let s = s.trim();
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: i64 = p.trim().parse().map_err(|_| format!("`{s}` is not a rational p/q"))?;
    let q: i64 = q.trim().parse().map_err(|_| format!("`{s}` is not a rational p/q"))?;
    if q == 0 {
        return Err(format!("`{s}` has zero denominator"));
    }
    Ok(BigRational::new(p.into(), q.into()))
}

/// `Σ_r φ(δr)·bins[r]/denominator`; `∞` when an unbounded weight meets overflow.
pub fn integrability_sum(p: &Profile, w: &WeightFn) -> f64 {
    if p.denominator == 0 {
        return 0.0;
    }
    if p.overflow > 0 && !w.is_bounded() {
        return f64::INFINITY;
    }
    let den = p.denominator as f64;
    let mut s = p.overflow as f64 / den;
    for (&r, &c) in &p.bins {
        if c > 0 {
            s += w.eval(r) * c as f64 / den;
        }
    }
    s
}

/// Default δ-grid `2^{-j}`, `j = 0..=10`.
pub fn default_delta_grid() -> Vec<BigRational> {
    (0..=10).map(|j| BigRational::new(1.into(), (1i64 << j).into())).collect()
}

/// One δ of a strong exponential fit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitRow {
    pub delta: String,
    /// `S_δ(e)`; `None` for `∞`.
    pub c_triple: Option<f64>,
    /// Smallest `C′` with `S_δ(h) ≤ C‴ e^{C′δ|h|}` over the probes; `None` for `∞`.
    pub c_prime: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpFit {
    pub epsilon: f64,
    pub rows: Vec<FitRow>,
    /// Largest passing δ.
    pub delta: Option<String>,
    pub pass: bool,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Fits `S_δ(h) = Σ_r e^{δr} P_h(r) ≤ C‴ e^{C′δ|h|}` with `C‴ = S_δ(e)` and
/// passes δ when `C′δ ≤ ε`. `profiles` pairs each probe's length `|h|` with its
/// profile and must contain `|h| = 0`.
pub fn strong_exp_fit(profiles: &[(u32, Profile)], epsilon: f64, grid: &[BigRational]) -> Result<ExpFit> {
    if !profiles.iter().any(|(l, _)| *l == 0) {
        return Err(Error::Invalid("the fit needs the |h| = 0 profile".into()));
    }
    let mut rows = Vec::new();
    for delta in grid {
        let w = WeightFn::new(WeightKind::Exponential, delta.clone())?;
        let d = delta.to_f64().unwrap();
        let sums: Vec<(u32, f64)> = profiles.iter().map(|(l, p)| (*l, integrability_sum(p, &w))).collect();
        let c3 = sums.iter().filter(|(l, _)| *l == 0).map(|s| s.1).fold(0.0, f64::max);
        let mut c1: f64 = 0.0;
        let mut bad = !c3.is_finite() || c3 <= 0.0;
        for &(l, s) in &sums {
            if !s.is_finite() {
                bad = true;
            } else if l > 0 && !bad {
                c1 = c1.max((s / c3).ln() / (d * l as f64));
            } else if l == 0 && s > c3 {
                bad = true;
            }
        }
        let c_prime = if bad { f64::INFINITY } else { c1 };
        rows.push(FitRow {
            delta: delta.to_string(),
            c_triple: finite(c3),
            c_prime: finite(c_prime),
            pass: c_prime.is_finite() && c_prime * d <= epsilon,
        });
    }
    let best = grid.iter().zip(&rows).filter(|(_, r)| r.pass).map(|(d, _)| d).max();
    Ok(ExpFit { epsilon, delta: best.map(|d| d.to_string()), pass: best.is_some(), rows })
}

/// Histogram of `d(u(x), u(xs))` over `x ∈ 𝒢^{(1)}`.
pub fn lipschitz_profile<G: MarkedGroup, H: MarkedGroup>(
    map: &CouplingMap<G, H>,
    ctx: &DomainContext<G>,
    s: usize,
    cap: u32,
    template: Profile,
) -> Result<Profile> {
    let all: Vec<u32> = (0..map.len() as u32).collect();
    lipschitz_profile_on(map, ctx, s, cap, template, &all)
}

/// `lipschitz_profile` restricted to the good vertices among `vertices`.
pub fn lipschitz_profile_on<G: MarkedGroup, H: MarkedGroup>(
    map: &CouplingMap<G, H>,
    ctx: &DomainContext<G>,
    s: usize,
    cap: u32,
    template: Profile,
    vertices: &[u32],
) -> Result<Profile> {
    let dom = map.domain();
    if s >= dom.group().generators().len() {
        return Err(Error::Invalid(format!("generator index {s} out of range")));
    }
    map.target_cache().ball_at_least(if matches!(map.codomain(), Codomain::Group) { cap } else { 0 })?;
    let values: Vec<Bounded> = vertices
        .par_iter()
        .copied()
        .filter(|&x| ctx.is_good(x, 1))
        .map(|x| {
            let xs = dom.edge(s, x).expect("good vertex");
            map.target_distance(map.value(x), map.value(xs), cap)
        })
        .collect::<Result<_>>()?;
    Ok(template.with_good_radius(1).collect(values.into_par_iter()))
}

/// Histogram of `diam(u^{-1}(y) ∪ u^{-1}(yh))` over image points `y` with `yh`
/// in the image. For a graph codomain `yh` is reached by the labeled walk of
/// the first geodesic of `h` from `y`.
pub fn expansivity_profile<G: MarkedGroup, H: MarkedGroup>(
    map: &CouplingMap<G, H>,
    h: &H::Elem,
    metric: DomainMetric,
    domain_cache: &BallCache<G>,
    template: Profile,
) -> Result<Profile> {
    let target = map.target();
    let word = match map.codomain() {
        Codomain::Group => None,
        Codomain::Graph(_) => {
            let len = map.target_cache().word_length_growing(h, 64)?.exact().ok_or(Error::Invalid(format!("{h} is too long")))?;
            Some(map.target_cache().ball_at_least(len)?.word(h).unwrap())
        }
    };
    let fibers: Vec<(&H::Elem, &[u32])> = map.fibers().collect();
    let values: Vec<Bounded> = fibers
        .par_iter()
        .filter_map(|&(y, fy)| {
            let yh = match (&word, map.codomain()) {
                (None, _) => target.mul(y, h),
                (Some(w), Codomain::Graph(g)) => {
                    let v = g.act_word(g.index_of(y)?, w)?;
                    g.vertex(v).clone()
                }
                _ => unreachable!(),
            };
            let fyh = map.fiber(&yh);
            if fyh.is_empty() {
                return None;
            }
            let mut set: Vec<u32> = fy.iter().chain(fyh).copied().collect();
            set.sort_unstable();
            set.dedup();
            Some(map.domain().diameter(&set, metric, domain_cache))
        })
        .collect::<Result<_>>()?;
    Ok(template.collect(values.into_par_iter()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoarseKind {
    Injectivity,
    Surjectivity,
}

/// Injectivity: fiber diameter per domain vertex. Surjectivity: distance to the
/// image per target-graph vertex.
pub fn coarse_profile<G: MarkedGroup, H: MarkedGroup>(
    map: &CouplingMap<G, H>,
    kind: CoarseKind,
    metric: DomainMetric,
    domain_cache: &BallCache<G>,
    template: Profile,
) -> Result<Profile> {
    let mut p = template;
    match kind {
        CoarseKind::Injectivity => {
            let fibers: Vec<&[u32]> = map.fibers().map(|(_, f)| f).collect();
            let diams: Vec<(Bounded, u64)> = fibers
                .par_iter()
                .map(|f| Ok((map.domain().diameter(f, metric, domain_cache)?, f.len() as u64)))
                .collect::<Result<_>>()?;
            for (d, c) in diams {
                p.record_n(d, c);
            }
        }
        CoarseKind::Surjectivity => {
            for d in map.image_distances()? {
                p.record(d.map_or(Bounded::Exceeds(u32::MAX), Bounded::Exact));
            }
        }
    }
    Ok(p)
}

/// `#target / #domain`.
pub fn covolume_ratio(target_len: usize, domain_len: usize) -> Result<BigRational> {
    if domain_len == 0 {
        return Err(Error::Empty("domain"));
    }
    Ok(BigRational::new(target_len.into(), domain_len.into()))
}

/// Counts behind the fundamental-domain masses: `counts[i]` is the number of
/// `x` with `ρ(x) = 0` such that `u(x) h_i^{-1} h_j ∉ u(B(x, r))` for all
/// `j < i`, where `h_0, h_1, …` is `enumeration` in ball order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FdMass {
    pub r: u32,
    pub counts: Vec<u64>,
    pub denominator: u64,
}

impl FdMass {
    pub fn mass(&self, i: usize) -> Fraction {
        Fraction::new(self.counts[i], self.denominator)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Fundamental-domain masses for the first `count` elements of
/// `enumeration`, over the domain vertices selected by `restrict` (all when
/// `None`). Balls `B(x, r)` are intrinsic to the domain graph. With
/// `in_target`, only points `u(x) h_i^{-1}` that are target-graph vertices are
/// counted.
pub fn fd_mass<G: MarkedGroup, H: MarkedGroup>(
    map: &CouplingMap<G, H>,
    enumeration: &Ball<H::Elem>,
    count: usize,
    r: u32,
    restrict: Option<&dyn Fn(u32) -> bool>,
    in_target: bool,
) -> Result<FdMass> {
    let tgraph = match (in_target, map.codomain()) {
        (false, _) => None,
        (true, Codomain::Graph(g)) => Some(g),
        (true, Codomain::Group) => return Err(Error::Invalid("in_target needs a target graph".into())),
    };
    if count > enumeration.len() {
        return Err(Error::Invalid(format!("enumeration holds only {} elements", enumeration.len())));
    }
    let target = map.target();
    let hs: Vec<&H::Elem> = (0..count).map(|i| enumeration.element(i)).collect();
    let keep = |x: u32| restrict.map_or(true, |f| f(x));
    let verts: Vec<u32> = (0..map.len() as u32).filter(|&x| keep(x)).collect();
    let counts = verts
        .par_iter()
        .filter(|&&x| map.rho(x) == 0)
        .fold(
            || vec![0u64; count],
            |mut acc, &x| {
                let ux = map.value(x);
                let ux_inv = target.inv(ux);
                let mut ws: Vec<H::Elem> = map
                    .domain()
                    .bfs_within(x, r)
                    .keys()
                    .map(|&y| target.mul(&ux_inv, map.value(y)))
                    .collect();
                ws.sort_unstable();
                ws.dedup();
                let e = target.identity();
                ws.retain(|w| *w != e);
                for (i, h) in hs.iter().enumerate() {
                    if let Some(g) = tgraph {
                        if g.index_of(&target.mul(ux, &target.inv(h))).is_none() {
                            continue;
                        }
                    }
                    let beaten = ws.iter().any(|w| match enumeration.position(&target.mul(h, w)) {
                        Some(j) => j < i,
                        None => false,
                    });
                    if !beaten {
                        acc[i] += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; count],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(FdMass { r, counts, denominator: verts.len() as u64 })
}

/// `fd_mass` with `B(x, r)` the connected component of `x`, as when `r`
/// reaches every component's diameter. Within a component every candidate
/// point `z = u(x) h_i^{-1}` belongs to the image point `z h_i` of least index
/// `i`, so it is counted at most once per component.
pub fn fd_mass_components<G: MarkedGroup, H: MarkedGroup>(
    map: &CouplingMap<G, H>,
    enumeration: &Ball<H::Elem>,
    count: usize,
    in_target: bool,
) -> Result<FdMass> {
    if count > enumeration.len() {
        return Err(Error::Invalid(format!("enumeration holds only {} elements", enumeration.len())));
    }
    let tgraph = match (in_target, map.codomain()) {
        (false, _) => None,
        (true, Codomain::Graph(g)) => Some(g),
        (true, Codomain::Group) => return Err(Error::Invalid("in_target needs a target graph".into())),
    };
    let target = map.target();
    let inv: Vec<H::Elem> = (0..count).map(|i| target.inv(enumeration.element(i))).collect();
    let label = map.domain().components();
    let mut members: Vec<Vec<u32>> = Vec::new();
    for (x, &c) in label.iter().enumerate() {
        if c as usize >= members.len() {
            members.resize(c as usize + 1, Vec::new());
        }
        members[c as usize].push(x as u32);
    }
    let counts = members
        .par_iter()
        .map(|comp| {
            let mut ys: Vec<&H::Elem> = comp.iter().map(|&x| map.value(x)).collect();
            ys.sort_unstable();
            ys.dedup();
            let ranked: FxHashSet<&H::Elem> =
                comp.iter().filter(|&&x| map.rho(x) == 0).map(|&x| map.value(x)).collect();
            let mut first: FxHashMap<H::Elem, u32> = FxHashMap::default();
            for y in &ys {
                for (i, hinv) in inv.iter().enumerate() {
                    let z = target.mul(y, hinv);
                    if tgraph.is_some_and(|g| g.index_of(&z).is_none()) {
                        continue;
                    }
                    let e = first.entry(z).or_insert(i as u32);
                    *e = (*e).min(i as u32);
                }
            }
            let mut counts = vec![0u64; count];
            for (z, i) in first {
                if ranked.contains(&target.mul(&z, enumeration.element(i as usize))) {
                    counts[i as usize] += 1;
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; count],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(FdMass { r: u32::MAX, counts, denominator: map.len() as u64 })
}

/// Fraction of `x ∈ 𝒢^{(R)}` with some `|g| ≤ R`, `u(xg) = u(x)`, `ρ(xg) = 0`.
pub fn coboundedness_check<G: MarkedGroup, H: MarkedGroup>(
    map: &CouplingMap<G, H>,
    ctx: &DomainContext<G>,
    radius: u32,
) -> Result<Fraction> {
    if radius > ctx.radius() {
        return Err(Error::Invalid(format!("radius {radius} exceeds the context ball")));
    }
    let end = ctx.ball.count_within(radius);
    let dom = map.domain();
    let good: Vec<u32> = (0..map.len() as u32).filter(|&x| ctx.is_good(x, radius)).collect();
    let hits = good
        .par_iter()
        .map_init(Vec::new, |phi, &x| {
            dom.ball_image(x, &ctx.ball, phi);
            phi[..end].iter().any(|&y| map.value(y) == map.value(x) && map.rho(y) == 0) as u64
        })
        .sum();
    Ok(Fraction::new(hits, good.len() as u64))
}

const CSV_HEADER: [&str; 8] = ["experiment_id", "n", "probe", "r", "count", "denominator", "overflow", "bound_side"];

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    experiment_id: String,
    n: u32,
    probe: String,
    r: u32,
    count: u64,
    denominator: u64,
    overflow: u64,
    bound_side: String,
}

/// One row per nonempty bin; a profile with no finite bins writes a single
/// `r = 0, count = 0` row so that its denominator and overflow survive.
pub fn write_csv<W: Write>(profiles: &[Profile], w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(CSV_HEADER)?;
    for p in profiles {
        let row = |r: u32, count: u64| CsvRow {
            experiment_id: p.experiment_id.clone(),
            n: p.n,
            probe: p.probe.clone(),
            r,
            count,
            denominator: p.denominator,
            overflow: p.overflow,
            bound_side: p.bound_side.as_str().into(),
        };
        if p.bins.is_empty() {
            out.serialize(row(0, 0))?;
        }
        for (&r, &c) in &p.bins {
            out.serialize(row(r, c))?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Profiles from CSV, grouped by `(experiment_id, n, probe)` in file order.
/// Map id and good radius are not part of the schema and come back empty.
pub fn read_csv<R: Read>(r: R) -> Result<Vec<Profile>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::parse(1, format!("expected columns {CSV_HEADER:?}, found {header:?}")));
    }
    let mut out: Vec<Profile> = Vec::new();
    let mut index: FxHashMap<(String, u32, String), usize> = FxHashMap::default();
    for (i, row) in rdr.deserialize::<CsvRow>().enumerate() {
        let row = row.map_err(|e| Error::parse(i + 2, e.to_string()))?;
        let side = BoundSide::parse(&row.bound_side).map_err(|e| Error::parse(i + 2, e.to_string()))?;
        let key = (row.experiment_id.clone(), row.n, row.probe.clone());
        let at = *index.entry(key).or_insert_with(|| {
            let mut p = Profile::new(&row.experiment_id, row.n, "", &row.probe).with_side(side);
            p.denominator = row.denominator;
            p.overflow = row.overflow;
            out.push(p);
            out.len() - 1
        });
        let p = &mut out[at];
        if p.denominator != row.denominator || p.overflow != row.overflow || p.bound_side != side {
            return Err(Error::parse(i + 2, "row disagrees with earlier rows of its profile"));
        }
        if row.count > 0 {
            *p.bins.entry(row.r).or_insert(0) += row.count;
        }
    }
    for (i, p) in out.iter().enumerate() {
        if !p.is_consistent() {
            return Err(Error::Invalid(format!("profile {i} (`{}`): bins do not sum to the denominator", p.probe)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cyclic_quotient, folner_lamplighter};
    use crate::group::Integers;
    use crate::quadratic::rational;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn fixture(bins: &[(u32, u64)], overflow: u64) -> Profile {
        let mut p = Profile::new("t", 1, "m", "p");
        for &(r, c) in bins {
            p.record_n(Bounded::Exact(r), c);
        }
        p.record_n(Bounded::Exceeds(9), overflow);
        p
    }

    fn ambient() -> DomainMetric {
        DomainMetric::Ambient { cap: 64 }
    }

    fn pair_collapse() -> CouplingMap<Integers, Integers> {
        let f = Arc::new(cyclic_quotient(6));
        let vals = (0..6).map(|i: i64| i.div_euclid(2)).collect();
        CouplingMap::new("pairs", f, Arc::new(Integers::new()), vals).unwrap()
    }

    #[test]
    fn identity_profiles() {
        let f = Arc::new(folner_lamplighter(2, 3, 1 << 20).unwrap());
        let m = CouplingMap::identity(f.clone());
        let ctx = DomainContext::new(&f, 1).unwrap();
        let cache = BallCache::new(f.group().clone());
        for s in 0..f.group().generators().len() {
            let p = lipschitz_profile(&m, &ctx, s, 8, Profile::new("t", 3, "id", "s")).unwrap();
            assert_eq!(p.bins, BTreeMap::from([(1, ctx.good[1].count() as u64)]));
            let h = f.group().generators()[s].element.clone();
            let q = expansivity_profile(&m, &h, ambient(), &cache, Profile::new("t", 3, "id", "h")).unwrap();
            assert_eq!(q.bins.keys().collect::<Vec<_>>(), vec![&1]);
        }
        let e = f.group().identity();
        let q = expansivity_profile(&m, &e, ambient(), &cache, Profile::new("t", 3, "id", "e")).unwrap();
        assert_eq!(q.bins, BTreeMap::from([(0, f.len() as u64)]));
        let inj = coarse_profile(&m, CoarseKind::Injectivity, ambient(), &cache, Profile::new("t", 3, "id", "inj")).unwrap();
        assert_eq!(inj.bins, BTreeMap::from([(0, f.len() as u64)]));
    }

    #[test]
    fn constant_map_is_zero_lipschitz() {
        let f = Arc::new(cyclic_quotient(8));
        let m = CouplingMap::new("c", f.clone(), Arc::new(Integers::new()), vec![0; 8]).unwrap();
        let ctx = DomainContext::new(&f, 1).unwrap();
        let p = lipschitz_profile(&m, &ctx, 0, 4, Profile::new("t", 0, "c", "s")).unwrap();
        assert_eq!(p.bins, BTreeMap::from([(0, 8)]));
    }

    #[test]
    fn pair_collapse_fixture() {
        let m = pair_collapse();
        let cache = BallCache::new(m.domain().group().clone());
        let inj = coarse_profile(&m, CoarseKind::Injectivity, DomainMetric::Intrinsic { cap: 6 }, &cache, Profile::new("t", 0, "pairs", "inj")).unwrap();
        assert_eq!(inj.bins, BTreeMap::from([(1, 6)]));
        let ctx = DomainContext::new(m.domain(), 1).unwrap();
        assert_eq!(coboundedness_check(&m, &ctx, 1).unwrap(), Fraction::new(6, 6));
        assert_eq!(coboundedness_check(&m, &ctx, 0).unwrap(), Fraction::new(3, 6));
    }

    #[test]
    fn radius_zero_attains_nothing_else() {
        let f = Arc::new(cyclic_quotient(10));
        let m = CouplingMap::identity(f.clone());
        let ball = m.target_cache().ball(4).unwrap();
        let fd = fd_mass(&m, &ball, ball.len(), 0, None, false).unwrap();
        assert!(fd.counts.iter().all(|&c| c == 10));
    }

    #[test]
    fn component_masses_match_the_direct_count() {
        use crate::experiment::SolSetup;
        let s = SolSetup::new(2, [[2, 1], [1, 1]], rational(1, 4)).unwrap();
        let d = s.domain(2).unwrap();
        let tg = s.target(2, &s.default_thickening(), 1).unwrap();
        let m = s.coupling(d.clone()).unwrap().with_codomain(tg.graph.clone()).unwrap();
        let label = d.components();
        let diam = (0..=*label.iter().max().unwrap())
            .map(|c| {
                let comp: Vec<u32> = (0..d.len() as u32).filter(|&x| label[x as usize] == c).collect();
                d.subset_diameter(&comp, 64).unwrap().exact().unwrap()
            })
            .max()
            .unwrap();
        let ball = m.target_cache().ball(3).unwrap();
        for in_target in [false, true] {
            let direct = fd_mass(&m, &ball, ball.len(), diam, None, in_target).unwrap();
            let whole = fd_mass_components(&m, &ball, ball.len(), in_target).unwrap();
            assert_eq!(direct.counts, whole.counts);
            assert_eq!(direct.counts[0], m.image_len() as u64);
        }
    }

    #[test]
    fn covolume_of_identity() {
        let f = folner_lamplighter(2, 1, 1 << 10).unwrap();
        assert_eq!(covolume_ratio(f.len(), f.len()).unwrap(), rational(1, 1));
    }

    #[test]
    fn integrability_examples() {
        let p = fixture(&[(0, 5)], 0);
        for w in ["power:2", "exp", "linf:1"] {
            let w = WeightFn::parse(w, rational(1, 2)).unwrap();
            assert_eq!(integrability_sum(&p, &w), w.eval(0));
        }
        let q = fixture(&[(0, 1), (3, 1)], 0);
        assert_eq!(integrability_sum(&q, &WeightFn::parse("linf:2", rational(1, 2)).unwrap()), 0.0);
        assert_eq!(integrability_sum(&q, &WeightFn::parse("linf:1", rational(1, 2)).unwrap()), f64::INFINITY);
        let o = fixture(&[(0, 1)], 1);
        assert_eq!(integrability_sum(&o, &WeightFn::parse("exp", rational(1, 8)).unwrap()), f64::INFINITY);
        assert_eq!(integrability_sum(&o, &WeightFn::parse("power:0", rational(1, 8)).unwrap()), 1.0);
    }

    #[test]
    fn weight_parsing() {
        assert!(WeightFn::parse("power:-1", rational(1, 1)).is_err());
        assert!(WeightFn::parse("exp", rational(0, 1)).is_err());
        assert!(WeightFn::parse("cosh", rational(1, 1)).is_err());
        assert_eq!(parse_rational(" 3/4").unwrap(), rational(3, 4));
        assert!(parse_rational("1/0").is_err());
    }

    fn shifted(l: u32, spread: &[(u32, u64)]) -> (u32, Profile) {
        (l, fixture(&spread.iter().map(|&(r, c)| (r + l, c)).collect::<Vec<_>>(), 0))
    }

    #[test]
    fn identity_fit_passes_with_delta_at_most_epsilon() {
        let ps: Vec<_> = (0..=5).map(|l| shifted(l, &[(0, 1)])).collect();
        let fit = strong_exp_fit(&ps, 1.0, &default_delta_grid()).unwrap();
        assert_eq!(fit.delta.as_deref(), Some("1"));
        for row in &fit.rows {
            assert_eq!(row.c_triple, Some(1.0));
            assert!((row.c_prime.unwrap() - 1.0).abs() < 1e-12);
        }
        let half = strong_exp_fit(&ps, 0.5, &default_delta_grid()).unwrap();
        assert_eq!(half.delta.as_deref(), Some("1/2"));
    }

    #[test]
    fn linear_mean_with_bounded_tail_passes() {
        let ps: Vec<_> = (0..=6).map(|l| shifted(2 * l, &[(0, 4), (1, 2), (2, 1)])).map(|(l, p)| (l / 2, p)).collect();
        let fit = strong_exp_fit(&ps, 1.0, &default_delta_grid()).unwrap();
        assert!(fit.pass);
        assert_eq!(fit.delta.as_deref(), Some("1/2"));
    }

    #[test]
    fn divergent_fixture_fails() {
        let mut ps: Vec<_> = (0..=3).map(|l| shifted(l, &[(0, 1)])).collect();
        ps.push((4, fixture(&[(4, 9)], 1)));
        let fit = strong_exp_fit(&ps, 1.0, &default_delta_grid()).unwrap();
        assert!(!fit.pass && fit.rows.iter().all(|r| r.c_prime.is_none()));
        assert!(strong_exp_fit(&ps[1..], 1.0, &default_delta_grid()).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let mut a = fixture(&[(0, 2), (3, 5)], 1);
        a.bound_side = BoundSide::Upper;
        let b = Profile { probe: "q, with comma".into(), ..fixture(&[], 4) };
        let mut buf = Vec::new();
        write_csv(&[a.clone(), b.clone()], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("experiment_id,n,probe,r,count,denominator,overflow,bound_side\n"));
        let back = read_csv(&buf[..]).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!((back[0].bins.clone(), back[0].overflow, back[0].bound_side), (a.bins, 1, BoundSide::Upper));
        assert_eq!((back[1].denominator, back[1].overflow), (4, 4));
        let mut again = Vec::new();
        write_csv(&back, &mut again).unwrap();
        assert_eq!(again, buf);
    }

    #[test]
    fn csv_rejects_wrong_schema() {
        assert!(matches!(read_csv("a,b\n1,2\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
        let bad = "experiment_id,n,probe,r,count,denominator,overflow,bound_side\nx,1,p,0,1,2,0,exact\n";
        assert!(read_csv(bad.as_bytes()).is_err());
        let side = "experiment_id,n,probe,r,count,denominator,overflow,bound_side\nx,1,p,0,1,1,0,sideways\n";
        assert!(matches!(read_csv(side.as_bytes()), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn merge_checks_metadata() {
        let mut a = fixture(&[(1, 1)], 0);
        let b = Profile { probe: "other".into(), ..a.clone() };
        assert!(a.merge(&b).is_err());
    }

    proptest! {
        #[test]
        fn merge_is_a_commutative_monoid(xs in prop::collection::vec(prop::option::of(0u32..20), 0..60), cut in 0usize..60) {
            let vals: Vec<Bounded> = xs.iter().map(|x| x.map_or(Bounded::Exceeds(20), Bounded::Exact)).collect();
            let cut = cut.min(vals.len());
            let base = Profile::new("t", 2, "m", "p");
            let whole = base.clone().collect(vals.clone().into_par_iter());
            let mut a = base.clone().collect(vals[..cut].to_vec().into_par_iter());
            let b = base.clone().collect(vals[cut..].to_vec().into_par_iter());
            let mut b2 = b.clone();
            a.merge(&b).unwrap();
            b2.merge(&base.clone().collect(vals[..cut].to_vec().into_par_iter())).unwrap();
            prop_assert_eq!(&a, &whole);
            prop_assert_eq!(&b2, &whole);
            prop_assert!(whole.is_consistent());
            prop_assert_eq!(whole.denominator as usize, vals.len());
        }

        #[test]
        fn sums_are_monotone(bins in prop::collection::vec((0u32..30, 1u64..10), 1..8), i in 0usize..10, j in 0usize..10) {
            let p = fixture(&bins, 0);
            let grid = default_delta_grid();
            let (lo, hi) = (&grid[i.max(j)], &grid[i.min(j)]);
            for kind in ["exp", "power:2", "power:1/2", "linf:3"] {
                let a = integrability_sum(&p, &WeightFn::parse(kind, lo.clone()).unwrap());
                let b = integrability_sum(&p, &WeightFn::parse(kind, hi.clone()).unwrap());
                prop_assert!(a <= b * (1.0 + 1e-12));
            }
            let pw = integrability_sum(&p, &WeightFn::parse("power:1", hi.clone()).unwrap());
            let ex = integrability_sum(&p, &WeightFn::parse("exp", hi.clone()).unwrap());
            prop_assert!(pw <= ex);
        }
    }

    #[test]
    fn lamplighter_identity_fd_mass_on_good_vertices() {
        let f = Arc::new(folner_lamplighter(2, 2, 1 << 12).unwrap());
        let m = CouplingMap::identity(f.clone());
        let ctx = DomainContext::new(&f, 2).unwrap();
        let ball = m.target_cache().ball(2).unwrap();
        let good = |x: u32| ctx.is_good(x, 2);
        let fd = fd_mass(&m, &ball, ball.len(), 4, Some(&good), false).unwrap();
        assert_eq!(fd.mass(0), Fraction::new(ctx.good[2].count() as u64, ctx.good[2].count() as u64));
        assert!(fd.counts[1..].iter().all(|&c| c == 0));
    }
}
