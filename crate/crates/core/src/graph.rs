//! Finite edge-labeled graphs carrying a partial right action of a marked
//! group: Følner graphs, good-vertex sets, the almost-action and intrinsic
//! distances.

use std::collections::{BTreeMap, VecDeque};
use std::io::{BufRead, Write};
use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::group::{Integers, Lamplighter, LamplighterElement, MarkedGroup};
use crate::metric::{Ball, BallCache, Bounded};

/// Marker for a missing edge.
pub const NONE: u32 = u32::MAX;

/// Default cap on the number of vertices a builder may produce.
pub const DEFAULT_VERTEX_CAP: u128 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    /// Induced subgraph of the Cayley graph: the edge `s` at `v` exists iff
    /// `decode(v)·s` is a vertex.
    Induced,
    /// Any graph with a partial labeled action, e.g. a finite quotient.
    General,
}

#[derive(Clone, Debug)]
pub struct FolnerGraph<G: MarkedGroup> {
    group: Arc<G>,
    scale: i64,
    kind: GraphKind,
    vertices: Vec<G::Elem>,
    index: FxHashMap<G::Elem, u32>,
    edges: Vec<Vec<u32>>,
    meta: BTreeMap<String, String>,
}

/// `𝒢^{(r)}`: vertices whose `r`-ball matches `B_G(e, r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodSet {
    pub radius: u32,
    pub good: Vec<bool>,
}

impl GoodSet {
    pub fn contains(&self, v: u32) -> bool {
        self.good[v as usize]
    }

    pub fn count(&self) -> usize {
        self.good.iter().filter(|&&b| b).count()
    }

    pub fn fraction(&self) -> f64 {
        if self.good.is_empty() {
            return 0.0;
        }
        self.count() as f64 / self.good.len() as f64
    }
}

/// How distances between domain vertices are measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainMetric {
    /// Shortest paths inside the graph.
    Intrinsic { cap: u32 },
    /// Word metric of the ambient group.
    Ambient { cap: u32 },
}

impl DomainMetric {
    pub fn name(&self) -> &'static str {
        match self {
            DomainMetric::Intrinsic { .. } => "intrinsic",
            DomainMetric::Ambient { .. } => "ambient",
        }
    }

    pub fn cap(&self) -> u32 {
        match *self {
            DomainMetric::Intrinsic { cap } | DomainMetric::Ambient { cap } => cap,
        }
    }
}

impl<G: MarkedGroup> FolnerGraph<G> {
    /// Induced Cayley subgraph on `vertices`, stored in canonical order.
    pub fn induced(group: Arc<G>, scale: i64, mut vertices: Vec<G::Elem>) -> Self {
        vertices.par_sort_unstable();
        vertices.dedup();
        let index: FxHashMap<G::Elem, u32> =
            vertices.iter().enumerate().map(|(i, v)| (v.clone(), i as u32)).collect();
        let edges = group
            .generators()
            .iter()
            .map(|s| {
                vertices
                    .par_iter()
                    .map(|v| index.get(&group.mul(v, &s.element)).copied().unwrap_or(NONE))
                    .collect()
            })
            .collect();
        FolnerGraph { group, scale, kind: GraphKind::Induced, vertices, index, edges, meta: BTreeMap::new() }
    }

    /// A graph with explicit edges, one partial map per generator. Edge maps of
    /// `s` and `s^{-1}` must be mutually inverse partial bijections.
    pub fn from_edges(group: Arc<G>, scale: i64, vertices: Vec<G::Elem>, edges: Vec<Vec<u32>>) -> Result<Self> {
        let n = vertices.len();
        let gens = group.generators();
        if edges.len() != gens.len() || edges.iter().any(|e| e.len() != n) {
            return Err(Error::Invalid("edge table does not match generators and vertices".into()));
        }
        for (s, g) in gens.iter().enumerate() {
            for v in 0..n {
                let w = edges[s][v];
                if w == NONE {
                    continue;
                }
                if w as usize >= n || edges[g.inverse][w as usize] != v as u32 {
                    return Err(Error::Invalid(format!("edge {} at vertex {v} has no matching inverse", g.label)));
                }
            }
        }
        let index = vertices.iter().enumerate().map(|(i, v)| (v.clone(), i as u32)).collect();
        Ok(FolnerGraph { group, scale, kind: GraphKind::General, vertices, index, edges, meta: BTreeMap::new() })
    }

    pub fn group(&self) -> &Arc<G> {
        &self.group
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, v: u32) -> &G::Elem {
        &self.vertices[v as usize]
    }

    pub fn vertices(&self) -> &[G::Elem] {
        &self.vertices
    }

    pub fn index_of(&self, g: &G::Elem) -> Option<u32> {
        self.index.get(g).copied()
    }

    pub fn edge(&self, s: usize, v: u32) -> Option<u32> {
        let w = self.edges[s][v as usize];
        (w != NONE).then_some(w)
    }

    pub fn edge_table(&self, s: usize) -> &[u32] {
        &self.edges[s]
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        self.meta.insert(key.to_string(), value.to_string());
    }

    /// Follows `word` from `v`; `None` if a step leaves the graph.
    pub fn act_word(&self, v: u32, word: &[usize]) -> Option<u32> {
        word.iter().try_fold(v, |x, &s| self.edge(s, x))
    }

    /// `v·w` along the first geodesic for `w` in canonical BFS order.
    pub fn almost_action(&self, v: u32, w: &G::Elem, ball: &Ball<G::Elem>) -> Result<Option<u32>> {
        let word = ball
            .word(w)
            .ok_or_else(|| Error::Invalid(format!("{w} lies outside the ball of radius {}", ball.radius())))?;
        Ok(self.act_word(v, &word))
    }

    /// Images of the ball tree at `v`: `phi[i] = v·(ball element i)`, `NONE`
    /// where the walk leaves the graph.
    pub fn ball_image(&self, v: u32, ball: &Ball<G::Elem>, phi: &mut Vec<u32>) {
        phi.clear();
        phi.push(v);
        for i in 1..ball.len() {
            let (p, s) = ball.parent(i).unwrap();
            let x = phi[p];
            phi.push(if x == NONE { NONE } else { self.edges[s][x as usize] });
        }
    }

    /// `𝒢^{(r)}`. For induced graphs a vertex is good iff every element of
    /// `decode(v)·B(e, r)` is a vertex; otherwise the labeled balls are compared.
    pub fn good_set(&self, ball: &Ball<G::Elem>, r: u32) -> GoodSet {
        assert!(ball.radius() >= r);
        let owned;
        let ball = if ball.radius() == r {
            ball
        } else {
            owned = ball.truncate(r);
            &owned
        };
        let good = match self.kind {
            GraphKind::Induced => (0..self.len() as u32)
                .into_par_iter()
                .map_init(Vec::new, |phi, v| {
                    self.ball_image(v, ball, phi);
                    phi.iter().all(|&x| x != NONE)
                })
                .collect(),
            GraphKind::General => {
                (0..self.len() as u32).into_par_iter().map(|v| self.ball_isomorphic(v, ball)).collect()
            }
        };
        GoodSet { radius: r, good }
    }

    /// Direct test that `B_F(v, r)` and `B_G(e, r)` are isomorphic as labeled
    /// directed graphs, via the map sending the identity to `v`.
    pub fn ball_isomorphic(&self, v: u32, ball: &Ball<G::Elem>) -> bool {
        let mut phi = Vec::new();
        self.ball_image(v, ball, &mut phi);
        if phi.contains(&NONE) {
            return false;
        }
        let image: FxHashMap<u32, usize> = phi.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        if image.len() != phi.len() {
            return false;
        }
        let gens = self.group.generators();
        for i in 0..ball.len() {
            for (s, g) in gens.iter().enumerate() {
                let target = self.group.mul(ball.element(i), &g.element);
                let edge = self.edges[s][phi[i] as usize];
                match ball.position(&target) {
                    Some(j) => {
                        if edge != phi[j] {
                            return false;
                        }
                    }
                    None => {
                        if edge != NONE && image.contains_key(&edge) {
                            return false;
                        }
                    }
                }
            }
        }
        let r = ball.radius();
        self.bfs_within(v, r).len() == ball.len()
    }

    /// Vertices at intrinsic distance `≤ r` from `v`, with distances.
    pub fn bfs_within(&self, v: u32, r: u32) -> FxHashMap<u32, u32> {
        let mut dist = FxHashMap::default();
        dist.insert(v, 0);
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            let d = dist[&x];
            if d == r {
                continue;
            }
            for s in 0..self.edges.len() {
                let y = self.edges[s][x as usize];
                if y != NONE && !dist.contains_key(&y) {
                    dist.insert(y, d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn intrinsic_distance(&self, a: u32, b: u32, cap: u32) -> Bounded {
        if a == b {
            return Bounded::Exact(0);
        }
        let mut dist = FxHashMap::default();
        dist.insert(a, 0u32);
        let mut queue = VecDeque::from([a]);
        while let Some(x) = queue.pop_front() {
            let d = dist[&x];
            if d == cap {
                continue;
            }
            for s in 0..self.edges.len() {
                let y = self.edges[s][x as usize];
                if y == b {
                    return Bounded::Exact(d + 1);
                }
                if y != NONE && !dist.contains_key(&y) {
                    dist.insert(y, d + 1);
                    queue.push_back(y);
                }
            }
        }
        Bounded::Exceeds(cap)
    }

    /// Connected-component label of every vertex, labels in order of first vertex.
    pub fn components(&self) -> Vec<u32> {
        let mut label = vec![NONE; self.len()];
        let mut next = 0;
        for v in 0..self.len() as u32 {
            if label[v as usize] != NONE {
                continue;
            }
            label[v as usize] = next;
            let mut stack = vec![v];
            while let Some(x) = stack.pop() {
                for s in 0..self.edges.len() {
                    let y = self.edges[s][x as usize];
                    if y != NONE && label[y as usize] == NONE {
                        label[y as usize] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Intrinsic diameter of `set` by a search from each member.
    pub fn subset_diameter(&self, set: &[u32], cap: u32) -> Result<Bounded> {
        if set.is_empty() {
            return Err(Error::Empty("vertex set"));
        }
        let members: FxHashSet<u32> = set.iter().copied().collect();
        let mut best = 0;
        for &a in set {
            let mut found = 1usize;
            let mut dist = FxHashMap::default();
            dist.insert(a, 0u32);
            let mut queue = VecDeque::from([a]);
            while let Some(x) = queue.pop_front() {
                if found == members.len() {
                    break;
                }
                let d = dist[&x];
                if d == cap {
                    continue;
                }
                for s in 0..self.edges.len() {
                    let y = self.edges[s][x as usize];
                    if y != NONE && !dist.contains_key(&y) {
                        dist.insert(y, d + 1);
                        if members.contains(&y) {
                            found += 1;
                            best = best.max(d + 1);
                        }
                        queue.push_back(y);
                    }
                }
            }
            if found < members.len() {
                return Ok(Bounded::Exceeds(cap));
            }
        }
        Ok(Bounded::Exact(best))
    }

    /// Diameter of `set` under `metric`.
    pub fn diameter(&self, set: &[u32], metric: DomainMetric, cache: &BallCache<G>) -> Result<Bounded> {
        match metric {
            DomainMetric::Intrinsic { cap } => self.subset_diameter(set, cap),
            DomainMetric::Ambient { cap } => {
                if set.is_empty() {
                    return Err(Error::Empty("vertex set"));
                }
                let mut best = 0;
                for (i, &a) in set.iter().enumerate() {
                    for &b in &set[i + 1..] {
                        match cache.distance(self.vertex(a), self.vertex(b), cap)? {
                            Bounded::Exact(d) => best = best.max(d),
                            e @ Bounded::Exceeds(_) => return Ok(e),
                        }
                    }
                }
                Ok(Bounded::Exact(best))
            }
        }
    }

    /// Line-oriented text export; `read` restores it bit for bit.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "sofic-me graph 1")?;
        writeln!(w, "group {}", self.group.descriptor())?;
        writeln!(w, "scale {}", self.scale)?;
        writeln!(w, "kind {}", if self.kind == GraphKind::Induced { "induced" } else { "general" })?;
        let labels: Vec<&str> = self.group.generators().iter().map(|g| g.label.as_str()).collect();
        writeln!(w, "labels {}", labels.join(" "))?;
        for (k, v) in &self.meta {
            writeln!(w, "meta {k} {v}")?;
        }
        writeln!(w, "vertices {}", self.len())?;
        for (i, v) in self.vertices.iter().enumerate() {
            writeln!(w, "v {i} {v}")?;
        }
        let count: usize = self.edges.iter().map(|e| e.iter().filter(|&&x| x != NONE).count()).sum();
        writeln!(w, "edges {count}")?;
        for (s, table) in self.edges.iter().enumerate() {
            for (v, &x) in table.iter().enumerate() {
                if x != NONE {
                    writeln!(w, "e {} {v} {x}", labels[s])?;
                }
            }
        }
        writeln!(w, "end")?;
        Ok(())
    }

    pub fn read<R: BufRead>(group: Arc<G>, r: R) -> Result<Self> {
        let mut lines = Lines::new(r);
        lines.expect_exact("sofic-me graph 1")?;
        let desc = lines.field("group")?;
        if desc != group.descriptor() {
            return Err(Error::parse(lines.no, format!("group `{desc}` does not match `{}`", group.descriptor())));
        }
        let scale: i64 = lines.parsed("scale")?;
        let kind = match lines.field("kind")?.as_str() {
            "induced" => GraphKind::Induced,
            "general" => GraphKind::General,
            other => return Err(Error::parse(lines.no, format!("unknown kind `{other}`"))),
        };
        let labels: Vec<String> = lines.field("labels")?.split(' ').map(String::from).collect();
        let expected: Vec<String> = group.generators().iter().map(|g| g.label.clone()).collect();
        if labels != expected {
            return Err(Error::parse(lines.no, "generator labels do not match the group"));
        }
        let mut meta = BTreeMap::new();
        let mut line = lines.next_line()?;
        while let Some(rest) = line.strip_prefix("meta ") {
            let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
            meta.insert(k.to_string(), v.to_string());
            line = lines.next_line()?;
        }
        let n: usize = line
            .strip_prefix("vertices ")
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| Error::parse(lines.no, "expected `vertices <count>`"))?;
        let mut vertices = Vec::with_capacity(n);
        for i in 0..n {
            let l = lines.next_line()?;
            let rest = l
                .strip_prefix(&format!("v {i} "))
                .ok_or_else(|| Error::parse(lines.no, format!("expected vertex {i}")))?;
            vertices.push(group.parse_elem(rest).map_err(|e| Error::parse(lines.no, e.to_string()))?);
        }
        let m: usize = lines.parsed("edges")?;
        let mut edges = vec![vec![NONE; n]; labels.len()];
        for _ in 0..m {
            let l = lines.next_line()?;
            let parts: Vec<&str> = l.split(' ').collect();
            let bad = || Error::parse(lines.no, "expected `e <label> <src> <dst>`");
            if parts.len() != 4 || parts[0] != "e" {
                return Err(bad());
            }
            let s = labels.iter().position(|x| x == parts[1]).ok_or_else(bad)?;
            let a: usize = parts[2].parse().map_err(|_| bad())?;
            let b: u32 = parts[3].parse().map_err(|_| bad())?;
            if a >= n || b as usize >= n {
                return Err(bad());
            }
            edges[s][a] = b;
        }
        lines.expect_exact("end")?;
        let mut g = match kind {
            GraphKind::Induced => {
                let index = vertices.iter().enumerate().map(|(i, v)| (v.clone(), i as u32)).collect();
                FolnerGraph { group, scale, kind, vertices, index, edges, meta: BTreeMap::new() }
            }
            GraphKind::General => Self::from_edges(group, scale, vertices, edges)?,
        };
        g.meta = meta;
        Ok(g)
    }
}

/// Line reader that tracks 1-based line numbers for parse errors.
pub(crate) struct Lines<R> {
    inner: std::io::Lines<R>,
    pub no: usize,
}

impl<R: BufRead> Lines<R> {
    pub fn new(r: R) -> Self {
        Lines { inner: r.lines(), no: 0 }
    }

    pub fn next_line(&mut self) -> Result<String> {
        self.no += 1;
        match self.inner.next() {
            Some(l) => Ok(l?),
            None => Err(Error::parse(self.no, "unexpected end of file")),
        }
    }

    pub fn expect_exact(&mut self, want: &str) -> Result<()> {
        let l = self.next_line()?;
        if l != want {
            return Err(Error::parse(self.no, format!("expected `{want}`")));
        }
        Ok(())
    }

    pub fn field(&mut self, key: &str) -> Result<String> {
        let l = self.next_line()?;
        l.strip_prefix(key)
            .and_then(|x| x.strip_prefix(' '))
            .map(String::from)
            .ok_or_else(|| Error::parse(self.no, format!("expected `{key} …`")))
    }

    pub fn parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.field(key)?;
        v.parse().map_err(|_| Error::parse(self.no, format!("bad value for `{key}`")))
    }
}

/// Number of vertices of `F_n^ℒ`: `(n+1)·k^{2n+1}`.
pub fn lamplighter_box_size(k: u32, n: u32) -> u128 {
    (n as u128 + 1) * (k as u128).pow(2 * n + 1)
}

/// `F_n^ℒ = {(x, m) : supp x ⊂ [-n, n], 0 ≤ m ≤ n}`.
pub fn folner_lamplighter(k: u32, n: u32, cap: u128) -> Result<FolnerGraph<Lamplighter>> {
    let size = lamplighter_box_size(k, n);
    if size > cap {
        return Err(Error::CapExceeded { what: "lamplighter Følner set", size, cap });
    }
    let group = Arc::new(Lamplighter::new(k));
    let width = 2 * n as usize + 1;
    let configs = (k as usize).pow(width as u32);
    let mut vertices = Vec::with_capacity(size as usize);
    for code in 0..configs {
        let mut lamps = Vec::new();
        let mut c = code;
        for i in 0..width {
            let v = (c % k as usize) as u32;
            c /= k as usize;
            if v != 0 {
                lamps.push((i as i64 - n as i64, v));
            }
        }
        for m in 0..=n as i64 {
            vertices.push(LamplighterElement { lamps: lamps.clone(), cursor: m });
        }
    }
    let mut g = FolnerGraph::induced(group, n as i64, vertices);
    g.set_meta("builder", "lamplighter-box");
    Ok(g)
}

/// Cayley graph of `Z/NZ` as a labeled graph over `Z`; vertex `i` decodes to
/// the representative `i`.
pub fn cyclic_quotient(modulus: u32) -> FolnerGraph<Integers> {
    let group = Arc::new(Integers::new());
    let n = modulus as i64;
    let vertices: Vec<i64> = (0..n).collect();
    let plus: Vec<u32> = (0..n).map(|i| ((i + 1) % n) as u32).collect();
    let minus: Vec<u32> = (0..n).map(|i| ((i + n - 1) % n) as u32).collect();
    let mut g = FolnerGraph::from_edges(group, n, vertices, vec![plus, minus]).expect("cyclic edges are consistent");
    g.set_meta("builder", format!("cyclic-quotient N={modulus}"));
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::bfs_ball;

    #[test]
    fn lamplighter_sizes() {
        assert_eq!(folner_lamplighter(2, 1, DEFAULT_VERTEX_CAP).unwrap().len(), 16);
        assert_eq!(folner_lamplighter(2, 3, DEFAULT_VERTEX_CAP).unwrap().len(), 4 * 128);
        assert_eq!(folner_lamplighter(3, 2, DEFAULT_VERTEX_CAP).unwrap().len(), 729);
        assert!(matches!(folner_lamplighter(2, 3, 100), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn edges_are_induced_and_paired() {
        let f = folner_lamplighter(2, 2, DEFAULT_VERTEX_CAP).unwrap();
        let gens = f.group().generators();
        for v in 0..f.len() as u32 {
            for (s, g) in gens.iter().enumerate() {
                let target = f.group().mul(f.vertex(v), &g.element);
                assert_eq!(f.edge(s, v), f.index_of(&target));
                if let Some(w) = f.edge(s, v) {
                    assert_eq!(f.edge(g.inverse, w), Some(v));
                }
            }
        }
    }

    #[test]
    fn good_fraction_at_radius_one() {
        for n in 2..=4u32 {
            let f = folner_lamplighter(2, n, DEFAULT_VERTEX_CAP).unwrap();
            let ball = bfs_ball(f.group().as_ref(), 1, 1000).unwrap();
            let good = f.good_set(&ball, 1);
            assert_eq!(good.count() * (n as usize + 1), f.len() * (n as usize - 1));
            assert_eq!(f.good_set(&ball, 0).count(), f.len());
        }
    }

    #[test]
    fn cyclic_quotient_is_all_good() {
        let ball = bfs_ball(&Integers::new(), 3, 100).unwrap();
        let g = cyclic_quotient(8);
        assert_eq!(g.good_set(&ball, 3).count(), 8);
        // on a 7-cycle the two vertices at distance 3 are joined by an edge
        // that the path B_Z(0, 3) lacks
        assert_eq!(cyclic_quotient(7).good_set(&ball, 3).count(), 0);
        assert_eq!(cyclic_quotient(7).good_set(&ball, 2).count(), 7);
    }

    #[test]
    fn almost_action_boundary() {
        let f = folner_lamplighter(2, 2, DEFAULT_VERTEX_CAP).unwrap();
        let ball = bfs_ball(f.group().as_ref(), 2, 1000).unwrap();
        let v = f.index_of(&f.group().element(vec![], 2)).unwrap();
        let t = f.group().element(vec![], 1);
        assert_eq!(f.almost_action(v, &t, &ball).unwrap(), None);
        assert_eq!(f.almost_action(v, &f.group().identity(), &ball).unwrap(), Some(v));
    }

    #[test]
    fn lamplighter_box_components() {
        // lamps at negative positions are out of the cursor's reach
        for n in 1..=3 {
            let f = folner_lamplighter(2, n, 1 << 20).unwrap();
            let c = f.components();
            assert_eq!(*c.iter().max().unwrap() + 1, 1 << n);
        }
        assert!(cyclic_quotient(5).components().iter().all(|&c| c == 0));
    }

    #[test]
    fn subset_diameters() {
        let f = folner_lamplighter(2, 1, DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(f.subset_diameter(&[3], 10).unwrap(), Bounded::Exact(0));
        let w = f.edge(0, 3).unwrap();
        assert_eq!(f.subset_diameter(&[3, w], 10).unwrap(), Bounded::Exact(1));
        assert!(f.subset_diameter(&[], 10).is_err());
    }

    #[test]
    fn export_round_trip_and_truncation() {
        let f = folner_lamplighter(2, 1, DEFAULT_VERTEX_CAP).unwrap();
        let mut buf = Vec::new();
        f.write(&mut buf).unwrap();
        let g = FolnerGraph::read(f.group().clone(), buf.as_slice()).unwrap();
        let mut again = Vec::new();
        g.write(&mut again).unwrap();
        assert_eq!(buf, again);
        let cut = &buf[..buf.len() / 2];
        match FolnerGraph::read(f.group().clone(), cut) {
            Err(Error::Parse { line, .. }) => assert!(line > 5),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
