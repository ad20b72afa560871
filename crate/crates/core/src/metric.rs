//! Word metrics by breadth-first search, with memoized balls.

use std::sync::{Arc, Mutex};

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::group::MarkedGroup;

/// Default cap on the number of states a ball may hold.
pub const DEFAULT_BALL_CAP: usize = 10_000_000;

const ROOT: u32 = u32::MAX;

/// Result of a search bounded by a radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bounded {
    Exact(u32),
    Exceeds(u32),
}

impl Bounded {
    pub fn exact(self) -> Option<u32> {
        match self {
            Bounded::Exact(v) => Some(v),
            Bounded::Exceeds(_) => None,
        }
    }
}

/// `B_G(e, r)` in breadth-first discovery order: layers are contiguous, each
/// layer is sorted canonically, and every element records the BFS-tree parent
/// and the generator leading to it. Following parents spells the first
/// geodesic in canonical BFS order.
#[derive(Clone, Debug)]
pub struct Ball<E> {
    radius: u32,
    elems: Vec<E>,
    dist: Vec<u32>,
    parent: Vec<(u32, u32)>,
    layer_end: Vec<usize>,
    index: FxHashMap<E, u32>,
}

impl<E: Clone + Eq + std::hash::Hash + Ord> Ball<E> {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn distance(&self, g: &E) -> Option<u32> {
        self.index.get(g).map(|&i| self.dist[i as usize])
    }

    pub fn position(&self, g: &E) -> Option<usize> {
        self.index.get(g).map(|&i| i as usize)
    }

    pub fn element(&self, i: usize) -> &E {
        &self.elems[i]
    }

    pub fn dist_at(&self, i: usize) -> u32 {
        self.dist[i]
    }

    /// `(parent position, generator)`; `None` at the identity.
    pub fn parent(&self, i: usize) -> Option<(usize, usize)> {
        let (p, s) = self.parent[i];
        (p != ROOT).then_some((p as usize, s as usize))
    }

    /// Elements in discovery order with their distances.
    pub fn iter(&self) -> impl Iterator<Item = (&E, u32)> {
        self.elems.iter().zip(self.dist.iter().copied())
    }

    /// Number of elements at distance `≤ r`.
    pub fn count_within(&self, r: u32) -> usize {
        let r = r.min(self.radius) as usize;
        self.layer_end[r]
    }

    /// Elements in canonical order with their distances.
    pub fn canonical(&self) -> Vec<(&E, u32)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    /// Geodesic word (generator indices) for the element at position `i`.
    pub fn word_at(&self, mut i: usize) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.dist[i] as usize);
        while let Some((p, s)) = self.parent(i) {
            w.push(s);
            i = p;
        }
        w.reverse();
        w
    }

    pub fn word(&self, g: &E) -> Option<Vec<usize>> {
        self.position(g).map(|i| self.word_at(i))
    }

    /// The sub-ball of radius `r ≤ self.radius`.
    pub fn truncate(&self, r: u32) -> Ball<E> {
        assert!(r <= self.radius);
        let n = self.layer_end[r as usize];
        Ball {
            radius: r,
            elems: self.elems[..n].to_vec(),
            dist: self.dist[..n].to_vec(),
            parent: self.parent[..n].to_vec(),
            layer_end: self.layer_end[..=r as usize].to_vec(),
            index: self.elems[..n].iter().enumerate().map(|(i, e)| (e.clone(), i as u32)).collect(),
        }
    }
}

/// Exact ball `B_G(e, r)`; fails once more than `cap` states are discovered.
pub fn bfs_ball<G: MarkedGroup>(group: &G, r: u32, cap: usize) -> Result<Ball<G::Elem>> {
    let gens = group.generators();
    let e = group.identity();
    let mut ball = Ball {
        radius: r,
        elems: vec![e.clone()],
        dist: vec![0],
        parent: vec![(ROOT, 0)],
        layer_end: vec![1],
        index: FxHashMap::default(),
    };
    ball.index.insert(e, 0);
    let mut start = 0;
    for d in 1..=r {
        let end = ball.elems.len();
        let mut layer: Vec<(G::Elem, u32, u32)> = Vec::new();
        let mut seen: FxHashMap<G::Elem, usize> = FxHashMap::default();
        for i in start..end {
            for (s, g) in gens.iter().enumerate() {
                let x = group.mul(&ball.elems[i], &g.element);
                if ball.index.contains_key(&x) || seen.contains_key(&x) {
                    continue;
                }
                seen.insert(x.clone(), layer.len());
                layer.push((x, i as u32, s as u32));
            }
        }
        if ball.elems.len() + layer.len() > cap {
            return Err(Error::CapExceeded {
                what: "ball",
                size: (ball.elems.len() + layer.len()) as u128,
                cap: cap as u128,
            });
        }
        layer.sort_by(|a, b| a.0.cmp(&b.0));
        for (x, p, s) in layer {
            ball.index.insert(x.clone(), ball.elems.len() as u32);
            ball.elems.push(x);
            ball.dist.push(d);
            ball.parent.push((p, s));
        }
        ball.layer_end.push(ball.elems.len());
        start = end;
    }
    Ok(ball)
}

/// Thread-safe memo of the largest ball built so far.
#[derive(Debug)]
pub struct BallCache<G: MarkedGroup> {
    group: Arc<G>,
    cap: usize,
    cached: Mutex<Option<Arc<Ball<G::Elem>>>>,
}

impl<G: MarkedGroup> BallCache<G> {
    pub fn new(group: Arc<G>) -> Self {
        Self::with_cap(group, DEFAULT_BALL_CAP)
    }

    pub fn with_cap(group: Arc<G>, cap: usize) -> Self {
        BallCache { group, cap, cached: Mutex::new(None) }
    }

    pub fn group(&self) -> &Arc<G> {
        &self.group
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// A ball of radius at least `r`.
    pub fn ball_at_least(&self, r: u32) -> Result<Arc<Ball<G::Elem>>> {
        let mut guard = self.cached.lock().unwrap();
        if let Some(b) = guard.as_ref() {
            if b.radius >= r {
                return Ok(b.clone());
            }
        }
        let b = Arc::new(bfs_ball(self.group.as_ref(), r, self.cap)?);
        *guard = Some(b.clone());
        Ok(b)
    }

    /// Exactly `B_G(e, r)`.
    pub fn ball(&self, r: u32) -> Result<Arc<Ball<G::Elem>>> {
        let b = self.ball_at_least(r)?;
        if b.radius == r {
            Ok(b)
        } else {
            Ok(Arc::new(b.truncate(r)))
        }
    }

    /// Word length of `g`, `Exceeds(r_max)` when `|g| > r_max`. Uses a closed form
    /// when the group has one.
    pub fn word_length(&self, g: &G::Elem, r_max: u32) -> Result<Bounded> {
        if let Some(l) = self.group.word_length_closed_form(g) {
            return Ok(if l <= r_max as u64 { Bounded::Exact(l as u32) } else { Bounded::Exceeds(r_max) });
        }
        self.word_length_bfs(g, r_max)
    }

    /// `word_length`, growing the cached ball one radius at a time so that
    /// short elements never pay for a ball of radius `r_max`.
    pub fn word_length_growing(&self, g: &G::Elem, r_max: u32) -> Result<Bounded> {
        for r in 0..=r_max {
            if let Bounded::Exact(d) = self.word_length(g, r)? {
                return Ok(Bounded::Exact(d));
            }
        }
        Ok(Bounded::Exceeds(r_max))
    }

    /// Word length by search only, ignoring closed forms.
    pub fn word_length_bfs(&self, g: &G::Elem, r_max: u32) -> Result<Bounded> {
        let b = self.ball_at_least(r_max)?;
        Ok(match b.distance(g) {
            Some(d) if d <= r_max => Bounded::Exact(d),
            _ => Bounded::Exceeds(r_max),
        })
    }

    /// `d(g, h) = |g^{-1} h|`.
    pub fn distance(&self, g: &G::Elem, h: &G::Elem, r_max: u32) -> Result<Bounded> {
        let x = self.group.mul(&self.group.inv(g), h);
        self.word_length(&x, r_max)
    }
}

/// Standalone word length by BFS.
pub fn word_length_bfs<G: MarkedGroup>(group: &G, g: &G::Elem, r_max: u32, cap: usize) -> Result<Bounded> {
    let b = bfs_ball(group, r_max, cap)?;
    Ok(b.distance(g).map_or(Bounded::Exceeds(r_max), Bounded::Exact))
}
