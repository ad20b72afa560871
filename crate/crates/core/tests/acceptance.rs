//! Acceptance suite. Runs without the libtest harness so that every criterion
//! prints its `PASS`/`FAIL` line; exits nonzero when any criterion fails.
//! Arguments are substring filters on the criterion names. Tolerances are the
//! constants below.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use sofic_me::cocycle::{cocycle_defect, cylinder_measure, observed_patterns, DomainContext, TargetContext};
use sofic_me::coupling::CouplingMap;
use sofic_me::experiment::SolSetup;
use sofic_me::geometry::{sol_box_core, DigitMap, SolBoxParams};
use sofic_me::graph::{folner_lamplighter, DomainMetric, FolnerGraph, DEFAULT_VERTEX_CAP};
use sofic_me::group::{Lamplighter, MarkedGroup, SolLattice};
use sofic_me::lemma::{expansivity_decay, fiber_bound, DigitBox};
use sofic_me::metric::{bfs_ball, Ball, BallCache, Bounded};
use sofic_me::quadratic::{integer, rational};
use sofic_me::stats::{
    default_delta_grid, expansivity_profile, fd_mass, fd_mass_components, strong_exp_fit, Profile,
};

const LIPSCHITZ_BUDGET: Duration = Duration::from_secs(10);
const DECAY_BUDGET: Duration = Duration::from_secs(300);
const VOLUME_TOLERANCE: f64 = 0.20;
const DEFECT_THRESHOLD: f64 = 0.9;
const FD_TOLERANCE: f64 = 0.15;
/// Smallest enumeration radius whose intrinsic neighbourhood of the image
/// covers at least this share of `ℋ'_n`.
const FD_COVERAGE: f64 = 0.95;
const FIT_EPSILON: f64 = 1.0;
const FIT_PROBE_RADIUS: u32 = 3;

static FAILED: AtomicUsize = AtomicUsize::new(0);

fn verdict(id: u32, name: &str, pass: bool, detail: &str) {
    println!("criterion {id:>2}: {} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    if !pass {
        FAILED.fetch_add(1, Ordering::SeqCst);
    }
}

fn main() {
    let all: [(&str, fn()); 11] = [
        ("criterion_01_lipschitz_certificate", criterion_01_lipschitz_certificate),
        ("criterion_02_expansivity_decay", criterion_02_expansivity_decay),
        ("criterion_03_preimage_cardinality", criterion_03_preimage_cardinality),
        ("criterion_04_claim_j", criterion_04_claim_j),
        ("criterion_05_good_set_fraction", criterion_05_good_set_fraction),
        ("criterion_06_word_length_sandwich", criterion_06_word_length_sandwich),
        ("criterion_07_folner_volume", criterion_07_folner_volume),
        ("criterion_08_cocycle_defect", criterion_08_cocycle_defect),
        ("criterion_09_fundamental_domain_mass", criterion_09_fundamental_domain_mass),
        ("criterion_10_cylinder_additivity", criterion_10_cylinder_additivity),
        ("criterion_11_strong_exponential_fit", criterion_11_strong_exponential_fit),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut ran = 0;
    for (name, f) in all {
        if !filters.is_empty() && !filters.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        ran += 1;
        if catch_unwind(AssertUnwindSafe(f)).is_err() {
            println!("{name}: FAIL (panicked)");
            FAILED.fetch_add(1, Ordering::SeqCst);
        }
    }
    let failed = FAILED.load(Ordering::SeqCst);
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn golden() -> SolSetup {
    SolSetup::new(2, [[2, 1], [1, 1]], rational(1, 4)).unwrap()
}

fn criterion_01_lipschitz_certificate() {
    let start = Instant::now();
    let mut edges = 0;
    let mut bad = Vec::new();
    for k in [2, 3] {
        for n in 1..=6 {
            let cert = DigitBox::new(k, n).unwrap().lipschitz_certificate();
            edges += cert.edges;
            if let Some(v) = cert.violation {
                bad.push((k, n, v));
            }
        }
    }
    let t = start.elapsed();
    verdict(
        1,
        "lipschitz certificate",
        bad.is_empty() && t < LIPSCHITZ_BUDGET,
        &format!("{edges} edges, violations {bad:?}, {:.2}s", t.as_secs_f64()),
    );
}

fn criterion_02_expansivity_decay() {
    let start = Instant::now();
    let b = DigitBox::new(2, 8).unwrap();
    let rows = expansivity_decay(&b.preimage_stats(1), 2, 1, &[1, 2, 3, 4, 5]);
    let t = start.elapsed();
    let detail: Vec<String> =
        rows.iter().map(|r| format!("m={} {}/{} vs 4/{}", r.m, r.count, r.total, r.bound.1)).collect();
    let pass = rows.iter().all(|r| r.pass()) && rows[0].count > 0 && t < DECAY_BUDGET;
    verdict(2, "expansivity decay", pass, &format!("{}, {:.1}s", detail.join("; "), t.as_secs_f64()));
}

fn criterion_03_preimage_cardinality() {
    let mut worst = Vec::new();
    let mut pass = true;
    for q in [1, 2] {
        let mut max = 0;
        for n in 1..=6 {
            let b = DigitBox::new(2, n).unwrap();
            max = max.max(b.preimage_stats(q).iter().map(|s| s.0).max().unwrap());
        }
        pass &= max as u64 <= fiber_bound(2, q);
        worst.push(format!("q={q} max {max} bound {}", fiber_bound(2, q)));
    }
    verdict(3, "preimage cardinality", pass, &worst.join("; "));
}

fn criterion_04_claim_j() {
    let plain = DigitBox::new(2, 5).unwrap().claim_j_oracle(1);
    let mutated = DigitBox::with_map(2, 5, DigitMap::Displaced(4)).unwrap().claim_j_oracle(1);
    verdict(
        4,
        "claim J oracle",
        plain.violations == 0 && plain.pairs > 0 && mutated.violations >= 1,
        &format!(
            "{} pairs, {} violations; displaced control {} violations",
            plain.pairs, plain.violations, mutated.violations
        ),
    );
}

fn criterion_05_good_set_fraction() {
    let mut pass = true;
    let mut detail = Vec::new();
    for n in 2..=6u32 {
        let f = folner_lamplighter(2, n, DEFAULT_VERTEX_CAP).unwrap();
        let ball = bfs_ball(f.group().as_ref(), 1, 1 << 10).unwrap();
        let good = f.good_set(&ball, 1);
        let exact = good.count() as u64 * (n as u64 + 1) == f.len() as u64 * (n as u64 - 1);
        pass &= exact;
        if n <= 3 {
            let agree = (0..f.len() as u32).all(|v| good.contains(v) == f.ball_isomorphic(v, &ball));
            pass &= agree;
            detail.push(format!("n={n} {}/{} iso-check {agree}", good.count(), f.len()));
        } else {
            detail.push(format!("n={n} {}/{}", good.count(), f.len()));
        }
    }
    verdict(5, "good-set exactness", pass, &detail.join("; "));
}

fn sandwich<G: MarkedGroup>(group: &G) -> (usize, usize) {
    let ball = bfs_ball(group, 6, 1 << 22).unwrap();
    let bad = ball
        .iter()
        .filter(|(g, d)| !group.length_bounds(g).unwrap().brackets(*d as u64))
        .count();
    (ball.len(), bad)
}

fn criterion_06_word_length_sandwich() {
    let (na, ba) = sandwich(&Lamplighter::new(2));
    let (ns, bs) = sandwich(&SolLattice::new([[2, 1], [1, 1]]).unwrap());
    verdict(
        6,
        "word-length sandwich",
        ba == 0 && bs == 0,
        &format!("lamplighter {na} elements, {ba} outside; SOL_A {ns} elements, {bs} outside"),
    );
}

fn criterion_07_folner_volume() {
    let s = golden();
    let vol = s.eigen.fundamental_volume(&s.t, 64).midpoint_f64();
    let mut pass = true;
    let mut detail = Vec::new();
    for n in 2..=4u32 {
        let p = SolBoxParams { t: s.t.clone(), n, thickening: integer(0), enlargement: 0, cap: DEFAULT_VERTEX_CAP };
        let count = sol_box_core(&s.eigen, &s.lattice, &p).unwrap().len();
        let want = n as f64 * 2f64.powi(2 * n as i32 + 2);
        let ratio = count as f64 * vol / want;
        pass &= (ratio - 1.0).abs() <= VOLUME_TOLERANCE;
        detail.push(format!("n={n} {count} points, ratio {ratio:.3}"));
    }
    verdict(7, "folner volume", pass, &detail.join("; "));
}

/// `#{x : x·B(e,|gg'|) ⊂ F, x·B(e,|g|) ⊂ F, xg·B(e,|g'|) ⊂ F}` by group
/// multiplication and membership only.
fn defect_oracle(f: &FolnerGraph<Lamplighter>, ball: &Ball<<Lamplighter as MarkedGroup>::Elem>, g: &<Lamplighter as MarkedGroup>::Elem, h: &<Lamplighter as MarkedGroup>::Elem) -> u64 {
    let group = f.group();
    let len = |x| ball.distance(x).unwrap();
    let inside = |x: &_, r: u32| ball.iter().filter(|(_, d)| *d <= r).all(|(w, _)| f.index_of(&group.mul(x, w)).is_some());
    let gh = group.mul(g, h);
    f.vertices()
        .iter()
        .filter(|x| {
            inside(x, len(&gh).max(len(g))) && {
                let xg = group.mul(x, g);
                f.index_of(&xg).is_some() && inside(&xg, len(h))
            }
        })
        .count() as u64
}

fn criterion_08_cocycle_defect() {
    let mut pass = true;
    let mut detail = Vec::new();
    for n in [3u32, 4] {
        let f = Arc::new(folner_lamplighter(2, n, DEFAULT_VERTEX_CAP).unwrap());
        let id = CouplingMap::identity(f.clone());
        let ctx = DomainContext::new(&f, 4).unwrap();
        let tctx = TargetContext::new(&id, 4).unwrap();
        let b2: Vec<_> = ctx.ball.iter().filter(|(_, l)| *l <= 2).map(|(g, _)| g.clone()).collect();
        let mut mismatches = 0;
        for g in &b2 {
            for h in &b2 {
                let got = cocycle_defect(&id, &ctx, Some(&tctx), g, h).unwrap().count;
                mismatches += (got != defect_oracle(&f, &ctx.ball, g, h)) as u32;
            }
        }
        pass &= mismatches == 0;
        detail.push(format!("identity n={n}: {mismatches} of {} pairs differ", b2.len().pow(2)));
    }

    let s = golden();
    let mut seq = Vec::new();
    for n in 3..=6u32 {
        let f = s.domain(n).unwrap();
        let tg = s.target(n, &s.default_thickening(), 1).unwrap();
        let map = s.coupling(f.clone()).unwrap().with_codomain(tg.graph.clone()).unwrap();
        let id = CouplingMap::identity(f.clone());
        let ctx = DomainContext::new(&f, 4).unwrap();
        let tctx = TargetContext::new(&map, 8).unwrap();
        let id_tctx = TargetContext::new(&id, 4).unwrap();
        let b2: Vec<_> = ctx.ball.iter().filter(|(_, l)| *l <= 2).map(|(g, _)| g.clone()).collect();
        let (mut worst, mut worst_cond) = (1.0f64, 1.0f64);
        for g in &b2 {
            for h in &b2 {
                let a = cocycle_defect(&map, &ctx, Some(&tctx), g, h).unwrap();
                let base = cocycle_defect(&id, &ctx, Some(&id_tctx), g, h).unwrap();
                worst = worst.min(a.value());
                if base.count > 0 {
                    worst_cond = worst_cond.min(a.count as f64 / base.count as f64);
                }
            }
        }
        detail.push(format!("sol n={n}: min {worst:.4} (relative to identity {worst_cond:.4})"));
        seq.push(worst);
    }
    let monotone = seq.windows(2).all(|w| w[0] <= w[1]);
    pass &= monotone && *seq.last().unwrap() >= DEFECT_THRESHOLD;
    verdict(8, "cocycle defect", pass, &detail.join("; "));
}

fn criterion_09_fundamental_domain_mass() {
    let mut pass = true;
    let mut detail = Vec::new();

    let f = Arc::new(folner_lamplighter(2, 4, DEFAULT_VERTEX_CAP).unwrap());
    let id = CouplingMap::identity(f.clone());
    let ctx = DomainContext::new(&f, 2).unwrap();
    let enumeration = id.target_cache().ball(2).unwrap();
    let label = f.components();
    let diam = (0..=*label.iter().max().unwrap())
        .map(|c| {
            let comp: Vec<u32> = (0..f.len() as u32).filter(|&x| label[x as usize] == c).collect();
            f.subset_diameter(&comp, 256).unwrap().exact().unwrap()
        })
        .max()
        .unwrap();
    let good = |x: u32| ctx.is_good(x, 2);
    let fd = fd_mass(&id, &enumeration, enumeration.len(), diam, Some(&good), false).unwrap();
    let ok = fd.mass(0).is_one() && fd.counts[1..].iter().all(|&c| c == 0);
    pass &= ok;
    detail.push(format!("identity n=4 r={diam}: mass(0) {}, later masses zero {ok}", fd.mass(0)));

    let s = golden();
    let n = 5;
    let d = s.domain(n).unwrap();
    let tg = s.target(n, &s.default_thickening(), 1).unwrap();
    let map = s.coupling(d.clone()).unwrap().with_codomain(tg.graph.clone()).unwrap();
    let covolume = tg.graph.len() as f64 / d.len() as f64;
    let dist = map.image_distances().unwrap();
    let mut c = 0;
    while (dist.iter().filter(|x| x.is_some_and(|v| v <= c)).count() as f64) < FD_COVERAGE * tg.graph.len() as f64 {
        c += 1;
    }
    let ball = bfs_ball(s.lattice.as_ref(), c, 1 << 24).unwrap();
    let fd = fd_mass_components(&map, &ball, ball.len(), true).unwrap();
    let sum = fd.total() as f64 / fd.denominator as f64;
    let rel = (sum - covolume).abs() / covolume;
    pass &= rel <= FD_TOLERANCE;
    detail.push(format!("sol n={n} C={c}: sum {sum:.3} vs covolume {covolume:.3} ({:.1}% off)", 100.0 * rel));
    verdict(9, "fundamental-domain mass", pass, &detail.join("; "));
}

fn criterion_10_cylinder_additivity() {
    let s = golden();
    let f = s.domain(3).unwrap();
    let map = s.coupling(f.clone()).unwrap();
    let ctx = DomainContext::new(&f, 1).unwrap();
    let group = f.group();
    let good = ctx.good[1].count() as u64;
    let mut pass = true;
    let mut detail = Vec::new();
    for gen in group.generators() {
        let sigma = vec![group.identity(), gen.element.clone()];
        let pats = observed_patterns(&map, &ctx, &sigma).unwrap();
        let total: u64 = pats.keys().map(|p| cylinder_measure(&map, &ctx, p).unwrap().count).sum();
        pass &= total == good;
        detail.push(format!("{}: {} patterns, {total}/{}", gen.label, pats.len(), f.len()));
    }
    verdict(10, "cylinder additivity", pass, &format!("{}; good set {good}/{}", detail.join("; "), f.len()));
}

fn criterion_11_strong_exponential_fit() {
    let s = golden();
    let n = 6;
    let d = s.domain(n).unwrap();
    let map = s.coupling(d.clone()).unwrap();
    let cache = BallCache::new(d.group().clone());
    let probes = bfs_ball(s.lattice.as_ref(), FIT_PROBE_RADIUS, 1 << 20).unwrap();
    let profiles: Vec<(u32, Profile)> = probes
        .iter()
        .map(|(h, l)| {
            let t = Profile::new("fit", n, "sol", h.to_string());
            (l, expansivity_profile(&map, h, DomainMetric::Ambient { cap: 1024 }, &cache, t).unwrap())
        })
        .collect();
    let fit = strong_exp_fit(&profiles, FIT_EPSILON, &default_delta_grid()).unwrap();
    let row = fit.rows.iter().find(|r| Some(&r.delta) == fit.delta.as_ref());

    let mut adversarial: Vec<(u32, Profile)> = (0..=3)
        .map(|l| {
            let mut p = Profile::new("adv", 0, "fixture", format!("h{l}"));
            p.record_n(Bounded::Exact(l), 10);
            (l, p)
        })
        .collect();
    adversarial[3].1.record(Bounded::Exceeds(64));
    let adv = strong_exp_fit(&adversarial, FIT_EPSILON, &default_delta_grid()).unwrap();

    let pass = fit.pass && row.is_some_and(|r| r.c_triple.is_some()) && !adv.pass;
    let detail = match row {
        Some(r) => format!(
            "{} probes, delta {}, C' {:.3}, C''' {:.4}; adversarial fixture pass = {}",
            profiles.len(),
            r.delta,
            r.c_prime.unwrap_or(f64::INFINITY),
            r.c_triple.unwrap_or(f64::INFINITY),
            adv.pass
        ),
        None => format!("no delta passes; adversarial fixture pass = {}", adv.pass),
    };
    verdict(11, "strong exponential fit", pass, &detail);
}
