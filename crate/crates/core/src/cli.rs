//! The `sofic-me` command line: argument parsing, configuration overrides,
//! the subcommands and their CSV/JSON outputs.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cocycle::{rho_checks, DomainContext};
use crate::config::{parse_digit_map, ExperimentConfig, SamplingMode};
use crate::coupling::CouplingMap;
use crate::error::{Error, Result};
use crate::experiment::{ScaleSummary, SolSetup, SolTarget};
use crate::graph::{DomainMetric, FolnerGraph};
use crate::group::{Lamplighter, MarkedGroup, SolLattice};
use crate::lemma::{expansivity_decay, fiber_bound, DigitBox};
use crate::metric::{bfs_ball, BallCache};
use crate::stats::{
    coarse_profile, coboundedness_check, covolume_ratio, expansivity_profile, fd_mass, fd_mass_components,
    integrability_sum, lipschitz_profile_on, strong_exp_fit, write_csv, CoarseKind, Profile, WeightFn,
};

#[derive(Debug, Parser)]
#[command(name = "sofic-me", version, about = "Finite-scale couplings between lamplighter Følner graphs and SOL lattices")]
pub struct Cli {
    /// TOML experiment file.
    #[arg(short, long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(short, long, global = true)]
    pub out: Option<PathBuf>,
    /// Comma-separated scales (overrides `scale.n_list`).
    #[arg(long, global = true, value_delimiter = ',')]
    pub n: Option<Vec<u32>>,
    #[arg(long, global = true)]
    pub experiment_id: Option<String>,
    /// `p/q` (overrides `scale.thickening`).
    #[arg(long, global = true)]
    pub thickening: Option<String>,
    #[arg(long, global = true)]
    pub sampling: Option<Sampling>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// `p/q` (overrides `weights.epsilon`).
    #[arg(long, global = true)]
    pub epsilon: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Sampling {
    Full,
    Montecarlo,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Build domain and target graphs and report their sizes.
    Build,
    /// Build the coupling and report fibers, ranks and coverage.
    Map,
    /// Lipschitz, expansivity and coarse profiles as CSV.
    Profile,
    /// Weighted sums of expansivity profiles and the strong exponential fit.
    Integrability,
    /// Digit-map certificate, preimage decay and fiber bound.
    Lemma82 {
        /// Digit-box size (overrides `lemma82.n`).
        #[arg(long = "box")]
        n: Option<u32>,
        #[arg(long)]
        q: Option<u32>,
        /// `standard` or `displaced:i`.
        #[arg(long)]
        map: Option<String>,
    },
    /// Exhaustive pairwise check of the upper-bound claim.
    Claimj {
        /// Digit-box size (overrides `claimj.n`).
        #[arg(long = "box")]
        n: Option<u32>,
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        map: Option<String>,
    },
    /// Fundamental-domain masses against the covolume.
    Fdmass {
        /// Scale (overrides `fdmass.n`).
        #[arg(long = "scale")]
        n: Option<u32>,
        /// Enumeration radius.
        #[arg(long)]
        radius: Option<u32>,
        /// Domain ball radius; whole components when absent.
        #[arg(long)]
        r: Option<u32>,
    },
    /// Target-to-domain size ratios across scales.
    Covolume {
        /// `p/q`: required bound on successive relative change.
        #[arg(long)]
        max_change: Option<String>,
    },
    /// Write graphs and the coupling as text and read them back.
    Export {
        /// Parse an existing export instead of writing one.
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Every subcommand whose section is configured.
    All,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Build => "build",
            Command::Map => "map",
            Command::Profile => "profile",
            Command::Integrability => "integrability",
            Command::Lemma82 { .. } => "lemma82",
            Command::Claimj { .. } => "claimj",
            Command::Fdmass { .. } => "fdmass",
            Command::Covolume { .. } => "covolume",
            Command::Export { .. } => "export",
            Command::All => "all",
        }
    }
}

/// A checked statement: `measured relation bound`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub measured: Value,
    pub relation: String,
    pub bound: Value,
    /// A failing required assertion makes the run exit nonzero.
    pub required: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Metadata {
    pub version: String,
    /// Seconds since the Unix epoch. The only nondeterministic field.
    pub timestamp: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub experiment_id: String,
    pub command: String,
    pub results: BTreeMap<String, Value>,
    pub assertions: Vec<Assertion>,
    pub files: Vec<String>,
    pub metadata: Metadata,
}

impl Summary {
    pub fn ok(&self) -> bool {
        self.assertions.iter().all(|a| a.pass || !a.required)
    }
}

/// Applies command-line overrides and validates the result.
pub fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(o) = &cli.out {
        cfg.output.dir = o.clone();
    }
    if let Some(n) = &cli.n {
        cfg.scale.n_list = n.clone();
    }
    if let Some(id) = &cli.experiment_id {
        cfg.experiment_id = id.clone();
    }
    if let Some(t) = &cli.thickening {
        cfg.scale.thickening = Some(t.clone());
    }
    if let Some(s) = cli.sampling {
        cfg.sampling.mode = match s {
            Sampling::Full => SamplingMode::Full,
            Sampling::Montecarlo => SamplingMode::Montecarlo,
        };
    }
    if let Some(s) = cli.seed {
        cfg.sampling.seed = s;
    }
    if let Some(s) = cli.samples {
        cfg.sampling.samples = s;
    }
    if let Some(e) = &cli.epsilon {
        cfg.weights.epsilon = e.clone();
    }
    match &cli.command {
        Command::Lemma82 { n, q, map } if n.is_some() || q.is_some() || map.is_some() => {
            let s = cfg.lemma82.get_or_insert_with(|| crate::config::Lemma82Section {
                n: 4,
                q: 1,
                m: vec![1, 2, 3],
                map: "standard".into(),
            });
            s.n = n.unwrap_or(s.n);
            s.q = q.unwrap_or(s.q);
            if let Some(m) = map {
                s.map = m.clone();
            }
        }
        Command::Claimj { n, q, map } if n.is_some() || q.is_some() || map.is_some() => {
            let s = cfg.claimj.get_or_insert_with(|| crate::config::ClaimSection { n: 4, q: 1, map: "standard".into() });
            s.n = n.unwrap_or(s.n);
            s.q = q.unwrap_or(s.q);
            if let Some(m) = map {
                s.map = m.clone();
            }
        }
        Command::Fdmass { n, radius, r } if n.is_some() || radius.is_some() || r.is_some() => {
            let s = cfg.fdmass.get_or_insert_with(|| crate::config::FdSection {
                n: 3,
                radius: 4,
                r: None,
                in_target: true,
                tolerance: None,
            });
            s.n = n.unwrap_or(s.n);
            s.radius = radius.unwrap_or(s.radius);
            s.r = r.or(s.r);
        }
        Command::Covolume { max_change: Some(m) } => cfg.covolume.max_change = Some(m.clone()),
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

struct Built {
    domain: Arc<FolnerGraph<Lamplighter>>,
    target: SolTarget,
    map: CouplingMap<Lamplighter, SolLattice>,
}

/// Shared state for one invocation: the group data, lazily built scales and
/// the summary being filled.
struct Run {
    cfg: ExperimentConfig,
    setup: SolSetup,
    scales: BTreeMap<u32, Arc<Built>>,
    results: BTreeMap<String, Value>,
    assertions: Vec<Assertion>,
    profiles: Vec<Profile>,
    files: Vec<String>,
}

impl Run {
    fn new(cfg: ExperimentConfig) -> Result<Self> {
        let setup = SolSetup::new(cfg.group.k, cfg.group.a, cfg.t()?)?;
        Ok(Run {
            cfg,
            setup,
            scales: BTreeMap::new(),
            results: BTreeMap::new(),
            assertions: Vec::new(),
            profiles: Vec::new(),
            files: Vec::new(),
        })
    }

    fn scale(&mut self, n: u32) -> Result<Arc<Built>> {
        if let Some(b) = self.scales.get(&n) {
            return Ok(b.clone());
        }
        let thickening = self.cfg.thickening()?.unwrap_or_else(|| self.setup.default_thickening());
        let domain = self.setup.domain(n)?;
        let target = self.setup.target(n, &thickening, self.cfg.scale.enlargement)?;
        let map = self.setup.coupling(domain.clone())?;
        let missing = map.values().iter().filter(|v| target.graph.index_of(v).is_none()).count();
        self.check(format!("n={n} image inside target"), json!(missing), "==", json!(0), true);
        let map = if missing == 0 { map.with_codomain(target.graph.clone())? } else { map };
        let b = Arc::new(Built { domain, target, map });
        self.scales.insert(n, b.clone());
        Ok(b)
    }

    fn check(&mut self, name: String, measured: Value, relation: &str, bound: Value, required: bool) -> bool {
        let pass = match (measured.as_f64(), bound.as_f64()) {
            (Some(m), Some(b)) => match relation {
                "==" => m == b,
                "<=" => m <= b,
                ">=" => m >= b,
                _ => false,
            },
            _ => measured == bound && relation == "==",
        };
        self.assertions.push(Assertion { name, measured, relation: relation.into(), bound, required, pass });
        pass
    }

    fn result(&mut self, key: impl Into<String>, value: impl Serialize) -> Result<()> {
        self.results.insert(key.into(), serde_json::to_value(value)?);
        Ok(())
    }

    fn sample(&self, len: usize) -> Vec<u32> {
        match self.cfg.sampling.mode {
            SamplingMode::Full => (0..len as u32).collect(),
            SamplingMode::Montecarlo => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.sampling.seed);
                let mut v: Vec<u32> = rand::seq::index::sample(&mut rng, len, self.cfg.sampling.samples.min(len))
                    .into_iter()
                    .map(|i| i as u32)
                    .collect();
                v.sort_unstable();
                v
            }
        }
    }

    fn build(&mut self) -> Result<()> {
        let mut rows = Vec::new();
        for n in self.cfg.scale.n_list.clone() {
            let b = self.scale(n)?;
            let inj = b.map.injectivity();
            rows.push(ScaleSummary {
                n,
                domain: b.domain.len(),
                core: b.target.core_len,
                target: b.target.graph.len(),
                image: inj.image,
                multi_fibers: inj.multi_fibers,
                max_fiber: inj.max_fiber,
            });
        }
        self.result("scales", rows)
    }

    fn map(&mut self) -> Result<()> {
        let radius = self.cfg.caps.domain_radius;
        let mut rows = Vec::new();
        for n in self.cfg.scale.n_list.clone() {
            let b = self.scale(n)?;
            let ctx = DomainContext::new(&b.domain, radius)?;
            let inj = b.map.injectivity();
            let rho = rho_checks(&b.map, &ctx, inj.max_fiber as u32, radius)?;
            let cobounded = coboundedness_check(&b.map, &ctx, radius)?;
            let dist = if b.map.target_graph().is_some() { b.map.image_distances()? } else { Vec::new() };
            let unreached = dist.iter().filter(|d| d.is_none()).count();
            let reach = dist.iter().flatten().max().copied();
            self.check(format!("n={n} rank below largest fiber"), json!(rho.bounded.is_one()), "==", json!(true), true);
            rows.push(json!({
                "n": n,
                "image": inj.image,
                "multi_fibers": inj.multi_fibers,
                "max_fiber": inj.max_fiber,
                "rho_bounded": rho.bounded.to_string(),
                "rho_separated": rho.separated.to_string(),
                "rho_reaches_zero": rho.reaches_zero.to_string(),
                "cobounded": cobounded.to_string(),
                "good_radius": radius,
                "max_distance_to_image": reach,
                "target_unreached": unreached,
            }));
        }
        self.result("maps", rows)
    }

    fn profile(&mut self) -> Result<()> {
        let cap = self.cfg.caps.distance;
        let id = self.cfg.experiment_id.clone();
        for n in self.cfg.scale.n_list.clone() {
            let b = self.scale(n)?;
            let group = b.domain.group().clone();
            let ctx = DomainContext::new(&b.domain, 1)?;
            let labels: Vec<String> = if self.cfg.probes.generators.is_empty() {
                group.generators().iter().map(|g| g.label.clone()).collect()
            } else {
                self.cfg.probes.generators.clone()
            };
            let verts = self.sample(b.domain.len());
            for label in labels {
                let s = group
                    .generator_index(&label)
                    .ok_or_else(|| Error::config("probes.generators", format!("unknown generator `{label}`")))?;
                let t = Profile::new(&id, n, &b.map.id, format!("lipschitz:{label}"));
                self.profiles.push(lipschitz_profile_on(&b.map, &ctx, s, cap, t, &verts)?);
            }
            let cache = BallCache::new(group.clone());
            let metric = DomainMetric::Ambient { cap };
            for word in self.cfg.probes.elements.clone() {
                let w = self.setup.lattice.parse_word(&word).map_err(|e| Error::config("probes.elements", e.to_string()))?;
                let h = self.setup.lattice.eval_word(&w);
                let t = Profile::new(&id, n, &b.map.id, format!("expansivity:{h}"));
                self.profiles.push(expansivity_profile(&b.map, &h, metric, &cache, t)?);
            }
            if self.cfg.probes.coarse {
                for (kind, name) in [(CoarseKind::Injectivity, "injectivity"), (CoarseKind::Surjectivity, "surjectivity")] {
                    let t = Profile::new(&id, n, &b.map.id, name);
                    self.profiles.push(coarse_profile(&b.map, kind, metric, &cache, t)?);
                }
            }
        }
        let consistent = self.profiles.iter().filter(|p| !p.is_consistent()).count();
        self.check("profiles consistent".into(), json!(consistent), "==", json!(0), true);
        let summary: Vec<Value> = self
            .profiles
            .iter()
            .map(|p| json!({"n": p.n, "probe": p.probe, "denominator": p.denominator, "overflow": p.overflow, "max": p.max(), "mean": p.mean()}))
            .collect();
        self.result("profiles", summary)
    }

    fn integrability(&mut self) -> Result<()> {
        let cap = self.cfg.caps.distance;
        let id = self.cfg.experiment_id.clone();
        let epsilon = self.cfg.epsilon()?.to_f64().unwrap_or(f64::NAN);
        let grid = self.cfg.deltas()?;
        let lattice = self.setup.lattice.clone();
        let mut probes: Vec<(u32, <SolLattice as MarkedGroup>::Elem)> = Vec::new();
        if self.cfg.probes.fit_radius > 0 {
            let ball = bfs_ball(lattice.as_ref(), self.cfg.probes.fit_radius, 1 << 20)?;
            probes.extend(ball.iter().map(|(h, l)| (l, h.clone())));
        } else {
            let cache = BallCache::new(lattice.clone());
            probes.push((0, lattice.identity()));
            for word in &self.cfg.probes.elements {
                let w = lattice.parse_word(word).map_err(|e| Error::config("probes.elements", e.to_string()))?;
                let h = lattice.eval_word(&w);
                let l = cache.word_length_growing(&h, 64)?.exact().ok_or_else(|| Error::config("probes.elements", format!("`{word}` is too long")))?;
                if l > 0 {
                    probes.push((l, h));
                }
            }
        }
        let mut fits = Vec::new();
        for n in self.cfg.scale.n_list.clone() {
            let b = self.scale(n)?;
            let map = self.setup.coupling(b.domain.clone())?;
            let cache = BallCache::new(b.domain.group().clone());
            let mut profiles = Vec::new();
            for (l, h) in &probes {
                let t = Profile::new(&id, n, &map.id, format!("expansivity:{h}"));
                profiles.push((*l, expansivity_profile(&map, h, DomainMetric::Ambient { cap }, &cache, t)?));
            }
            let mut sums = Vec::new();
            for spec in self.cfg.weights.specs.clone() {
                for d in &grid {
                    let w = WeightFn::parse(&spec, d.clone())?;
                    for (l, p) in &profiles {
                        let s = integrability_sum(p, &w);
                        sums.push(json!({"weight": w.label(), "probe": p.probe, "length": l, "sum": s.is_finite().then_some(s)}));
                    }
                }
            }
            let fit = strong_exp_fit(&profiles, epsilon, &grid)?;
            self.check(format!("n={n} strong exponential fit"), json!(fit.pass), "==", json!(true), true);
            fits.push(json!({"n": n, "sums": sums, "fit": fit}));
            self.profiles.extend(profiles.into_iter().map(|(_, p)| p));
        }
        self.result("integrability", fits)
    }

    fn lemma82(&mut self) -> Result<()> {
        let Some(s) = self.cfg.lemma82.clone() else {
            return Err(Error::config("lemma82", "section missing"));
        };
        let map = parse_digit_map("lemma82.map", &s.map)?;
        let k = self.cfg.group.k;
        let b = DigitBox::with_map(k, s.n, map)?;
        let cert = b.lipschitz_certificate();
        self.check("lipschitz violations".into(), json!(cert.violation.is_some() as u32), "==", json!(0), true);
        let stats = b.preimage_stats(s.q);
        let max = stats.iter().map(|x| x.0).max().unwrap_or(0);
        self.check("preimage cardinality".into(), json!(max), "<=", json!(fiber_bound(k, s.q)), true);
        let rows = expansivity_decay(&stats, k, s.q, &s.m);
        for r in &rows {
            let measured = json!(format!("{}/{}", r.count, r.total));
            let bound = json!(format!("{}/{}", r.bound.0, r.bound.1));
            self.assertions.push(Assertion {
                name: format!("decay m={} (diameter >= {})", r.m, r.threshold),
                measured,
                relation: "<=".into(),
                bound,
                required: true,
                pass: r.pass(),
            });
        }
        let decay: Vec<Value> = rows
            .iter()
            .map(|r| json!({"m": r.m, "threshold": r.threshold, "count": r.count, "total": r.total, "bound": format!("{}/{}", r.bound.0, r.bound.1)}))
            .collect();
        self.result(
            "lemma82",
            json!({"k": k, "n": s.n, "q": s.q, "map": s.map, "edges": cert.edges, "violation": cert.violation, "max_preimage": max, "decay": decay}),
        )
    }

    fn claimj(&mut self) -> Result<()> {
        let Some(s) = self.cfg.claimj.clone() else {
            return Err(Error::config("claimj", "section missing"));
        };
        let map = parse_digit_map("claimj.map", &s.map)?;
        let r = DigitBox::with_map(self.cfg.group.k, s.n, map)?.claim_j_oracle(s.q);
        self.check("claim violations".into(), json!(r.violations), "==", json!(0), true);
        self.result(
            "claimj",
            json!({"k": r.k, "n": r.n, "q": r.q, "map": s.map, "pairs": r.pairs, "violations": r.violations, "example": r.example}),
        )
    }

    fn fdmass(&mut self) -> Result<()> {
        let Some(s) = self.cfg.fdmass.clone() else {
            return Err(Error::config("fdmass", "section missing"));
        };
        let b = self.scale(s.n)?;
        let ball = bfs_ball(self.setup.lattice.as_ref(), s.radius, 1 << 24)?;
        let fd = match s.r {
            None => fd_mass_components(&b.map, &ball, ball.len(), s.in_target)?,
            Some(r) => fd_mass(&b.map, &ball, ball.len(), r, None, s.in_target)?,
        };
        let sum = fd.total() as f64 / fd.denominator as f64;
        let covolume = covolume_ratio(b.target.graph.len(), b.domain.len())?;
        let cv = covolume.to_f64().unwrap_or(f64::NAN);
        let rel = (sum - cv).abs() / cv;
        if let Some(t) = &s.tolerance {
            let t = crate::stats::parse_rational(t).map_err(|m| Error::config("fdmass.tolerance", m))?;
            self.check("fd mass relative error".into(), json!(rel), "<=", json!(t.to_f64()), true);
        }
        self.result(
            "fdmass",
            json!({
                "n": s.n,
                "radius": s.radius,
                "r": s.r,
                "in_target": s.in_target,
                "counts": fd.counts,
                "denominator": fd.denominator,
                "sum": sum,
                "covolume": covolume.to_string(),
                "relative_error": rel,
            }),
        )
    }

    fn covolume(&mut self) -> Result<()> {
        let mut rows = Vec::new();
        let mut prev: Option<f64> = None;
        let bound = match &self.cfg.covolume.max_change {
            Some(m) => Some(crate::stats::parse_rational(m).map_err(|e| Error::config("covolume.max_change", e))?),
            None => None,
        };
        for n in self.cfg.scale.n_list.clone() {
            let b = self.scale(n)?;
            let ratio = covolume_ratio(b.target.graph.len(), b.domain.len())?;
            let core = covolume_ratio(b.target.core_len, b.domain.len())?;
            let x = ratio.to_f64().unwrap_or(f64::NAN);
            let change = prev.map(|p| (x - p).abs() / p);
            if let (Some(c), Some(bd)) = (change, &bound) {
                self.check(format!("n={n} covolume change"), json!(c), "<=", json!(bd.to_f64()), true);
            }
            rows.push(json!({
                "n": n,
                "domain": b.domain.len(),
                "core": b.target.core_len,
                "target": b.target.graph.len(),
                "ratio": ratio.to_string(),
                "ratio_f64": x,
                "core_ratio": core.to_string(),
                "relative_change": change,
            }));
            prev = Some(x);
        }
        self.result("covolume", rows)
    }

    fn export(&mut self, check: Option<&Path>) -> Result<()> {
        if let Some(path) = check {
            let kind = self.check_export(path)?;
            return self.result("checked", json!({"file": path.display().to_string(), "kind": kind}));
        }
        let dir = self.cfg.output.dir.clone();
        std::fs::create_dir_all(&dir)?;
        let mut rows = Vec::new();
        for n in self.cfg.scale.n_list.clone() {
            let b = self.scale(n)?;
            let files = [format!("domain_n{n}.txt"), format!("target_n{n}.txt"), format!("map_n{n}.txt")];
            let mut bytes = Vec::new();
            b.domain.write(&mut bytes)?;
            let dom_ok = round_trip(&bytes, |r| FolnerGraph::read(b.domain.group().clone(), r).and_then(|g| rewrite(|w| g.write(w))))?;
            std::fs::write(dir.join(&files[0]), &bytes)?;
            bytes.clear();
            b.target.graph.write(&mut bytes)?;
            let tgt_ok = round_trip(&bytes, |r| FolnerGraph::read(self.setup.lattice.clone(), r).and_then(|g| rewrite(|w| g.write(w))))?;
            std::fs::write(dir.join(&files[1]), &bytes)?;
            bytes.clear();
            b.map.write(&mut bytes)?;
            let map_ok = round_trip(&bytes, |r| {
                CouplingMap::read(b.domain.clone(), self.setup.lattice.clone(), r).and_then(|m| rewrite(|w| m.write(w)))
            })?;
            std::fs::write(dir.join(&files[2]), &bytes)?;
            self.check(format!("n={n} export round trip"), json!(dom_ok && tgt_ok && map_ok), "==", json!(true), true);
            self.files.extend(files.iter().cloned());
            rows.push(json!({"n": n, "files": files}));
        }
        self.result("exports", rows)
    }

    /// Parses an export by its header; errors carry the offending line.
    fn check_export(&mut self, path: &Path) -> Result<&'static str> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("");
        let second = lines.next().unwrap_or("");
        let domain_group = Lamplighter::new(self.cfg.group.k);
        match header {
            "sofic-me graph 1" if second == format!("group {}", domain_group.descriptor()) => {
                FolnerGraph::read(Arc::new(domain_group), text.as_bytes())?;
                Ok("domain graph")
            }
            "sofic-me graph 1" => {
                FolnerGraph::read(self.setup.lattice.clone(), text.as_bytes())?;
                Ok("target graph")
            }
            "sofic-me coupling 1" => {
                let count = text
                    .lines()
                    .position(|l| l.starts_with("vertices "))
                    .and_then(|i| text.lines().nth(i)?.strip_prefix("vertices ")?.trim().parse::<usize>().ok())
                    .ok_or_else(|| Error::Parse { line: 0, msg: "missing `vertices` line".into() })?;
                let n = (1..=16)
                    .find(|&n| crate::graph::lamplighter_box_size(self.cfg.group.k, n) == count as u128)
                    .ok_or_else(|| Error::Parse { line: 5, msg: format!("{count} vertices is not a domain size") })?;
                let domain = self.setup.domain(n)?;
                CouplingMap::read(domain, self.setup.lattice.clone(), text.as_bytes())?;
                Ok("coupling")
            }
            other => Err(Error::Parse { line: 1, msg: format!("unknown header `{other}`") }),
        }
    }
}

fn rewrite(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut v = Vec::new();
    f(&mut v)?;
    Ok(v)
}

fn round_trip(bytes: &[u8], read: impl FnOnce(&[u8]) -> Result<Vec<u8>>) -> Result<bool> {
    Ok(read(bytes)? == bytes)
}

fn now() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Runs one subcommand and writes `<command>.json` (and `<command>.csv` when
/// profiles were produced) into the output directory.
pub fn run(cli: &Cli) -> Result<Summary> {
    let cfg = resolve_config(cli)?;
    let dir = cfg.output.dir.clone();
    let id = cfg.experiment_id.clone();
    let mut run = Run::new(cfg)?;
    match &cli.command {
        Command::Build => run.build()?,
        Command::Map => run.map()?,
        Command::Profile => run.profile()?,
        Command::Integrability => run.integrability()?,
        Command::Lemma82 { .. } => run.lemma82()?,
        Command::Claimj { .. } => run.claimj()?,
        Command::Fdmass { .. } => run.fdmass()?,
        Command::Covolume { .. } => run.covolume()?,
        Command::Export { check } => run.export(check.as_deref())?,
        Command::All => {
            run.build()?;
            run.map()?;
            run.profile()?;
            run.integrability()?;
            if run.cfg.lemma82.is_some() {
                run.lemma82()?;
            }
            if run.cfg.claimj.is_some() {
                run.claimj()?;
            }
            if run.cfg.fdmass.is_some() {
                run.fdmass()?;
            }
            run.covolume()?;
            run.export(None)?;
        }
    }
    std::fs::create_dir_all(&dir)?;
    let name = cli.command.name();
    if !run.profiles.is_empty() {
        let csv = format!("{name}.csv");
        write_csv(&run.profiles, BufWriter::new(File::create(dir.join(&csv))?))?;
        run.files.push(csv);
    }
    let summary = Summary {
        experiment_id: id,
        command: name.into(),
        results: run.results,
        assertions: run.assertions,
        files: run.files,
        metadata: Metadata { version: env!("CARGO_PKG_VERSION").into(), timestamp: now() },
    };
    let mut w = BufWriter::new(File::create(dir.join(format!("{name}.json")))?);
    serde_json::to_writer_pretty(&mut w, &summary)?;
    writeln!(w)?;
    w.flush()?;
    Ok(summary)
}

/// Exit code: 0 when every required assertion holds, 1 when one fails, 2 on error.
pub fn main_with(cli: &Cli) -> i32 {
    match run(cli) {
        Ok(s) => {
            for a in &s.assertions {
                let tag = if a.pass { "ok  " } else if a.required { "FAIL" } else { "warn" };
                println!("{tag} {}: {} {} {}", a.name, a.measured, a.relation, a.bound);
            }
            println!("wrote {}.json to {}", s.command, cli.out.as_deref().map_or("the output directory".into(), |p| p.display().to_string()));
            if s.ok() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Reads a summary back, e.g. for comparisons that ignore the timestamp.
pub fn read_summary(path: &Path) -> Result<Value> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(dir: &Path, config: Option<&Path>, args: &[&str]) -> Cli {
        let mut argv = vec!["sofic-me".to_string(), "--out".into(), dir.display().to_string()];
        if let Some(c) = config {
            argv.push("--config".into());
            argv.push(c.display().to_string());
        }
        argv.extend(args.iter().map(|s| s.to_string()));
        Cli::try_parse_from(argv).unwrap()
    }

    fn write_config(dir: &Path, text: &str) -> PathBuf {
        let p = dir.join("exp.toml");
        std::fs::write(&p, text).unwrap();
        p
    }

    fn without_timestamp(path: &Path) -> Value {
        let mut v = read_summary(path).unwrap();
        v["metadata"]["timestamp"] = json!(0);
        v
    }

    #[test]
    fn build_reports_known_sizes() {
        let dir = tempfile::tempdir().unwrap();
        let s = run(&cli(dir.path(), None, &["--n", "2,3", "build"])).unwrap();
        let scales = &s.results["scales"];
        assert_eq!(scales[0]["domain"], 96);
        assert_eq!(scales[0]["core"], 5816);
        assert_eq!(scales[1]["target"], 60699);
        assert!(s.ok());
        assert!(dir.path().join("build.json").exists());
    }

    #[test]
    fn claimj_standard_passes_displaced_fails() {
        let dir = tempfile::tempdir().unwrap();
        let good = write_config(dir.path(), "[claimj]\nn = 4\nq = 1\n");
        assert_eq!(main_with(&cli(dir.path(), Some(&good), &["claimj"])), 0);
        let bad = write_config(dir.path(), "[claimj]\nn = 5\nq = 1\nmap = \"displaced:4\"\n");
        assert_eq!(main_with(&cli(dir.path(), Some(&bad), &["claimj"])), 1);
        let s = read_summary(&dir.path().join("claimj.json")).unwrap();
        assert!(s["results"]["claimj"]["violations"].as_u64().unwrap() >= 1);
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let c = write_config(dir.path(), "[claimj]\nn = 5\nq = 1\nmap = \"displaced:4\"\n");
        let s = run(&cli(dir.path(), Some(&c), &["claimj", "--map", "standard", "--box", "3"])).unwrap();
        assert!(s.ok());
        assert_eq!(s.results["claimj"]["n"], 3);
    }

    #[test]
    fn config_errors_exit_two() {
        let dir = tempfile::tempdir().unwrap();
        let c = write_config(dir.path(), "[group]\nk = 2\na = [[2,1],[1,1]]\nt = \"-1\"\n");
        let args = cli(dir.path(), Some(&c), &["build"]);
        match run(&args) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "group.t"),
            other => panic!("{other:?}"),
        }
        assert_eq!(main_with(&args), 2);
    }

    #[test]
    fn output_is_deterministic_apart_from_the_timestamp() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let text = "experiment_id = \"det\"\n[scale]\nn_list = [2]\nenlargement = 1\n[probes]\nelements = [\"t\", \"x\"]\ncoarse = true\n";
        for d in [&a, &b] {
            let c = write_config(d.path(), text);
            run(&cli(d.path(), Some(&c), &["profile"])).unwrap();
        }
        assert_eq!(without_timestamp(&a.path().join("profile.json")), without_timestamp(&b.path().join("profile.json")));
        let csv_a = std::fs::read(a.path().join("profile.csv")).unwrap();
        assert_eq!(csv_a, std::fs::read(b.path().join("profile.csv")).unwrap());
        let back = crate::stats::read_csv(csv_a.as_slice()).unwrap();
        assert_eq!(back.len(), 3 + 2 + 2);
    }

    #[test]
    fn montecarlo_sampling_is_seeded() {
        let dir = tempfile::tempdir().unwrap();
        let args = ["--n", "3", "--sampling", "montecarlo", "--samples", "50", "--seed", "9", "profile"];
        let s1 = run(&cli(dir.path(), None, &args)).unwrap();
        let s2 = run(&cli(dir.path(), None, &args)).unwrap();
        assert_eq!(s1.results, s2.results);
        let p = &s1.results["profiles"][0];
        assert!(p["denominator"].as_u64().unwrap() <= 50);
    }

    #[test]
    fn export_round_trips_and_check_reports_lines() {
        let dir = tempfile::tempdir().unwrap();
        let s = run(&cli(dir.path(), None, &["--n", "2", "export"])).unwrap();
        assert!(s.ok(), "{:?}", s.assertions);
        for f in ["domain_n2.txt", "target_n2.txt", "map_n2.txt"] {
            let path = dir.path().join(f);
            run(&cli(dir.path(), None, &["export", "--check", path.to_str().unwrap()])).unwrap();
        }
        let path = dir.path().join("domain_n2.txt");
        let text = std::fs::read_to_string(&path).unwrap();
        let broken: Vec<&str> = text.lines().enumerate().map(|(i, l)| if i == 9 { "v 3 garbage" } else { l }).collect();
        std::fs::write(&path, broken.join("\n")).unwrap();
        match run(&cli(dir.path(), None, &["export", "--check", path.to_str().unwrap()])) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 10),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lemma82_and_covolume() {
        let dir = tempfile::tempdir().unwrap();
        let c = write_config(dir.path(), "[lemma82]\nn = 5\nq = 1\nm = [1, 2, 3]\n[covolume]\nmax_change = \"1/4\"\n");
        let s = run(&cli(dir.path(), Some(&c), &["lemma82"])).unwrap();
        assert!(s.ok(), "{:?}", s.assertions);
        let s = run(&cli(dir.path(), Some(&c), &["--n", "2,3,4", "covolume"])).unwrap();
        assert_eq!(s.results["covolume"][0]["ratio"], "12558/96".parse::<num_rational::BigRational>().unwrap().to_string());
        assert!(s.ok(), "{:?}", s.assertions);
    }

    #[test]
    fn integrability_fit_over_a_probe_ball() {
        let dir = tempfile::tempdir().unwrap();
        let c = write_config(dir.path(), "[scale]\nn_list = [3]\nenlargement = 1\n[probes]\nfit_radius = 1\n[weights]\nspecs = [\"exp\", \"power:2\"]\ndeltas = [\"1/32\", \"1/2\"]\nepsilon = \"1\"\n");
        let s = run(&cli(dir.path(), Some(&c), &["integrability"])).unwrap();
        let fit = &s.results["integrability"][0]["fit"];
        assert_eq!(fit["rows"].as_array().unwrap().len(), 2);
        assert!(dir.path().join("integrability.csv").exists());
    }
}
