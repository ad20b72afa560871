//! Experiment configuration: a TOML file with sections, exact rationals
//! written as `"p/q"`.

use std::path::{Path, PathBuf};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DigitMap;
use crate::group::Matrix2;
use crate::stats::parse_rational;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_id")]
    pub experiment_id: String,
    #[serde(default)]
    pub group: GroupSection,
    #[serde(default)]
    pub scale: ScaleSection,
    #[serde(default)]
    pub caps: CapsSection,
    #[serde(default)]
    pub probes: ProbeSection,
    #[serde(default)]
    pub weights: WeightSection,
    pub lemma82: Option<Lemma82Section>,
    pub claimj: Option<ClaimSection>,
    pub fdmass: Option<FdSection>,
    #[serde(default)]
    pub covolume: CovolumeSection,
    #[serde(default)]
    pub sampling: SamplingSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_id() -> String {
    "experiment".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSection {
    pub k: u32,
    pub a: Matrix2,
    /// Tile scale, `"p/q"`.
    pub t: String,
}

impl Default for GroupSection {
    fn default() -> Self {
        GroupSection { k: 2, a: [[2, 1], [1, 1]], t: "1/4".into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleSection {
    pub n_list: Vec<u32>,
    /// Thickening `C` of `ℋ_n`; the image thickening when absent.
    pub thickening: Option<String>,
    pub enlargement: u32,
}

impl Default for ScaleSection {
    fn default() -> Self {
        ScaleSection { n_list: vec![2, 3], thickening: None, enlargement: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsSection {
    /// Search cap for distances.
    pub distance: u32,
    /// Good-set and ball radius on the domain side.
    pub domain_radius: u32,
}

impl Default for CapsSection {
    fn default() -> Self {
        CapsSection { distance: 64, domain_radius: 2 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    /// Lamplighter generator labels for Lipschitz profiles.
    #[serde(default)]
    pub generators: Vec<String>,
    /// Target elements as words in `x X y Y t T` for expansivity profiles.
    #[serde(default)]
    pub elements: Vec<String>,
    /// Injectivity and surjectivity profiles.
    #[serde(default)]
    pub coarse: bool,
    /// Radius of the target ball probed by the integrability fit; `0` skips it.
    #[serde(default)]
    pub fit_radius: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSection {
    /// `power:p`, `exp` or `linf:T`.
    pub specs: Vec<String>,
    pub deltas: Vec<String>,
    pub epsilon: String,
}

impl Default for WeightSection {
    fn default() -> Self {
        let deltas = crate::stats::default_delta_grid().iter().map(|d| d.to_string()).collect();
        WeightSection { specs: vec!["exp".into()], deltas, epsilon: "1".into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lemma82Section {
    pub n: u32,
    pub q: u32,
    pub m: Vec<u32>,
    /// `standard` or `displaced:i`.
    #[serde(default = "standard")]
    pub map: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimSection {
    pub n: u32,
    pub q: u32,
    #[serde(default = "standard")]
    pub map: String,
}

fn standard() -> String {
    "standard".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdSection {
    pub n: u32,
    /// Enumeration radius `C`.
    pub radius: u32,
    /// Domain ball radius `r`; the component diameter when absent.
    pub r: Option<u32>,
    #[serde(default)]
    pub in_target: bool,
    /// Required `|Σ − covolume| / covolume`, `"p/q"`.
    pub tolerance: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovolumeSection {
    /// Required bound on successive relative change, `"p/q"`.
    pub max_change: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    #[serde(default)]
    pub mode: SamplingMode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    #[default]
    Full,
    Montecarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("out") }
    }
}

fn rational(key: &str, s: &str) -> Result<BigRational> {
    parse_rational(s).map_err(|m| Error::config(key, m))
}

/// `standard` or `displaced:i`.
pub fn parse_digit_map(key: &str, s: &str) -> Result<DigitMap> {
    match s.split_once(':') {
        None if s == "standard" => Ok(DigitMap::Standard),
        Some(("displaced", i)) => {
            i.trim().parse().map(DigitMap::Displaced).map_err(|_| Error::config(key, format!("bad lamp index in `{s}`")))
        }
        _ => Err(Error::config(key, format!("unknown digit map `{s}`"))),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let key = e.span().map(|s| text[..s.start].lines().count()).unwrap_or(0);
            Error::Config { key: format!("line {key}"), msg: e.message().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn t(&self) -> Result<BigRational> {
        rational("group.t", &self.group.t)
    }

    pub fn thickening(&self) -> Result<Option<BigRational>> {
        self.scale.thickening.as_deref().map(|s| rational("scale.thickening", s)).transpose()
    }

    pub fn deltas(&self) -> Result<Vec<BigRational>> {
        self.weights.deltas.iter().map(|d| rational("weights.deltas", d)).collect()
    }

    pub fn epsilon(&self) -> Result<BigRational> {
        rational("weights.epsilon", &self.weights.epsilon)
    }

    /// Checks every key whose value is not checked by its type.
    pub fn validate(&self) -> Result<()> {
        use num_traits::Signed;
        if self.group.k < 2 {
            return Err(Error::config("group.k", "must be at least 2"));
        }
        if !self.t()?.is_positive() {
            return Err(Error::config("group.t", "must be positive"));
        }
        if let Some(c) = self.thickening()? {
            if c.is_negative() {
                return Err(Error::config("scale.thickening", "must be non-negative"));
            }
        }
        if self.scale.n_list.iter().any(|&n| n == 0) {
            return Err(Error::config("scale.n_list", "scales start at 1"));
        }
        for d in self.deltas()? {
            if !d.is_positive() {
                return Err(Error::config("weights.deltas", "must be positive"));
            }
        }
        if !self.epsilon()?.is_positive() {
            return Err(Error::config("weights.epsilon", "must be positive"));
        }
        for s in &self.weights.specs {
            crate::stats::WeightFn::parse(s, BigRational::from_integer(1.into()))
                .map_err(|_| Error::config("weights.specs", format!("unknown weight `{s}`")))?;
        }
        if let Some(l) = &self.lemma82 {
            parse_digit_map("lemma82.map", &l.map)?;
            if l.q == 0 || l.m.iter().any(|&m| m == 0) {
                return Err(Error::config("lemma82", "q and m must be at least 1"));
            }
        }
        if let Some(c) = &self.claimj {
            parse_digit_map("claimj.map", &c.map)?;
        }
        if let Some(f) = &self.fdmass {
            if let Some(t) = &f.tolerance {
                rational("fdmass.tolerance", t)?;
            }
        }
        if let Some(m) = &self.covolume.max_change {
            rational("covolume.max_change", m)?;
        }
        if self.sampling.mode == SamplingMode::Montecarlo && self.sampling.samples == 0 {
            return Err(Error::config("sampling.samples", "montecarlo mode needs a positive sample count"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse() {
        let c = ExperimentConfig::parse("").unwrap();
        assert_eq!(c.group.k, 2);
        assert_eq!(c.t().unwrap(), BigRational::new(1.into(), 4.into()));
        assert!(c.lemma82.is_none());
    }

    #[test]
    fn full_config() {
        let text = r#"
experiment_id = "demo"
[group]
k = 2
a = [[2, 1], [1, 1]]
t = "1/4"
[scale]
n_list = [2, 3]
thickening = "3/2"
enlargement = 1
[probes]
generators = ["a1", "t"]
elements = ["t", "x"]
[weights]
specs = ["exp", "power:2"]
deltas = ["1/2", "1/8"]
epsilon = "1"
[lemma82]
n = 4
q = 1
m = [1, 2]
[claimj]
n = 3
q = 1
map = "displaced:2"
[sampling]
mode = "montecarlo"
seed = 7
samples = 100
"#;
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.thickening().unwrap(), Some(BigRational::new(3.into(), 2.into())));
        assert_eq!(parse_digit_map("k", &c.claimj.unwrap().map).unwrap(), DigitMap::Displaced(2));
        assert_eq!(c.sampling.mode, SamplingMode::Montecarlo);
    }

    #[test]
    fn errors_name_the_key() {
        let cases = [
            ("[group]\nk = 1\na = [[2,1],[1,1]]\nt = \"1\"", "group.k"),
            ("[group]\nk = 2\na = [[2,1],[1,1]]\nt = \"0.25\"", "group.t"),
            ("[weights]\nspecs = [\"cosh\"]\ndeltas = [\"1\"]\nepsilon = \"1\"", "weights.specs"),
            ("[claimj]\nn = 3\nq = 1\nmap = \"shifted\"", "claimj.map"),
            ("[sampling]\nmode = \"montecarlo\"", "sampling.samples"),
        ];
        for (text, key) in cases {
            match ExperimentConfig::parse(text) {
                Err(Error::Config { key: k, .. }) => assert_eq!(k, key, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(ExperimentConfig::parse("bogus = 1"), Err(Error::Config { .. })));
    }
}
