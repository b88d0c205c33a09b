//! JSON experiment configs and their resolution into library values.

use std::path::Path;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::cascade::CascadeParams;
use crate::enumerate::Guards;
use crate::error::{Error, Result};
use crate::group::GroupId;
use crate::marker::MarkerVariant;
use crate::pattern::{Alphabet, Pattern};
use crate::shape::Shape;
use crate::subshift::{SubshiftSpec, ASYMPTOTIC_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Entropy,
    Marker,
    Cascade,
    Quasitile,
    Verify,
}

/// A finite shape: explicit points, a half-open interval of Z, or a box anchored at the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShapeSpec {
    Points(Vec<Vec<i64>>),
    Interval { interval: [i64; 2] },
    Box {
        #[serde(rename = "box")]
        sides: Vec<i64>,
    },
}

impl ShapeSpec {
    pub fn resolve(&self, group: GroupId, field: &str) -> Result<Shape> {
        let s = match self {
            ShapeSpec::Points(p) => {
                for (i, t) in p.iter().enumerate() {
                    if t.len() != group.dim() {
                        return Err(Error::config(
                            format!("{field}[{i}]"),
                            format!("point has {} coordinates, group {group} needs {}", t.len(), group.dim()),
                        ));
                    }
                }
                Shape::from_tuples(group, p).map_err(|e| Error::config(field, e.to_string()))?
            }
            ShapeSpec::Interval { interval: [lo, hi] } => {
                if !group.is_z() {
                    return Err(Error::config(field, "intervals are only defined on Z"));
                }
                Shape::interval(*lo, *hi)
            }
            ShapeSpec::Box { sides } => Shape::cuboid(group, sides).map_err(|e| Error::config(field, e.to_string()))?,
        };
        if s.is_empty() {
            return Err(Error::config(field, "shape is empty"));
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    #[serde(alias = "golden_mean")]
    GoldenMean,
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForbiddenSpec {
    pub shape: ShapeSpec,
    pub symbols: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubshiftConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    /// Symbol tokens; defaults to ["0", "1"].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<Vec<String>>,
    #[serde(default)]
    pub forbidden: Vec<ForbiddenSpec>,
}

impl SubshiftConfig {
    pub fn resolve(&self, group: GroupId) -> Result<SubshiftSpec> {
        let alphabet = match &self.alphabet {
            Some(a) => Alphabet::new(a.clone()).map_err(|e| Error::config("subshift.alphabet", e.to_string()))?,
            None => Alphabet::numeric(2),
        };
        let mut forbidden = Vec::new();
        if self.preset == Some(Preset::GoldenMean) {
            if !group.is_z() {
                return Err(Error::config("subshift.preset", "the golden mean preset lives on Z"));
            }
            if self.alphabet.is_some() || !self.forbidden.is_empty() {
                return Err(Error::config("subshift.preset", "golden-mean takes no alphabet or forbidden list"));
            }
            return Ok(SubshiftSpec::golden_mean());
        }
        for (i, f) in self.forbidden.iter().enumerate() {
            let field = format!("subshift.forbidden[{i}]");
            let shape = f.shape.resolve(group, &format!("{field}.shape"))?;
            if shape.len() != f.symbols.len() {
                return Err(Error::config(
                    format!("{field}.symbols"),
                    format!("{} symbols for a shape of {} points", f.symbols.len(), shape.len()),
                ));
            }
            let syms = f
                .symbols
                .iter()
                .map(|t| {
                    alphabet
                        .index_of(t)
                        .ok_or_else(|| Error::config(format!("{field}.symbols"), format!("unknown symbol {t:?}")))
                })
                .collect::<Result<Vec<u8>>>()?;
            forbidden.push(Pattern::new(shape, syms).map_err(|e| Error::config(&field, e.to_string()))?);
        }
        SubshiftSpec::sft(group, alphabet, forbidden).map_err(|e| Error::config("subshift", e.to_string()))
    }
}

fn r(s: &str, field: &str) -> Result<Ratio<i64>> {
    let parsed = match s.split_once('/') {
        Some((a, b)) => a.trim().parse::<i64>().ok().zip(b.trim().parse::<i64>().ok()),
        None => s.trim().parse::<i64>().ok().map(|a| (a, 1)),
    };
    match parsed {
        Some((_, 0)) | None => Err(Error::config(field, format!("expected a rational like \"1/4\", got {s:?}"))),
        Some((a, b)) => Ok(Ratio::new(a, b)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyConfig {
    #[serde(default = "d_n_min")]
    pub n_min: usize,
    #[serde(default = "d_n_max")]
    pub n_max: usize,
}

fn d_n_min() -> usize {
    4
}
fn d_n_max() -> usize {
    16
}

impl Default for EntropyConfig {
    fn default() -> Self {
        EntropyConfig { n_min: d_n_min(), n_max: d_n_max() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkerConfig {
    pub s: ShapeSpec,
    pub t: ShapeSpec,
    pub k: usize,
    #[serde(default = "d_variant")]
    pub variant: MarkerVariant,
    #[serde(default = "d_density_n")]
    pub density_n: usize,
    #[serde(default = "d_verify_window")]
    pub verify_window: usize,
    #[serde(default = "d_samples")]
    pub samples: usize,
    /// Seeded random windows checked on top of the exhaustive pass.
    #[serde(default = "d_random_windows")]
    pub random_windows: usize,
    #[serde(default = "d_random_window_len")]
    pub random_window_len: usize,
    /// Tiles for the density bound; defaults to [0, 8).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tiles: Option<Vec<ShapeSpec>>,
    #[serde(default = "d_quarter")]
    pub delta: String,
}

fn d_variant() -> MarkerVariant {
    MarkerVariant::Standard
}
fn d_density_n() -> usize {
    12
}
fn d_verify_window() -> usize {
    14
}
fn d_samples() -> usize {
    8
}
fn d_random_windows() -> usize {
    10_000
}
fn d_random_window_len() -> usize {
    32
}
fn d_quarter() -> String {
    "1/4".into()
}
fn d_stages() -> usize {
    3
}

impl MarkerConfig {
    pub fn delta(&self) -> Result<Ratio<i64>> {
        r(&self.delta, "marker.delta")
    }

    pub fn tiles(&self, group: GroupId) -> Result<Vec<Shape>> {
        match &self.tiles {
            None if group.is_z() => Ok(vec![Shape::interval(0, 8)]),
            None => Err(Error::config("marker.tiles", "required outside Z")),
            Some(v) => v.iter().enumerate().map(|(i, t)| t.resolve(group, &format!("marker.tiles[{i}]"))).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CascadeConfig {
    /// Target entropy gap in bits; selects certified parameters when S and T are absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<ShapeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<ShapeSpec>,
    #[serde(default = "d_quarter")]
    pub delta: String,
    #[serde(default = "d_quarter")]
    pub eta: String,
    #[serde(default = "d_stages")]
    pub stages: usize,
    #[serde(default = "d_density_n")]
    pub n: usize,
}

impl CascadeConfig {
    /// Explicit parameters, or None when they are to be chosen from ε.
    pub fn explicit(&self, group: GroupId) -> Result<Option<CascadeParams>> {
        match (&self.s, &self.t, self.k) {
            (Some(s), Some(t), Some(k)) => {
                let s = s.resolve(group, "cascade.s")?;
                let t = t.resolve(group, "cascade.t")?;
                let mut p = CascadeParams::unsafe_override(s, t, k, r(&self.delta, "cascade.delta")?, r(&self.eta, "cascade.eta")?)
                    .map_err(|e| Error::config("cascade", e.to_string()))?;
                if let Some(e) = self.epsilon {
                    p.epsilon = e;
                }
                Ok(Some(p))
            }
            (None, None, None) if self.epsilon.is_some() => Ok(None),
            _ => Err(Error::config("cascade", "give either epsilon alone or all of k, s and t")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasitileConfig {
    pub tiles: Vec<ShapeSpec>,
    #[serde(default = "d_quarter")]
    pub delta: String,
    pub n: usize,
}

impl QuasitileConfig {
    pub fn delta(&self) -> Result<Ratio<i64>> {
        r(&self.delta, "quasitile.delta")
    }

    pub fn tiles(&self, group: GroupId) -> Result<Vec<Shape>> {
        self.tiles.iter().enumerate().map(|(i, t)| t.resolve(group, &format!("quasitile.tiles[{i}]"))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
}

/// One experiment. The shard count is accepted but never echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default = "d_group")]
    pub group: GroupId,
    #[serde(default = "d_subshift")]
    pub subshift: SubshiftConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing)]
    pub shards: Option<usize>,
    #[serde(default)]
    pub guards: Guards,
    #[serde(default = "d_tolerance")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy: Option<EntropyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marker: Option<MarkerConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cascade: Option<CascadeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quasitile: Option<QuasitileConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
}

fn d_group() -> GroupId {
    GroupId::Z
}
fn d_subshift() -> SubshiftConfig {
    SubshiftConfig { preset: Some(Preset::Full), alphabet: None, forbidden: Vec::new() }
}
fn d_tolerance() -> f64 {
    ASYMPTOTIC_TOLERANCE
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { "<root>".to_string() } else { path }, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("--config", format!("cannot read {}: {e}", path.display())))?;
        ExperimentConfig::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(Error::config("tolerance", "must be a finite non-negative number of bits"));
        }
        if self.shards == Some(0) {
            return Err(Error::config("shards", "must be positive"));
        }
        if self.guards.max_enumeration == 0 {
            return Err(Error::config("guards.max_enumeration", "must be positive"));
        }
        if let Some(e) = &self.entropy {
            if e.n_min == 0 || e.n_min > e.n_max {
                return Err(Error::config("entropy", "need 1 <= n_min <= n_max"));
            }
        }
        if let Some(m) = &self.marker {
            if m.k == 0 {
                return Err(Error::config("marker.k", "must be positive"));
            }
        }
        if let Some(c) = &self.cascade {
            if c.epsilon.is_some_and(|e| e.is_nan() || e <= 0.0) {
                return Err(Error::config("cascade.epsilon", "must be positive"));
            }
            if c.n == 0 {
                return Err(Error::config("cascade.n", "must be positive"));
            }
        }
        self.subshift()?;
        Ok(())
    }

    pub fn subshift(&self) -> Result<SubshiftSpec> {
        self.subshift.resolve(self.group)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_mean_config() {
        let c = ExperimentConfig::from_json(
            r#"{"subshift": {"alphabet": ["0","1"], "forbidden": [{"shape": [[0],[1]], "symbols": ["1","1"]}]},
                "entropy": {"n_min": 4, "n_max": 6}}"#,
        )
        .unwrap();
        assert_eq!(c.subshift().unwrap().forbidden().len(), 1);
        assert_eq!(c.tolerance, 0.05);
    }

    #[test]
    fn malformed_forbidden_shape_names_the_field() {
        let e = ExperimentConfig::from_json(
            r#"{"subshift": {"forbidden": [{"shape": [[0, 1]], "symbols": ["1"]}]}}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("subshift.forbidden[0].shape"), "{e}");
        let e = ExperimentConfig::from_json(r#"{"subshift": {"forbidden": [{"shape": 3, "symbols": []}]}}"#).unwrap_err();
        assert!(e.to_string().contains("subshift.forbidden[0].shape"), "{e}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let e = ExperimentConfig::from_json(r#"{"marker": {"s": [[0]], "t": [[0]], "k": 1, "bogus": 2}}"#).unwrap_err();
        assert!(e.to_string().contains("marker"), "{e}");
    }

    #[test]
    fn shards_stay_out_of_the_echo() {
        let c = ExperimentConfig::from_json(r#"{"shards": 4}"#).unwrap();
        assert_eq!(c.shards, Some(4));
        assert!(!serde_json::to_string(&c).unwrap().contains("shards"));
    }

    #[test]
    fn rationals() {
        assert_eq!(r("1/4", "x").unwrap(), Ratio::new(1, 4));
        assert_eq!(r("2", "x").unwrap(), Ratio::from_integer(2));
        assert!(r("1/0", "x").is_err());
        assert!(r("0.25", "x").is_err());
    }
}
