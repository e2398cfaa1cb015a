//! Declarative experiment configuration. One JSON document per run; unknown
//! keys anywhere are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::comparison::BoundKind;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Tailprob,
    Gumbel,
    Moments,
    Albin,
    Compare,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Tailprob => "tailprob",
            ExperimentKind::Gumbel => "gumbel",
            ExperimentKind::Moments => "moments",
            ExperimentKind::Albin => "albin",
            ExperimentKind::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

/// Where the generalized Albin constant in a formula comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlbinSource {
    Fixed(f64),
    /// `"known"`: the classical Pickands value, available for `r = 1`, `α ∈ {1, 2}`.
    Named(KnownTag),
    Estimate {
        estimate: AlbinEstimateSpec,
    },
}

impl Default for AlbinSource {
    fn default() -> Self {
        AlbinSource::Named(KnownTag::Known)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnownTag {
    Known,
}

/// Ladder settings for estimating the constant inside another experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlbinEstimateSpec {
    pub grid_a: Vec<f64>,
    pub horizon: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkewSpec {
    pub m: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailprobParams {
    #[serde(default = "one")]
    pub r: usize,
    #[serde(default = "one")]
    pub n: usize,
    /// Skew-Gaussian components; absent for the Gaussian case.
    #[serde(default)]
    pub skew: Option<SkewSpec>,
    pub alpha: f64,
    /// Correlation `exp(-c |t|^α)`.
    #[serde(default = "unit")]
    pub scale_c: f64,
    #[serde(alias = "T")]
    pub horizon: f64,
    pub u: Vec<f64>,
    pub spacing: f64,
    pub reps: usize,
    #[serde(default)]
    pub albin: AlbinSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GumbelParams {
    pub n: usize,
    pub alpha: f64,
    #[serde(alias = "T")]
    pub horizons: Vec<f64>,
    pub reps: usize,
    /// Fixed grid spacing. Exclusive with `grid_delta`.
    #[serde(default)]
    pub spacing: Option<f64>,
    /// Spacing in units of the excursion scale at the centering level:
    /// `spacing = grid_delta * b_T^{-2/α}`. Keeps the discretization bias
    /// equal along the ladder. Default when neither is given.
    #[serde(default)]
    pub grid_delta: Option<f64>,
    #[serde(default)]
    pub albin: AlbinSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentNormalization {
    /// `sqrt((2/n) ln T)`, the almost-sure growth rate of the supremum.
    #[default]
    SqrtLog,
    /// `sqrt(2/n) ln T`.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsParams {
    pub n: usize,
    pub alpha: f64,
    pub p: f64,
    #[serde(alias = "T")]
    pub horizons: Vec<f64>,
    pub reps: usize,
    /// Fixed grid spacing. Exclusive with `grid_delta`.
    #[serde(default)]
    pub spacing: Option<f64>,
    /// `spacing = grid_delta * level^{-2/α}` with `level = sqrt(2 ln T / n)`.
    #[serde(default)]
    pub grid_delta: Option<f64>,
    #[serde(default)]
    pub normalization: MomentNormalization,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlbinCell {
    pub r: usize,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlbinTableParams {
    pub cells: Vec<AlbinCell>,
    pub grid_a: Vec<f64>,
    pub horizon: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub sigma1: Vec<Vec<f64>>,
    pub sigma0: Vec<Vec<f64>>,
    pub u: Vec<f64>,
    pub n: usize,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomCaseSpec {
    pub count: usize,
    #[serde(default = "four")]
    pub max_d: usize,
    #[serde(default = "three")]
    pub max_n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareParams {
    #[serde(default)]
    pub cases: Vec<CaseSpec>,
    #[serde(default)]
    pub random: Option<RandomCaseSpec>,
    pub reps: usize,
    #[serde(default = "comparison_kind")]
    pub bound: BoundKind,
}

fn one() -> usize {
    1
}
fn three() -> usize {
    3
}
fn four() -> usize {
    4
}
fn unit() -> f64 {
    1.0
}
fn comparison_kind() -> BoundKind {
    BoundKind::Comparison
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ExperimentParams {
    Tailprob(TailprobParams),
    Gumbel(GumbelParams),
    Moments(MomentsParams),
    Albin(AlbinTableParams),
    Compare(CompareParams),
}

impl ExperimentParams {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            ExperimentParams::Tailprob(_) => ExperimentKind::Tailprob,
            ExperimentParams::Gumbel(_) => ExperimentKind::Gumbel,
            ExperimentParams::Moments(_) => ExperimentKind::Moments,
            ExperimentParams::Albin(_) => ExperimentKind::Albin,
            ExperimentParams::Compare(_) => ExperimentKind::Compare,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub output: OutputSpec,
    pub params: ExperimentParams,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    kind: Option<ExperimentKind>,
    seed: u64,
    #[serde(default)]
    output: OutputSpec,
    params: serde_json::Value,
}

fn typed<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Invalid(format!("params: {e}")))
}

impl ExperimentConfig {
    /// Parse a config. `kind` is taken from the document unless `expected`
    /// is given; when both are present they must agree.
    pub fn from_json(text: &str, expected: Option<ExperimentKind>) -> Result<Self> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| Error::Invalid(format!("config: {e}")))?;
        let kind = match (raw.kind, expected) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Invalid(format!(
                    "config is for '{}' but '{}' was requested",
                    a.name(),
                    b.name()
                )))
            }
            (Some(k), _) | (None, Some(k)) => k,
            (None, None) => return Err(Error::Invalid("config has no 'kind'".into())),
        };
        let params = match kind {
            ExperimentKind::Tailprob => ExperimentParams::Tailprob(typed(raw.params)?),
            ExperimentKind::Gumbel => ExperimentParams::Gumbel(typed(raw.params)?),
            ExperimentKind::Moments => ExperimentParams::Moments(typed(raw.params)?),
            ExperimentKind::Albin => ExperimentParams::Albin(typed(raw.params)?),
            ExperimentKind::Compare => ExperimentParams::Compare(typed(raw.params)?),
        };
        Ok(Self {
            seed: raw.seed,
            output: raw.output,
            params,
        })
    }

    pub fn from_path(path: &Path, expected: Option<ExperimentKind>) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text, expected)
    }

    pub fn kind(&self) -> ExperimentKind {
        self.params.kind()
    }
}
