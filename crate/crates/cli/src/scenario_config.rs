//! User scenario files for `simulate --config`, in TOML or JSON.
//!
//! ```toml
//! name = "shifted-normal"
//! n1 = 10
//! n2 = 10
//! hypothesis_truth = []
//!
//! [law]
//! kind = "normal"
//! mu = 10.0
//! sigma = 2.0
//!
//! [effect]
//! shift = 1.5
//! ```

use std::path::Path;

use randcompare_core::experiment::{Hypothesis, PotentialTable};
use randcompare_core::simulation::{Effect, ProcessLaw, Scenario};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub n1: usize,
    pub n2: usize,
    pub law: LawSpec,
    #[serde(default)]
    pub effect: EffectSpec,
    #[serde(default)]
    pub balance_means: bool,
    #[serde(default)]
    pub fixed_outliers: Option<usize>,
    /// Hypothesis tags: `UP`, `DUP`, `EUP`, `RUP`, `RAP`, `RUs`, `RAs`.
    #[serde(default)]
    pub hypothesis_truth: Vec<String>,
    #[serde(default)]
    pub fixed_y: Option<FixedY>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LawSpec {
    Normal { mu: f64, sigma: f64 },
    Gamma { shape: f64, scale: f64 },
    UniformMixture { weight: f64, lo1: f64, hi1: f64, lo2: f64, hi2: f64 },
    Bernoulli { p: f64 },
    CorrelatedBernoulliPair { p1: f64, p2: f64, rho: f64 },
}

impl From<LawSpec> for ProcessLaw {
    fn from(l: LawSpec) -> Self {
        match l {
            LawSpec::Normal { mu, sigma } => ProcessLaw::Normal { mu, sigma },
            LawSpec::Gamma { shape, scale } => ProcessLaw::Gamma { shape, scale },
            LawSpec::UniformMixture { weight, lo1, hi1, lo2, hi2 } => {
                ProcessLaw::UniformMixture { weight, lo1, hi1, lo2, hi2 }
            }
            LawSpec::Bernoulli { p } => ProcessLaw::Bernoulli { p },
            LawSpec::CorrelatedBernoulliPair { p1, p2, rho } => ProcessLaw::CorrelatedBernoulliPair { p1, p2, rho },
        }
    }
}

/// `y2 = slope * y1 + shift + noise`; omitted fields give the identity.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EffectSpec {
    pub slope: f64,
    pub shift: f64,
    pub noise_sd: f64,
    pub center_noise: bool,
    pub preserve_mean: bool,
}

impl Default for EffectSpec {
    fn default() -> Self {
        let e = Effect::IDENTITY;
        Self {
            slope: e.slope,
            shift: e.shift,
            noise_sd: e.noise_sd,
            center_noise: e.center_noise,
            preserve_mean: e.preserve_mean,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedY {
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
}

impl ScenarioFile {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read scenario {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(&text).map_err(|e| CliError::Data {
                line: Some(e.line() as u64),
                message: format!("scenario {}: {e}", path.display()),
            })
        } else {
            toml::from_str(&text).map_err(|e| {
                let line = e.span().map(|s| text[..s.start].lines().count().max(1) as u64);
                CliError::Data { line, message: format!("scenario {}: {}", path.display(), e.message()) }
            })
        }
    }

    pub fn into_scenario(self) -> Result<Scenario, CliError> {
        let hypothesis_truth = self
            .hypothesis_truth
            .iter()
            .map(|t| {
                Hypothesis::from_tag(t).ok_or_else(|| CliError::Data {
                    line: None,
                    message: format!("unknown hypothesis `{t}`; known: UP, DUP, EUP, RUP, RAP, RUs, RAs"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let fixed_y = self.fixed_y.map(|f| PotentialTable::new(f.y1, f.y2)).transpose()?;
        let e = self.effect;
        let scenario = Scenario {
            name: self.name,
            description: self.description,
            n1: self.n1,
            n2: self.n2,
            law: self.law.into(),
            effect: Effect {
                slope: e.slope,
                shift: e.shift,
                noise_sd: e.noise_sd,
                center_noise: e.center_noise,
                preserve_mean: e.preserve_mean,
            },
            balance_means: self.balance_means,
            fixed_outliers: self.fixed_outliers,
            hypothesis_truth,
            fixed_y,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}
