//! Run configuration files (TOML).

use fermisim::{Backend, Error, Spin, Statistics};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formalism {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Density,
    PairCorrelation,
    Momentum,
    Energy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub m: usize,
    #[serde(default = "open")]
    pub boundary: Boundary,
}

fn open() -> Boundary {
    Boundary::Open
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub v0: f64,
    pub t0: f64,
}

/// Initial configuration: an occupation list for the second-quantized
/// encoding or an increasing label tuple for the first-quantized one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticlesConfig {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub occupied: Vec<(usize, Spin)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub t: f64,
    pub r: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    /// Draw count; derived from `epsilon` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub formalism: Formalism,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default)]
    pub mode: Statistics,
    #[serde(default)]
    pub validation_mode: bool,
    #[serde(default = "default_observables")]
    pub observables: Vec<Observable>,
    /// Extra k-point correlations (k ≤ 3) over 0-based spin-orbital modes.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub correlations: Vec<Vec<usize>>,
    pub lattice: LatticeConfig,
    pub params: ParamsConfig,
    pub particles: ParticlesConfig,
    pub plan: PlanConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingConfig>,
}

fn default_observables() -> Vec<Observable> {
    vec![Observable::Density]
}

/// Configuration of the `antisym` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntisymConfig {
    pub labels: Vec<u32>,
    #[serde(default)]
    pub mode: Statistics,
    /// Largest label the registers must hold; defaults to the largest given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_label: Option<u32>,
}

/// A configuration problem, reported with the offending field.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        ConfigError(e.to_string())
    }
}

fn field(name: &str, msg: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("`{name}`: {msg}"))
}

fn finite(name: &str, x: f64) -> Result<(), ConfigError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(field(name, format!("{x} is not a finite number")))
    }
}

pub fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    parse_toml(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
}

pub fn parse_toml<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, ConfigError> {
    // toml's messages carry the line and column of the problem
    toml::from_str(text).map_err(|e| ConfigError(e.to_string().trim_end().to_string()))
}

impl RunConfig {
    /// Semantic checks that the parser cannot express.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let m = self.lattice.m;
        if m == 0 {
            return Err(field("lattice.m", "need at least one site"));
        }
        finite("params.v0", self.params.v0)?;
        finite("params.t0", self.params.t0)?;
        finite("plan.t", self.plan.t)?;
        if self.plan.r == 0 {
            return Err(field("plan.r", "need at least one Trotter step"));
        }
        match self.formalism {
            Formalism::Second => {
                if !self.particles.labels.is_empty() {
                    return Err(field("particles.labels", "second-quantized runs take `particles.occupied`"));
                }
                if self.mode == Statistics::Bose {
                    return Err(field("mode", "the occupation encoding is fermionic only"));
                }
                if self.observables.contains(&Observable::Momentum) {
                    return Err(field("observables", "momentum needs the first-quantized encoding"));
                }
                for &(site, _) in &self.particles.occupied {
                    if !(1..=m).contains(&site) {
                        return Err(field("particles.occupied", format!("site {site} outside 1..={m}")));
                    }
                }
            }
            Formalism::First => {
                if !self.particles.occupied.is_empty() {
                    return Err(field("particles.occupied", "first-quantized runs take `particles.labels`"));
                }
                if m < 2 || !m.is_power_of_two() {
                    return Err(field("lattice.m", format!("{m} is not a power of two >= 2")));
                }
                check_labels("particles.labels", &self.particles.labels, 2 * m as u32)?;
            }
        }
        let modes = 2 * m;
        for set in &self.correlations {
            if set.is_empty() || set.len() > 3 {
                return Err(field("correlations", format!("{set:?}: 1 to 3 modes per correlation")));
            }
            if let Some(q) = set.iter().find(|&&q| q >= modes) {
                return Err(field("correlations", format!("mode {q} outside 0..{modes}")));
            }
        }
        if let Some(s) = &self.sampling {
            match (s.trials, s.epsilon) {
                (Some(0), _) => return Err(field("sampling.trials", "need at least one trial")),
                (None, None) => return Err(field("sampling", "give `trials` or `epsilon`")),
                _ => {}
            }
            if let Some(e) = s.epsilon {
                if !(e > 0.0 && e < 1.0) {
                    return Err(field("sampling.epsilon", format!("{e} outside (0, 1)")));
                }
            }
        }
        Ok(())
    }

    pub fn particle_count(&self) -> usize {
        match self.formalism {
            Formalism::Second => self.particles.occupied.len(),
            Formalism::First => self.particles.labels.len(),
        }
    }
}

pub fn check_labels(name: &str, labels: &[u32], max_label: u32) -> Result<(), ConfigError> {
    if labels.is_empty() {
        return Err(field(name, "need at least one label"));
    }
    if let Some(l) = labels.iter().find(|&&l| l == 0 || l > max_label) {
        return Err(field(name, format!("label {l} outside 1..={max_label}")));
    }
    if labels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(field(name, format!("{labels:?} is not strictly increasing")));
    }
    Ok(())
}
