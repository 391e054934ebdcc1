//! JSON run configuration.
//!
//! Required keys: `K`, `N`, `F`, `M`, `P`, `B`, `H`. Everything else has a
//! default, listed by [`applied_defaults`] so the summary can echo it.

use std::path::PathBuf;

use coded_push::channel::{ChannelError, FadingParams};
use coded_push::harness::{RequestModel, SweepParameter, TrialSpec, MAX_ANALYTIC_USERS, MAX_BITLEVEL_USERS};
use coded_push::{Mode, Scheme, SizesSource, SystemConfig};
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

impl ConfigError {
    fn invalid(field: &str, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    /// The offending key for validation errors.
    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::Invalid { field, .. } => Some(field),
            ConfigError::Parse { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "K", deserialize_with = "count")]
    pub users: usize,
    #[serde(rename = "N", deserialize_with = "count")]
    pub contents: usize,
    /// Bits per content.
    #[serde(rename = "F", deserialize_with = "count")]
    pub content_bits: usize,
    /// Cache size in contents.
    #[serde(rename = "M")]
    pub cache: f64,
    /// Watts.
    #[serde(rename = "P")]
    pub power: f64,
    /// Hz.
    #[serde(rename = "B")]
    pub bandwidth: f64,
    #[serde(rename = "H", deserialize_with = "count")]
    pub subcarriers: usize,
    /// Seconds.
    #[serde(rename = "T_u", default = "defaults::slot_duration")]
    pub slot_duration: f64,
    #[serde(default = "defaults::kappa")]
    pub kappa: f64,
    /// W/Hz.
    #[serde(default = "defaults::base_psd")]
    pub base_psd: f64,
    /// Meters.
    #[serde(default = "defaults::radius")]
    pub radius: f64,
    #[serde(default = "defaults::pathloss_exponent")]
    pub pathloss_exponent: f64,
    /// Meters.
    #[serde(default = "defaults::min_distance")]
    pub min_distance: f64,
    #[serde(default = "defaults::scheme")]
    pub scheme: Scheme,
    #[serde(default = "defaults::mode")]
    pub mode: Mode,
    #[serde(default = "defaults::sizes_source")]
    pub sizes_source: SizesSource,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::trials", deserialize_with = "count")]
    pub trials: usize,
    /// Fixed request vector; drawn uniformly per trial when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub requests: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    /// 0 silent, 1 summary, 2 per-trial detail.
    #[serde(default = "defaults::verbosity")]
    pub verbosity: u8,
    #[serde(default = "defaults::fd_tol")]
    pub fd_tol: f64,
}

mod defaults {
    use super::*;

    pub fn slot_duration() -> f64 {
        1e-3
    }
    pub fn kappa() -> f64 {
        FadingParams::default().rice_factor
    }
    pub fn base_psd() -> f64 {
        coded_push::channel::DEFAULT_BASE_PSD
    }
    pub fn radius() -> f64 {
        FadingParams::default().cell_radius
    }
    pub fn pathloss_exponent() -> f64 {
        FadingParams::default().pathloss_exponent
    }
    pub fn min_distance() -> f64 {
        FadingParams::default().min_distance
    }
    pub fn scheme() -> Scheme {
        Scheme::Coded
    }
    pub fn mode() -> Mode {
        Mode::Fd
    }
    pub fn sizes_source() -> SizesSource {
        SizesSource::Analytic
    }
    pub fn trials() -> usize {
        1
    }
    pub fn verbosity() -> u8 {
        1
    }
    pub fn fd_tol() -> f64 {
        coded_push::allocator::DEFAULT_FD_TOL
    }
}

/// Keys that take a default when omitted; `seed` defaults to 0.
const DEFAULTED_KEYS: [&str; 15] = [
    "T_u",
    "kappa",
    "base_psd",
    "radius",
    "pathloss_exponent",
    "min_distance",
    "scheme",
    "mode",
    "sizes_source",
    "seed",
    "trials",
    "requests",
    "verbosity",
    "fd_tol",
    "output",
];

/// Accepts integral JSON numbers written either way (`1000` or `1e3`).
fn count<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Num {
        Int(u64),
        Float(f64),
    }
    match Num::deserialize(d)? {
        Num::Int(v) => usize::try_from(v).map_err(serde::de::Error::custom),
        Num::Float(v) if v >= 0.0 && v.fract() == 0.0 && v <= usize::MAX as f64 => Ok(v as usize),
        Num::Float(v) => Err(serde::de::Error::custom(format!(
            "expected a non-negative integer, got {v}"
        ))),
    }
}

/// Parses and validates a JSON config.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Keys absent from `text` whose defaults were applied, with the value used.
pub fn applied_defaults(text: &str, cfg: &RunConfig) -> Vec<(&'static str, String)> {
    let given: serde_json::Map<String, serde_json::Value> = serde_json::from_str(text).unwrap_or_default();
    let resolved = serde_json::to_value(cfg).expect("config serializes");
    DEFAULTED_KEYS
        .iter()
        .filter(|k| !given.contains_key(**k))
        .map(|&k| {
            let v = match resolved.get(k) {
                Some(serde_json::Value::String(s)) => s.clone(),
                Some(v) => v.to_string(),
                None if k == "requests" => "uniform".to_string(),
                None => "none".to_string(),
            };
            (k, v)
        })
        .collect()
}

impl RunConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn system(&self) -> Result<SystemConfig, ConfigError> {
        SystemConfig::new(
            self.contents,
            self.users,
            self.content_bits,
            self.cache,
            self.power,
            self.bandwidth,
            self.subcarriers,
            self.slot_duration,
        )
        .map_err(|e| ConfigError::invalid(e.field(), e.to_string()))
    }

    pub fn fading(&self) -> FadingParams {
        FadingParams {
            cell_radius: self.radius,
            pathloss_exponent: self.pathloss_exponent,
            rice_factor: self.kappa,
            min_distance: self.min_distance,
        }
    }

    pub fn trial_spec(&self) -> Result<TrialSpec, ConfigError> {
        Ok(TrialSpec {
            scheme: self.scheme,
            mode: self.mode,
            sizes_source: self.sizes_source,
            system: self.system()?,
            fading: self.fading(),
            base_psd: self.base_psd,
            requests: match &self.requests {
                Some(r) => RequestModel::Fixed(r.clone()),
                None => RequestModel::Uniform,
            },
            seed: self.seed,
            trials: self.trials,
            fd_tol: self.fd_tol,
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.system()?;
        self.fading().validate().map_err(|e| match e {
            ChannelError::InvalidParams { field, reason } => {
                let key = match field {
                    "cell_radius" => "radius",
                    "rice_factor" => "kappa",
                    other => other,
                };
                ConfigError::invalid(key, reason)
            }
            other => ConfigError::invalid("fading", other.to_string()),
        })?;
        if !(self.base_psd.is_finite() && self.base_psd > 0.0) {
            return Err(ConfigError::invalid("base_psd", "must be a positive W/Hz value"));
        }
        if self.trials == 0 {
            return Err(ConfigError::invalid("trials", "must be at least 1"));
        }
        if !(self.fd_tol > 0.0 && self.fd_tol <= 1e-2) {
            return Err(ConfigError::invalid("fd_tol", "must lie in (0, 0.01]"));
        }
        if self.verbosity > 2 {
            return Err(ConfigError::invalid("verbosity", "must be 0, 1 or 2"));
        }
        if self.sizes_source == SizesSource::Bitlevel && self.users > MAX_BITLEVEL_USERS {
            return Err(ConfigError::invalid(
                "K",
                format!("bit-level sizes support at most {MAX_BITLEVEL_USERS} users"),
            ));
        }
        if self.scheme == Scheme::Coded && self.users > MAX_ANALYTIC_USERS {
            return Err(ConfigError::invalid(
                "K",
                format!("the coded scheme supports at most {MAX_ANALYTIC_USERS} users"),
            ));
        }
        if let Some(r) = &self.requests {
            if r.len() != self.users {
                return Err(ConfigError::invalid(
                    "requests",
                    format!("expected {} entries, got {}", self.users, r.len()),
                ));
            }
            if let Some(&bad) = r.iter().find(|&&c| c >= self.contents) {
                return Err(ConfigError::invalid(
                    "requests",
                    format!("content {bad} outside 0..{}", self.contents),
                ));
            }
        }
        if let Some(sweep) = &self.sweep {
            validate_grid(self, sweep.parameter, &sweep.grid).map_err(|reason| ConfigError::invalid("sweep.grid", reason))?;
        }
        Ok(())
    }
}

/// Checks every grid value against the base config.
pub fn validate_grid(cfg: &RunConfig, parameter: SweepParameter, grid: &[f64]) -> Result<(), String> {
    if grid.is_empty() {
        return Err("grid is empty".into());
    }
    let spec = cfg.trial_spec().map_err(|e| e.to_string())?;
    for &v in grid {
        parameter
            .apply(&spec, v)
            .map_err(|e| format!("value {v} for {}: {e}", parameter.as_str()))?;
    }
    Ok(())
}
