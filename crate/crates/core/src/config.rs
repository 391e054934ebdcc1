//! The coded-caching universe plus the radio resource budget.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance used when checking `subcarriers * subcarrier_bw == bandwidth`.
const GRID_BW_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

impl ConfigError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field,
            reason: reason.into(),
        }
    }

    /// Name of the offending field.
    pub fn field(&self) -> &'static str {
        match self {
            ConfigError::Invalid { field, .. } => field,
        }
    }
}

/// Library size, user population, cache size and the transmitter's resources.
///
/// `cache_contents` is `M`, measured in whole contents: each user stores
/// `M * F` bits, i.e. a fraction `M / N` of the library. `M = 0` is accepted
/// and models the no-cache limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub num_contents: usize,
    pub num_users: usize,
    pub content_size: usize,
    pub cache_contents: f64,
    /// Transmit power budget, watts.
    pub power: f64,
    /// Total bandwidth, Hz.
    pub bandwidth: f64,
    pub subcarriers: usize,
    /// Bandwidth of one subcarrier, Hz.
    pub subcarrier_bw: f64,
    /// Duration of one time slot, seconds.
    pub slot_duration: f64,
}

impl SystemConfig {
    /// Builds a config whose subcarrier bandwidth is `bandwidth / subcarriers`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        num_contents: usize,
        num_users: usize,
        content_size: usize,
        cache_contents: f64,
        power: f64,
        bandwidth: f64,
        subcarriers: usize,
        slot_duration: f64,
    ) -> Result<Self, ConfigError> {
        let cfg = SystemConfig {
            num_contents,
            num_users,
            content_size,
            cache_contents,
            power,
            bandwidth,
            subcarriers,
            subcarrier_bw: if subcarriers > 0 {
                bandwidth / subcarriers as f64
            } else {
                0.0
            },
            slot_duration,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.num_contents == 0 {
            return Err(ConfigError::invalid("N", "must be at least 1"));
        }
        if self.num_users == 0 {
            return Err(ConfigError::invalid("K", "must be at least 1"));
        }
        if self.content_size == 0 {
            return Err(ConfigError::invalid("F", "must be at least 1 bit"));
        }
        let m = self.cache_contents;
        if !m.is_finite() || m < 0.0 || m >= self.num_contents as f64 {
            return Err(ConfigError::invalid(
                "M",
                format!("must satisfy 0 <= M < N = {}, got {m}", self.num_contents),
            ));
        }
        if !(self.power.is_finite() && self.power > 0.0) {
            return Err(ConfigError::invalid("P", "must be a positive number of watts"));
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return Err(ConfigError::invalid("B", "must be a positive number of Hz"));
        }
        if self.subcarriers == 0 {
            return Err(ConfigError::invalid("H", "must be at least 1"));
        }
        if !(self.slot_duration.is_finite() && self.slot_duration > 0.0) {
            return Err(ConfigError::invalid("T_u", "must be a positive duration"));
        }
        let grid_bw = self.subcarriers as f64 * self.subcarrier_bw;
        if (grid_bw - self.bandwidth).abs() > GRID_BW_TOL * self.bandwidth {
            return Err(ConfigError::invalid(
                "B_u",
                format!(
                    "H * B_u = {grid_bw} does not equal B = {}",
                    self.bandwidth
                ),
            ));
        }
        Ok(())
    }

    /// Cache fraction `M / N`.
    pub fn cache_fraction(&self) -> f64 {
        self.cache_contents / self.num_contents as f64
    }

    /// Bits of each content every user prefetches: `round(M * F / N)`.
    pub fn per_content_quota(&self) -> usize {
        (self.cache_contents * self.content_size as f64 / self.num_contents as f64).round() as usize
    }

    /// Bits each user actually needs over the channel, summed over users:
    /// `K (1 - M/N) F`.
    pub fn useful_bits(&self) -> f64 {
        self.num_users as f64 * (1.0 - self.cache_fraction()) * self.content_size as f64
    }

    /// Copy with a new bandwidth, keeping the subcarrier count and rescaling `B_u`.
    pub fn with_bandwidth(&self, bandwidth: f64) -> Self {
        SystemConfig {
            bandwidth,
            subcarrier_bw: bandwidth / self.subcarriers as f64,
            ..self.clone()
        }
    }
}
