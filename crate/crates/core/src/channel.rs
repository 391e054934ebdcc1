//! User geometry, flat Ricean block fading and per-user effective noise.
//!
//! Each user sees one fading draw for the whole delivery phase. Its power
//! gain `g = |h|^2 d^-alpha` is folded into an effective noise PSD
//! `n_k = n / g`, so every capacity expression can use a unit-gain channel:
//! `B log2(1 + P g / (n B)) == B log2(1 + P / (n_k B))`.

use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{stream_rng, Stream};
use crate::subset::UserSet;

/// Rice factors at or above this are treated as a pure line-of-sight channel.
pub const LOS_RICE_FACTOR: f64 = 1e9;

/// Noise PSD `n` with `n / 2 = 1`, W/Hz.
pub const DEFAULT_BASE_PSD: f64 = 2.0;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("worst-user noise of an empty receiver set")]
    EmptyReceivers,
    #[error("receiver {0} is not in the scenario")]
    UnknownUser(usize),
    #[error("invalid fading parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingParams {
    /// Meters.
    pub cell_radius: f64,
    pub pathloss_exponent: f64,
    /// Linear Rice factor (LOS power over scattered power).
    pub rice_factor: f64,
    /// Meters; distances below this are clamped to it.
    pub min_distance: f64,
}

impl Default for FadingParams {
    fn default() -> Self {
        FadingParams {
            cell_radius: 5000.0,
            pathloss_exponent: 2.0,
            rice_factor: 2.0,
            min_distance: 1.0,
        }
    }
}

impl FadingParams {
    /// No fading and no path loss: every user has the base PSD.
    pub fn homogeneous() -> Self {
        FadingParams {
            pathloss_exponent: 0.0,
            rice_factor: LOS_RICE_FACTOR,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let bad = |field, reason: &str| {
            Err(ChannelError::InvalidParams {
                field,
                reason: reason.to_string(),
            })
        };
        if !(self.min_distance.is_finite() && self.min_distance > 0.0) {
            return bad("min_distance", "must be positive");
        }
        if !(self.cell_radius.is_finite() && self.cell_radius > self.min_distance) {
            return bad("cell_radius", "must exceed min_distance");
        }
        if !(self.pathloss_exponent.is_finite() && self.pathloss_exponent >= 0.0) {
            return bad("pathloss_exponent", "must be non-negative");
        }
        if self.rice_factor.is_nan() || self.rice_factor < 0.0 {
            return bad("rice_factor", "must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelScenario {
    /// Distance from the transmitter, meters.
    pub distances: Vec<f64>,
    /// Small-scale power gain `|h|^2`.
    pub fading_gains: Vec<f64>,
    /// Total power gain `|h|^2 d^-alpha`.
    pub gains: Vec<f64>,
    /// `base_psd / gain`, W/Hz.
    pub effective_noise: Vec<f64>,
    pub base_psd: f64,
}

impl ChannelScenario {
    pub fn num_users(&self) -> usize {
        self.gains.len()
    }

    /// Same PSD for every user.
    pub fn uniform(k: usize, noise: f64) -> Self {
        ChannelScenario {
            distances: vec![1.0; k],
            fading_gains: vec![1.0; k],
            gains: vec![1.0; k],
            effective_noise: vec![noise; k],
            base_psd: noise,
        }
    }

    /// CSV with columns `user,distance_m,gain,effective_noise`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ChannelError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["user", "distance_m", "gain", "effective_noise"])?;
        for k in 0..self.num_users() {
            w.write_record([
                k.to_string(),
                self.distances[k].to_string(),
                self.gains[k].to_string(),
                self.effective_noise[k].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Draws `|h|^2` for `h = sqrt(k/(k+1)) + sqrt(1/(2(k+1))) (z1 + i z2)`.
/// `E|h|^2 = 1` for every Rice factor.
pub fn ricean_power<R: Rng + ?Sized>(rng: &mut R, rice_factor: f64) -> f64 {
    if rice_factor >= LOS_RICE_FACTOR {
        return 1.0;
    }
    let los = (rice_factor / (rice_factor + 1.0)).sqrt();
    let scatter = (0.5 / (rice_factor + 1.0)).sqrt();
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    let re = los + scatter * z1;
    let im = scatter * z2;
    re * re + im * im
}

/// Places `k` users uniformly over the cell disk and draws their fading.
pub fn sample_scenario(
    k: usize,
    params: &FadingParams,
    base_psd: f64,
    seed: u64,
) -> Result<ChannelScenario, ChannelError> {
    params.validate()?;
    if !(base_psd.is_finite() && base_psd > 0.0) {
        return Err(ChannelError::InvalidParams {
            field: "base_psd",
            reason: "must be positive".into(),
        });
    }
    let mut rng = stream_rng(seed, Stream::Channel);
    let mut scenario = ChannelScenario {
        distances: Vec::with_capacity(k),
        fading_gains: Vec::with_capacity(k),
        gains: Vec::with_capacity(k),
        effective_noise: Vec::with_capacity(k),
        base_psd,
    };
    for _ in 0..k {
        let d = params.cell_radius * rng.random::<f64>().sqrt();
        let fading = ricean_power(&mut rng, params.rice_factor);
        let gain = fading * d.max(params.min_distance).powf(-params.pathloss_exponent);
        scenario.distances.push(d);
        scenario.fading_gains.push(fading);
        scenario.gains.push(gain);
        scenario.effective_noise.push(base_psd / gain);
    }
    Ok(scenario)
}

/// Largest effective noise among `receivers`: the user that bounds a
/// multicast's common rate.
pub fn worst_noise(scenario: &ChannelScenario, receivers: UserSet) -> Result<f64, ChannelError> {
    if receivers.is_empty() {
        return Err(ChannelError::EmptyReceivers);
    }
    receivers.iter().try_fold(f64::NEG_INFINITY, |worst, k| {
        scenario
            .effective_noise
            .get(k)
            .map(|&n| worst.max(n))
            .ok_or(ChannelError::UnknownUser(k))
    })
}

/// Shannon rate `B log2(1 + P / (n B))`, bits/s.
pub fn capacity(bandwidth: f64, power: f64, noise: f64) -> f64 {
    bandwidth * (power / (noise * bandwidth)).ln_1p() / std::f64::consts::LN_2
}
