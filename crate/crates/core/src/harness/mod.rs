//! End-to-end trials: sizes from the analytic model or a bit-level plan,
//! worst-user noise from a sampled channel, completion time from the TD or FD
//! allocator, and throughput as useful bits over completion time.
//!
//! The coded scheme schedules all `2^K - 1` subset transmissions; the
//! baseline unicasts each user's uncached `(1 - M/N) F` bits on its own
//! channel. Both go through the same allocator, and trial `i` of a run uses
//! seed `seed + i` for channel, placement and requests alike, so schemes and
//! modes are compared on identical draws.

mod sweep;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::allocator::{allocate, throughput, AllocError, Mode, OptInstance, DEFAULT_FD_TOL};
use crate::analytic::expected_payload_size;
use crate::channel::{sample_scenario, worst_noise, ChannelError, ChannelScenario, FadingParams, DEFAULT_BASE_PSD};
use crate::codec::{build_delivery_plan, make_placement, CodecError, Library, RequestVector};
use crate::config::{ConfigError, SystemConfig};
use crate::exec::{map_ordered, Execution};
use crate::subset::delivery_order;

pub use sweep::{sweep, sweep_with, write_sweep_csv, SweepParameter, SweepRow, SWEEP_CSV_HEADER};

/// Largest population for bit-level sizes.
pub const MAX_BITLEVEL_USERS: usize = 12;
/// Largest population for the coded scheme with analytic sizes.
pub const MAX_ANALYTIC_USERS: usize = 20;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Alloc(#[from] AllocError),
    #[error("{users} users exceed the {max}-user limit of {what}")]
    TooManyUsers {
        users: usize,
        max: usize,
        what: &'static str,
    },
    #[error("invalid trial spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Coded,
    Baseline,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Coded, Scheme::Baseline];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Coded => "coded",
            Scheme::Baseline => "baseline",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "coded" => Ok(Scheme::Coded),
            "baseline" => Ok(Scheme::Baseline),
            other => Err(format!("unknown scheme `{other}` (expected coded or baseline)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizesSource {
    Analytic,
    Bitlevel,
}

impl SizesSource {
    pub fn as_str(self) -> &'static str {
        match self {
            SizesSource::Analytic => "analytic",
            SizesSource::Bitlevel => "bitlevel",
        }
    }
}

impl std::str::FromStr for SizesSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(SizesSource::Analytic),
            "bitlevel" => Ok(SizesSource::Bitlevel),
            other => Err(format!("unknown sizes source `{other}` (expected analytic or bitlevel)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RequestModel {
    /// I.i.d. uniform over the library, redrawn every trial.
    Uniform,
    /// The same request vector in every trial.
    Fixed(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpec {
    pub scheme: Scheme,
    pub mode: Mode,
    pub sizes_source: SizesSource,
    pub system: SystemConfig,
    pub fading: FadingParams,
    /// W/Hz.
    pub base_psd: f64,
    pub requests: RequestModel,
    pub seed: u64,
    pub trials: usize,
    pub fd_tol: f64,
}

impl TrialSpec {
    /// Coded FD with analytic sizes, default fading, one trial.
    pub fn new(system: SystemConfig) -> Self {
        TrialSpec {
            scheme: Scheme::Coded,
            mode: Mode::Fd,
            sizes_source: SizesSource::Analytic,
            system,
            fading: FadingParams::default(),
            base_psd: DEFAULT_BASE_PSD,
            requests: RequestModel::Uniform,
            seed: 0,
            trials: 1,
            fd_tol: DEFAULT_FD_TOL,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.system.validate()?;
        self.fading.validate()?;
        if self.trials == 0 {
            return Err(HarnessError::InvalidSpec("trials must be at least 1".into()));
        }
        if !(self.base_psd.is_finite() && self.base_psd > 0.0) {
            return Err(HarnessError::InvalidSpec("base_psd must be positive".into()));
        }
        if !(self.fd_tol > 0.0 && self.fd_tol <= 1e-2) {
            return Err(HarnessError::Alloc(AllocError::InvalidTolerance(self.fd_tol)));
        }
        let k = self.system.num_users;
        if self.sizes_source == SizesSource::Bitlevel && k > MAX_BITLEVEL_USERS {
            return Err(HarnessError::TooManyUsers {
                users: k,
                max: MAX_BITLEVEL_USERS,
                what: "bit-level sizes",
            });
        }
        if self.scheme == Scheme::Coded && k > MAX_ANALYTIC_USERS {
            return Err(HarnessError::TooManyUsers {
                users: k,
                max: MAX_ANALYTIC_USERS,
                what: "the coded scheme",
            });
        }
        if let RequestModel::Fixed(r) = &self.requests {
            RequestVector::new(r.clone(), &self.system)?;
        }
        Ok(())
    }

    fn requests_for(&self, seed: u64) -> Result<RequestVector, CodecError> {
        match &self.requests {
            RequestModel::Uniform => Ok(RequestVector::uniform(&self.system, seed)),
            RequestModel::Fixed(r) => RequestVector::new(r.clone(), &self.system),
        }
    }
}

/// Outcome of one seeded trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub seed: u64,
    pub total_time: f64,
    pub throughput: f64,
    /// Bits put on the channel.
    pub traffic: f64,
    pub useful_bits: f64,
    pub times: Vec<f64>,
    pub converged: bool,
}

/// Mean and standard error over a run of trials.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub trials: Vec<TrialResult>,
    pub mean_throughput: f64,
    pub stderr_throughput: f64,
    pub mean_total_time: f64,
    pub mean_traffic: f64,
    pub all_converged: bool,
}

impl TrialSummary {
    pub fn from_trials(trials: Vec<TrialResult>) -> Self {
        let n = trials.len() as f64;
        let mean_throughput = trials.iter().map(|t| t.throughput).sum::<f64>() / n;
        let stderr_throughput = if trials.len() > 1 {
            let var = trials
                .iter()
                .map(|t| (t.throughput - mean_throughput).powi(2))
                .sum::<f64>()
                / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        TrialSummary {
            mean_total_time: trials.iter().map(|t| t.total_time).sum::<f64>() / n,
            mean_traffic: trials.iter().map(|t| t.traffic).sum::<f64>() / n,
            all_converged: trials.iter().all(|t| t.converged),
            mean_throughput,
            stderr_throughput,
            trials,
        }
    }
}

/// The allocation problem a trial solves, before the mode is chosen.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialInstance {
    pub instance: OptInstance,
    pub useful_bits: f64,
}

/// Builds the allocation instance for `spec.scheme` at `seed`.
pub fn build_instance(spec: &TrialSpec, seed: u64) -> Result<TrialInstance, HarnessError> {
    let cfg = &spec.system;
    let channel = sample_scenario(cfg.num_users, &spec.fading, spec.base_psd, seed)?;
    build_instance_on(spec, &channel, seed)
}

fn build_instance_on(
    spec: &TrialSpec,
    channel: &ChannelScenario,
    seed: u64,
) -> Result<TrialInstance, HarnessError> {
    let cfg = &spec.system;
    let k = cfg.num_users;
    let (sizes, noise): (Vec<f64>, Vec<f64>) = match (spec.scheme, spec.sizes_source) {
        (Scheme::Coded, SizesSource::Analytic) => {
            let per_size: Vec<f64> = (1..=k)
                .map(|s| expected_payload_size(cfg, s).expect("1 <= s <= K"))
                .collect();
            delivery_order(k)
                .into_iter()
                .map(|u| Ok((per_size[u.len() - 1], worst_noise(channel, u)?)))
                .collect::<Result<Vec<_>, ChannelError>>()?
                .into_iter()
                .unzip()
        }
        (Scheme::Coded, SizesSource::Bitlevel) => {
            let placement = make_placement(cfg, seed)?;
            let library = Library::generate(cfg, seed);
            let requests = spec.requests_for(seed)?;
            let plan = build_delivery_plan(&library, &placement, &requests)?;
            plan.transmissions
                .iter()
                .map(|t| Ok((t.realized_size() as f64, worst_noise(channel, t.receivers)?)))
                .collect::<Result<Vec<_>, ChannelError>>()?
                .into_iter()
                .unzip()
        }
        (Scheme::Baseline, SizesSource::Analytic) => {
            let size = (1.0 - cfg.cache_fraction()) * cfg.content_size as f64;
            (vec![size; k], channel.effective_noise.clone())
        }
        (Scheme::Baseline, SizesSource::Bitlevel) => {
            let placement = make_placement(cfg, seed)?;
            let requests = spec.requests_for(seed)?;
            let sizes = (0..k)
                .map(|user| (cfg.content_size - placement.cached(user, requests.get(user)).len()) as f64)
                .collect();
            (sizes, channel.effective_noise.clone())
        }
    };
    let instance = OptInstance::new(sizes, noise, cfg.power, cfg.bandwidth)?;
    Ok(TrialInstance {
        instance,
        useful_bits: cfg.useful_bits(),
    })
}

fn solve(spec: &TrialSpec, trial: &TrialInstance, mode: Mode, seed: u64) -> Result<TrialResult, HarnessError> {
    let alloc = allocate(&trial.instance, mode, spec.fd_tol)?;
    let total_time = alloc.total_time();
    Ok(TrialResult {
        seed,
        total_time,
        throughput: throughput(total_time, trial.useful_bits)?,
        traffic: trial.instance.sizes.iter().sum(),
        useful_bits: trial.useful_bits,
        times: alloc.times().to_vec(),
        converged: alloc.converged(),
    })
}

/// One trial of `spec` at `seed`, ignoring `spec.seed` and `spec.trials`.
pub fn run_single(spec: &TrialSpec, seed: u64) -> Result<TrialResult, HarnessError> {
    let trial = build_instance(spec, seed)?;
    solve(spec, &trial, spec.mode, seed)
}

/// Solves one seeded instance in both modes.
pub(crate) fn run_both_modes(spec: &TrialSpec, seed: u64) -> Result<[TrialResult; 2], HarnessError> {
    let trial = build_instance(spec, seed)?;
    Ok([
        solve(spec, &trial, Mode::Td, seed)?,
        solve(spec, &trial, Mode::Fd, seed)?,
    ])
}

/// Runs `spec.trials` trials on seeds `spec.seed, spec.seed + 1, ...`.
pub fn run_trial(spec: &TrialSpec) -> Result<TrialSummary, HarnessError> {
    run_trial_with(spec, Execution::default())
}

pub fn run_trial_with(spec: &TrialSpec, exec: Execution) -> Result<TrialSummary, HarnessError> {
    spec.validate()?;
    let seeds: Vec<u64> = (0..spec.trials as u64).map(|i| spec.seed.wrapping_add(i)).collect();
    let results = map_ordered(exec, &seeds, |&seed| run_single(spec, seed));
    Ok(TrialSummary::from_trials(results.into_iter().collect::<Result<_, _>>()?))
}
