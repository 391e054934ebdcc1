//! Resource allocation for a set of transmissions sharing one transmitter.
//!
//! Two relaxations are solved:
//!
//! * **TD** (time division): each transmission gets the whole band and power
//!   for a fraction `tau_i` of the time. The objective
//!   `sum_i S_i / (tau_i B log2(1 + P / (n_i B)))` has the Cauchy-Schwarz
//!   minimiser `tau_i ~ sqrt(S_i / log2(1 + P / (n_i B)))`.
//! * **FD** (frequency division): transmissions run in parallel on disjoint
//!   bandwidth `B_i` with power `P_i`; the completion time is the slowest
//!   transmission, minimised over the simplex of `(B_i, P_i)`.
//!
//! Continuous solutions are mapped onto the slot/subcarrier grid by
//! [`quantize`].

mod fd;
mod io;
mod quantize;
mod td;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fd::{fd_allocate, DEFAULT_FD_TOL, MAX_FD_ITERATIONS};
pub use io::{read_instance, write_instance, write_solution};
pub use quantize::{apportion, quantize, quantize_fd, quantize_td, GridAssignment, ResourceGrid};
pub use td::{td_allocate, td_objective};

#[derive(Debug, Error)]
pub enum AllocError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("tolerance {0} outside (0, 1e-2]")]
    InvalidTolerance(f64),
    #[error("{cells} grid cells cannot host {active} active transmissions")]
    InfeasibleQuantization { cells: usize, active: usize },
    #[error("throughput undefined for completion time {0}")]
    ZeroTime(f64),
    #[error("instance file: {0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Td,
    Fd,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Td, Mode::Fd];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Td => "td",
            Mode::Fd => "fd",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "td" => Ok(Mode::Td),
            "fd" => Ok(Mode::Fd),
            other => Err(format!("unknown mode `{other}` (expected td or fd)")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sizes and worst-user noise of every transmission plus the shared budget.
#[derive(Debug, Clone, PartialEq)]
pub struct OptInstance {
    /// Bits per transmission.
    pub sizes: Vec<f64>,
    /// Worst effective noise PSD among each transmission's receivers, W/Hz.
    pub worst_noise: Vec<f64>,
    pub power: f64,
    pub bandwidth: f64,
    /// TD objective weights; 1 for every transmission unless set.
    pub weights: Vec<f64>,
}

impl OptInstance {
    pub fn new(
        sizes: Vec<f64>,
        worst_noise: Vec<f64>,
        power: f64,
        bandwidth: f64,
    ) -> Result<Self, AllocError> {
        let weights = vec![1.0; sizes.len()];
        let inst = OptInstance {
            sizes,
            worst_noise,
            power,
            bandwidth,
            weights,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self, AllocError> {
        self.weights = weights;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), AllocError> {
        let bad = |msg: String| Err(AllocError::InvalidInstance(msg));
        let l = self.sizes.len();
        if self.worst_noise.len() != l || self.weights.len() != l {
            return bad(format!(
                "{} sizes, {} noise values, {} weights",
                l,
                self.worst_noise.len(),
                self.weights.len()
            ));
        }
        if let Some(i) = self.sizes.iter().position(|s| !(s.is_finite() && *s >= 0.0)) {
            return bad(format!("size {i} must be finite and non-negative"));
        }
        if let Some(i) = self.worst_noise.iter().position(|n| !(n.is_finite() && *n > 0.0)) {
            return bad(format!("noise {i} must be finite and positive"));
        }
        if let Some(i) = self.weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return bad(format!("weight {i} must be finite and positive"));
        }
        if !(self.power.is_finite() && self.power > 0.0) {
            return bad("power must be positive".into());
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return bad("bandwidth must be positive".into());
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    /// Indices with a nonzero payload.
    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.sizes
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > 0.0)
            .map(|(i, _)| i)
    }

    /// Same instance with every size multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        OptInstance {
            sizes: self.sizes.iter().map(|s| s * factor).collect(),
            ..self.clone()
        }
    }

    /// Full-band, full-power rate of transmission `i`, bits/s.
    pub(crate) fn full_rate(&self, i: usize) -> f64 {
        crate::channel::capacity(self.bandwidth, self.power, self.worst_noise[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TdAllocation {
    /// `tau_i`; zero for empty transmissions.
    pub fractions: Vec<f64>,
    /// `S_i / (tau_i B log2(1 + P / (n_i B)))`, the per-transmission terms
    /// of the objective.
    pub times: Vec<f64>,
    pub total_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdAllocation {
    pub bandwidths: Vec<f64>,
    pub powers: Vec<f64>,
    pub times: Vec<f64>,
    /// Slowest transmission.
    pub total_time: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Allocation {
    Td(TdAllocation),
    Fd(FdAllocation),
}

impl Allocation {
    pub fn mode(&self) -> Mode {
        match self {
            Allocation::Td(_) => Mode::Td,
            Allocation::Fd(_) => Mode::Fd,
        }
    }

    pub fn total_time(&self) -> f64 {
        match self {
            Allocation::Td(a) => a.total_time,
            Allocation::Fd(a) => a.total_time,
        }
    }

    pub fn times(&self) -> &[f64] {
        match self {
            Allocation::Td(a) => &a.times,
            Allocation::Fd(a) => &a.times,
        }
    }

    pub fn converged(&self) -> bool {
        match self {
            Allocation::Td(_) => true,
            Allocation::Fd(a) => a.converged,
        }
    }
}

/// Runs the solver for `mode`.
pub fn allocate(inst: &OptInstance, mode: Mode, fd_tol: f64) -> Result<Allocation, AllocError> {
    match mode {
        Mode::Td => td_allocate(inst).map(Allocation::Td),
        Mode::Fd => fd_allocate(inst, fd_tol).map(Allocation::Fd),
    }
}

/// Delivered useful bits per second of completion time.
pub fn throughput(total_time: f64, useful_bits: f64) -> Result<f64, AllocError> {
    if !(total_time > 0.0 && total_time.is_finite()) {
        return Err(AllocError::ZeroTime(total_time));
    }
    Ok(useful_bits / total_time)
}
