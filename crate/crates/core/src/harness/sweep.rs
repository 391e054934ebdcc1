use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{run_both_modes, HarnessError, Scheme, SizesSource, TrialResult, TrialSpec, TrialSummary};
use crate::allocator::Mode;
use crate::exec::{map_ordered, Execution};

pub const SWEEP_CSV_HEADER: [&str; 11] = [
    "parameter",
    "value",
    "scheme",
    "mode",
    "sizes_source",
    "trials",
    "mean_throughput_bps",
    "stderr_bps",
    "mean_total_time_s",
    "traffic_bits",
    "seed0",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// `M/N`, in `[0, 1)`.
    CacheFraction,
    /// Watts.
    Power,
    /// Hz; the subcarrier count is kept and `B_u` follows.
    Bandwidth,
    /// `K`, a positive integer.
    Users,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::CacheFraction => "cache_fraction",
            SweepParameter::Power => "power",
            SweepParameter::Bandwidth => "bandwidth",
            SweepParameter::Users => "users",
        }
    }

    /// `spec` with this parameter set to `value`, validated.
    pub fn apply(self, spec: &TrialSpec, value: f64) -> Result<TrialSpec, HarnessError> {
        let mut out = spec.clone();
        let sys = &mut out.system;
        match self {
            SweepParameter::CacheFraction => {
                if !(0.0..1.0).contains(&value) {
                    return Err(HarnessError::InvalidSpec(format!(
                        "cache fraction {value} outside [0, 1)"
                    )));
                }
                sys.cache_contents = value * sys.num_contents as f64;
            }
            SweepParameter::Power => sys.power = value,
            SweepParameter::Bandwidth => *sys = sys.with_bandwidth(value),
            SweepParameter::Users => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(HarnessError::InvalidSpec(format!(
                        "user count {value} is not a positive integer"
                    )));
                }
                sys.num_users = value as usize;
            }
        }
        out.validate()?;
        Ok(out)
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "cache_fraction" | "cache" | "alpha" => Ok(SweepParameter::CacheFraction),
            "power" | "p" => Ok(SweepParameter::Power),
            "bandwidth" | "b" => Ok(SweepParameter::Bandwidth),
            "users" | "k" => Ok(SweepParameter::Users),
            other => Err(format!(
                "unknown sweep parameter `{other}` (expected cache_fraction, power, bandwidth or users)"
            )),
        }
    }
}

/// One (grid value, scheme, mode) cell. A failed cell keeps its error and
/// has no summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub parameter: SweepParameter,
    pub value: f64,
    pub scheme: Scheme,
    pub mode: Mode,
    pub sizes_source: SizesSource,
    pub trials: usize,
    pub seed0: u64,
    pub outcome: Result<TrialSummary, String>,
}

impl SweepRow {
    pub fn summary(&self) -> Option<&TrialSummary> {
        self.outcome.as_ref().ok()
    }

    pub fn error(&self) -> Option<&str> {
        self.outcome.as_ref().err().map(String::as_str)
    }
}

/// Every scheme and mode at every grid value, `spec.trials` paired seeds
/// each; `spec.scheme` and `spec.mode` are ignored.
pub fn sweep(spec: &TrialSpec, parameter: SweepParameter, grid: &[f64]) -> Result<Vec<SweepRow>, HarnessError> {
    sweep_with(spec, parameter, grid, Execution::default())
}

pub fn sweep_with(
    spec: &TrialSpec,
    parameter: SweepParameter,
    grid: &[f64],
    exec: Execution,
) -> Result<Vec<SweepRow>, HarnessError> {
    if grid.is_empty() {
        return Err(HarnessError::InvalidSpec("sweep grid is empty".into()));
    }
    if spec.trials == 0 {
        return Err(HarnessError::InvalidSpec("trials must be at least 1".into()));
    }
    let mut order: Vec<f64> = grid.to_vec();
    order.sort_by(f64::total_cmp);

    let specs: Vec<Vec<Result<TrialSpec, String>>> = order
        .iter()
        .map(|&v| {
            Scheme::ALL
                .iter()
                .map(|&scheme| {
                    let mut s = spec.clone();
                    s.scheme = scheme;
                    parameter.apply(&s, v).map_err(|e| e.to_string())
                })
                .collect()
        })
        .collect();

    let tasks: Vec<(usize, usize, u64)> = (0..order.len())
        .flat_map(|v| (0..Scheme::ALL.len()).map(move |s| (v, s)))
        .filter(|&(v, s)| specs[v][s].is_ok())
        .flat_map(|(v, s)| (0..spec.trials as u64).map(move |i| (v, s, spec.seed.wrapping_add(i))))
        .collect();
    let results = map_ordered(exec, &tasks, |&(v, s, seed)| {
        let cell = specs[v][s].as_ref().expect("filtered to valid specs");
        run_both_modes(cell, seed).map_err(|e| e.to_string())
    });

    let mut rows = Vec::with_capacity(order.len() * 4);
    let mut results = results.into_iter();
    for (v, &value) in order.iter().enumerate() {
        for (s, &scheme) in Scheme::ALL.iter().enumerate() {
            let per_mode: Result<Vec<[TrialResult; 2]>, String> = match &specs[v][s] {
                Ok(_) => results.by_ref().take(spec.trials).collect(),
                Err(e) => Err(e.clone()),
            };
            for (m, &mode) in Mode::ALL.iter().enumerate() {
                let outcome = per_mode
                    .as_ref()
                    .map(|trials| TrialSummary::from_trials(trials.iter().map(|pair| pair[m].clone()).collect()))
                    .map_err(Clone::clone);
                rows.push(SweepRow {
                    parameter,
                    value,
                    scheme,
                    mode,
                    sizes_source: spec.sizes_source,
                    trials: spec.trials,
                    seed0: spec.seed,
                    outcome,
                });
            }
        }
    }
    Ok(rows)
}

/// Writes the result table. Failed rows leave the numeric columns empty.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_CSV_HEADER)?;
    for row in rows {
        let numbers = match row.summary() {
            Some(s) => [
                s.mean_throughput.to_string(),
                s.stderr_throughput.to_string(),
                s.mean_total_time.to_string(),
                s.mean_traffic.to_string(),
            ],
            None => Default::default(),
        };
        let [tp, se, time, traffic] = numbers;
        w.write_record([
            row.parameter.as_str().to_string(),
            row.value.to_string(),
            row.scheme.as_str().to_string(),
            row.mode.as_str().to_string(),
            row.sizes_source.as_str().to_string(),
            row.trials.to_string(),
            tp,
            se,
            time,
            traffic,
            row.seed0.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
