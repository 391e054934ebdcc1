//! Command-line front end: `trial`, `sweep`, `solve` and `verify`.

pub mod config;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use coded_push::allocator::{allocate, quantize, read_instance, write_solution, Allocation, ResourceGrid};
use coded_push::analytic::traffic_summary;
use coded_push::channel::sample_scenario;
use coded_push::codec::{build_delivery_plan, decode_user, dump_placement, dump_plan, make_placement, Library, RequestVector};
use coded_push::harness::{build_instance, run_trial, sweep, write_sweep_csv, SweepParameter, TrialSpec};
use coded_push::{Mode, Scheme};

pub use config::{applied_defaults, parse_config, ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "coded-push", version, about = "Coded caching delivery over fading broadcast channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run seeded trials and write one CSV row per trial.
    Trial(TrialArgs),
    /// Sweep one parameter over both schemes and modes.
    Sweep(SweepArgs),
    /// Solve a standalone allocation instance.
    Solve(SolveArgs),
    /// Build a bit-level plan and check that every user decodes.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Overrides {
    /// JSON run configuration.
    #[arg(long, short)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// td or fd.
    #[arg(long)]
    pub mode: Option<Mode>,
    /// coded or baseline.
    #[arg(long)]
    pub scheme: Option<Scheme>,
    /// CSV destination; stdout when neither this nor `output` is set.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrialArgs {
    #[command(flatten)]
    pub common: Overrides,
    /// Also write the first trial's channel scenario as CSV.
    #[arg(long)]
    pub scenario_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Overrides,
    /// cache_fraction, power, bandwidth or users.
    #[arg(long)]
    pub parameter: Option<SweepParameter>,
    /// Comma-separated grid values.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub grid: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance CSV (`# P=.. B=..` header line, then index,S_bits,n_m).
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value = "td")]
    pub mode: Mode,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Relative FD tolerance.
    #[arg(long, default_value_t = coded_push::allocator::DEFAULT_FD_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, short)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the placement and plan text dumps here.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

/// Runs a parsed command. Results go to `out`, the human summary to `log`.
pub fn run(cli: Cli, out: &mut dyn Write, log: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Trial(args) => trial(args, out, log),
        Command::Sweep(args) => run_sweep(args, out, log),
        Command::Solve(args) => solve(args, out, log),
        Command::Verify(args) => verify(args, out),
    }
}

fn load(common: &Overrides) -> Result<(RunConfig, Vec<(&'static str, String)>)> {
    let (mut cfg, mut defaults) = load_path(&common.config)?;
    let overridden = [
        ("seed", common.seed.is_some()),
        ("mode", common.mode.is_some()),
        ("scheme", common.scheme.is_some()),
        ("output", common.out.is_some()),
    ];
    defaults.retain(|(key, _)| !overridden.iter().any(|(k, set)| k == key && *set));
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = common.mode {
        cfg.mode = mode;
    }
    if let Some(scheme) = common.scheme {
        cfg.scheme = scheme;
    }
    if let Some(out) = &common.out {
        cfg.output = Some(out.clone());
    }
    cfg.validate()?;
    Ok((cfg, defaults))
}

fn load_path(path: &Path) -> Result<(RunConfig, Vec<(&'static str, String)>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let cfg = parse_config(&text).with_context(|| format!("in config {}", path.display()))?;
    let defaults = applied_defaults(&text, &cfg);
    Ok((cfg, defaults))
}

fn emit(path: Option<&Path>, out: &mut dyn Write, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush()?;
        }
        None => write(out)?,
    }
    Ok(())
}

fn header(cfg: &RunConfig, defaults: &[(&'static str, String)], what: &str, log: &mut dyn Write) -> io::Result<()> {
    if cfg.verbosity == 0 {
        return Ok(());
    }
    writeln!(
        log,
        "{what}: K={} N={} F={} M={} P={} W B={} Hz H={} sizes={} seed={} trials={}",
        cfg.users,
        cfg.contents,
        cfg.content_bits,
        cfg.cache,
        cfg.power,
        cfg.bandwidth,
        cfg.subcarriers,
        cfg.sizes_source.as_str(),
        cfg.seed,
        cfg.trials
    )?;
    if !defaults.is_empty() {
        let list: Vec<String> = defaults.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(log, "defaults applied: {}", list.join(" "))?;
    }
    Ok(())
}

fn trial(args: TrialArgs, out: &mut dyn Write, log: &mut dyn Write) -> Result<()> {
    let (cfg, defaults) = load(&args.common)?;
    let spec = cfg.trial_spec()?;
    header(&cfg, &defaults, "trial", log)?;
    let summary = run_trial(&spec)?;

    emit(cfg.output.as_deref(), out, |w| {
        writeln!(w, "seed,total_time_s,throughput_bps,traffic_bits,useful_bits,converged")?;
        for t in &summary.trials {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                t.seed, t.total_time, t.throughput, t.traffic, t.useful_bits, t.converged
            )?;
        }
        Ok(())
    })?;

    if let Some(path) = &args.scenario_out {
        let scenario = sample_scenario(cfg.users, &spec.fading, spec.base_psd, spec.seed)?;
        emit(Some(path), out, |w| Ok(scenario.write_csv(w)?))?;
    }

    if cfg.verbosity >= 1 {
        writeln!(
            log,
            "{} {}: mean throughput {:.6e} b/s (stderr {:.3e}), mean completion {:.6e} s, mean traffic {:.1} bits",
            cfg.scheme.as_str(),
            cfg.mode.as_str(),
            summary.mean_throughput,
            summary.stderr_throughput,
            summary.mean_total_time,
            summary.mean_traffic
        )?;
        let grid = grid_report(&spec)?;
        writeln!(log, "{grid}")?;
        if !summary.all_converged {
            let n = summary.trials.iter().filter(|t| !t.converged).count();
            writeln!(log, "warning: FD solver did not converge in {n} trial(s)")?;
        }
    }
    if cfg.verbosity >= 2 {
        for t in &summary.trials {
            writeln!(log, "  seed {}: {:.6e} s, {:.6e} b/s", t.seed, t.total_time, t.throughput)?;
        }
    }
    Ok(())
}

/// Quantizes the first trial's allocation onto the slot/subcarrier grid.
fn grid_report(spec: &TrialSpec) -> Result<String> {
    let inst = build_instance(spec, spec.seed)?.instance;
    let alloc = allocate(&inst, spec.mode, spec.fd_tol)?;
    let grid = ResourceGrid {
        subcarriers: spec.system.subcarriers,
        subcarrier_bw: spec.system.subcarrier_bw,
        slot_duration: spec.system.slot_duration,
    };
    Ok(match quantize(&inst, &alloc, &grid) {
        Ok(g) => format!(
            "grid (seed {}): {} slots x {} subcarriers, quantized completion {:.6e} s vs continuous {:.6e} s",
            spec.seed, g.slots, g.subcarriers, g.quantized_time, g.continuous_time
        ),
        Err(e) => format!("grid (seed {}): {e}", spec.seed),
    })
}

fn run_sweep(args: SweepArgs, out: &mut dyn Write, log: &mut dyn Write) -> Result<()> {
    let (cfg, defaults) = load(&args.common)?;
    let parameter = args
        .parameter
        .or(cfg.sweep.as_ref().map(|s| s.parameter))
        .context("no sweep parameter: pass --parameter or set sweep.parameter")?;
    let grid = match (&args.grid, &cfg.sweep) {
        (Some(g), _) => g.clone(),
        (None, Some(s)) if args.parameter.is_none() || args.parameter == Some(s.parameter) => s.grid.clone(),
        _ => bail!("no sweep grid: pass --grid or set sweep.grid"),
    };
    config::validate_grid(&cfg, parameter, &grid)
        .map_err(|reason| ConfigError::Invalid {
            field: "grid".into(),
            reason,
        })?;
    header(&cfg, &defaults, "sweep", log)?;
    let spec = cfg.trial_spec()?;
    let rows = sweep(&spec, parameter, &grid)?;
    emit(cfg.output.as_deref(), out, |w| Ok(write_sweep_csv(&rows, w)?))?;

    if cfg.verbosity >= 1 {
        writeln!(log, "{} rows over {} {} values", rows.len(), grid.len(), parameter.as_str())?;
        for row in &rows {
            if let Some(e) = row.error() {
                writeln!(
                    log,
                    "  failed: {}={} {} {}: {e}",
                    parameter.as_str(),
                    row.value,
                    row.scheme.as_str(),
                    row.mode.as_str()
                )?;
            } else if cfg.verbosity >= 2 {
                let s = row.summary().expect("ok row");
                writeln!(
                    log,
                    "  {}={} {} {}: {:.6e} b/s",
                    parameter.as_str(),
                    row.value,
                    row.scheme.as_str(),
                    row.mode.as_str(),
                    s.mean_throughput
                )?;
            }
        }
    }
    Ok(())
}

fn solve(args: SolveArgs, out: &mut dyn Write, log: &mut dyn Write) -> Result<()> {
    let file = File::open(&args.instance).with_context(|| format!("opening {}", args.instance.display()))?;
    let inst = read_instance(file).with_context(|| format!("in instance {}", args.instance.display()))?;
    let alloc = allocate(&inst, args.mode, args.tol)?;
    emit(args.out.as_deref(), out, |w| Ok(write_solution(&inst, &alloc, w)?))?;
    write!(
        log,
        "{} allocation of {} transmissions: total time {:.9e} s",
        args.mode.as_str(),
        inst.len(),
        alloc.total_time()
    )?;
    if let Allocation::Fd(a) = &alloc {
        write!(log, " ({} iterations, converged: {})", a.iterations, a.converged)?;
    }
    writeln!(log)?;
    Ok(())
}

fn verify(args: VerifyArgs, out: &mut dyn Write) -> Result<()> {
    let (cfg, _) = load_path(&args.config)?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let sys = cfg.system()?;
    let library = Library::generate(&sys, seed);
    let placement = make_placement(&sys, seed)?;
    let requests = match &cfg.requests {
        Some(r) => RequestVector::new(r.clone(), &sys)?,
        None => RequestVector::uniform(&sys, seed),
    };
    let plan = build_delivery_plan(&library, &placement, &requests)?;

    let mut failures = 0;
    for user in 0..sys.num_users {
        let wanted = requests.get(user);
        match decode_user(&plan, &library, &placement, &requests, user) {
            Ok(bits) if bits == library.content(wanted).bits => {
                writeln!(out, "user {user}: content {wanted}: decode OK")?
            }
            Ok(_) => {
                failures += 1;
                writeln!(out, "user {user}: content {wanted}: decode MISMATCH")?
            }
            Err(e) => {
                failures += 1;
                writeln!(out, "user {user}: content {wanted}: decode FAILED: {e}")?
            }
        }
    }
    let expected = traffic_summary(&sys).coded_total;
    let f = sys.content_size as f64;
    writeln!(
        out,
        "transmissions: {} ({} multicast, {} unicast)",
        plan.transmissions.len(),
        plan.multicasts().count(),
        plan.unicasts().count()
    )?;
    writeln!(
        out,
        "transmitted bits: {} ({:.4}·F); expected {:.1} ({:.4}·F)",
        plan.total_bits(),
        plan.total_bits() as f64 / f,
        expected,
        expected / f
    )?;
    if let Some(path) = &args.dump {
        let text = dump_placement(&placement) + &dump_plan(&plan);
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    if failures > 0 {
        bail!("{failures} user(s) failed to decode");
    }
    Ok(())
}
