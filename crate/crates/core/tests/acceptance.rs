//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Pass criterion numbers as arguments to run
//! a subset.

use std::time::Instant;

use coded_push::allocator::{
    allocate, fd_allocate, quantize, td_allocate, AllocError, Allocation, GridAssignment, OptInstance, ResourceGrid,
};
use coded_push::analytic::{baseline_total_traffic, coded_total_traffic, expected_payload_size};
use coded_push::codec::{build_delivery_plan, decode_user, make_placement, Library, RequestVector};
use coded_push::harness::{build_instance, sweep, RequestModel, SweepParameter, SweepRow, TrialSpec};
use coded_push::{Mode, Scheme, SizesSource, SystemConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Discrete, Hypergeometric};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit_s: f64,
    run: fn() -> Outcome,
}

const CRITERIA: [Criterion; 9] = [
    Criterion { id: 1, name: "two-user example exactness", limit_s: 5.0, run: c1_example },
    Criterion { id: 2, name: "decode soundness", limit_s: 120.0, run: c2_decode },
    Criterion { id: 3, name: "traffic identity", limit_s: 1.0, run: c3_identity },
    Criterion { id: 4, name: "TD oracle", limit_s: 60.0, run: c4_td_oracle },
    Criterion { id: 5, name: "FD oracle", limit_s: 120.0, run: c5_fd_oracle },
    Criterion { id: 6, name: "FD dominates TD", limit_s: 60.0, run: c6_dominance },
    Criterion { id: 7, name: "saturation trend", limit_s: 300.0, run: c7_saturation },
    Criterion { id: 8, name: "resource monotonicity", limit_s: 120.0, run: c8_monotone },
    Criterion { id: 9, name: "quantization feasibility", limit_s: 10.0, run: c9_quantization },
];

fn main() {
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    let mut ran = 0;
    for c in CRITERIA.iter().filter(|c| selected.is_empty() || selected.contains(&c.id)) {
        let start = Instant::now();
        let outcome = (c.run)();
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs < c.limit_s;
        let pass = outcome.pass && in_time;
        ran += 1;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {} ({}): {} [{:.2} s, limit {} s{}] {}",
            c.id,
            c.name,
            if pass { "PASS" } else { "FAIL" },
            secs,
            c.limit_s,
            if in_time { "" } else { ", over limit" },
            outcome.detail
        );
    }
    println!("acceptance: {}/{} criteria passed", ran - failed, ran);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn log_uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (r.random_range(lo.ln()..hi.ln())).exp()
}

fn rate(b: f64, p: f64, n: f64) -> f64 {
    b * (1.0 + p / (n * b)).log2()
}

fn c1_example() -> Outcome {
    let f = 10_000usize;
    let cfg = SystemConfig::new(2, 2, f, 1.0, 10.0, 1e6, 64, 1e-3).unwrap();
    let ff = f as f64;
    let coded = coded_total_traffic(&cfg).unwrap();
    let base = baseline_total_traffic(&cfg);
    let mut spec = TrialSpec::new(cfg.clone());
    spec.mode = Mode::Td;
    let inst = build_instance(&spec, 0).unwrap().instance;
    let inst_traffic: f64 = inst.sizes.iter().sum();
    let analytic_ok = rel(coded, 0.75 * ff) <= 1e-12 && rel(base, ff) <= 1e-12 && rel(inst_traffic, 0.75 * ff) <= 1e-12;

    let seeds = 200u64;
    let requests = RequestVector::new(vec![1, 0], &cfg).unwrap();
    let totals: Vec<f64> = (0..seeds)
        .map(|seed| {
            let lib = Library::generate(&cfg, seed);
            let placement = make_placement(&cfg, seed).unwrap();
            build_delivery_plan(&lib, &placement, &requests).unwrap().total_bits() as f64
        })
        .collect();
    let n = seeds as f64;
    let mean = totals.iter().sum::<f64>() / n;
    let sd = (totals.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let se = sd / n.sqrt();
    let z = (mean - 0.75 * ff) / se;
    let bitlevel_ok = z.abs() <= 3.0;

    // Realized traffic is F/2 + max(X, Y) for independent hypergeometric
    // overlaps X, Y of the two users' caches of each content.
    let quota = cfg.per_content_quota() as u64;
    let hyper = Hypergeometric::new(f as u64, quota, quota).unwrap();
    let mut cdf = 0.0;
    let e_max: f64 = (0..=quota)
        .map(|x| {
            let below = cdf * cdf;
            cdf += hyper.ln_pmf(x).exp();
            x as f64 * (cdf * cdf - below)
        })
        .sum();
    let exact = (f as u64 - quota) as f64 + e_max;
    let z_exact = (mean - exact) / se;

    Outcome::new(
        analytic_ok && bitlevel_ok,
        format!(
            "analytic coded {coded} = {:.12}F, baseline {base} = {:.12}F ({}); bit-level mean {mean:.2} over {seeds} seeds, \
             se {se:.2}, z = {z:.2} against 0.75F ({}); against the exact finite-F expectation {exact:.2}: z = {z_exact:.2}",
            coded / ff,
            base / ff,
            if analytic_ok { "ok" } else { "MISMATCH" },
            if bitlevel_ok { "ok" } else { "outside 3 se" },
        ),
    )
}

fn c2_decode() -> Outcome {
    let f = 512;
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for k in 2..=6 {
        for n in 2..=4 {
            for m in [0.5, 1.0, n as f64 - 0.5] {
                let cfg = SystemConfig::new(n, k, f, m, 1.0, 1.0, 1, 1.0).unwrap();
                for seed in 0..50 {
                    let lib = Library::generate(&cfg, seed);
                    let placement = make_placement(&cfg, seed).unwrap();
                    let requests = RequestVector::uniform(&cfg, seed);
                    let plan = build_delivery_plan(&lib, &placement, &requests).unwrap();
                    for user in 0..k {
                        checked += 1;
                        let ok = decode_user(&plan, &lib, &placement, &requests, user)
                            .map(|bits| bits == lib.content(requests.get(user)).bits)
                            .unwrap_or(false);
                        if !ok {
                            failures.push(format!("K={k} N={n} M={m} seed={seed} user={user}"));
                        }
                    }
                }
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "{checked} user decodes, {} failures{}",
            failures.len(),
            failures.first().map(|s| format!(" (first: {s})")).unwrap_or_default()
        ),
    )
}

fn c3_identity() -> Outcome {
    fn choose(n: usize, r: usize) -> f64 {
        (1..=r).fold(1.0, |acc, i| acc * (n + 1 - i) as f64 / i as f64)
    }
    let mut alphas = vec![1e-6, 1e-3];
    alphas.extend((1..100).map(|i| i as f64 / 100.0));
    alphas.push(0.999);
    let mut worst = 0.0f64;
    let mut points = 0;
    for k in 1..=16 {
        for &a in &alphas {
            let cfg = SystemConfig::new(1000, k, 10_000, a * 1000.0, 1.0, 1.0, 1, 1.0).unwrap();
            let by_subsets: f64 = (1..=k)
                .map(|s| choose(k, s) * expected_payload_size(&cfg, s).unwrap())
                .sum();
            worst = worst.max(rel(by_subsets, coded_total_traffic(&cfg).unwrap()));
            points += 1;
        }
    }
    Outcome::new(
        worst <= 1e-12,
        format!("{points} lattice points, worst relative gap {worst:.2e}"),
    )
}

fn td_objective_oracle(s: &[f64], n: &[f64], p: f64, b: f64, tau: &[f64]) -> f64 {
    (0..s.len()).map(|i| s[i] / (tau[i] * rate(b, p, n[i]))).sum()
}

fn c4_td_oracle() -> Outcome {
    let mut r = rng(4);
    let mut worst_grid = 0.0f64;
    let mut beaten = 0usize;
    let mut grid_below = 0usize;
    for _ in 0..20 {
        let s: Vec<f64> = (0..3).map(|_| r.random_range(10.0..1000.0)).collect();
        let n: Vec<f64> = (0..3).map(|_| log_uniform(&mut r, 0.5, 50.0)).collect();
        let p = r.random_range(1.0..100.0);
        let b = r.random_range(0.5..10.0);
        let inst = OptInstance::new(s.clone(), n.clone(), p, b).unwrap();
        let td = td_allocate(&inst).unwrap();

        let mut best = f64::INFINITY;
        for i in 1..999 {
            for j in 1..(1000 - i) {
                let t1 = i as f64 * 1e-3;
                let t2 = j as f64 * 1e-3;
                let t3 = 1.0 - t1 - t2;
                best = best.min(td_objective_oracle(&s, &n, p, b, &[t1, t2, t3]));
            }
        }
        worst_grid = worst_grid.max(rel(best, td.total_time));
        if best < td.total_time * (1.0 - 1e-12) {
            grid_below += 1;
        }

        let at_opt = td_objective_oracle(&s, &n, p, b, &td.fractions);
        for d in 0..1000 {
            let tau: Vec<f64> = if d % 2 == 0 {
                let e: Vec<f64> = (0..3).map(|_| -r.random_range(f64::EPSILON..1.0f64).ln()).collect();
                let sum: f64 = e.iter().sum();
                e.iter().map(|x| x / sum).collect()
            } else {
                let e: Vec<f64> = td
                    .fractions
                    .iter()
                    .map(|t| t * (1.0 + r.random_range(-0.05..0.05)))
                    .collect();
                let sum: f64 = e.iter().sum();
                e.iter().map(|x| x / sum).collect()
            };
            if td_objective_oracle(&s, &n, p, b, &tau) < at_opt * (1.0 - 1e-12) {
                beaten += 1;
            }
        }
    }
    Outcome::new(
        worst_grid <= 1e-4 && beaten == 0 && grid_below == 0,
        format!(
            "20 instances: worst grid gap {worst_grid:.2e}, grid points below optimum {grid_below}, \
             perturbations beating optimum {beaten}/20000"
        ),
    )
}

/// Minimum over a grid of max completion time for three transmissions.
/// Axis values are `(j + 0.5) / pts` of the budget; the third share is the
/// remainder and must stay positive.
struct FdGrid<'a> {
    s: &'a [f64],
    n: &'a [f64],
    p: f64,
    b: f64,
    pts: usize,
}

impl FdGrid<'_> {
    fn share(&self, j: usize, total: f64) -> f64 {
        total * (j as f64 + 0.5) / self.pts as f64
    }

    /// Shares of the third transmission when the first two use `j1`, `j2`.
    fn rest(&self, j1: usize, j2: usize, total: f64) -> f64 {
        total * (self.pts - 1 - j1 - j2) as f64 / self.pts as f64
    }

    fn time(&self, i: usize, bw: f64, pw: f64) -> f64 {
        self.s[i] / rate(bw, pw, self.n[i])
    }

    fn exhaustive(&self) -> f64 {
        let top = self.pts - 2;
        let mut best = f64::INFINITY;
        for b1 in 0..=top {
            for b2 in 0..=(top - b1) {
                let bw = [self.share(b1, self.b), self.share(b2, self.b), self.rest(b1, b2, self.b)];
                for p1 in 0..=top {
                    for p2 in 0..=(top - p1) {
                        let pw = [self.share(p1, self.p), self.share(p2, self.p), self.rest(p1, p2, self.p)];
                        let t = (0..3).map(|i| self.time(i, bw[i], pw[i])).fold(0.0, f64::max);
                        best = best.min(t);
                    }
                }
            }
        }
        best
    }

    /// Same minimum, using that each time is monotone in its own power
    /// share: the best split of the remaining power sits where the falling
    /// and rising completion times cross.
    fn pruned(&self) -> f64 {
        let top = self.pts - 2;
        let mut best = f64::INFINITY;
        for b1 in 0..=top {
            for b2 in 0..=(top - b1) {
                let bw = [self.share(b1, self.b), self.share(b2, self.b), self.rest(b1, b2, self.b)];
                let inner = |p1: usize| {
                    let t23 = |p2: usize| {
                        (
                            self.time(1, bw[1], self.share(p2, self.p)),
                            self.time(2, bw[2], self.rest(p1, p2, self.p)),
                        )
                    };
                    let cross = first_true(0, top - p1, |p2| {
                        let (a, c) = t23(p2);
                        a <= c
                    });
                    [cross.checked_sub(1), Some(cross.min(top - p1))]
                        .into_iter()
                        .flatten()
                        .map(|p2| {
                            let (a, c) = t23(p2);
                            a.max(c)
                        })
                        .fold(f64::INFINITY, f64::min)
                };
                let t1 = |p1: usize| self.time(0, bw[0], self.share(p1, self.p));
                let cross = first_true(0, top, |p1| t1(p1) <= inner(p1));
                for p1 in [cross.checked_sub(1), Some(cross.min(top))].into_iter().flatten() {
                    best = best.min(t1(p1).max(inner(p1)));
                }
            }
        }
        best
    }
}

/// Smallest `x` in `lo..=hi` with `pred(x)`, for a predicate that is false
/// then true; `hi + 1` if it never holds.
fn first_true(mut lo: usize, hi: usize, pred: impl Fn(usize) -> bool) -> usize {
    let mut end = hi + 1;
    while lo < end {
        let mid = lo + (end - lo) / 2;
        if pred(mid) {
            end = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

fn c5_fd_oracle() -> Outcome {
    let tol = 1e-6;
    let mut r = rng(5);
    let mut instances: Vec<(Vec<f64>, Vec<f64>, f64, f64)> = vec![(vec![100.0, 200.0, 400.0], vec![2.0, 4.0, 8.0], 10.0, 1.0)];
    for _ in 0..10 {
        instances.push((
            (0..3).map(|_| r.random_range(50.0..500.0)).collect(),
            (0..3).map(|_| log_uniform(&mut r, 1.0, 10.0)).collect(),
            r.random_range(5.0..50.0),
            r.random_range(0.5..5.0),
        ));
    }

    let mut cross_ok = true;
    for (s, n, p, b) in instances.iter().take(3) {
        let g = FdGrid { s, n, p: *p, b: *b, pts: 24 };
        cross_ok &= g.pruned() == g.exhaustive();
    }

    let mut worst = 0.0f64;
    let mut below = 0;
    let mut spread = 0.0f64;
    for (s, n, p, b) in &instances {
        let inst = OptInstance::new(s.clone(), n.clone(), *p, *b).unwrap();
        let fd = fd_allocate(&inst, tol).unwrap();
        let grid = FdGrid { s, n, p: *p, b: *b, pts: 200 }.pruned();
        worst = worst.max(rel(grid, fd.total_time));
        if grid < fd.total_time * (1.0 - tol) {
            below += 1;
        }
        let hi = fd.times.iter().cloned().fold(0.0, f64::max);
        let lo = fd.times.iter().cloned().fold(f64::INFINITY, f64::min);
        spread = spread.max((hi - lo) / fd.total_time);
    }
    Outcome::new(
        cross_ok && worst <= 0.01 && below == 0 && spread <= tol,
        format!(
            "{} instances: worst gap to 200-point 4-D grid {worst:.2e}, grid below solver {below}, \
             max time spread {spread:.1e} (tol {tol:e}), pruned search equals exhaustive on 24-point grids: {cross_ok}",
            instances.len()
        ),
    )
}

fn c6_dominance() -> Outcome {
    let mut r = rng(6);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..500 {
        let l = r.random_range(1..=31usize);
        let mut sizes: Vec<f64> = (0..l)
            .map(|_| if r.random_bool(0.2) { 0.0 } else { log_uniform(&mut r, 1.0, 1e6) })
            .collect();
        if sizes.iter().all(|&s| s == 0.0) {
            sizes[0] = 1.0;
        }
        let noise: Vec<f64> = (0..l).map(|_| log_uniform(&mut r, 1e-3, 1e3)).collect();
        let inst = OptInstance::new(sizes, noise, log_uniform(&mut r, 1e-2, 1e3), log_uniform(&mut r, 1e-1, 1e4)).unwrap();
        let td = td_allocate(&inst).unwrap().total_time;
        let fd = fd_allocate(&inst, 1e-6).unwrap().total_time;
        let excess = (fd - td) / td;
        worst = worst.max(excess);
        if excess > 1e-6 {
            violations += 1;
        }
    }
    Outcome::new(
        violations == 0,
        format!("500 instances, {violations} violations, largest (fd - td)/td = {worst:.2e}"),
    )
}

fn users_rows(k: usize, seeds: usize) -> Vec<SweepRow> {
    let cfg = SystemConfig::new(10, k, 10_000, 3.0, 1e11, 1e3, 64, 1e-3).unwrap();
    let mut spec = TrialSpec::new(cfg);
    spec.trials = seeds;
    sweep(&spec, SweepParameter::Users, &[2.0, 10.0]).unwrap()
}

fn c7_saturation() -> Outcome {
    let rows = users_rows(2, 50);
    let mean = |k: f64, scheme: Scheme, mode: Mode| {
        rows.iter()
            .find(|r| r.value == k && r.scheme == scheme && r.mode == mode)
            .and_then(|r| r.summary())
            .map(|s| s.mean_throughput)
            .unwrap_or(f64::NAN)
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for mode in Mode::ALL {
        let (c2, c10) = (mean(2.0, Scheme::Coded, mode), mean(10.0, Scheme::Coded, mode));
        let (b2, b10) = (mean(2.0, Scheme::Baseline, mode), mean(10.0, Scheme::Baseline, mode));
        let falls = c10 < c2;
        let graceful = b10 / b2 > c10 / c2;
        pass &= falls && graceful;
        parts.push(format!(
            "{}: coded {c2:.4e} -> {c10:.4e} b/s ({}), ratio baseline {:.3} vs coded {:.3} ({})",
            mode.as_str(),
            if falls { "falls" } else { "does not fall" },
            b10 / b2,
            c10 / c2,
            if graceful { "baseline degrades less" } else { "baseline degrades more" }
        ));
    }
    Outcome::new(
        pass,
        format!("alpha=0.3, P=1e11 W, B=1e3 Hz, 50 paired seeds, K=2 vs K=10; {}", parts.join("; ")),
    )
}

fn c8_monotone() -> Outcome {
    let mut violations = Vec::new();
    let mut cells = 0;
    for source in [SizesSource::Analytic, SizesSource::Bitlevel] {
        let cfg = SystemConfig::new(4, 4, 10_000, 1.2, 1e11, 1e3, 64, 1e-3).unwrap();
        let mut spec = TrialSpec::new(cfg);
        spec.trials = 20;
        spec.sizes_source = source;
        for (parameter, grid) in [
            (SweepParameter::Power, [1e9, 3e9, 1e10, 3e10, 1e11]),
            (SweepParameter::Bandwidth, [250.0, 500.0, 1e3, 2e3, 4e3]),
        ] {
            let rows = sweep(&spec, parameter, &grid).unwrap();
            for scheme in Scheme::ALL {
                for mode in Mode::ALL {
                    cells += 1;
                    let series: Vec<&SweepRow> = rows.iter().filter(|r| r.scheme == scheme && r.mode == mode).collect();
                    for t in 0..spec.trials {
                        let tp: Vec<f64> = series
                            .iter()
                            .map(|r| r.summary().map(|s| s.trials[t].throughput).unwrap_or(f64::NAN))
                            .collect();
                        if tp.windows(2).any(|w| w[1].is_nan() || w[1] < w[0]) {
                            violations.push(format!(
                                "{} {} {} {} seed {t}",
                                source.as_str(),
                                parameter.as_str(),
                                scheme.as_str(),
                                mode.as_str()
                            ));
                        }
                    }
                }
            }
        }
    }
    Outcome::new(
        violations.is_empty(),
        format!(
            "{cells} sweep cells x 20 seeds, {} non-monotone series{}",
            violations.len(),
            violations.first().map(|v| format!(" (first: {v})")).unwrap_or_default()
        ),
    )
}

fn check_grid(inst: &OptInstance, alloc: &Allocation, g: &GridAssignment) -> Result<(), String> {
    let l = inst.len();
    let mut rows_or_cols = vec![0usize; l];
    for i in 0..g.slots {
        for j in 0..g.subcarriers {
            let owners = (0..l).filter(|&k| g.indicator(k, i, j)).count();
            if owners != 1 {
                return Err(format!("cell ({i},{j}) has {owners} owners"));
            }
        }
    }
    match g.mode {
        Mode::Td => {
            for i in 0..g.slots {
                let k = g.owner(i, 0);
                if (0..g.subcarriers).map(|j| g.indicator(k, i, j) as usize).sum::<usize>() != g.subcarriers {
                    return Err(format!("slot {i} split across transmissions"));
                }
                rows_or_cols[k] += 1;
            }
        }
        Mode::Fd => {
            for j in 0..g.subcarriers {
                let k = g.owner(0, j);
                if (0..g.slots).map(|i| g.indicator(k, i, j) as usize).sum::<usize>() != g.slots {
                    return Err(format!("subcarrier {j} split across transmissions"));
                }
                rows_or_cols[k] += 1;
            }
        }
    }
    if rows_or_cols != g.counts {
        return Err("counts disagree with the assignment".into());
    }
    for k in 0..l {
        let active = inst.sizes[k] > 0.0;
        if active != (g.counts[k] > 0) {
            return Err(format!("transmission {k}: active {active}, {} units", g.counts[k]));
        }
    }
    if g.quantized_time < alloc.total_time() * (1.0 - 1e-12) {
        return Err(format!(
            "quantized {} below continuous {}",
            g.quantized_time,
            alloc.total_time()
        ));
    }
    Ok(())
}

fn c9_quantization() -> Outcome {
    let mut r = rng(9);
    let mut instances = Vec::new();
    for k in 2..=5 {
        for scheme in Scheme::ALL {
            let cfg = SystemConfig::new(4, k, 10_000, 0.8, 1e11, 1e3, 64, 1e-3).unwrap();
            let mut spec = TrialSpec::new(cfg);
            spec.scheme = scheme;
            spec.requests = RequestModel::Uniform;
            for seed in 0..4 {
                instances.push(build_instance(&spec, seed).unwrap().instance);
            }
        }
    }
    for _ in 0..20 {
        let l = r.random_range(1..=12usize);
        let mut sizes: Vec<f64> = (0..l)
            .map(|_| if r.random_bool(0.25) { 0.0 } else { log_uniform(&mut r, 1.0, 1e5) })
            .collect();
        sizes[0] = sizes[0].max(1.0);
        let noise = (0..l).map(|_| log_uniform(&mut r, 0.1, 10.0)).collect();
        instances.push(OptInstance::new(sizes, noise, 10.0, 1.0).unwrap());
    }

    let mut grids = 0;
    let mut cells = 0usize;
    let mut errors = Vec::new();
    for inst in &instances {
        let active = inst.active().count();
        for mode in Mode::ALL {
            let alloc = allocate(inst, mode, 1e-6).unwrap();
            let subcarriers = r.random_range(active..=(2 * inst.len() + 8));
            let frames = r.random_range(active.max(2)..=120) as f64;
            let grid = ResourceGrid {
                subcarriers,
                subcarrier_bw: inst.bandwidth / subcarriers as f64,
                slot_duration: alloc.total_time() / frames,
            };
            match quantize(inst, &alloc, &grid) {
                Ok(g) => {
                    grids += 1;
                    cells += g.slots * g.subcarriers;
                    if let Err(e) = check_grid(inst, &alloc, &g) {
                        errors.push(format!("{}: {e}", mode.as_str()));
                    }
                }
                Err(e) => errors.push(format!("{}: {e}", mode.as_str())),
            }
        }
    }

    let crowded = OptInstance::new(vec![1.0; 5], vec![1.0; 5], 1.0, 1.0).unwrap();
    let fd = allocate(&crowded, Mode::Fd, 1e-6).unwrap();
    let tight = ResourceGrid {
        subcarriers: 4,
        subcarrier_bw: 0.25,
        slot_duration: 1.0,
    };
    let rejects = matches!(
        quantize(&crowded, &fd, &tight),
        Err(AllocError::InfeasibleQuantization { active: 5, .. })
    );

    Outcome::new(
        errors.is_empty() && rejects,
        format!(
            "{grids} grids, {cells} cells checked, {} violations{}; too-small grid rejected: {rejects}",
            errors.len(),
            errors.first().map(|e| format!(" (first: {e})")).unwrap_or_default()
        ),
    )
}
