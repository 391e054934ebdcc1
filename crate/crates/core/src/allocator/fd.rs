//! Min-max FD allocation.
//!
//! For a target completion time `T`, transmission `i` needs rate `S_i / T`
//! and, on bandwidth `B_i`, at least the power
//! `P_i(B_i) = n_i B_i (2^(S_i / (T B_i)) - 1)`, which is convex and
//! decreasing in `B_i`. The cheapest split of `B` equalises the marginals
//! `-dP_i/dB_i = n_i phi(x_i) = lambda`, where `x_i = S_i / (T B_i)` is the
//! spectral efficiency and `phi(x) = 2^x (x ln 2 - 1) + 1`.
//!
//! The multiplier fixes every `x_i = phi^-1(lambda / n_i)` independently of
//! `T`, and the bandwidth budget then fixes `T(lambda) = sum_i S_i / (B x_i)`.
//! Total power grows and `T(lambda)` shrinks as `lambda` grows, so the
//! optimum is the `lambda` whose power equals `P`; it is found by bisection
//! on `ln lambda`. The returned allocation always sits on the feasible side.

use std::f64::consts::LN_2;

use super::{AllocError, FdAllocation, OptInstance};
use crate::channel::capacity;

pub const DEFAULT_FD_TOL: f64 = 1e-6;
pub const MAX_FD_ITERATIONS: usize = 500;

/// Step of the bracket search, in nats of `lambda`.
const BRACKET_STEP: f64 = 4.0;
/// Keeps `lambda / n_i` and `2^x` inside f64 range.
const MAX_LN_RATIO: f64 = 700.0;

/// `e^u (u - 1) + 1`, i.e. `phi` in natural units `u = x ln 2`.
fn marginal(u: f64) -> f64 {
    if u < 1e-3 {
        // u^2/2 + u^3/3 + u^4/8 + u^5/30
        u * u * (0.5 + u * (1.0 / 3.0 + u * (0.125 + u / 30.0)))
    } else {
        u * u.exp() - u.exp_m1()
    }
}

/// Solves `marginal(u) = e^ln_y` for `u >= 0`.
///
/// `marginal` is convex and increasing on `u >= 0`, and the start point
/// `min(sqrt(2y), max(ln y, 2))` never lies left of the root, so Newton's
/// iterates decrease monotonically onto it.
fn inverse_marginal(ln_y: f64) -> f64 {
    let ln_y = ln_y.min(MAX_LN_RATIO);
    let y = ln_y.exp();
    if y == 0.0 {
        return 0.0;
    }
    let mut u = (2.0 * y).sqrt().min(ln_y.max(2.0));
    for _ in 0..200 {
        let step = (marginal(u) - y) / (u * u.exp());
        if step.is_nan() || step <= 0.0 {
            break;
        }
        u -= step;
        if step <= 1e-15 * u {
            break;
        }
    }
    u
}

struct Active {
    index: usize,
    size: f64,
    noise: f64,
    ln_noise: f64,
}

struct Evaluation {
    time: f64,
    power: f64,
    /// Spectral efficiency in nats/s/Hz, per active transmission.
    u: Vec<f64>,
}

fn evaluate(active: &[Active], bandwidth: f64, ln_lambda: f64) -> Evaluation {
    let u: Vec<f64> = active
        .iter()
        .map(|a| inverse_marginal(ln_lambda - a.ln_noise))
        .collect();
    let time: f64 = active
        .iter()
        .zip(&u)
        .map(|(a, &u)| a.size * LN_2 / (bandwidth * u))
        .sum();
    let power: f64 = active
        .iter()
        .zip(&u)
        .map(|(a, &u)| a.noise * a.size * LN_2 * u.exp_m1() / u)
        .sum::<f64>()
        / time;
    Evaluation { time, power, u }
}

/// Minimises the slowest transmission's completion time over bandwidth and
/// power splits. `tol` bounds the relative gap between the returned time and
/// the optimum; `converged` reports whether that gap was certified.
pub fn fd_allocate(inst: &OptInstance, tol: f64) -> Result<FdAllocation, AllocError> {
    inst.validate()?;
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(AllocError::InvalidTolerance(tol));
    }
    let l = inst.len();
    let active: Vec<Active> = inst
        .active()
        .map(|i| Active {
            index: i,
            size: inst.sizes[i],
            noise: inst.worst_noise[i],
            ln_noise: inst.worst_noise[i].ln(),
        })
        .collect();
    if active.is_empty() {
        return Ok(FdAllocation {
            bandwidths: vec![0.0; l],
            powers: vec![0.0; l],
            times: vec![0.0; l],
            total_time: 0.0,
            converged: true,
            iterations: 0,
        });
    }

    let b = inst.bandwidth;
    let p = inst.power;
    let feasible = |e: &Evaluation| e.power <= p;

    let mut iterations = 0;
    let start = active.iter().map(|a| a.ln_noise).sum::<f64>() / active.len() as f64;
    let first = evaluate(&active, b, start);
    iterations += 1;
    let (mut lo, mut lo_eval, mut hi, mut hi_time) = if feasible(&first) {
        let mut lo = start;
        let mut lo_eval = first;
        loop {
            let cand = lo + BRACKET_STEP;
            let e = evaluate(&active, b, cand);
            iterations += 1;
            if !feasible(&e) || iterations >= MAX_FD_ITERATIONS {
                break (lo, lo_eval, cand, e.time);
            }
            lo = cand;
            lo_eval = e;
        }
    } else {
        let mut hi = start;
        let mut hi_time = first.time;
        loop {
            let cand = hi - BRACKET_STEP;
            let e = evaluate(&active, b, cand);
            iterations += 1;
            if feasible(&e) {
                break (cand, e, hi, hi_time);
            }
            if iterations >= MAX_FD_ITERATIONS {
                // Degenerate: report the lowest-power point reached.
                break (cand, e, hi, hi_time);
            }
            hi = cand;
            hi_time = e.time;
        }
    };

    while iterations < MAX_FD_ITERATIONS {
        let gap = lo_eval.time / hi_time - 1.0;
        if gap <= 4.0 * f64::EPSILON || hi - lo <= 1e-15 * lo.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let e = evaluate(&active, b, mid);
        iterations += 1;
        if feasible(&e) {
            lo = mid;
            lo_eval = e;
        } else {
            hi = mid;
            hi_time = e.time;
        }
    }
    let converged = feasible(&lo_eval) && lo_eval.time / hi_time - 1.0 <= tol;

    let mut bandwidths = vec![0.0; l];
    let mut powers = vec![0.0; l];
    for (a, &u) in active.iter().zip(&lo_eval.u) {
        let bw = a.size * LN_2 / (lo_eval.time * u);
        bandwidths[a.index] = bw;
        powers[a.index] = a.noise * bw * u.exp_m1();
    }
    // Close the budgets exactly; extra power only shortens transmissions.
    let bw_scale = b / bandwidths.iter().sum::<f64>();
    let p_scale = p / powers.iter().sum::<f64>();
    for a in &active {
        bandwidths[a.index] *= bw_scale;
        powers[a.index] *= p_scale;
    }
    let mut times = vec![0.0; l];
    for a in &active {
        times[a.index] = a.size / capacity(bandwidths[a.index], powers[a.index], a.noise);
    }
    let total_time = times.iter().cloned().fold(0.0, f64::max);

    Ok(FdAllocation {
        bandwidths,
        powers,
        times,
        total_time,
        converged,
        iterations,
    })
}
