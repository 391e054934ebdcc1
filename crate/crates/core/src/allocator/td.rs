use super::{AllocError, OptInstance, TdAllocation};

/// Weighted TD objective `sum_i w_i S_i / (tau_i B log2(1 + P / (n_i B)))`
/// over the active transmissions. Infinite if an active `tau_i` is zero.
pub fn td_objective(inst: &OptInstance, fractions: &[f64]) -> f64 {
    inst.active()
        .map(|i| inst.weights[i] * inst.sizes[i] / (fractions[i] * inst.full_rate(i)))
        .sum()
}

/// Closed-form TD allocation: `tau_i` proportional to
/// `sqrt(w_i S_i / log2(1 + P / (n_i B)))`, which by Cauchy-Schwarz
/// minimises the objective. With unit weights the optimum is
/// `(sum_i sqrt(S_i / (B log2(1 + P / (n_i B)))))^2`.
pub fn td_allocate(inst: &OptInstance) -> Result<TdAllocation, AllocError> {
    inst.validate()?;
    let l = inst.len();
    let roots: Vec<f64> = (0..l)
        .map(|i| {
            if inst.sizes[i] > 0.0 {
                (inst.weights[i] * inst.sizes[i] / inst.full_rate(i)).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let norm: f64 = roots.iter().sum();
    if norm == 0.0 {
        return Ok(TdAllocation {
            fractions: vec![0.0; l],
            times: vec![0.0; l],
            total_time: 0.0,
        });
    }
    let fractions: Vec<f64> = roots.iter().map(|r| r / norm).collect();
    let times: Vec<f64> = (0..l)
        .map(|i| {
            if fractions[i] > 0.0 {
                inst.sizes[i] / (fractions[i] * inst.full_rate(i))
            } else {
                0.0
            }
        })
        .collect();
    let total_time = times.iter().sum();
    Ok(TdAllocation {
        fractions,
        times,
        total_time,
    })
}
