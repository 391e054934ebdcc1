//! Mapping continuous allocations onto the slot x subcarrier grid.
//!
//! TD gives every transmission whole time slots (all `H` subcarriers of a
//! row); FD gives it whole subcarriers for every slot of the frame. Counts
//! come from the largest-remainder method, so each cell belongs to exactly
//! one transmission.

use super::{AllocError, Allocation, FdAllocation, Mode, OptInstance, TdAllocation};
use crate::channel::capacity;

/// Largest-remainder (Hamilton) apportionment of `total` units in proportion
/// to `weights`. Ties on the remainder go to the lower index. All-zero
/// weights yield all-zero counts.
pub fn apportion(weights: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 || total == 0 {
        return vec![0; weights.len()];
    }
    let quotas: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// Gives one unit to every active entry left at zero, taken from the entry
/// with the most units (lowest index on ties).
fn ensure_active_units(counts: &mut [usize], active: &[bool]) {
    for i in 0..counts.len() {
        if active[i] && counts[i] == 0 {
            let donor = (0..counts.len())
                .filter(|&j| counts[j] > 1)
                .max_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a)))
                .expect("enough units for all active transmissions");
            counts[donor] -= 1;
            counts[i] += 1;
        }
    }
}

/// Grid dimensions used by [`quantize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceGrid {
    pub subcarriers: usize,
    /// Hz.
    pub subcarrier_bw: f64,
    /// Seconds.
    pub slot_duration: f64,
}

/// An integral slot/subcarrier assignment. TD owns rows, FD owns columns;
/// `counts[k]` rows (or columns) go to transmission `k`, laid out in
/// transmission order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAssignment {
    pub mode: Mode,
    pub slots: usize,
    pub subcarriers: usize,
    pub counts: Vec<usize>,
    /// `offsets[k]` is the first row/column of transmission `k`.
    offsets: Vec<usize>,
    pub continuous_time: f64,
    pub quantized_time: f64,
}

impl GridAssignment {
    fn new(
        mode: Mode,
        slots: usize,
        subcarriers: usize,
        counts: Vec<usize>,
        continuous_time: f64,
        quantized_time: f64,
    ) -> Self {
        let offsets = counts
            .iter()
            .scan(0, |acc, &c| {
                let start = *acc;
                *acc += c;
                Some(start)
            })
            .collect();
        GridAssignment {
            mode,
            slots,
            subcarriers,
            counts,
            offsets,
            continuous_time,
            quantized_time,
        }
    }

    /// Transmission owning time slot `slot` on subcarrier `sub`.
    pub fn owner(&self, slot: usize, sub: usize) -> usize {
        assert!(slot < self.slots && sub < self.subcarriers);
        let line = match self.mode {
            Mode::Td => slot,
            Mode::Fd => sub,
        };
        // the last offset at or before `line` belongs to a nonempty run
        self.offsets.partition_point(|&o| o <= line) - 1
    }

    /// `X[slot][sub]^k`.
    pub fn indicator(&self, k: usize, slot: usize, sub: usize) -> bool {
        self.owner(slot, sub) == k
    }
}

/// TD rounding over a fixed number of slots.
pub fn quantize_td(
    inst: &OptInstance,
    alloc: &TdAllocation,
    slots: usize,
    subcarriers: usize,
) -> Result<GridAssignment, AllocError> {
    let active: Vec<bool> = alloc.fractions.iter().map(|&t| t > 0.0).collect();
    let needed = active.iter().filter(|&&a| a).count();
    if slots < needed || subcarriers == 0 {
        return Err(AllocError::InfeasibleQuantization {
            cells: slots * subcarriers,
            active: needed,
        });
    }
    let mut counts = apportion(&alloc.fractions, slots);
    ensure_active_units(&mut counts, &active);
    let quantized_time = (0..counts.len())
        .filter(|&i| active[i])
        .map(|i| inst.sizes[i] / (counts[i] as f64 / slots as f64 * inst.full_rate(i)))
        .sum();
    Ok(GridAssignment::new(
        Mode::Td,
        slots,
        subcarriers,
        counts,
        alloc.total_time,
        quantized_time,
    ))
}

/// FD rounding onto `subcarriers` columns of width `subcarrier_bw`; powers
/// stay continuous. The frame is long enough to finish the slowest
/// transmission.
pub fn quantize_fd(
    inst: &OptInstance,
    alloc: &FdAllocation,
    subcarriers: usize,
    subcarrier_bw: f64,
    slot_duration: f64,
) -> Result<GridAssignment, AllocError> {
    let active: Vec<bool> = alloc.bandwidths.iter().map(|&b| b > 0.0).collect();
    let needed = active.iter().filter(|&&a| a).count();
    if subcarriers < needed {
        return Err(AllocError::InfeasibleQuantization {
            cells: subcarriers,
            active: needed,
        });
    }
    let mut counts = apportion(&alloc.bandwidths, subcarriers);
    ensure_active_units(&mut counts, &active);
    let quantized_time = (0..counts.len())
        .filter(|&i| active[i])
        .map(|i| {
            let bw = counts[i] as f64 * subcarrier_bw;
            inst.sizes[i] / capacity(bw, alloc.powers[i], inst.worst_noise[i])
        })
        .fold(0.0, f64::max);
    let slots = frame_slots(quantized_time, slot_duration).max(1);
    Ok(GridAssignment::new(
        Mode::Fd,
        slots,
        subcarriers,
        counts,
        alloc.total_time,
        quantized_time,
    ))
}

fn frame_slots(time: f64, slot_duration: f64) -> usize {
    (time / slot_duration).ceil() as usize
}

/// Quantizes either allocation. TD uses as many slots as the continuous
/// schedule spans (at least one per active transmission).
pub fn quantize(
    inst: &OptInstance,
    alloc: &Allocation,
    grid: &ResourceGrid,
) -> Result<GridAssignment, AllocError> {
    match alloc {
        Allocation::Td(a) => {
            let needed = a.fractions.iter().filter(|&&t| t > 0.0).count();
            let slots = frame_slots(a.total_time, grid.slot_duration).max(needed);
            quantize_td(inst, a, slots, grid.subcarriers)
        }
        Allocation::Fd(a) => quantize_fd(inst, a, grid.subcarriers, grid.subcarrier_bw, grid.slot_duration),
    }
}
