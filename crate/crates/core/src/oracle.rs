//! Exact optimum for small instances and the ceiling-of-total-weight bound.

use thiserror::Error;

use crate::baselines::first_fit_decreasing;
use crate::model::Instance;

pub const DEFAULT_LIMIT: usize = 16;

/// Item count above which the subset table is never allocated, whatever the caller's limit.
pub const HARD_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {items} items, exact search is limited to {limit}")]
    TooLarge { items: usize, limit: usize },
}

/// `ceil(W)`: no packing can use fewer bins than the total weight.
pub fn lower_bound_l1(instance: &Instance) -> u64 {
    instance.total_size().div_ceil(instance.capacity() as u128) as u64
}

/// Minimum number of bins for `instance`, refusing instances with more than
/// `limit` items.
///
/// Subset dynamic programming: for every subset, the lexicographically
/// smallest (bins used, load of the last open bin) over all orders in which
/// the subset can be packed. Adding items one at a time to the last bin, or
/// to a fresh one, reaches every packing, so the full set's bin count is the
/// optimum. Runs in `O(2^n n)`.
pub fn optimal_bins(instance: &Instance, limit: usize) -> Result<u64, OracleError> {
    let n = instance.len();
    let limit = limit.min(HARD_LIMIT);
    if n > limit {
        return Err(OracleError::TooLarge { items: n, limit });
    }
    if n == 0 {
        return Ok(0);
    }
    // FFD meeting the lower bound is already optimal.
    let lower = lower_bound_l1(instance);
    let heuristic = first_fit_decreasing(instance).bin_count() as u64;
    if heuristic == lower {
        return Ok(lower);
    }

    let capacity = instance.capacity();
    let sizes: Vec<u64> = instance.items().iter().map(|it| it.weight.numerator()).collect();
    let full = (1usize << n) - 1;
    let mut best = vec![(u32::MAX, u64::MAX); full + 1];
    best[0] = (1, 0);
    for mask in 0..full {
        let (bins, load) = best[mask];
        if bins == u32::MAX {
            continue;
        }
        let mut rest = full & !mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let next = if load + sizes[i] <= capacity {
                (bins, load + sizes[i])
            } else {
                (bins + 1, sizes[i])
            };
            let slot = &mut best[mask | (1 << i)];
            if next < *slot {
                *slot = next;
            }
        }
    }
    let optimum = best[full].0 as u64;
    debug_assert!(lower <= optimum && optimum <= heuristic);
    Ok(optimum)
}
