#![allow(dead_code)]

use rangepack::model::Instance;
use rangepack::range::{RangeConfig, SelectionPolicy, MAX_SCALING_DEPTH};
use rangepack::Algorithm;

/// Minimum bin count by enumerating every set partition of the items
/// (restricted growth strings) and keeping the feasible ones.
pub fn optimal_by_partitions(instance: &Instance) -> u64 {
    let n = instance.len();
    if n == 0 {
        return 0;
    }
    let sizes: Vec<u64> = (0..n).map(|i| instance.size(i)).collect();
    let cap = instance.capacity();
    let mut block_of = vec![0usize; n];
    let mut best = n as u64;

    fn visit(i: usize, blocks: usize, block_of: &mut [usize], sizes: &[u64], cap: u64, best: &mut u64) {
        if i == block_of.len() {
            let mut loads = vec![0u64; blocks];
            for (item, &b) in block_of.iter().enumerate() {
                loads[b] += sizes[item];
            }
            if loads.iter().all(|&l| l <= cap) {
                *best = (*best).min(blocks as u64);
            }
            return;
        }
        for b in 0..=blocks {
            block_of[i] = b;
            visit(i + 1, blocks.max(b + 1), block_of, sizes, cap, best);
        }
    }

    visit(0, 0, &mut block_of, &sizes, cap, &mut best);
    best
}

/// Every range-packer configuration the suites sweep.
pub fn range_configs(seed: u64) -> Vec<RangeConfig> {
    let mut out = Vec::new();
    for r in [10, 20, 40] {
        for policy in [SelectionPolicy::Lifo, SelectionPolicy::SeededRandom(seed)] {
            for depth in 0..=MAX_SCALING_DEPTH {
                out.push(RangeConfig::new(r, policy, depth).unwrap());
            }
        }
    }
    out
}

/// Range configurations plus every baseline.
pub fn all_algorithms(seed: u64) -> Vec<Algorithm> {
    let mut out: Vec<Algorithm> = range_configs(seed).into_iter().map(Algorithm::Range).collect();
    out.extend([Algorithm::Ffd, Algorithm::Bfd, Algorithm::Ff, Algorithm::Nf]);
    out
}

/// Sorted member sizes per bin, bins sorted.
pub fn bin_multisets(instance: &Instance, result: &rangepack::PackingResult) -> Vec<Vec<u64>> {
    let mut bins: Vec<Vec<u64>> = result
        .bins
        .iter()
        .map(|b| {
            let mut v: Vec<u64> = b.members.iter().map(|&i| instance.size(i)).collect();
            v.sort_unstable();
            v
        })
        .collect();
    bins.sort();
    bins
}
