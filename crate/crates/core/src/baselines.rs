//! Classical comparison heuristics: first fit, best fit, their decreasing
//! variants, and next fit.

use std::collections::BTreeSet;

use crate::model::{Bin, Counters, Instance, ItemId, PackingResult};

/// Max-tree over bin residual capacities. Slots past the last opened bin
/// hold a full capacity, so "leftmost slot that fits" is first fit with new
/// bins opened on demand.
struct ResidualTree {
    leaves: usize,
    nodes: Vec<u64>,
}

impl ResidualTree {
    fn new(slots: usize, capacity: u64) -> Self {
        let leaves = slots.max(1).next_power_of_two();
        ResidualTree {
            leaves,
            nodes: vec![capacity; 2 * leaves],
        }
    }

    /// Leftmost slot with residual at least `size`, counting visited nodes.
    fn first_fit(&self, size: u64, visits: &mut u64) -> Option<usize> {
        if self.nodes[1] < size {
            return None;
        }
        let mut node = 1;
        while node < self.leaves {
            *visits += 1;
            node = if self.nodes[2 * node] >= size {
                2 * node
            } else {
                2 * node + 1
            };
        }
        Some(node - self.leaves)
    }

    fn consume(&mut self, slot: usize, size: u64) {
        let mut node = slot + self.leaves;
        self.nodes[node] -= size;
        while node > 1 {
            node /= 2;
            self.nodes[node] = self.nodes[2 * node].max(self.nodes[2 * node + 1]);
        }
    }
}

fn decreasing_order(instance: &Instance) -> Vec<ItemId> {
    let mut order: Vec<ItemId> = (0..instance.len()).collect();
    // Stable, so equal sizes keep input order.
    order.sort_by_key(|&id| std::cmp::Reverse(instance.size(id)));
    order
}

fn result(tag: &str, instance: &Instance, bins: Vec<Bin>, counters: Counters) -> PackingResult {
    PackingResult {
        algorithm_tag: tag.into(),
        capacity: instance.capacity(),
        bins,
        merge_count: 0,
        config_echo: String::new(),
        counters,
    }
}

fn first_fit_in_order(tag: &str, instance: &Instance, order: &[ItemId]) -> PackingResult {
    let capacity = instance.capacity();
    let mut tree = ResidualTree::new(order.len(), capacity);
    let mut bins: Vec<Bin> = Vec::new();
    let mut counters = Counters::default();
    for &id in order {
        let size = instance.size(id);
        counters.items_touched += 1;
        let slot = tree
            .first_fit(size, &mut counters.scans)
            .expect("an unopened slot always fits");
        tree.consume(slot, size);
        if slot == bins.len() {
            bins.push(Bin::new(Vec::new(), 0));
        }
        let bin = &mut bins[slot];
        bin.members.push(id);
        bin.load += size;
    }
    counters.peak_open = bins.len() as u64;
    result(tag, instance, bins, counters)
}

fn best_fit_in_order(tag: &str, instance: &Instance, order: &[ItemId]) -> PackingResult {
    let capacity = instance.capacity();
    // (residual, bin index): the first entry at or above (size, 0) is the
    // tightest feasible bin, lowest index on ties.
    let mut open: BTreeSet<(u64, usize)> = BTreeSet::new();
    let mut bins: Vec<Bin> = Vec::new();
    let mut counters = Counters::default();
    for &id in order {
        let size = instance.size(id);
        counters.items_touched += 1;
        counters.scans += 1;
        let target = open.range((size, 0)..).next().copied();
        let slot = match target {
            Some(entry) => {
                open.remove(&entry);
                entry.1
            }
            None => {
                bins.push(Bin::new(Vec::new(), 0));
                bins.len() - 1
            }
        };
        let bin = &mut bins[slot];
        bin.members.push(id);
        bin.load += size;
        open.insert((capacity - bin.load, slot));
    }
    counters.peak_open = bins.len() as u64;
    result(tag, instance, bins, counters)
}

/// First fit over items sorted by non-increasing size (ties by id).
pub fn first_fit_decreasing(instance: &Instance) -> PackingResult {
    first_fit_in_order("ffd", instance, &decreasing_order(instance))
}

/// Best fit over items sorted by non-increasing size (ties by id).
pub fn best_fit_decreasing(instance: &Instance) -> PackingResult {
    best_fit_in_order("bfd", instance, &decreasing_order(instance))
}

/// Each item, in input order, goes to the lowest-indexed bin it fits.
pub fn first_fit(instance: &Instance) -> PackingResult {
    let order: Vec<ItemId> = (0..instance.len()).collect();
    first_fit_in_order("ff", instance, &order)
}

/// Keeps a single open bin and closes it when the next item does not fit.
pub fn next_fit(instance: &Instance) -> PackingResult {
    let capacity = instance.capacity();
    let mut bins: Vec<Bin> = Vec::new();
    let mut counters = Counters::default();
    for item in instance.items() {
        let size = item.weight.numerator();
        counters.items_touched += 1;
        match bins.last_mut() {
            Some(bin) if bin.load + size <= capacity => {
                bin.members.push(item.id);
                bin.load += size;
            }
            _ => bins.push(Bin::new(vec![item.id], size)),
        }
    }
    counters.peak_open = u64::from(!bins.is_empty());
    result("nf", instance, bins, counters)
}
