//! Exact data model shared by every packer: weights, items, instances, bins and results.
//!
//! Sizes are integers over the instance capacity. A weight `w` is the fraction
//! `numerator / capacity`, so every packing decision is an integer comparison.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense index of an item inside its [`Instance`].
pub type ItemId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("capacity must be positive")]
    ZeroCapacity,
    #[error("item {id}: size must be positive")]
    ZeroSize { id: ItemId },
    #[error("item {id}: size {size} exceeds capacity {capacity}")]
    Oversized { id: ItemId, size: u64, capacity: u64 },
    #[error("invalid decimal weight {0:?}")]
    BadDecimal(String),
}

/// An item size in `(0, 1]`, held as `numerator / denominator`.
///
/// The denominator is the instance capacity and is never reduced, so weights
/// of one instance always share it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Weight {
    num: u64,
    den: u64,
}

impl Weight {
    pub fn new(num: u64, den: u64) -> Option<Self> {
        (num > 0 && num <= den).then_some(Weight { num, den })
    }

    #[inline]
    pub fn numerator(self) -> u64 {
        self.num
    }

    #[inline]
    pub fn denominator(self) -> u64 {
        self.den
    }

    /// True for a weight of exactly one bin.
    #[inline]
    pub fn is_full(self) -> bool {
        self.num == self.den
    }

    /// Exact sum of two weights over the same capacity, or `None` if it
    /// would exceed one bin.
    #[inline]
    pub fn checked_add(self, other: Weight) -> Option<Weight> {
        debug_assert_eq!(self.den, other.den, "weights from different instances");
        let num = self.num.checked_add(other.num)?;
        (num <= self.den).then_some(Weight { num, den: self.den })
    }

    /// The weight multiplied by two, if the result still fits in one bin.
    pub fn checked_double(self) -> Option<Weight> {
        let num = self.num.checked_mul(2)?;
        (num <= self.den).then_some(Weight { num, den: self.den })
    }

    pub fn as_ratio(self) -> Ratio<u64> {
        Ratio::new(self.num, self.den)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub id: ItemId,
    pub weight: Weight,
}

/// A named list of items sharing one bin capacity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    capacity: u64,
    items: Vec<Item>,
    /// Bin count of the best known solution, when the source provides one.
    pub best_known: Option<u64>,
}

impl Instance {
    /// Builds an instance from integer sizes; item ids follow slice order.
    pub fn from_sizes(
        name: impl Into<String>,
        capacity: u64,
        sizes: &[u64],
    ) -> Result<Self, ModelError> {
        if capacity == 0 {
            return Err(ModelError::ZeroCapacity);
        }
        let items = sizes
            .iter()
            .enumerate()
            .map(|(id, &size)| match Weight::new(size, capacity) {
                Some(weight) => Ok(Item { id, weight }),
                None if size == 0 => Err(ModelError::ZeroSize { id }),
                None => Err(ModelError::Oversized {
                    id,
                    size,
                    capacity,
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Instance {
            name: name.into(),
            capacity,
            items,
            best_known: None,
        })
    }

    /// Builds an instance from decimal literals such as `"0.41"`.
    ///
    /// The capacity becomes `10^d` where `d` is the largest number of
    /// fractional digits, so the conversion is exact.
    pub fn from_decimals<S: AsRef<str>>(
        name: impl Into<String>,
        weights: &[S],
    ) -> Result<Self, ModelError> {
        let parsed = weights
            .iter()
            .map(|w| parse_decimal(w.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        let scale = parsed.iter().map(|&(_, d)| d).max().unwrap_or(0);
        let capacity = 10u64
            .checked_pow(scale)
            .ok_or_else(|| ModelError::BadDecimal("too many fractional digits".into()))?;
        let sizes = parsed
            .iter()
            .map(|&(digits, d)| digits * 10u64.pow(scale - d))
            .collect::<Vec<_>>();
        Instance::from_sizes(name, capacity, &sizes)
    }

    pub fn with_best_known(mut self, best_known: Option<u64>) -> Self {
        self.best_known = best_known;
        self
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn size(&self, id: ItemId) -> u64 {
        self.items[id].weight.numerator()
    }

    /// Sum of item sizes in capacity units.
    pub fn total_size(&self) -> u128 {
        self.items.iter().map(|it| it.weight.numerator() as u128).sum()
    }

    /// Total weight `W` as an exact fraction of one bin.
    pub fn total_weight(&self) -> Ratio<u128> {
        Ratio::new(self.total_size(), self.capacity as u128)
    }
}

/// Parses a non-negative fixed-point literal into (digits, fractional digit count).
pub(crate) fn parse_decimal(text: &str) -> Result<(u64, u32), ModelError> {
    let bad = || ModelError::BadDecimal(text.to_string());
    let text = text.trim();
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let frac = frac.trim_end_matches('0');
    let mut digits: u64 = 0;
    for b in int.bytes().chain(frac.bytes()) {
        digits = digits
            .checked_mul(10)
            .and_then(|d| d.checked_add((b - b'0') as u64))
            .ok_or_else(bad)?;
    }
    Ok((digits, frac.len() as u32))
}

/// A closed bin: its members and their summed size in capacity units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bin {
    pub members: Vec<ItemId>,
    pub load: u64,
}

impl Bin {
    pub fn new(members: Vec<ItemId>, load: u64) -> Self {
        Bin { members, load }
    }

    pub fn fill(&self, capacity: u64) -> Ratio<u64> {
        Ratio::new(self.load, capacity)
    }
}

/// Work counters gathered while packing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    /// Bucket emptiness checks and bin-fit probes.
    pub scans: u64,
    /// Items read from the input.
    pub items_touched: u64,
    /// Partners restored after an exact-complement attempt overflowed.
    pub complement_restores: u64,
    /// Chain merges that would have exceeded one bin. Always zero for a correct packer.
    pub chain_overflows: u64,
    /// Largest number of simultaneously open bins or live pieces.
    pub peak_open: u64,
}

/// Output of any packing algorithm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingResult {
    pub algorithm_tag: String,
    pub capacity: u64,
    pub bins: Vec<Bin>,
    pub merge_count: u64,
    pub config_echo: String,
    pub counters: Counters,
}

impl PackingResult {
    pub fn bin_count(&self) -> usize {
        self.bins.len()
    }
}

/// First failed check found by [`validate_result`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("result capacity {found} does not match instance capacity {expected}")]
    CapacityMismatch { expected: u64, found: u64 },
    #[error("bin {bin} is empty")]
    EmptyBin { bin: usize },
    #[error("bin {bin} holds unknown item {item}")]
    UnknownItem { bin: usize, item: ItemId },
    #[error("bin {bin} repeats item {item}")]
    DuplicateItem { bin: usize, item: ItemId },
    #[error("bin {bin} overfull: load {load} > capacity {capacity}")]
    Overfull { bin: usize, load: u128, capacity: u64 },
    #[error("bin {bin} records load {recorded} but its items sum to {actual}")]
    LoadMismatch { bin: usize, recorded: u64, actual: u128 },
    #[error("item {item} is not packed")]
    MissingItem { item: ItemId },
}

/// Checks that `result` is a feasible packing of exactly the items of `instance`.
pub fn validate_result(instance: &Instance, result: &PackingResult) -> Result<(), Violation> {
    let capacity = instance.capacity();
    if !result.bins.is_empty() && result.capacity != capacity {
        return Err(Violation::CapacityMismatch {
            expected: capacity,
            found: result.capacity,
        });
    }
    let n = instance.len();
    let mut seen = vec![false; n];
    for (b, bin) in result.bins.iter().enumerate() {
        if bin.members.is_empty() {
            return Err(Violation::EmptyBin { bin: b });
        }
        let mut actual: u128 = 0;
        for &item in &bin.members {
            if item >= n {
                return Err(Violation::UnknownItem { bin: b, item });
            }
            if std::mem::replace(&mut seen[item], true) {
                return Err(Violation::DuplicateItem { bin: b, item });
            }
            actual += instance.size(item) as u128;
        }
        if actual > capacity as u128 {
            return Err(Violation::Overfull {
                bin: b,
                load: actual,
                capacity,
            });
        }
        if actual != bin.load as u128 {
            return Err(Violation::LoadMismatch {
                bin: b,
                recorded: bin.load,
                actual,
            });
        }
    }
    match seen.iter().position(|&s| !s) {
        Some(item) => Err(Violation::MissingItem { item }),
        None => Ok(()),
    }
}

/// Fill statistics over the bins of a result, as exact fractions of capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillStats {
    pub min_fill: Ratio<u64>,
    pub mean_fill: Ratio<u64>,
    /// Share of bins that are at least two thirds full.
    pub at_least_two_thirds: Ratio<u64>,
}

/// Computes [`FillStats`]. An empty result reports 1 for every statistic.
pub fn fill_stats(result: &PackingResult) -> FillStats {
    let one = Ratio::from_integer(1);
    if result.bins.is_empty() {
        return FillStats {
            min_fill: one,
            mean_fill: one,
            at_least_two_thirds: one,
        };
    }
    let capacity = result.capacity;
    let count = result.bins.len() as u64;
    let min_load = result.bins.iter().map(|b| b.load).min().unwrap_or(capacity);
    let total: u64 = result.bins.iter().map(|b| b.load).sum();
    // load / capacity >= 2/3  <=>  3 * load >= 2 * capacity
    let full_enough = result
        .bins
        .iter()
        .filter(|b| 3 * b.load as u128 >= 2 * capacity as u128)
        .count() as u64;
    FillStats {
        min_fill: Ratio::new(min_load, capacity),
        mean_fill: Ratio::new(total, capacity * count),
        at_least_two_thirds: Ratio::new(full_enough, count),
    }
}

/// Ids of every item packed in `result`, for partition checks.
pub fn packed_ids(result: &PackingResult) -> HashSet<ItemId> {
    result.bins.iter().flat_map(|b| b.members.iter().copied()).collect()
}
