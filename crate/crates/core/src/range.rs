//! Range-matching packer.
//!
//! Pieces are bucketed into `R` equal weight ranges `(k/R, (k+1)/R]`. Large
//! pieces (bucket `k >= R/2`) are first offered the exact complementary range
//! `R-1-k`, then the chain of lower ranges `R-2-k, ..., 0`; a large piece
//! nobody can join is closed alone. Once no large piece is left the highest
//! small range is paired off, and the composite is re-bucketed, possibly
//! becoming large again. With `R` fixed every step inspects at most `R`
//! buckets, so a run is linear in the number of items.
//!
//! Scaling doubles the small remainder so it can be packed again as if it
//! were large. Virtual bins produced one level down hold at most half a real
//! bin and are paired back up on the way out.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Bin, Counters, Instance, ItemId, PackingResult, Weight};

/// Largest scaling depth accepted by [`RangeConfig`].
pub const MAX_SCALING_DEPTH: u32 = 3;

/// Member links are 32-bit to keep pieces small; instances stay below this many items.
const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("range count {0} is not 10 times a power of two")]
    RangeCount(usize),
    #[error("scaling depth {0} exceeds the maximum of {MAX_SCALING_DEPTH}")]
    ScalingDepth(u32),
}

/// How a piece is picked from a bucket holding several.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionPolicy {
    /// Most recently inserted piece first.
    #[default]
    Lifo,
    /// Uniformly random, from a generator seeded once per run.
    SeededRandom(u64),
}

impl fmt::Display for SelectionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionPolicy::Lifo => f.write_str("lifo"),
            SelectionPolicy::SeededRandom(seed) => write!(f, "random(seed={seed})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RangeConfig {
    range_count: usize,
    policy: SelectionPolicy,
    scaling_depth: u32,
}

impl Default for RangeConfig {
    fn default() -> Self {
        RangeConfig {
            range_count: 10,
            policy: SelectionPolicy::Lifo,
            scaling_depth: 0,
        }
    }
}

impl RangeConfig {
    pub fn new(
        range_count: usize,
        policy: SelectionPolicy,
        scaling_depth: u32,
    ) -> Result<Self, ConfigError> {
        let valid = range_count >= 10
            && range_count.is_multiple_of(10)
            && (range_count / 10).is_power_of_two()
            && range_count <= 10 << 20;
        if !valid {
            return Err(ConfigError::RangeCount(range_count));
        }
        if scaling_depth > MAX_SCALING_DEPTH {
            return Err(ConfigError::ScalingDepth(scaling_depth));
        }
        Ok(RangeConfig {
            range_count,
            policy,
            scaling_depth,
        })
    }

    pub fn range_count(&self) -> usize {
        self.range_count
    }

    pub fn policy(&self) -> SelectionPolicy {
        self.policy
    }

    pub fn scaling_depth(&self) -> u32 {
        self.scaling_depth
    }

    pub fn with_policy(mut self, policy: SelectionPolicy) -> Self {
        self.policy = policy;
        self
    }
}

impl fmt::Display for RangeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ranges={} policy={} scaling_depth={}",
            self.range_count, self.policy, self.scaling_depth
        )
    }
}

/// Index of the range `(k/R, (k+1)/R]` holding `w`.
///
/// # Panics
///
/// If `w` is a full bin; those never enter a bucket.
pub fn range_index(w: Weight, range_count: usize) -> usize {
    assert!(!w.is_full(), "a full-bin weight has no range");
    let scaled = range_count as u128 * w.numerator() as u128;
    let den = w.denominator() as u128;
    (scaled.div_ceil(den) - 1) as usize
}

/// A live packing fragment: one item or a merged group of items.
///
/// Members are kept as a linked list threaded through the owning table, so
/// merging two pieces is constant time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Piece {
    weight: Weight,
    head: u32,
    tail: u32,
    len: u32,
}

impl Piece {
    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComplementOutcome {
    Merged,
    Returned(Piece),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainOutcome {
    Merged,
    Unmatched(Piece),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmallStep {
    Merged,
    Closed,
    Idle,
}

/// Working state of one packing run.
pub struct BucketTable {
    range_count: usize,
    denominator: u64,
    buckets: Vec<Vec<Piece>>,
    next: Vec<u32>,
    sink: Vec<Piece>,
    rng: Option<ChaCha8Rng>,
    large_live: usize,
    live: usize,
    merge_count: u64,
    counters: Counters,
}

impl BucketTable {
    /// A table holding every item of `instance`; full-bin items are closed at once.
    pub fn from_instance(instance: &Instance, config: &RangeConfig) -> Self {
        let mut table = BucketTable::new(instance.capacity(), instance.len(), config);
        for item in instance.items() {
            let piece = table.leaf(item.id, item.weight);
            table.route(piece);
        }
        table
    }

    /// An empty table for items `0..item_count` whose weights share `denominator`.
    ///
    /// # Panics
    ///
    /// If `item_count` does not fit in 32 bits.
    pub fn new(denominator: u64, item_count: usize, config: &RangeConfig) -> Self {
        assert!(item_count < NIL as usize, "too many items for one table");
        let rng = match config.policy {
            SelectionPolicy::Lifo => None,
            SelectionPolicy::SeededRandom(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
        BucketTable {
            range_count: config.range_count,
            denominator,
            buckets: vec![Vec::new(); config.range_count],
            next: vec![NIL; item_count],
            sink: Vec::new(),
            rng,
            large_live: 0,
            live: 0,
            merge_count: 0,
            counters: Counters::default(),
        }
    }

    pub fn range_count(&self) -> usize {
        self.range_count
    }

    pub fn merge_count(&self) -> u64 {
        self.merge_count
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }

    /// Weights in bucket `k`, oldest first.
    pub fn bucket_weights(&self, k: usize) -> Vec<Weight> {
        self.buckets[k].iter().map(|p| p.weight).collect()
    }

    pub fn bucket_len(&self, k: usize) -> usize {
        self.buckets[k].len()
    }

    /// Number of pieces currently sitting in buckets.
    pub fn live_pieces(&self) -> usize {
        self.live
    }

    /// Every piece currently sitting in a bucket.
    pub fn live(&self) -> impl Iterator<Item = &Piece> {
        self.buckets.iter().flatten()
    }

    /// Pieces closed so far, in closing order.
    pub fn closed(&self) -> &[Piece] {
        &self.sink
    }

    /// Member item ids of a piece, in merge order.
    pub fn members(&self, piece: &Piece) -> Vec<ItemId> {
        let mut out = Vec::with_capacity(piece.len as usize);
        let mut cur = piece.head;
        while out.len() < piece.len as usize {
            out.push(cur as ItemId);
            cur = self.next[cur as usize];
        }
        out
    }

    /// Wraps item `id` as a single-member piece without placing it.
    pub fn leaf(&mut self, id: ItemId, weight: Weight) -> Piece {
        debug_assert_eq!(weight.denominator(), self.denominator);
        self.counters.items_touched += 1;
        Piece {
            weight,
            head: id as u32,
            tail: id as u32,
            len: 1,
        }
    }

    /// Puts a piece in its range, or closes it when it fills a bin.
    pub fn route(&mut self, piece: Piece) {
        if piece.weight.is_full() {
            self.sink.push(piece);
            return;
        }
        let k = range_index(piece.weight, self.range_count);
        self.push(k, piece);
    }

    /// Closes `piece` as a bin of its own.
    pub fn close(&mut self, piece: Piece) {
        self.sink.push(piece);
    }

    fn push(&mut self, k: usize, piece: Piece) {
        self.buckets[k].push(piece);
        self.live += 1;
        if k >= self.range_count / 2 {
            self.large_live += 1;
        }
        self.counters.peak_open = self.counters.peak_open.max(self.live as u64);
    }

    fn take_at(&mut self, k: usize) -> Option<(Piece, usize)> {
        let bucket = &mut self.buckets[k];
        if bucket.is_empty() {
            return None;
        }
        let (piece, idx) = match self.rng.as_mut() {
            None => (bucket.pop()?, bucket.len()),
            Some(rng) => {
                let idx = rng.random_range(0..bucket.len());
                (bucket.swap_remove(idx), idx)
            }
        };
        self.live -= 1;
        if k >= self.range_count / 2 {
            self.large_live -= 1;
        }
        Some((piece, idx))
    }

    /// Removes one piece from bucket `k` according to the selection policy.
    pub fn take(&mut self, k: usize) -> Option<Piece> {
        self.take_at(k).map(|(p, _)| p)
    }

    /// Undoes [`Self::take_at`], leaving the bucket exactly as it was.
    fn restore(&mut self, k: usize, piece: Piece, idx: usize) {
        self.push(k, piece);
        let bucket = &mut self.buckets[k];
        let last = bucket.len() - 1;
        bucket.swap(idx, last);
    }

    fn is_empty_bucket(&mut self, k: usize) -> bool {
        self.counters.scans += 1;
        self.buckets[k].is_empty()
    }

    /// Joins two pieces whose weights are known to fit in one bin.
    fn merge(&mut self, a: Piece, b: Piece, sum: Weight) -> Piece {
        self.next[a.tail as usize] = b.head;
        self.merge_count += 1;
        Piece {
            weight: sum,
            head: a.head,
            tail: b.tail,
            len: a.len + b.len,
        }
    }

    /// Tries to join a large piece with one piece from its complementary range.
    ///
    /// A single partner is tried. If the pair overflows, the partner goes back
    /// where it was and `a` is handed back.
    pub fn f1_exact_complement(&mut self, a: Piece) -> ComplementOutcome {
        let k = range_index(a.weight, self.range_count);
        assert!(k >= self.range_count / 2, "complement matching needs a large piece");
        let comp = self.range_count - 1 - k;
        if self.is_empty_bucket(comp) {
            return ComplementOutcome::Returned(a);
        }
        let (b, idx) = self.take_at(comp).expect("bucket checked non-empty");
        match a.weight.checked_add(b.weight) {
            Some(sum) => {
                let c = self.merge(a, b, sum);
                self.route(c);
                ComplementOutcome::Merged
            }
            None => {
                self.restore(comp, b, idx);
                self.counters.complement_restores += 1;
                ComplementOutcome::Returned(a)
            }
        }
    }

    /// Joins `a` with a piece from the highest non-empty range strictly below
    /// its complement. Any such pair fits in one bin.
    pub fn f2_chain(&mut self, a: Piece) -> ChainOutcome {
        let k = range_index(a.weight, self.range_count);
        let Some(start) = (self.range_count - 1 - k).checked_sub(1) else {
            return ChainOutcome::Unmatched(a);
        };
        for j in (0..=start).rev() {
            if self.is_empty_bucket(j) {
                continue;
            }
            let (b, idx) = self.take_at(j).expect("bucket checked non-empty");
            match a.weight.checked_add(b.weight) {
                Some(sum) => {
                    let c = self.merge(a, b, sum);
                    self.route(c);
                    return ChainOutcome::Merged;
                }
                None => {
                    debug_assert!(false, "chain merge overflowed a bin");
                    self.counters.chain_overflows += 1;
                    self.restore(j, b, idx);
                }
            }
        }
        ChainOutcome::Unmatched(a)
    }

    /// Drains every large range, lowest first. Composites only grow, so a
    /// composite that lands in a large range is picked up later in the sweep.
    pub fn large_phase(&mut self) {
        if self.large_live == 0 {
            self.counters.scans += 1;
            return;
        }
        for k in self.range_count / 2..self.range_count {
            while !self.is_empty_bucket(k) {
                let a = self.take(k).expect("bucket checked non-empty");
                let ComplementOutcome::Returned(a) = self.f1_exact_complement(a) else {
                    continue;
                };
                if let ChainOutcome::Unmatched(a) = self.f2_chain(a) {
                    self.close(a);
                }
            }
        }
        debug_assert_eq!(self.large_live, 0);
    }

    /// One pairing step over the small ranges.
    ///
    /// Two pieces of the highest non-empty small range are merged. A lone
    /// piece there is merged with one from the next non-empty range below, and
    /// is closed on its own only when it is the last live piece.
    pub fn small_pair_phase_step(&mut self) -> SmallStep {
        debug_assert_eq!(self.large_live, 0, "large ranges must be drained first");
        let half = self.range_count / 2;
        let Some(k) = (0..half).rev().find(|&k| !self.is_empty_bucket(k)) else {
            return SmallStep::Idle;
        };
        let a = self.take(k).expect("bucket checked non-empty");
        let partner = if !self.buckets[k].is_empty() {
            self.take(k)
        } else {
            match (0..k).rev().find(|&j| !self.is_empty_bucket(j)) {
                Some(j) => self.take(j),
                None => None,
            }
        };
        match partner {
            Some(b) => {
                let sum = a
                    .weight
                    .checked_add(b.weight)
                    .expect("two small pieces always fit in one bin");
                let c = self.merge(a, b, sum);
                self.route(c);
                SmallStep::Merged
            }
            None => {
                self.close(a);
                SmallStep::Closed
            }
        }
    }

    /// Alternates the large phase with small pairing until nothing is left.
    pub fn run_to_completion(&mut self) {
        loop {
            self.large_phase();
            if self.small_pair_phase_step() == SmallStep::Idle {
                break;
            }
        }
    }

    /// Empties every bucket, lowest range first, keeping each bucket's order.
    fn drain_live(&mut self) -> Vec<Piece> {
        let mut out = Vec::with_capacity(self.live);
        for bucket in &mut self.buckets {
            out.append(bucket);
        }
        self.live = 0;
        self.large_live = 0;
        out
    }

    /// Packs at the current scale with `depth` scaling levels still allowed,
    /// returning the bins of this scale (closed here, then regrouped from below).
    fn run_scaled(&mut self, depth: u32) -> Vec<Piece> {
        self.large_phase();
        if depth == 0 {
            loop {
                if self.small_pair_phase_step() == SmallStep::Idle {
                    break;
                }
                self.large_phase();
            }
            return std::mem::take(&mut self.sink);
        }

        let mut bins = std::mem::take(&mut self.sink);
        for piece in self.drain_live() {
            let doubled = piece
                .weight
                .checked_double()
                .expect("only pieces of at most half a bin remain after the large phase");
            self.route(Piece {
                weight: doubled,
                ..piece
            });
        }
        let virtual_bins = self.run_scaled(depth - 1);
        // Most recently closed virtual bins are regrouped first.
        let mut rev = virtual_bins.into_iter().rev();
        while let Some(first) = rev.next() {
            let halved = |p: Piece| p.weight.numerator() / 2;
            let grouped = match rev.next() {
                Some(second) => {
                    let num = halved(first) + halved(second);
                    let w = Weight::new(num, self.denominator).expect("two half bins fit");
                    self.next[first.tail as usize] = second.head;
                    Piece {
                        weight: w,
                        head: first.head,
                        tail: second.tail,
                        len: first.len + second.len,
                    }
                }
                None => Piece {
                    weight: Weight::new(halved(first), self.denominator)
                        .expect("a half bin is a valid weight"),
                    ..first
                },
            };
            bins.push(grouped);
        }
        bins
    }

    fn into_result(self, instance: &Instance, bins: Vec<Piece>, config: &RangeConfig) -> PackingResult {
        let bins = bins
            .iter()
            .map(|p| {
                // Piece weights are exact sums, so they are the bin loads.
                Bin::new(self.members(p), p.weight.numerator())
            })
            .collect();
        PackingResult {
            algorithm_tag: "range".into(),
            capacity: instance.capacity(),
            bins,
            merge_count: self.merge_count,
            config_echo: config.to_string(),
            counters: self.counters,
        }
    }
}

/// Packs `instance` with the range-matching algorithm.
///
/// A non-zero scaling depth in `config` is honoured via [`pack_scaled`].
pub fn pack(instance: &Instance, config: &RangeConfig) -> PackingResult {
    if config.scaling_depth > 0 {
        return pack_scaled(instance, config);
    }
    let mut table = BucketTable::from_instance(instance, config);
    table.run_to_completion();
    let bins = std::mem::take(&mut table.sink);
    table.into_result(instance, bins, config)
}

/// Packs `instance`, re-packing the small remainder at doubled scale up to
/// `config.scaling_depth()` times.
pub fn pack_scaled(instance: &Instance, config: &RangeConfig) -> PackingResult {
    let mut table = BucketTable::from_instance(instance, config);
    let bins = table.run_scaled(config.scaling_depth);
    table.into_result(instance, bins, config)
}
