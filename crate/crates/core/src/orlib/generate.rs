//! Seeded random instances over a fixed denominator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::Instance;

/// Denominator of every generated weight.
pub const GENERATED_DENOMINATOR: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("bounds must satisfy 0 < lo < hi <= 1, got lo={lo} hi={hi}")]
    Bounds { lo: f64, hi: f64 },
}

fn draw(name: String, n: usize, lo_num: u64, hi_num: u64, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes: Vec<u64> = (0..n).map(|_| rng.random_range(lo_num + 1..=hi_num)).collect();
    Instance::from_sizes(name, GENERATED_DENOMINATOR, &sizes)
        .expect("generated sizes lie in (0, capacity]")
}

/// `n` weights drawn uniformly from `(lo, hi]` on a grid of one millionth.
pub fn generate_uniform(n: usize, lo: f64, hi: f64, seed: u64) -> Result<Instance, GenerateError> {
    let scale = GENERATED_DENOMINATOR as f64;
    let ok = lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi && hi <= 1.0;
    let lo_num = (lo * scale).round() as u64;
    let hi_num = (hi * scale).round() as u64;
    if !ok || lo_num >= hi_num {
        return Err(GenerateError::Bounds { lo, hi });
    }
    Ok(draw(format!("uniform_n{n}_s{seed}"), n, lo_num, hi_num, seed))
}

/// `n` weights drawn uniformly from `(0, 1/2]`.
pub fn generate_all_small(n: usize, seed: u64) -> Instance {
    draw(
        format!("small_n{n}_s{seed}"),
        n,
        0,
        GENERATED_DENOMINATOR / 2,
        seed,
    )
}
