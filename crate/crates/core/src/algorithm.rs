use std::fmt;
use std::str::FromStr;

use crate::baselines::{best_fit_decreasing, first_fit, first_fit_decreasing, next_fit};
use crate::model::{Instance, PackingResult};
use crate::range::{pack, RangeConfig};

/// Every packer the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Range(RangeConfig),
    Ffd,
    Bfd,
    Ff,
    Nf,
}

impl Algorithm {
    pub const TAGS: [&'static str; 5] = ["range", "ffd", "bfd", "ff", "nf"];

    pub fn tag(&self) -> &'static str {
        match self {
            Algorithm::Range(_) => "range",
            Algorithm::Ffd => "ffd",
            Algorithm::Bfd => "bfd",
            Algorithm::Ff => "ff",
            Algorithm::Nf => "nf",
        }
    }

    pub fn run(&self, instance: &Instance) -> PackingResult {
        match self {
            Algorithm::Range(config) => pack(instance, config),
            Algorithm::Ffd => first_fit_decreasing(instance),
            Algorithm::Bfd => best_fit_decreasing(instance),
            Algorithm::Ff => first_fit(instance),
            Algorithm::Nf => next_fit(instance),
        }
    }

    /// Replaces the configuration of a range packer; other algorithms are unchanged.
    pub fn with_range_config(self, config: RangeConfig) -> Self {
        match self {
            Algorithm::Range(_) => Algorithm::Range(config),
            other => other,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown algorithm {0:?}, expected one of range, ffd, bfd, ff, nf")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "range" => Ok(Algorithm::Range(RangeConfig::default())),
            "ffd" => Ok(Algorithm::Ffd),
            "bfd" => Ok(Algorithm::Bfd),
            "ff" => Ok(Algorithm::Ff),
            "nf" => Ok(Algorithm::Nf),
            _ => Err(UnknownAlgorithm(s.to_string())),
        }
    }
}
