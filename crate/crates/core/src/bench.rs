//! Ratio benchmarking: pack every (instance, algorithm) pair, divide the bin
//! count by a reference optimum, and average per dataset.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithm::Algorithm;
use crate::batch;
use crate::model::{validate_result, Instance, PackingResult, Violation};
use crate::oracle::{lower_bound_l1, optimal_bins};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("reference bin count must be at least 1, got {0}")]
    Reference(u64),
    #[error("no algorithms selected")]
    NoAlgorithms,
    #[error("{algorithm} produced an invalid packing of {dataset}/{instance}: {violation}")]
    Invalid {
        dataset: String,
        instance: String,
        algorithm: String,
        violation: Violation,
    },
    #[error("writing {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Where the reference bin count of a record came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    /// Best known solution shipped with the dataset.
    BestKnown,
    /// Proven optimum from the exact oracle.
    Exact,
    /// Ceiling of total weight; the ratio is then an upper estimate.
    L1Bound,
}

impl fmt::Display for ReferenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReferenceKind::BestKnown => "best_known",
            ReferenceKind::Exact => "exact",
            ReferenceKind::L1Bound => "l1_bound",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub dataset: String,
    pub instance: String,
    pub instance_index: usize,
    pub algorithm: String,
    pub bins: u64,
    pub reference: u64,
    pub reference_kind: ReferenceKind,
    pub ratio: Ratio<u64>,
    pub millis: Option<f64>,
}

/// `P* / P` for one packing.
pub fn ratio(
    result: &PackingResult,
    reference: u64,
    kind: ReferenceKind,
) -> Result<RatioRecord, BenchError> {
    if reference < 1 {
        return Err(BenchError::Reference(reference));
    }
    let bins = result.bin_count() as u64;
    Ok(RatioRecord {
        dataset: String::new(),
        instance: String::new(),
        instance_index: 0,
        algorithm: result.algorithm_tag.clone(),
        bins,
        reference,
        reference_kind: kind,
        ratio: Ratio::new(bins, reference),
        millis: None,
    })
}

/// A named group of instances, e.g. one OR-Library file.
#[derive(Debug, Clone)]
pub struct Suite {
    pub name: String,
    pub source: String,
    pub instances: Vec<Instance>,
}

#[derive(Debug, Clone, Copy)]
pub struct BenchOptions {
    pub timing: bool,
    /// Instances up to this many items without a best-known count use the exact oracle.
    pub exact_limit: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            timing: true,
            exact_limit: crate::oracle::DEFAULT_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AverageRow {
    pub dataset: String,
    pub algorithm: String,
    pub instances: usize,
    pub mean_ratio: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceRow {
    pub dataset: String,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: String,
    pub sources: Vec<SourceRow>,
    pub records: Vec<RatioRecord>,
    pub averages: Vec<AverageRow>,
}

/// Reference optimum for an instance: best known, else exact when small, else `ceil(W)`.
pub fn reference_for(instance: &Instance, exact_limit: usize) -> (u64, ReferenceKind) {
    if let Some(best) = instance.best_known {
        return (best, ReferenceKind::BestKnown);
    }
    match optimal_bins(instance, exact_limit) {
        Ok(opt) => (opt, ReferenceKind::Exact),
        Err(_) => (lower_bound_l1(instance), ReferenceKind::L1Bound),
    }
}

/// Per (dataset, algorithm) mean of the record ratios, exactly.
pub fn averages(records: &[RatioRecord]) -> Vec<AverageRow> {
    let mut groups: BTreeMap<(&str, &str), (BigRational, usize)> = BTreeMap::new();
    for r in records {
        let entry = groups
            .entry((r.dataset.as_str(), r.algorithm.as_str()))
            .or_insert_with(|| (BigRational::zero(), 0));
        entry.0 += BigRational::new(BigInt::from(*r.ratio.numer()), BigInt::from(*r.ratio.denom()));
        entry.1 += 1;
    }
    groups
        .into_iter()
        .map(|((dataset, algorithm), (sum, count))| AverageRow {
            dataset: dataset.to_string(),
            algorithm: algorithm.to_string(),
            instances: count,
            mean_ratio: sum / BigRational::from_integer(BigInt::from(count)),
        })
        .collect()
}

/// Packs every instance of every suite with every algorithm.
///
/// Each result is validated before it becomes a record; the first invalid
/// pair in report order aborts the run. Records are sorted by dataset,
/// instance position and algorithm, so the report does not depend on
/// scheduling.
pub fn run_bench(
    suites: &[Suite],
    algorithms: &[Algorithm],
    config_echo: &str,
    options: BenchOptions,
) -> Result<BenchReport, BenchError> {
    if algorithms.is_empty() {
        return Err(BenchError::NoAlgorithms);
    }
    let instances: Vec<(&Suite, usize, &Instance)> = suites
        .iter()
        .flat_map(|s| s.instances.iter().enumerate().map(move |(i, inst)| (s, i, inst)))
        .collect();
    let references = batch::map(&instances, |(_, _, inst)| {
        reference_for(inst, options.exact_limit)
    });
    let tasks: Vec<(usize, &Algorithm)> = (0..instances.len())
        .flat_map(|i| algorithms.iter().map(move |a| (i, a)))
        .collect();

    let outcomes = batch::map(&tasks, |&(i, algorithm)| {
        let (suite, index, instance) = instances[i];
        let start = Instant::now();
        let result = algorithm.run(instance);
        let elapsed = start.elapsed();
        validate_result(instance, &result).map_err(|violation| BenchError::Invalid {
            dataset: suite.name.clone(),
            instance: instance.name.clone(),
            algorithm: algorithm.tag().to_string(),
            violation,
        })?;
        let (reference, kind) = references[i];
        let mut record = if instance.is_empty() {
            // 0 bins against a 0-bin optimum: reported as a perfect ratio.
            RatioRecord {
                dataset: String::new(),
                instance: String::new(),
                instance_index: 0,
                algorithm: result.algorithm_tag.clone(),
                bins: 0,
                reference,
                reference_kind: kind,
                ratio: Ratio::from_integer(1),
                millis: None,
            }
        } else {
            ratio(&result, reference, kind)?
        };
        record.dataset = suite.name.clone();
        record.instance = instance.name.clone();
        record.instance_index = index;
        record.millis = options.timing.then_some(elapsed.as_secs_f64() * 1e3);
        Ok::<_, BenchError>(record)
    });

    let mut records = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        records.push(outcome?);
    }
    records.sort_by(|a, b| {
        (&a.dataset, a.instance_index, &a.algorithm).cmp(&(&b.dataset, b.instance_index, &b.algorithm))
    });
    let averages = averages(&records);
    let sources = suites
        .iter()
        .map(|s| SourceRow {
            dataset: s.name.clone(),
            source: s.source.clone(),
        })
        .collect();
    Ok(BenchReport {
        config: config_echo.to_string(),
        sources,
        records,
        averages,
    })
}

/// Rounds a non-negative fraction to `places` decimals, half up.
fn decimal(num: &BigInt, den: &BigInt, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled: BigInt = (num * &scale * 2 + den) / (den * 2);
    let int = &scaled / &scale;
    let frac = &scaled % &scale;
    format!("{int}.{frac:0>width$}", width = places as usize)
}

pub fn format_ratio(r: &Ratio<u64>) -> String {
    decimal(&BigInt::from(*r.numer()), &BigInt::from(*r.denom()), 6)
}

pub fn format_big_ratio(r: &BigRational) -> String {
    decimal(r.numer(), r.denom(), 6)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format {other:?}, expected csv or json")),
        }
    }
}

pub const CSV_HEADER: [&str; 8] = [
    "dataset",
    "instance",
    "algorithm",
    "bins",
    "reference",
    "reference_kind",
    "ratio",
    "millis",
];

/// One CSV row per record. The `millis` cell is empty when timing was off.
pub fn render_csv(report: &BenchReport) -> Result<Vec<u8>, BenchError> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in &report.records {
        w.write_record([
            r.dataset.clone(),
            r.instance.clone(),
            r.algorithm.clone(),
            r.bins.to_string(),
            r.reference.to_string(),
            r.reference_kind.to_string(),
            format_ratio(&r.ratio),
            r.millis.map(|m| format!("{m:.3}")).unwrap_or_default(),
        ])?;
    }
    w.into_inner().map_err(|e| BenchError::Io {
        path: "<memory>".into(),
        source: e.into_error(),
    })
}

pub fn render_json(report: &BenchReport) -> Result<Vec<u8>, BenchError> {
    let mut bytes = serde_json::to_vec_pretty(report)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn read_report_json(bytes: &[u8]) -> Result<BenchReport, BenchError> {
    Ok(serde_json::from_slice(bytes)?)
}

/// Writes the report to `path` in `format`.
pub fn emit_report(report: &BenchReport, format: ReportFormat, path: &Path) -> Result<(), BenchError> {
    let bytes = match format {
        ReportFormat::Csv => render_csv(report)?,
        ReportFormat::Json => render_json(report)?,
    };
    fs::write(path, bytes).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Plain-text table of the per-dataset averages.
pub fn summary_table(report: &BenchReport) -> String {
    let mut out = String::from("dataset    algorithm  instances  mean_ratio\n");
    for row in &report.averages {
        out.push_str(&format!(
            "{:<10} {:<10} {:>9}  {}\n",
            row.dataset,
            row.algorithm,
            row.instances,
            format_big_ratio(&row.mean_ratio)
        ));
    }
    out
}
