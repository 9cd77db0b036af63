use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rangepack::bench::{emit_report, format_ratio, run_bench, summary_table, BenchOptions, ReportFormat, Suite};
use rangepack::oracle::{lower_bound_l1, optimal_bins, DEFAULT_LIMIT};
use rangepack::orlib::{
    fetch_dataset, generate_all_small, generate_uniform, load_cached, parse_orlib, to_orlib_string, DATASETS,
};
use rangepack::{fill_stats, validate_result, Algorithm, Instance, RangeConfig, SelectionPolicy};

/// Exit status when a packing fails validation.
const INVALID_PACKING: u8 = 2;

#[derive(Parser)]
#[command(name = "rangepack", version, about = "One-dimensional bin packing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pack one instance (or every problem of an OR-Library file) and print the bins.
    Pack(PackArgs),
    /// Run algorithms over datasets or generated suites and report ratios.
    Bench(BenchArgs),
    /// Write a seeded random instance in OR-Library format.
    Gen(GenArgs),
    /// Exact optimum and lower bound of small instances.
    Exact(ExactArgs),
    /// Download bp1..bp8 into the cache.
    Fetch(FetchArgs),
}

#[derive(Args)]
struct InputArgs {
    /// OR-Library file.
    #[arg(long, conflicts_with = "weights", required_unless_present = "weights")]
    file: Option<PathBuf>,
    /// Comma-separated decimal weights in (0, 1], e.g. 0.4,0.3,0.3.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<String>>,
}

impl InputArgs {
    fn load(&self) -> Result<Vec<Instance>> {
        match (&self.file, &self.weights) {
            (Some(path), _) => Ok(read_orlib(path)?.instances),
            (None, Some(weights)) => Ok(vec![Instance::from_decimals("inline", weights)?]),
            (None, None) => bail!("either --file or --weights is required"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Lifo,
    Random,
}

#[derive(Args)]
struct RangeArgs {
    /// Number of ranges, 10 times a power of two.
    #[arg(long, default_value_t = 10)]
    ranges: usize,
    #[arg(long, value_enum, default_value = "lifo")]
    policy: PolicyArg,
    /// Seed for the random selection policy.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    scaling_depth: u32,
}

impl RangeArgs {
    fn config(&self) -> Result<RangeConfig> {
        let policy = match self.policy {
            PolicyArg::Lifo => SelectionPolicy::Lifo,
            PolicyArg::Random => SelectionPolicy::SeededRandom(self.seed),
        };
        Ok(RangeConfig::new(self.ranges, policy, self.scaling_depth)?)
    }
}

#[derive(Args)]
struct PackArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    range: RangeArgs,
    #[arg(long, default_value = "range")]
    algorithm: Algorithm,
}

#[derive(Args)]
struct BenchArgs {
    /// OR-Library datasets, bp1..bp8.
    #[arg(long, value_delimiter = ',')]
    datasets: Vec<String>,
    /// Local OR-Library files, each a dataset named after its file stem.
    #[arg(long)]
    file: Vec<PathBuf>,
    /// Also bench a generated suite of instances with this many items.
    #[arg(long)]
    gen_n: Option<usize>,
    #[arg(long, default_value_t = 20, requires = "gen_n")]
    gen_count: u64,
    #[arg(long, default_value_t = 0, requires = "gen_n")]
    gen_seed: u64,
    #[arg(long, default_value_t = 0.000_001, requires = "gen_n")]
    gen_lo: f64,
    #[arg(long, default_value_t = 1.0, requires = "gen_n")]
    gen_hi: f64,
    /// Draw generated weights from (0, 1/2] instead.
    #[arg(long, requires = "gen_n")]
    all_small: bool,
    #[arg(long, value_delimiter = ',', default_value = "range,ffd")]
    algorithms: Vec<Algorithm>,
    #[command(flatten)]
    range: RangeArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
    #[arg(long, env = "RANGEPACK_CACHE_DIR", default_value = ".orlib-cache")]
    cache_dir: PathBuf,
    /// Load datasets from the cache only, never from the network.
    #[arg(long)]
    offline: bool,
    /// Leave the millis column empty so reports are byte-stable.
    #[arg(long)]
    no_timing: bool,
    /// Exact oracle reference for instances without a best-known count up to this size.
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    exact_limit: usize,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.000_001)]
    lo: f64,
    #[arg(long, default_value_t = 1.0)]
    hi: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Weights in (0, 1/2]; ignores --lo and --hi.
    #[arg(long)]
    all_small: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Largest instance the exact search accepts.
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
}

#[derive(Args)]
struct FetchArgs {
    #[arg(long, value_delimiter = ',')]
    datasets: Vec<String>,
    #[arg(long, env = "RANGEPACK_CACHE_DIR", default_value = ".orlib-cache")]
    cache_dir: PathBuf,
}

fn read_orlib(path: &Path) -> Result<rangepack::orlib::DatasetFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut file = parse_orlib(&text).with_context(|| format!("parsing {}", path.display()))?;
    file.source = path.display().to_string();
    Ok(file)
}

fn cmd_pack(args: PackArgs) -> Result<ExitCode> {
    let algorithm = args.algorithm.with_range_config(args.range.config()?);
    let mut out = std::io::stdout().lock();
    let mut status = ExitCode::SUCCESS;
    for instance in args.input.load()? {
        let result = algorithm.run(&instance);
        let cap = instance.capacity();
        let echo = if result.config_echo.is_empty() { String::new() } else { format!(" [{}]", result.config_echo) };
        writeln!(out, "{}: {} items, {} bins, {algorithm}{echo}", instance.name, instance.len(), result.bin_count())?;
        for (i, bin) in result.bins.iter().enumerate() {
            let sizes: Vec<String> = bin.members.iter().map(|&id| instance.size(id).to_string()).collect();
            writeln!(out, "  bin {i}: load {}/{cap} [{}]", bin.load, sizes.join(", "))?;
        }
        let stats = fill_stats(&result);
        writeln!(
            out,
            "  fill: min {} mean {} at_least_2/3 {}",
            format_ratio(&stats.min_fill),
            format_ratio(&stats.mean_fill),
            format_ratio(&stats.at_least_two_thirds)
        )?;
        if let Err(violation) = validate_result(&instance, &result) {
            eprintln!("error: invalid packing for {}: {violation}", instance.name);
            status = ExitCode::from(INVALID_PACKING);
        }
    }
    Ok(status)
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let config = args.range.config()?;
    let algorithms: Vec<Algorithm> = args.algorithms.iter().map(|a| a.with_range_config(config)).collect();
    let mut suites = Vec::new();
    for name in &args.datasets {
        let file = if args.offline {
            load_cached(name, &args.cache_dir)?
                .with_context(|| format!("{name} is not cached in {}", args.cache_dir.display()))?
        } else {
            fetch_dataset(name, &args.cache_dir)?
        };
        suites.push(Suite { name: name.clone(), source: file.source, instances: file.instances });
    }
    for path in &args.file {
        let file = read_orlib(path)?;
        let name = path.file_stem().map_or_else(|| file.source.clone(), |s| s.to_string_lossy().into_owned());
        suites.push(Suite { name, source: file.source, instances: file.instances });
    }
    if let Some(n) = args.gen_n {
        let instances = (0..args.gen_count)
            .map(|i| {
                let seed = args.gen_seed.wrapping_add(i);
                if args.all_small {
                    Ok(generate_all_small(n, seed))
                } else {
                    generate_uniform(n, args.gen_lo, args.gen_hi, seed)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let kind = if args.all_small { "small" } else { "uniform" };
        suites.push(Suite {
            name: format!("gen_{kind}_n{n}"),
            source: format!("generated seed={} count={}", args.gen_seed, args.gen_count),
            instances,
        });
    }
    if suites.is_empty() {
        bail!("nothing to bench: give --datasets, --file or --gen-n");
    }
    let options = BenchOptions { timing: !args.no_timing, exact_limit: args.exact_limit };
    let report = match run_bench(&suites, &algorithms, &config.to_string(), options) {
        Ok(report) => report,
        Err(e @ rangepack::bench::BenchError::Invalid { .. }) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(INVALID_PACKING));
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(path) = &args.out {
        emit_report(&report, args.format, path)?;
    }
    print!("{}", summary_table(&report));
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode> {
    let instance = if args.all_small {
        generate_all_small(args.n, args.seed)
    } else {
        generate_uniform(args.n, args.lo, args.hi, args.seed)?
    };
    let text = to_orlib_string(&[instance]);
    match &args.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_exact(args: ExactArgs) -> Result<ExitCode> {
    for instance in args.input.load()? {
        let opt = optimal_bins(&instance, args.limit).with_context(|| instance.name.clone())?;
        println!("{}: optimal {opt}, lower bound {}", instance.name, lower_bound_l1(&instance));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_fetch(args: FetchArgs) -> Result<ExitCode> {
    let names: Vec<String> = if args.datasets.is_empty() {
        DATASETS.iter().map(|s| s.to_string()).collect()
    } else {
        args.datasets
    };
    for name in names {
        let file = fetch_dataset(&name, &args.cache_dir)?;
        println!("{name}: {} problems cached in {}", file.problem_count, args.cache_dir.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let outcome = match Cli::parse().command {
        Command::Pack(args) => cmd_pack(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Exact(args) => cmd_exact(args),
        Command::Fetch(args) => cmd_fetch(args),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::FAILURE
    })
}
