//! Command-line tool for sketching sparse vectors and table columns,
//! estimating inner products and join statistics from sketch files, and
//! running the synthetic benchmark.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ipsketch::bench::{run_experiment, write_csv, SyntheticConfig};
use ipsketch::formats;
use ipsketch::ingest::{read_keyed_csv, CsvOptions};
use ipsketch_core::tables::{estimate_join_stats, sketch_vector, AnySketch, SketchSpec};
use ipsketch_core::weighted_minhash::{Strategy, DEFAULT_DISCRETIZATION};
use ipsketch_core::{Method, SparseVector};

#[derive(Parser)]
#[command(
    name = "ipsketch",
    about = "Inner product sketches for sparse vectors and table columns",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sketch a vector or table-column file into a sketch file.
    Sketch(SketchArgs),
    /// Print the inner product estimate for two sketch files.
    Estimate(EstimateArgs),
    /// Estimate join size, post-join SUM, and post-join MEAN from three
    /// sketch files (A's values, A's keys, B's keys).
    JoinStats(JoinStatsArgs),
    /// Run the synthetic benchmark grid and emit per-trial CSV rows.
    SynthBench(SynthBenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Mh,
    Wmh,
    Kmv,
    Jl,
    Cs,
}

impl From<MethodArg> for Method {
    fn from(arg: MethodArg) -> Method {
        match arg {
            MethodArg::Mh => Method::MinHash,
            MethodArg::Wmh => Method::WeightedMinHash,
            MethodArg::Kmv => Method::Kmv,
            MethodArg::Jl => Method::Jl,
            MethodArg::Cs => Method::CountSketch,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Exact,
    Fast,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    /// Vector text: header `n=<dimension>`, then `index value` lines.
    Vec,
    /// CSV column file: `key` or `key,value` rows.
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ColumnRole {
    /// Encode the binary key-indicator vector.
    Key,
    /// Encode the value vector (requires a value column).
    Value,
}

#[derive(Args)]
struct SketchArgs {
    /// Input file.
    #[arg(long)]
    input: PathBuf,
    /// Input format.
    #[arg(long, value_enum, default_value = "vec")]
    format: InputFormat,
    /// Which encoding to sketch for CSV inputs.
    #[arg(long, value_enum)]
    column: Option<ColumnRole>,
    /// Sketching method.
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Samples, rows, buckets, or KMV budget depending on the method.
    #[arg(long)]
    samples: usize,
    /// Master seed; sketches must share it to be comparable.
    #[arg(long)]
    seed: u64,
    /// Weighted MinHash discretization parameter.
    #[arg(long, default_value_t = DEFAULT_DISCRETIZATION)]
    discretization: u64,
    /// Weighted MinHash slot-minimum strategy.
    #[arg(long, value_enum, default_value = "fast")]
    strategy: StrategyArg,
    /// CountSketch repetition count.
    #[arg(long, default_value_t = ipsketch_core::baselines::DEFAULT_CS_REPS)]
    reps: usize,
    /// Key domain size for CSV inputs.
    #[arg(long, default_value_t = 1 << 32)]
    dimension: u64,
    /// CSV input has a header row.
    #[arg(long)]
    header: bool,
    /// Hash CSV keys as strings into the domain instead of parsing
    /// integers.
    #[arg(long)]
    hash_keys: bool,
    /// Output sketch file.
    #[arg(long)]
    out: PathBuf,
    /// Write the JSON mirror instead of the binary format.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EstimateArgs {
    /// First sketch file.
    left: PathBuf,
    /// Second sketch file.
    right: PathBuf,
}

#[derive(Args)]
struct JoinStatsArgs {
    /// Sketch of table A's value vector.
    value_a: PathBuf,
    /// Sketch of table A's key indicator.
    key_a: PathBuf,
    /// Sketch of table B's key indicator.
    key_b: PathBuf,
}

#[derive(Args)]
struct SynthBenchArgs {
    /// Vector dimension.
    #[arg(long, default_value_t = 10_000)]
    n: u64,
    /// Nonzero entries per vector.
    #[arg(long, default_value_t = 2_000)]
    nnz: usize,
    /// Support overlap fraction in [0, 1].
    #[arg(long)]
    overlap: f64,
    /// Outlier promotion probability.
    #[arg(long, default_value_t = 0.10)]
    outlier_frac: f64,
    /// Comma-separated storage budgets in 64-bit words.
    #[arg(long, value_delimiter = ',', default_value = "400")]
    budgets: Vec<f64>,
    /// Comma-separated methods.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "wmh,mh,kmv,jl,cs")]
    methods: Vec<MethodArg>,
    /// Trials per cell.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            // IO failures exit 1; everything else is an input problem.
            if err.root_cause().downcast_ref::<std::io::Error>().is_some() {
                ExitCode::FAILURE
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sketch(args) => sketch_command(args),
        Command::Estimate(args) => {
            let left = load_sketch(&args.left)?;
            let right = load_sketch(&args.right)?;
            let estimate = left.estimate(&right)?;
            println!("{estimate}");
            Ok(())
        }
        Command::JoinStats(args) => {
            let value_a = load_sketch(&args.value_a)?;
            let key_a = load_sketch(&args.key_a)?;
            let key_b = load_sketch(&args.key_b)?;
            let stats = estimate_join_stats(&value_a, &key_a, &key_b)?;
            println!("join_size {}", stats.join_size);
            println!("sum {}", stats.sum);
            match stats.mean {
                Some(mean) => println!("mean {mean}"),
                None => println!("mean undefined"),
            }
            Ok(())
        }
        Command::SynthBench(args) => synth_bench_command(args),
    }
}

fn sketch_command(args: SketchArgs) -> Result<()> {
    let vector = load_vector(&args)?;
    let spec = SketchSpec {
        method: args.method.into(),
        samples: args.samples,
        seed: args.seed,
        discretization: args.discretization,
        strategy: match args.strategy {
            StrategyArg::Exact => Strategy::Exact,
            StrategyArg::Fast => Strategy::Fast,
        },
        reps: args.reps,
    };
    let sketch = sketch_vector(&vector, &spec)?;
    let file = File::create(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let mut writer = BufWriter::new(file);
    if args.json {
        serde_json::to_writer(&mut writer, &formats::to_json(&sketch))?;
        writeln!(writer)?;
    } else {
        formats::write_binary(&mut writer, &sketch)?;
    }
    writer.flush()?;
    Ok(())
}

fn load_vector(args: &SketchArgs) -> Result<SparseVector> {
    let mut text = String::new();
    File::open(&args.input)
        .with_context(|| format!("opening {}", args.input.display()))?
        .read_to_string(&mut text)?;
    match args.format {
        InputFormat::Vec => formats::read_vector_text(&text),
        InputFormat::Csv => {
            let column = read_keyed_csv(
                text.as_bytes(),
                CsvOptions {
                    has_header: args.header,
                    hash_keys: args.hash_keys,
                    dimension: args.dimension,
                },
            )?;
            match args.column {
                Some(ColumnRole::Key) => Ok(column.key_indicator()),
                Some(ColumnRole::Value) => Ok(column.value_vector()?),
                None => bail!("--column key|value is required for CSV inputs"),
            }
        }
    }
}

fn load_sketch(path: &Path) -> Result<AnySketch> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut reader = BufReader::new(file);
    let mut head = vec![0u8; formats::MAGIC.len()];
    reader.read_exact(&mut head).context("reading sketch header")?;
    let mut rest = Vec::new();
    reader.read_to_end(&mut rest)?;
    if head == formats::MAGIC {
        let mut all = head;
        all.extend_from_slice(&rest);
        formats::read_binary(&mut all.as_slice())
            .with_context(|| format!("parsing {}", path.display()))
    } else {
        let mut all = head;
        all.extend_from_slice(&rest);
        let json: formats::SketchJson = serde_json::from_slice(&all)
            .with_context(|| format!("parsing {} as JSON sketch", path.display()))?;
        formats::from_json(&json)
    }
}

fn synth_bench_command(args: SynthBenchArgs) -> Result<()> {
    let mut config = SyntheticConfig::new(args.overlap, args.seed);
    config.dimension = args.n;
    config.nnz = args.nnz;
    config.outlier_fraction = args.outlier_frac;
    config.trials = args.trials;
    let methods: Vec<Method> = args.methods.iter().map(|&m| m.into()).collect();
    let reports = run_experiment(&config, &methods, &args.budgets)?;
    match args.out {
        Some(path) => {
            let file =
                File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            let mut writer = BufWriter::new(file);
            write_csv(&mut writer, &reports)?;
            writer.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_csv(&mut lock, &reports)?;
        }
    }
    Ok(())
}
