//! Command-line front end: sorting traces, exact distances, censuses,
//! seeded statistics, the verification suite, and table export.
//!
//! Exit codes: 0 success, 1 internal or check failure, 2 input error,
//! 3 resource cap exceeded.

use std::env;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use blockmoves::error::Error;
use blockmoves::exact::{census_from_table, CheckStatus, DistanceTable};
use blockmoves::perm::{bad_pair_count, parse_permutation, MoveKind, Permutation, SortTrace};
use blockmoves::sorter::{sort_constructive, sort_greedy};
use blockmoves::stats::{
    good_pair_distribution_with_threads, move_count_distribution_with_threads, DistributionReport,
    ExperimentConfig, MoveAlgorithm,
};
use blockmoves::verify::run_suite;

#[derive(Parser)]
#[command(
    name = "blockmoves",
    version,
    about = "Sort permutations with block moves: traces, exact distances, censuses, experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Constructive,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Move,
    Transposition,
}

impl From<KindArg> for MoveKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Move => MoveKind::BlockMove,
            KindArg::Transposition => MoveKind::BlockTransposition,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StatsMode {
    GoodPairs,
    Moves,
}

#[derive(Clone, Copy, ValueEnum)]
enum StatsAlgorithmArg {
    Constructive,
    Greedy,
    Exact,
}

impl From<StatsAlgorithmArg> for MoveAlgorithm {
    fn from(a: StatsAlgorithmArg) -> Self {
        match a {
            StatsAlgorithmArg::Constructive => MoveAlgorithm::Constructive,
            StatsAlgorithmArg::Greedy => MoveAlgorithm::Greedy,
            StatsAlgorithmArg::Exact => MoveAlgorithm::Exact,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Bin,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Sort a permutation and print the move-by-move trace
    Sort {
        /// Permutation in one-line notation, e.g. "5 1 3 4 2"
        perm: Option<String>,
        /// Read permutations from a file, one per line
        #[arg(long, conflicts_with = "perm")]
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Constructive)]
        algorithm: AlgorithmArg,
        /// Emit the trace as JSON instead of text
        #[arg(long)]
        json: bool,
    },
    /// Exact sorting distance via an exhaustive table (small n)
    Distance {
        perm: Option<String>,
        #[arg(long, conflicts_with = "perm")]
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = KindArg::Move)]
        kind: KindArg,
        #[arg(long)]
        json: bool,
    },
    /// Distance histogram and hardest permutations over all of S_n
    Census {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = KindArg::Move)]
        kind: KindArg,
        /// How many maximal-distance witnesses to report
        #[arg(long, default_value_t = 10)]
        witnesses: usize,
        /// Write the distance histogram as CSV to this path
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Seeded distribution experiments (good pairs, move counts)
    Stats {
        #[arg(value_enum)]
        mode: StatsMode,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Move-count source for `moves` mode
        #[arg(long, value_enum, default_value_t = StatsAlgorithmArg::Constructive)]
        algorithm: StatsAlgorithmArg,
        /// Write the histogram as CSV to this path
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Run the exhaustive verification suite up to a given length
    Verify {
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u8).range(2..=10))]
        max_n: u8,
        #[arg(long)]
        json: bool,
    },
    /// Export a distance table as binary or CSV
    Table {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = KindArg::Move)]
        kind: KindArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = TableFormat::Bin)]
        format: TableFormat,
    },
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::BadToken(_)
        | Error::MissingInput(_)
        | Error::DuplicateValue(_)
        | Error::ValueOutOfRange { .. }
        | Error::InvalidMove(_) => ExitCode::from(2),
        Error::ResourceLimit { .. } => ExitCode::from(3),
        _ => ExitCode::from(1),
    }
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

/// Cache directory for distance tables, overridable by environment.
fn cache_dir() -> PathBuf {
    if let Ok(dir) = env::var("BLOCKMOVES_CACHE_DIR") {
        return PathBuf::from(dir);
    }
    if let Ok(dir) = env::var("XDG_CACHE_HOME") {
        return Path::new(&dir).join("blockmoves");
    }
    if let Ok(home) = env::var("HOME") {
        return Path::new(&home).join(".cache").join("blockmoves");
    }
    PathBuf::from(".blockmoves-cache")
}

fn threads() -> usize {
    if let Ok(t) = env::var("BLOCKMOVES_THREADS") {
        if let Ok(t) = t.parse::<usize>() {
            return t.max(1);
        }
    }
    std::thread::available_parallelism().map_or(1, |p| p.get())
}

fn inputs(perm: Option<String>, file: Option<PathBuf>) -> Result<Vec<Permutation>, Error> {
    let mut texts = Vec::new();
    match (perm, file) {
        (Some(p), None) => texts.push(p),
        (None, Some(f)) => {
            for line in fs::read_to_string(f)?.lines() {
                if !line.trim().is_empty() {
                    texts.push(line.to_string());
                }
            }
        }
        _ => return Err(Error::MissingInput("expected a permutation argument or --file")),
    }
    texts.iter().map(|t| parse_permutation(t)).collect()
}

fn dispatch(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Sort {
            perm,
            file,
            algorithm,
            json,
        } => {
            for p in inputs(perm, file)? {
                let trace = match algorithm {
                    AlgorithmArg::Constructive => sort_constructive(&p),
                    AlgorithmArg::Greedy => sort_greedy(&p),
                };
                if json {
                    println!(
                        "{}",
                        serde_json::to_string(&trace).expect("trace serializes")
                    );
                } else {
                    print_trace(&trace);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Distance {
            perm,
            file,
            kind,
            json,
        } => {
            let kind: MoveKind = kind.into();
            let perms = inputs(perm, file)?;
            let mut table: Option<DistanceTable> = None;
            for p in perms {
                if table.as_ref().map(DistanceTable::n) != Some(p.len()) {
                    table = Some(DistanceTable::load_or_build(
                        p.len(),
                        kind,
                        &cache_dir(),
                        threads(),
                    )?);
                }
                let d = table.as_ref().unwrap().distance(&p);
                if json {
                    println!(
                        "{}",
                        serde_json::json!({ "permutation": p, "kind": kind, "distance": d })
                    );
                } else {
                    println!("{d}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Census {
            n,
            kind,
            witnesses,
            out,
            json,
        } => {
            let kind: MoveKind = kind.into();
            let table = DistanceTable::load_or_build(n, kind, &cache_dir(), threads())?;
            let report = census_from_table(&table, witnesses);
            if let Some(path) = out {
                let mut w = std::io::BufWriter::new(fs::File::create(&path)?);
                writeln!(w, "distance,count")?;
                for (d, c) in report.histogram.iter().enumerate() {
                    writeln!(w, "{d},{c}")?;
                }
                w.flush()?;
            }
            if json {
                println!(
                    "{}",
                    serde_json::to_string(&report).expect("census serializes")
                );
            } else {
                println!("n = {}, kind = {}", report.n, report.kind);
                println!("distance histogram:");
                for (d, c) in report.histogram.iter().enumerate() {
                    println!("  {d}: {c}");
                }
                println!(
                    "max distance {}: {} permutation(s)",
                    report.max_distance, report.count_at_max
                );
                if !report.witnesses.is_empty() {
                    println!("hardest (first {} by rank):", report.witnesses.len());
                    for w in &report.witnesses {
                        println!("  {w}");
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats {
            mode,
            n,
            samples,
            seed,
            algorithm,
            out,
            json,
        } => {
            let cfg = ExperimentConfig {
                n,
                samples,
                seed,
                algorithm: algorithm.into(),
            };
            if cfg.samples == 0 {
                return Err(Error::MissingInput("--samples must be at least 1"));
            }
            let report = match mode {
                StatsMode::GoodPairs => good_pair_distribution_with_threads(&cfg, threads()),
                StatsMode::Moves => move_count_distribution_with_threads(&cfg, threads())?,
            };
            if let Some(path) = out {
                let mut w = std::io::BufWriter::new(fs::File::create(&path)?);
                report.write_csv(&mut w)?;
                w.flush()?;
            }
            if json {
                println!(
                    "{}",
                    serde_json::to_string(&report).expect("report serializes")
                );
            } else {
                print_distribution(mode, &report);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { max_n, json } => {
            let report = run_suite(max_n as usize)?;
            let failed = report.checks.iter().filter(|c| !c.ok()).count();
            if json {
                println!(
                    "{}",
                    serde_json::to_string(&report).expect("report serializes")
                );
            } else {
                for check in &report.checks {
                    let tag = match check.status {
                        CheckStatus::Passed => "PASS",
                        CheckStatus::Failed => "FAIL",
                        CheckStatus::Skipped => "SKIP",
                    };
                    println!("{tag} {} — {}", check.name, check.detail);
                }
                if failed == 0 {
                    println!(
                        "all {} checks passed (max n = {})",
                        report.checks.len(),
                        report.max_n
                    );
                } else {
                    println!("{failed} check(s) FAILED (max n = {})", report.max_n);
                }
            }
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Table {
            n,
            kind,
            out,
            format,
        } => {
            let kind: MoveKind = kind.into();
            let table = DistanceTable::load_or_build(n, kind, &cache_dir(), threads())?;
            match format {
                TableFormat::Bin => table.save(&out)?,
                TableFormat::Csv => {
                    let mut w = std::io::BufWriter::new(fs::File::create(&out)?);
                    table.write_csv(&mut w)?;
                    w.flush()?;
                }
            }
            println!(
                "wrote {} table for n = {n} ({} entries) to {}",
                kind,
                table.len(),
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn print_trace(trace: &SortTrace) {
    let mut b = bad_pair_count(&trace.input);
    println!("input: {}   (b = {b})", trace.input);
    for (k, m) in trace.moves.iter().enumerate() {
        let after = &trace.intermediates[k];
        let b_after = trace.bad_pair_counts[k];
        println!("move {}: {m}  ->  {after}   (b {b} -> {b_after})", k + 1);
        b = b_after;
    }
    println!(
        "sorted in {} move(s) with the {} sorter",
        trace.move_count(),
        trace.algorithm
    );
}

fn print_distribution(mode: StatsMode, report: &DistributionReport) {
    let what = match mode {
        StatsMode::GoodPairs => "good pairs per permutation",
        StatsMode::Moves => "moves per permutation",
    };
    print!(
        "{what}: n = {}, {} {}, seed = {}",
        report.n,
        report.samples,
        if report.exhaustive {
            "permutations (exhaustive)"
        } else {
            "samples"
        },
        report.seed
    );
    match (mode, report.algorithm) {
        (StatsMode::Moves, Some(a)) => println!(", algorithm = {a}"),
        _ => println!(),
    }
    for (v, c) in report.histogram.iter().enumerate() {
        println!("  {v}: {c}");
    }
    println!("mean = {:.6}", report.mean);
    println!("variance = {:.6}", report.variance);
    if let Some(rate) = report.mean_over_n {
        println!("mean / n = {rate:.6}");
    }
    println!(
        "tv distance to Poisson(1) = {:.6}",
        report.tv_distance_to_poisson1
    );
}
