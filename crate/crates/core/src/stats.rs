//! Seeded randomized experiments: the good-pair distribution against
//! Poisson(1), move-count distributions for the sorters and the exact
//! oracle, and per-permutation bound-gap tables.
//!
//! Every report embeds the full configuration. Sampling splits the sample
//! range across threads with one ChaCha8 substream per sample index, so a
//! report is identical for every thread count.

use std::io::Write;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::error::Result;
use crate::exact::{factorial, unrank, DistanceTable, FACTORIALS};
use crate::perm::{classify_pairs, combined_lower_bound, MoveKind, Permutation};
use crate::sorter::{sort_constructive, sort_greedy};

/// Which move count an experiment measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveAlgorithm {
    Constructive,
    Greedy,
    Exact,
}

impl std::fmt::Display for MoveAlgorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MoveAlgorithm::Constructive => write!(f, "constructive"),
            MoveAlgorithm::Greedy => write!(f, "greedy"),
            MoveAlgorithm::Exact => write!(f, "exact"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExperimentConfig {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    /// Used by [`move_count_distribution`]; ignored for good pairs.
    pub algorithm: MoveAlgorithm,
}

/// Histogram of a permutation statistic with its moments and the total
/// variation distance to Poisson(1) (tail mass folded into the last
/// observed bucket).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionReport {
    /// What was measured: `good_pairs` or `move_count`.
    pub statistic: &'static str,
    pub n: usize,
    /// Effective evaluations: n! in exhaustive mode, else the requested
    /// sample count. Histogram counts sum to this.
    pub samples: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<MoveAlgorithm>,
    pub exhaustive: bool,
    pub version: String,
    /// Count per statistic value, index = value.
    pub histogram: Vec<u64>,
    pub mean: f64,
    pub variance: f64,
    /// `mean / n`, the per-length move rate; only for move counts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_over_n: Option<f64>,
    pub tv_distance_to_poisson1: f64,
}

impl DistributionReport {
    /// `value,count` rows.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "value,count")?;
        for (value, count) in self.histogram.iter().enumerate() {
            writeln!(w, "{value},{count}")?;
        }
        Ok(())
    }
}

/// Unbiased index in `0..bound` by rejection sampling.
fn gen_index(rng: &mut impl RngCore, bound: usize) -> usize {
    debug_assert!(bound > 0);
    let bound = bound as u64;
    let zone = u64::MAX - u64::MAX % bound;
    loop {
        let x = rng.next_u64();
        if x < zone {
            return (x % bound) as usize;
        }
    }
}

/// Uniform permutation by Fisher-Yates shuffle; deterministic in the rng
/// state.
pub fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Permutation {
    let mut a: Vec<u32> = (1..=n as u32).collect();
    for i in (1..n).rev() {
        let j = gen_index(rng, i + 1);
        a.swap(i, j);
    }
    Permutation::new(a).expect("shuffle preserves the value set")
}

/// One independent rng per sample index: same key, stream = index.
fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn exhaustive_fits(n: usize, samples: u64) -> bool {
    n < FACTORIALS.len() && factorial(n) <= samples
}

/// Histogram of `measure` over the sample set: all of S_n when
/// `n! <= samples`, else `samples` seeded draws. Worker partials merge by
/// elementwise addition, so the result is thread-count independent.
fn collect<F>(cfg: &ExperimentConfig, threads: usize, measure: F) -> (Vec<u64>, u64, bool)
where
    F: Fn(&Permutation) -> usize + Sync,
{
    assert!(cfg.samples >= 1, "need at least one sample");
    let exhaustive = exhaustive_fits(cfg.n, cfg.samples);
    let total = if exhaustive {
        factorial(cfg.n)
    } else {
        cfg.samples
    };

    let threads = threads.max(1).min(total as usize);
    let chunk = total.div_ceil(threads as u64);
    let worker = |lo: u64, hi: u64| -> Vec<u64> {
        let mut hist = Vec::new();
        for i in lo..hi {
            let p = if exhaustive {
                unrank(i, cfg.n)
            } else {
                random_permutation(cfg.n, &mut sample_rng(cfg.seed, i))
            };
            let v = measure(&p);
            if v >= hist.len() {
                hist.resize(v + 1, 0);
            }
            hist[v] += 1;
        }
        hist
    };

    let mut histogram = if threads == 1 {
        worker(0, total)
    } else {
        let parts: Vec<Vec<u64>> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..threads as u64)
                .map(|t| {
                    let lo = t * chunk;
                    let hi = ((t + 1) * chunk).min(total);
                    let worker = &worker;
                    s.spawn(move || worker(lo, hi))
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let mut merged: Vec<u64> = Vec::new();
        for part in parts {
            if part.len() > merged.len() {
                merged.resize(part.len(), 0);
            }
            for (m, p) in merged.iter_mut().zip(part) {
                *m += p;
            }
        }
        merged
    };
    if histogram.is_empty() {
        histogram.push(0);
    }
    (histogram, total, exhaustive)
}

fn moments(histogram: &[u64], total: u64) -> (f64, f64) {
    let total = total as f64;
    let mean = histogram
        .iter()
        .enumerate()
        .map(|(v, &c)| v as f64 * c as f64)
        .sum::<f64>()
        / total;
    let variance = histogram
        .iter()
        .enumerate()
        .map(|(v, &c)| (v as f64 - mean).powi(2) * c as f64)
        .sum::<f64>()
        / total;
    (mean, variance)
}

/// Total variation distance to Poisson(1), with the Poisson tail mass
/// beyond the last observed bucket folded into that bucket.
fn tv_to_poisson1(histogram: &[u64], total: u64) -> f64 {
    let k_max = histogram.len() - 1;
    let mut pmf = (-1.0f64).exp();
    let mut tail = 1.0f64;
    let mut acc = 0.0;
    for (k, &count) in histogram.iter().enumerate() {
        let q = if k == k_max { tail } else { pmf };
        let p = count as f64 / total as f64;
        acc += (p - q).abs();
        tail -= pmf;
        pmf /= (k + 1) as f64;
    }
    acc / 2.0
}

fn finish(
    cfg: &ExperimentConfig,
    statistic: &'static str,
    algorithm: Option<MoveAlgorithm>,
    histogram: Vec<u64>,
    total: u64,
    exhaustive: bool,
) -> DistributionReport {
    let (mean, variance) = moments(&histogram, total);
    let tv = tv_to_poisson1(&histogram, total);
    DistributionReport {
        statistic,
        n: cfg.n,
        samples: total,
        seed: cfg.seed,
        algorithm,
        exhaustive,
        version: env!("CARGO_PKG_VERSION").to_string(),
        histogram,
        mean,
        variance,
        mean_over_n: algorithm.map(|_| mean / cfg.n as f64),
        tv_distance_to_poisson1: tv,
    }
}

pub fn good_pair_distribution(cfg: &ExperimentConfig) -> DistributionReport {
    good_pair_distribution_with_threads(cfg, default_threads())
}

pub fn good_pair_distribution_with_threads(
    cfg: &ExperimentConfig,
    threads: usize,
) -> DistributionReport {
    let (histogram, total, exhaustive) = collect(cfg, threads, |p| classify_pairs(p).good_count);
    finish(cfg, "good_pairs", None, histogram, total, exhaustive)
}

pub fn move_count_distribution(cfg: &ExperimentConfig) -> Result<DistributionReport> {
    move_count_distribution_with_threads(cfg, default_threads())
}

pub fn move_count_distribution_with_threads(
    cfg: &ExperimentConfig,
    threads: usize,
) -> Result<DistributionReport> {
    let table = match cfg.algorithm {
        MoveAlgorithm::Exact => Some(DistanceTable::build(cfg.n, MoveKind::BlockMove)?),
        _ => None,
    };
    let measure = |p: &Permutation| -> usize {
        match (cfg.algorithm, &table) {
            (MoveAlgorithm::Constructive, _) => sort_constructive(p).move_count(),
            (MoveAlgorithm::Greedy, _) => sort_greedy(p).move_count(),
            (MoveAlgorithm::Exact, Some(t)) => t.distance(p) as usize,
            (MoveAlgorithm::Exact, None) => unreachable!(),
        }
    };
    let (histogram, total, exhaustive) = collect(cfg, threads, measure);
    Ok(finish(
        cfg,
        "move_count",
        Some(cfg.algorithm),
        histogram,
        total,
        exhaustive,
    ))
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |p| p.get())
}

/// Per-permutation comparison of the combined lower bound, exact distance,
/// greedy length, and constructive length over all of S_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapRow {
    pub rank: u64,
    pub lower_bound: u8,
    pub exact: u8,
    pub greedy: u8,
    pub constructive: u8,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundGapReport {
    pub n: usize,
    pub version: String,
    /// Histogram of `exact - combined_lower_bound`, index = gap.
    pub exact_minus_lower: Vec<u64>,
    /// Histogram of `greedy - exact`, index = gap.
    pub greedy_minus_exact: Vec<u64>,
    /// Histogram of `constructive - exact`, index = gap.
    pub constructive_minus_exact: Vec<u64>,
    /// Permutations where greedy used more moves than the exact distance,
    /// in rank order.
    pub greedy_excess: Vec<Permutation>,
    #[serde(skip)]
    pub rows: Vec<GapRow>,
}

impl BoundGapReport {
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "rank,permutation,lower_bound,exact,greedy,constructive")?;
        for row in &self.rows {
            let p = unrank(row.rank, self.n);
            writeln!(
                w,
                "{},{},{},{},{},{}",
                row.rank, p, row.lower_bound, row.exact, row.greedy, row.constructive
            )?;
        }
        Ok(())
    }
}

pub fn bound_gap_report(n: usize) -> Result<BoundGapReport> {
    let table = DistanceTable::build(n, MoveKind::BlockMove)?;
    let mut rows = Vec::with_capacity(table.len());
    let mut exact_minus_lower = Vec::new();
    let mut greedy_minus_exact = Vec::new();
    let mut constructive_minus_exact = Vec::new();
    let mut greedy_excess = Vec::new();
    let bump = |hist: &mut Vec<u64>, gap: usize| {
        if gap >= hist.len() {
            hist.resize(gap + 1, 0);
        }
        hist[gap] += 1;
    };
    for rank in 0..factorial(n) {
        let p = unrank(rank, n);
        let row = GapRow {
            rank,
            lower_bound: combined_lower_bound(&p) as u8,
            exact: table.distance_by_rank(rank),
            greedy: sort_greedy(&p).move_count() as u8,
            constructive: sort_constructive(&p).move_count() as u8,
        };
        bump(
            &mut exact_minus_lower,
            (row.exact - row.lower_bound) as usize,
        );
        bump(
            &mut greedy_minus_exact,
            row.greedy.saturating_sub(row.exact) as usize,
        );
        bump(
            &mut constructive_minus_exact,
            (row.constructive - row.exact) as usize,
        );
        if row.greedy > row.exact {
            greedy_excess.push(p);
        }
        rows.push(row);
    }
    Ok(BoundGapReport {
        n,
        version: env!("CARGO_PKG_VERSION").to_string(),
        exact_minus_lower,
        greedy_minus_exact,
        constructive_minus_exact,
        greedy_excess,
        rows,
    })
}
