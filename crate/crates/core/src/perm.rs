//! Permutations in one-line notation, block moves, and the statistics
//! (descents, good/bad pairs) that drive the sorting bounds.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of `{1..n}` in one-line notation. `n = 0` is the empty,
/// trivially sorted permutation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation {
    entries: Vec<u32>,
}

impl Permutation {
    /// Validates that `entries` is a bijection onto `{1..n}`.
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        let n = entries.len();
        let mut seen = vec![false; n];
        for &v in &entries {
            if v == 0 || v as usize > n {
                return Err(Error::ValueOutOfRange { value: v, n });
            }
            if std::mem::replace(&mut seen[v as usize - 1], true) {
                return Err(Error::DuplicateValue(v));
            }
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: (1..=n as u32).collect(),
        }
    }

    /// The decreasing permutation `n (n-1) ... 1`.
    pub fn decreasing(n: usize) -> Self {
        Self {
            entries: (1..=n as u32).rev().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        self.entries
            .iter()
            .enumerate()
            .all(|(i, &v)| v == i as u32 + 1)
    }

    /// Entry at 1-based position `i`.
    pub fn at(&self, i: usize) -> u32 {
        self.entries[i - 1]
    }

    pub(crate) fn from_entries_unchecked(entries: Vec<u32>) -> Self {
        debug_assert!(Self::new(entries.clone()).is_ok());
        Self { entries }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.entries {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_permutation(s)
    }
}

/// Parses whitespace- or comma-separated 1-based values.
pub fn parse_permutation(text: &str) -> Result<Permutation> {
    let mut entries = Vec::new();
    for token in text.split(|c: char| c.is_whitespace() || c == ',') {
        if token.is_empty() {
            continue;
        }
        let v: u32 = token
            .parse()
            .map_err(|_| Error::BadToken(token.to_string()))?;
        entries.push(v);
    }
    Permutation::new(entries)
}

/// The kind of operation a distance is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    /// Interchange two disjoint blocks, not necessarily adjacent.
    BlockMove,
    /// Interchange two adjacent blocks.
    BlockTransposition,
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveKind::BlockMove => write!(f, "block_move"),
            MoveKind::BlockTransposition => write!(f, "block_transposition"),
        }
    }
}

/// Two disjoint position ranges to interchange: block A is `a_start..=a_end`,
/// block B is `b_start..=b_end`, both 1-based inclusive, with A strictly left
/// of B. Adjacency (`a_end + 1 = b_start`) makes the move a block
/// transposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockMove {
    pub a_start: usize,
    pub a_end: usize,
    pub b_start: usize,
    pub b_end: usize,
}

impl BlockMove {
    pub fn new(a_start: usize, a_end: usize, b_start: usize, b_end: usize) -> Result<Self> {
        let m = Self {
            a_start,
            a_end,
            b_start,
            b_end,
        };
        if !(1 <= a_start && a_start <= a_end && a_end < b_start && b_start <= b_end) {
            return Err(Error::InvalidMove(format!(
                "need 1 <= a_start <= a_end < b_start <= b_end, got {m}"
            )));
        }
        Ok(m)
    }

    /// Checks the move fits a permutation of length `n`.
    pub fn validate_for(&self, n: usize) -> Result<()> {
        if self.b_end > n {
            return Err(Error::InvalidMove(format!(
                "{self} out of range for length {n}"
            )));
        }
        // Re-check ordering for moves deserialized from JSON.
        Self::new(self.a_start, self.a_end, self.b_start, self.b_end)?;
        Ok(())
    }

    pub fn len_a(&self) -> usize {
        self.a_end - self.a_start + 1
    }

    pub fn len_b(&self) -> usize {
        self.b_end - self.b_start + 1
    }

    /// True when the two blocks are adjacent.
    pub fn is_transposition(&self) -> bool {
        self.a_end + 1 == self.b_start
    }

    /// The move that undoes `self`: after applying `self`, block B sits at
    /// `a_start..` and block A ends at `b_end`, so swapping those back
    /// restores the original for every valid permutation.
    pub fn inverse(&self) -> BlockMove {
        BlockMove {
            a_start: self.a_start,
            a_end: self.a_start + self.len_b() - 1,
            b_start: self.b_end - self.len_a() + 1,
            b_end: self.b_end,
        }
    }
}

impl fmt::Display for BlockMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{} | {},{})",
            self.a_start, self.a_end, self.b_start, self.b_end
        )
    }
}

/// `inverse_move` with the block lengths spelled out; see [`BlockMove::inverse`].
pub fn inverse_move(m: &BlockMove, len_a: usize, len_b: usize) -> BlockMove {
    debug_assert_eq!(len_a, m.len_a());
    debug_assert_eq!(len_b, m.len_b());
    m.inverse()
}

/// Writes `apply_block_move(src, m)` into `dst` without validation.
/// `dst` must have the same length as `src`.
pub(crate) fn apply_move_raw(src: &[u32], m: &BlockMove, dst: &mut [u32]) {
    let (a0, a1, b0, b1) = (m.a_start - 1, m.a_end, m.b_start - 1, m.b_end);
    let mut at = 0;
    dst[..a0].copy_from_slice(&src[..a0]);
    at += a0;
    dst[at..at + (b1 - b0)].copy_from_slice(&src[b0..b1]);
    at += b1 - b0;
    dst[at..at + (b0 - a1)].copy_from_slice(&src[a1..b0]);
    at += b0 - a1;
    dst[at..at + (a1 - a0)].copy_from_slice(&src[a0..a1]);
    at += a1 - a0;
    dst[at..].copy_from_slice(&src[b1..]);
}

/// Interchanges the two blocks of `m` in `p`, keeping the order of entries
/// within each block. Returns `prefix · B · middle · A · suffix`.
pub fn apply_block_move(p: &Permutation, m: &BlockMove) -> Result<Permutation> {
    m.validate_for(p.len())?;
    let mut out = vec![0u32; p.len()];
    apply_move_raw(p.entries(), m, &mut out);
    Ok(Permutation::from_entries_unchecked(out))
}

/// All valid block moves for length `n` in lexicographic order by
/// `(a_start, a_end, b_start, b_end)`. For `BlockTransposition` only the
/// adjacent ones. Returns an empty list for `n < 2`.
pub fn enumerate_block_moves(n: usize, kind: MoveKind) -> Vec<BlockMove> {
    let mut moves = Vec::new();
    if n < 2 {
        return moves;
    }
    for a_start in 1..=n - 1 {
        for a_end in a_start..=n - 1 {
            let b_starts: std::ops::RangeInclusive<usize> = match kind {
                MoveKind::BlockMove => (a_end + 1)..=n,
                MoveKind::BlockTransposition => (a_end + 1)..=(a_end + 1),
            };
            for b_start in b_starts {
                for b_end in b_start..=n {
                    moves.push(BlockMove {
                        a_start,
                        a_end,
                        b_start,
                        b_end,
                    });
                }
            }
        }
    }
    moves
}

/// Number of indices `i` with `p_i > p_{i+1}`.
pub fn descent_count(p: &Permutation) -> usize {
    p.entries().windows(2).filter(|w| w[0] > w[1]).count()
}

/// The `n + 1` boundary-extended pairs of a permutation, each flagged good
/// or bad. Pair `(i, i+1)` is good when `p_i + 1 = p_{i+1}` under the
/// convention `p_0 = 0`, `p_{n+1} = n + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairClassification {
    /// `flags[i]` is true iff pair `(i, i+1)` is good, `0 <= i <= n`.
    pub flags: Vec<bool>,
    pub good_count: usize,
    pub bad_count: usize,
}

/// Entry at 1-based position `i` of the boundary-extended word
/// `0 p_1 ... p_n (n+1)`. The sentinels are virtual, never stored.
#[inline]
fn extended(entries: &[u32], i: usize) -> u32 {
    if i == 0 {
        0
    } else if i == entries.len() + 1 {
        entries.len() as u32 + 1
    } else {
        entries[i - 1]
    }
}

pub fn classify_pairs(p: &Permutation) -> PairClassification {
    let n = p.len();
    let e = p.entries();
    let flags: Vec<bool> = (0..=n)
        .map(|i| extended(e, i) + 1 == extended(e, i + 1))
        .collect();
    let good_count = flags.iter().filter(|&&g| g).count();
    PairClassification {
        good_count,
        bad_count: n + 1 - good_count,
        flags,
    }
}

/// Bad-pair count without building the full classification.
pub fn bad_pair_count(p: &Permutation) -> usize {
    bad_pair_count_raw(p.entries())
}

pub(crate) fn bad_pair_count_raw(entries: &[u32]) -> usize {
    let n = entries.len();
    (0..=n)
        .filter(|&i| extended(entries, i) + 1 != extended(entries, i + 1))
        .count()
}

/// Change in the bad-pair count if `m` were applied to `entries`, computed
/// from the at most four boundary junctions the move touches. Matches
/// `bad_pair_count(after) - bad_pair_count(before)`.
pub(crate) fn bad_pair_delta(entries: &[u32], m: &BlockMove) -> isize {
    let good = |x: u32, y: u32| (x + 1 == y) as isize;
    let e = |i: usize| extended(entries, i);
    let (a0, a1, b0, b1) = (m.a_start, m.a_end, m.b_start, m.b_end);
    let adjacent = a1 + 1 == b0;

    let mut before = good(e(a0 - 1), e(a0)) + good(e(b1), e(b1 + 1));
    before += good(e(a1), e(a1 + 1));
    if !adjacent {
        before += good(e(b0 - 1), e(b0));
    }

    // After the move: prefix | B | middle | A | suffix.
    let mut after = good(e(a0 - 1), e(b0)) + good(e(a1), e(b1 + 1));
    if adjacent {
        after += good(e(b1), e(a0));
    } else {
        after += good(e(b1), e(a1 + 1)) + good(e(b0 - 1), e(a0));
    }

    before - after
}

/// Corollary lower bound: at least `ceil(d(p) / 2)` block moves are needed.
pub fn descent_lower_bound(p: &Permutation) -> usize {
    descent_count(p).div_ceil(2)
}

/// Combined lower bound `max(ceil(d(p)/2), ceil(b(p)/4))`.
pub fn combined_lower_bound(p: &Permutation) -> usize {
    if p.is_identity() {
        return 0;
    }
    descent_lower_bound(p).max(bad_pair_count(p).div_ceil(4))
}

/// Result of contracting a permutation: the good-pair-free reduced
/// permutation, plus for each reduced position the contiguous range of
/// original positions it stands for (1-based inclusive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    pub reduced: Permutation,
    pub spans: Vec<(usize, usize)>,
}

/// Glues good pairs to a fixpoint: strips a leading run starting with 1,
/// strips a trailing run ending with n, merges every maximal run of
/// value-consecutive adjacent entries into one element, then relabels the
/// survivors onto `{1..m}`. The identity contracts to the empty permutation.
pub fn contract(p: &Permutation) -> Contraction {
    let e = p.entries();
    let n = e.len();

    // Maximal runs with p_{i}+1 = p_{i+1}; each run is one glued element.
    let mut runs: Vec<(u32, u32, usize, usize)> = Vec::new(); // (lo, hi, start, end)
    let mut i = 0;
    while i < n {
        let start = i;
        while i + 1 < n && e[i] + 1 == e[i + 1] {
            i += 1;
        }
        runs.push((e[start], e[i], start + 1, i + 1));
        i += 1;
    }

    let mut keep: &[(u32, u32, usize, usize)] = &runs;
    if let Some(&(lo, ..)) = keep.first() {
        if lo == 1 {
            keep = &keep[1..];
        }
    }
    if let Some(&(_, hi, ..)) = keep.last() {
        if hi as usize == n {
            keep = &keep[..keep.len() - 1];
        }
    }

    // Relabel the surviving elements by the rank of their value range.
    let mut order: Vec<usize> = (0..keep.len()).collect();
    order.sort_by_key(|&k| keep[k].0);
    let mut label = vec![0u32; keep.len()];
    for (rank, &k) in order.iter().enumerate() {
        label[k] = rank as u32 + 1;
    }

    Contraction {
        reduced: Permutation::from_entries_unchecked(label),
        spans: keep.iter().map(|&(_, _, s, t)| (s, t)).collect(),
    }
}

/// Which sorter produced a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SortAlgorithm {
    Constructive,
    Greedy,
}

impl fmt::Display for SortAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SortAlgorithm::Constructive => write!(f, "constructive"),
            SortAlgorithm::Greedy => write!(f, "greedy"),
        }
    }
}

/// A complete sorting run: the input, the moves in order, the permutation
/// after each move, and the bad-pair count after each move.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortTrace {
    pub input: Permutation,
    pub moves: Vec<BlockMove>,
    pub intermediates: Vec<Permutation>,
    #[serde(rename = "bad_pairs")]
    pub bad_pair_counts: Vec<usize>,
    pub algorithm: SortAlgorithm,
}

impl SortTrace {
    pub fn move_count(&self) -> usize {
        self.moves.len()
    }

    /// Replays the moves and checks every recorded intermediate and
    /// bad-pair count, and that the trace ends at the identity.
    pub fn is_valid(&self) -> bool {
        let mut cur = self.input.clone();
        if self.intermediates.len() != self.moves.len()
            || self.bad_pair_counts.len() != self.moves.len()
        {
            return false;
        }
        for (k, m) in self.moves.iter().enumerate() {
            cur = match apply_block_move(&cur, m) {
                Ok(next) => next,
                Err(_) => return false,
            };
            if cur != self.intermediates[k] || bad_pair_count(&cur) != self.bad_pair_counts[k] {
                return false;
            }
        }
        cur.is_identity()
    }
}

/// Calls `f` with every permutation of `{1..n}` in lexicographic order.
pub fn for_each_permutation<F: FnMut(&[u32])>(n: usize, mut f: F) {
    let mut a: Vec<u32> = (1..=n as u32).collect();
    loop {
        f(&a);
        // next_permutation in place
        let Some(i) = (0..n.saturating_sub(1)).rfind(|&i| a[i] < a[i + 1]) else {
            return;
        };
        let j = a.iter().rposition(|&x| x > a[i]).unwrap();
        a.swap(i, j);
        a[i + 1..].reverse();
    }
}
