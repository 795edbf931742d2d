//! The constructive sorter: every move removes at least two bad pairs, so
//! any n-permutation is sorted in at most `floor((n+1)/2)` block moves.
//! Also the singleton-swap schedule for the decreasing permutation and the
//! greedy variant that always takes the largest bad-pair decrease.

use crate::error::{Error, Result};
use crate::perm::{
    apply_block_move, bad_pair_count, bad_pair_delta, contract, enumerate_block_moves, BlockMove,
    MoveKind, Permutation, SortAlgorithm, SortTrace,
};

/// A decreasing subsequence starting at the first entry, of maximal
/// horizontal length, with no left refinement and no insertion extension.
/// `positions` are 1-based, `values` the entries at those positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecreasingAnchor {
    pub positions: Vec<usize>,
    pub values: Vec<u32>,
}

impl DecreasingAnchor {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Picks the anchor subsequence used to locate a reducing move.
///
/// First a right-to-left pass computes, for every position, the rightmost
/// position reachable by a decreasing subsequence. Then a greedy walk from
/// position 1 always takes the earliest-position smaller entry from which
/// the overall rightmost endpoint stays reachable. Any entry that could
/// refine or extend the result would have been taken by the walk first.
pub fn select_pdec(q: &Permutation) -> Result<DecreasingAnchor> {
    let e = q.entries();
    let n = e.len();
    if n == 0 || e[0] < 3 {
        return Err(Error::Contract(
            "select_pdec: first entry must be at least 3",
        ));
    }

    // reach[i]: rightmost 0-based position reachable from i going right
    // through strictly decreasing values.
    let mut reach: Vec<usize> = (0..n).collect();
    for i in (0..n).rev() {
        for j in i + 1..n {
            if e[j] < e[i] && reach[j] > reach[i] {
                reach[i] = reach[j];
            }
        }
    }
    let target = reach[0];

    let mut positions = vec![1usize];
    let mut values = vec![e[0]];
    let mut cur = 0usize;
    while cur != target {
        let next = (cur + 1..=target)
            .find(|&j| e[j] < e[cur] && reach[j] == target)
            .expect("target reachable from every anchor element");
        positions.push(next + 1);
        values.push(e[next]);
        cur = next;
    }
    Ok(DecreasingAnchor { positions, values })
}

/// Finds a block move that decreases the bad-pair count of `p` by at least
/// two, in original coordinates. Case analysis on the contracted
/// permutation `q` (which has no good pairs, so `q_1 != 1`):
///
/// 1. `q` starts with 2: swap the prefix before entry 1 with entry 1.
/// 2. otherwise `q_1 >= 3`; anchor on [`select_pdec`]. When entry 1 lies
///    strictly inside an anchor window, swap the prefix before the window
///    with the block from entry 1 up to either the next anchor entry (when
///    the anchor values drop by exactly one across the window) or up to
///    the entry one below the window's left anchor value.
/// 3. otherwise entry 1 terminates the anchor, which forces entry 2 to
///    precede it: swap the prefix ending just before entry 2 with the
///    singleton entry 1.
///
/// Each case lands entry 1 in front and creates a second good pair at the
/// seam it closes, and no good pair exists to destroy.
pub fn find_reducing_move(p: &Permutation) -> Result<BlockMove> {
    if p.is_identity() {
        return Err(Error::AlreadySorted);
    }
    let c = contract(p);
    let q = &c.reduced;
    let e = q.entries();
    debug_assert!(q.len() >= 2);

    // Lift a move on q back to original coordinates through the spans.
    let lift = |a_start: usize, a_end: usize, b_start: usize, b_end: usize| BlockMove {
        a_start: c.spans[a_start - 1].0,
        a_end: c.spans[a_end - 1].1,
        b_start: c.spans[b_start - 1].0,
        b_end: c.spans[b_end - 1].1,
    };
    let pos_of = |v: u32| e.iter().position(|&x| x == v).unwrap() + 1;

    let pos1 = pos_of(1);
    if e[0] == 2 {
        return Ok(lift(1, pos1 - 1, pos1, pos1));
    }

    let anchor = select_pdec(q)?;
    let k = anchor.len() - 1;
    let window = (0..k).find(|&j| anchor.positions[j] < pos1 && pos1 < anchor.positions[j + 1]);
    if let Some(j) = window {
        let b_end = if anchor.values[j] - 1 == anchor.values[j + 1] {
            anchor.positions[j + 1]
        } else {
            // The entry one below the window's left anchor value sits right
            // of the window, else the greedy walk would have taken it.
            let t = pos_of(anchor.values[j] - 1);
            debug_assert!(t > anchor.positions[j + 1]);
            t
        };
        if j == 0 {
            // Empty prefix before the anchor start: swap everything left
            // of entry 1 instead; the same two good pairs are created.
            return Ok(lift(1, pos1 - 1, pos1, b_end));
        }
        return Ok(lift(1, anchor.positions[j] - 1, pos1, b_end));
    }

    // Entry 1 is the last anchor element. Everything right of it exceeds
    // every anchor value, so entry 2 sits to its left.
    let pos2 = pos_of(2);
    debug_assert!(pos2 < pos1);
    Ok(lift(1, pos2 - 1, pos1, pos1))
}

fn sort_with<F>(p: &Permutation, algorithm: SortAlgorithm, mut pick: F) -> SortTrace
where
    F: FnMut(&Permutation) -> BlockMove,
{
    let mut cur = p.clone();
    let mut moves = Vec::new();
    let mut intermediates = Vec::new();
    let mut bad_pair_counts = Vec::new();
    while !cur.is_identity() {
        let m = pick(&cur);
        cur = apply_block_move(&cur, &m).expect("picked move is valid");
        moves.push(m);
        bad_pair_counts.push(bad_pair_count(&cur));
        intermediates.push(cur.clone());
    }
    SortTrace {
        input: p.clone(),
        moves,
        intermediates,
        bad_pair_counts,
        algorithm,
    }
}

/// Sorts by repeatedly applying [`find_reducing_move`]. The trace ends at
/// the identity after at most `ceil(b(p)/2) <= floor((n+1)/2)` moves.
pub fn sort_constructive(p: &Permutation) -> SortTrace {
    sort_with(p, SortAlgorithm::Constructive, |cur| {
        find_reducing_move(cur).expect("non-identity permutation has a reducing move")
    })
}

/// Sorts by always taking a block move with the largest bad-pair decrease,
/// breaking ties by lexicographically smallest move.
pub fn sort_greedy(p: &Permutation) -> SortTrace {
    let moves = enumerate_block_moves(p.len(), MoveKind::BlockMove);
    sort_with(p, SortAlgorithm::Greedy, |cur| {
        let mut best: Option<(isize, &BlockMove)> = None;
        for m in &moves {
            let delta = bad_pair_delta(cur.entries(), m);
            if best.is_none_or(|(d, _)| delta < d) {
                best = Some((delta, m));
            }
        }
        *best.expect("at least one move exists for n >= 2").1
    })
}

/// The singleton-swap schedule that sorts the decreasing permutation
/// `n (n-1) ... 1` in `ceil((n-1)/2)` moves: interchange the one-element
/// block at position i with the one at position n+1-i.
pub fn decreasing_schedule(n: usize) -> Vec<BlockMove> {
    if n < 2 {
        return Vec::new();
    }
    (1..=(n - 1).div_ceil(2))
        .map(|i| BlockMove {
            a_start: i,
            a_end: i,
            b_start: n + 1 - i,
            b_end: n + 1 - i,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{classify_pairs, for_each_permutation, parse_permutation};

    fn perm(s: &str) -> Permutation {
        parse_permutation(s).unwrap()
    }

    fn mv(a0: usize, a1: usize, b0: usize, b1: usize) -> BlockMove {
        BlockMove::new(a0, a1, b0, b1).unwrap()
    }

    #[test]
    fn pdec_worked_examples() {
        let a = select_pdec(&perm("5 1 3 4 2")).unwrap();
        assert_eq!(a.positions, vec![1, 3, 5]);
        assert_eq!(a.values, vec![5, 3, 2]);

        let a = select_pdec(&perm("9 3 10 6 8 2 4 1 5 7 12 11 13")).unwrap();
        assert_eq!(a.positions, vec![1, 5, 10]);
        assert_eq!(a.values, vec![9, 8, 7]);

        let a = select_pdec(&perm("4 3 2 1")).unwrap();
        assert_eq!(a.positions, vec![1, 2, 3, 4]);
        assert_eq!(a.values, vec![4, 3, 2, 1]);
    }

    #[test]
    fn pdec_rejects_small_first_entry() {
        assert!(select_pdec(&perm("2 1")).is_err());
        assert!(select_pdec(&perm("")).is_err());
    }

    // Brute-force check of the three anchor invariants, by enumerating all
    // decreasing subsequences starting at position 1.
    fn check_anchor(q: &Permutation, a: &DecreasingAnchor) {
        let e = q.entries();
        let n = e.len();
        let k = a.len() - 1;
        assert_eq!(a.positions[0], 1);
        assert!(a.positions.windows(2).all(|w| w[0] < w[1]));
        assert!(a.values.windows(2).all(|w| w[0] > w[1]));
        for (i, &pos) in a.positions.iter().enumerate() {
            assert_eq!(e[pos - 1], a.values[i]);
        }

        // Maximal horizontal length: DFS over all decreasing subsequences
        // from position 1 for the farthest reachable endpoint.
        fn farthest(e: &[u32], i: usize) -> usize {
            let mut best = i;
            for j in i + 1..e.len() {
                if e[j] < e[i] {
                    best = best.max(farthest(e, j));
                }
            }
            best
        }
        assert_eq!(
            a.positions[k] - 1,
            farthest(e, 0),
            "horizontal length in {q}"
        );

        // No left refinement: no interior element can be replaced by an
        // earlier-position entry with positions still increasing and values
        // still decreasing. Replacing the last element would shorten the
        // horizontal extent, which leaves the candidate set, so interior
        // slots are the ones that must be unrefinable.
        for slot in 1..k {
            for t in a.positions[slot - 1] + 1..a.positions[slot] {
                let w = e[t - 1];
                assert!(
                    !(w < a.values[slot - 1] && w > a.values[slot + 1]),
                    "left refinement of slot {slot} by position {t} in {q}"
                );
            }
        }

        // Not extendable by inserting one entry between consecutive slots
        // or appending one after the end.
        for slot in 0..k {
            for t in a.positions[slot] + 1..a.positions[slot + 1] {
                let w = e[t - 1];
                assert!(
                    !(w < a.values[slot] && w > a.values[slot + 1]),
                    "anchor extendable at position {t} in {q}"
                );
            }
        }
        for t in a.positions[k] + 1..=n {
            assert!(e[t - 1] > a.values[k], "anchor appendable at {t} in {q}");
        }
    }

    #[test]
    fn pdec_invariants_exhaustive() {
        for n in 3..=7 {
            for_each_permutation(n, |e| {
                if e[0] < 3 {
                    return;
                }
                let q = Permutation::new(e.to_vec()).unwrap();
                let a = select_pdec(&q).unwrap();
                check_anchor(&q, &a);
            });
        }
    }

    #[test]
    fn pdec_invariants_on_contractions_of_larger_inputs() {
        use rand_chacha::ChaCha8Rng;
        use rand_core::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for n in [9usize, 10] {
            for i in 0..300u64 {
                rng.set_stream(n as u64 * 1000 + i);
                let p = crate::stats::random_permutation(n, &mut rng);
                let q = contract(&p).reduced;
                if q.is_empty() || q.entries()[0] < 3 {
                    continue;
                }
                let a = select_pdec(&q).unwrap();
                check_anchor(&q, &a);
            }
        }
    }

    #[test]
    fn reducing_move_worked_examples() {
        assert_eq!(
            find_reducing_move(&perm("9 3 10 6 8 2 4 1 5 7 12 11 13")).unwrap(),
            mv(1, 4, 8, 10)
        );
        assert_eq!(
            find_reducing_move(&perm("1 4 3 2 5")).unwrap(),
            mv(2, 2, 4, 4)
        );
        assert_eq!(find_reducing_move(&perm("2 1")).unwrap(), mv(1, 1, 2, 2));
        assert!(matches!(
            find_reducing_move(&Permutation::identity(4)),
            Err(Error::AlreadySorted)
        ));
    }

    #[test]
    fn reducing_move_drops_two_bad_pairs_exhaustive() {
        for n in 2..=7 {
            for_each_permutation(n, |e| {
                let p = Permutation::new(e.to_vec()).unwrap();
                if p.is_identity() {
                    return;
                }
                let m = find_reducing_move(&p).unwrap();
                let q = apply_block_move(&p, &m).unwrap();
                let delta = bad_pair_count(&q) as isize - bad_pair_count(&p) as isize;
                assert!(delta <= -2, "p = {p}, m = {m}, delta = {delta}");
            });
        }
    }

    #[test]
    fn lifted_move_matches_contracted_delta() {
        // The move found on p and the move found on its contraction remove
        // the same number of bad pairs.
        for n in 2..=7 {
            for_each_permutation(n, |e| {
                let p = Permutation::new(e.to_vec()).unwrap();
                if p.is_identity() {
                    return;
                }
                let q = contract(&p).reduced;
                let mp = find_reducing_move(&p).unwrap();
                let mq = find_reducing_move(&q).unwrap();
                let dp = bad_pair_count(&apply_block_move(&p, &mp).unwrap()) as isize
                    - bad_pair_count(&p) as isize;
                let dq = bad_pair_count(&apply_block_move(&q, &mq).unwrap()) as isize
                    - bad_pair_count(&q) as isize;
                assert_eq!(dp, dq, "p = {p}, q = {q}");
            });
        }
    }

    #[test]
    fn constructive_sort_worked_examples() {
        let t = sort_constructive(&Permutation::identity(5));
        assert_eq!(t.move_count(), 0);
        assert!(t.is_valid());

        let t = sort_constructive(&Permutation::decreasing(5));
        assert_eq!(t.move_count(), 2);
        assert!(t.is_valid());

        let t = sort_constructive(&perm("1 4 3 2 5"));
        assert_eq!(t.move_count(), 1);
        assert!(t.is_valid());
    }

    #[test]
    fn constructive_sort_respects_theorem_bound() {
        for n in 0..=7 {
            for_each_permutation(n, |e| {
                let p = Permutation::new(e.to_vec()).unwrap();
                let b = bad_pair_count(&p);
                let t = sort_constructive(&p);
                assert!(t.is_valid(), "invalid trace for {p}");
                assert!(t.move_count() <= b.div_ceil(2), "{p}");
                assert!(t.move_count() <= n.div_ceil(2), "{p}");
                let mut prev = b;
                for &cur in &t.bad_pair_counts {
                    assert!(
                        prev >= cur + 2,
                        "step dropped b only {prev} -> {cur} on {p}"
                    );
                    prev = cur;
                }
            });
        }
    }

    #[test]
    fn greedy_sort_worked_examples() {
        assert_eq!(sort_greedy(&perm("1 4 3 2 5")).move_count(), 1);
        assert_eq!(sort_greedy(&Permutation::identity(3)).move_count(), 0);
        let t = sort_greedy(&Permutation::decreasing(5));
        assert_eq!(t.move_count(), 2);
        assert!(t.is_valid());
    }

    #[test]
    fn greedy_sort_respects_theorem_bound() {
        for n in 0..=6 {
            for_each_permutation(n, |e| {
                let p = Permutation::new(e.to_vec()).unwrap();
                let t = sort_greedy(&p);
                assert!(t.is_valid(), "invalid greedy trace for {p}");
                assert!(t.move_count() <= n.div_ceil(2), "{p}");
            });
        }
    }

    #[test]
    fn decreasing_schedule_sorts_decreasing_permutation() {
        assert_eq!(decreasing_schedule(5), vec![mv(1, 1, 5, 5), mv(2, 2, 4, 4)]);
        assert_eq!(decreasing_schedule(2), vec![mv(1, 1, 2, 2)]);
        assert_eq!(decreasing_schedule(4), vec![mv(1, 1, 4, 4), mv(2, 2, 3, 3)]);
        assert!(decreasing_schedule(1).is_empty());
        assert!(decreasing_schedule(0).is_empty());

        for n in 2..=12 {
            let mut cur = Permutation::decreasing(n);
            let schedule = decreasing_schedule(n);
            assert_eq!(schedule.len(), (n - 1).div_ceil(2));
            for m in &schedule {
                cur = apply_block_move(&cur, m).unwrap();
            }
            assert!(cur.is_identity(), "n = {n}");
        }
    }

    #[test]
    fn trace_json_shape() {
        let t = sort_constructive(&perm("1 4 3 2 5"));
        let json = serde_json::to_value(&t).unwrap();
        assert_eq!(json["input"], serde_json::json!([1, 4, 3, 2, 5]));
        assert_eq!(json["algorithm"], "constructive");
        assert_eq!(json["bad_pairs"], serde_json::json!([0]));
        assert_eq!(json["intermediates"][0], serde_json::json!([1, 2, 3, 4, 5]));
        assert_eq!(json["moves"][0]["a_start"], 2);

        let back: SortTrace = serde_json::from_str(&json.to_string()).unwrap();
        assert!(back.is_valid());
    }

    #[test]
    fn greedy_first_step_never_worse_than_constructive() {
        for n in 2..=6 {
            for_each_permutation(n, |e| {
                let p = Permutation::new(e.to_vec()).unwrap();
                if p.is_identity() {
                    return;
                }
                let mc = find_reducing_move(&p).unwrap();
                let mg = sort_greedy(&p).moves[0];
                let d = |m: &BlockMove| {
                    bad_pair_count(&apply_block_move(&p, m).unwrap()) as isize
                        - bad_pair_count(&p) as isize
                };
                assert!(d(&mg) <= d(&mc), "p = {p}");
            });
        }
    }

    #[test]
    fn contracted_sort_has_no_good_pairs_precondition_for_case_three() {
        // The case-3 path must only ever see anchors on good-pair-free
        // permutations whose first entry is at least 3.
        for n in 4..=6 {
            for_each_permutation(n, |e| {
                let p = Permutation::new(e.to_vec()).unwrap();
                if p.is_identity() {
                    return;
                }
                let q = contract(&p).reduced;
                assert_eq!(classify_pairs(&q).good_count, 0);
            });
        }
    }
}
