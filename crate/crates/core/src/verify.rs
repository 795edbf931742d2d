//! Exhaustive small-n verification of the sorting bounds: the descent
//! lemma, the bad-pair-reducing move, the constructive upper bound, and
//! the distance-table checks from [`crate::exact::check_bounds`].

use serde::Serialize;

use crate::error::Result;
use crate::exact::{check_bounds, default_cap, Check};
use crate::perm::{
    apply_block_move, bad_pair_count, descent_count, enumerate_block_moves, for_each_permutation,
    MoveKind, Permutation,
};
use crate::sorter::{find_reducing_move, sort_constructive};

pub const LEMMA_CAP: usize = 6;
pub const PROPOSITION_CAP: usize = 8;
pub const THEOREM_CAP: usize = 8;

/// No block move changes the descent count by more than two in either
/// direction, checked over every permutation of length `n` and every move.
pub fn lemma_check(n: usize) -> Check {
    let name = "descent_delta_lemma";
    let moves = enumerate_block_moves(n, MoveKind::BlockMove);
    let mut bad: Option<String> = None;
    let mut pairs = 0u64;
    for_each_permutation(n, |e| {
        if bad.is_some() {
            return;
        }
        let p = Permutation::new(e.to_vec()).expect("enumerated permutation");
        let d = descent_count(&p) as isize;
        for m in &moves {
            let q = apply_block_move(&p, m).unwrap();
            let delta = descent_count(&q) as isize - d;
            pairs += 1;
            if delta.abs() > 2 {
                bad = Some(format!("{p} with {m}: descent delta {delta}"));
                return;
            }
        }
    });
    match bad {
        None => Check::passed(
            name,
            format!("n = {n}: |descent delta| <= 2 over {pairs} (permutation, move) pairs"),
        ),
        Some(detail) => Check::failed(name, format!("n = {n}: {detail}")),
    }
}

/// Every non-identity permutation of length `n` admits the constructed
/// move, and that move removes at least two bad pairs.
pub fn proposition_check(n: usize) -> Check {
    let name = "reducing_move_proposition";
    let mut bad: Option<String> = None;
    let mut count = 0u64;
    for_each_permutation(n, |e| {
        if bad.is_some() {
            return;
        }
        let p = Permutation::new(e.to_vec()).expect("enumerated permutation");
        if p.is_identity() {
            return;
        }
        count += 1;
        let m = match find_reducing_move(&p) {
            Ok(m) => m,
            Err(err) => {
                bad = Some(format!("{p}: {err}"));
                return;
            }
        };
        if m.validate_for(n).is_err() {
            bad = Some(format!("{p}: invalid move {m}"));
            return;
        }
        let q = apply_block_move(&p, &m).unwrap();
        let delta = bad_pair_count(&q) as isize - bad_pair_count(&p) as isize;
        if delta > -2 {
            bad = Some(format!("{p} with {m}: bad-pair delta {delta}"));
        }
    });
    match bad {
        None => Check::passed(
            name,
            format!("n = {n}: reducing move removes >= 2 bad pairs on all {count} non-identity permutations"),
        ),
        Some(detail) => Check::failed(name, format!("n = {n}: {detail}")),
    }
}

/// The constructive sorter reaches the identity within `floor((n+1)/2)`
/// moves, dropping the bad-pair count by at least two per step, for every
/// permutation of length `n`.
pub fn theorem_check(n: usize) -> Check {
    let name = "constructive_sort_theorem";
    let bound = n.div_ceil(2);
    let mut bad: Option<String> = None;
    for_each_permutation(n, |e| {
        if bad.is_some() {
            return;
        }
        let p = Permutation::new(e.to_vec()).expect("enumerated permutation");
        let trace = sort_constructive(&p);
        if !trace.is_valid() {
            bad = Some(format!("{p}: trace does not replay to the identity"));
            return;
        }
        if trace.move_count() > bound {
            bad = Some(format!("{p}: {} moves > bound {bound}", trace.move_count()));
            return;
        }
        let mut prev = bad_pair_count(&p);
        for &b in &trace.bad_pair_counts {
            if prev < b + 2 {
                bad = Some(format!("{p}: step only moved b from {prev} to {b}"));
                return;
            }
            prev = b;
        }
    });
    match bad {
        None => Check::passed(
            name,
            format!("n = {n}: every permutation sorted in <= {bound} moves, each removing >= 2 bad pairs"),
        ),
        Some(detail) => Check::failed(name, format!("n = {n}: {detail}")),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub max_n: usize,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::ok)
    }
}

/// Runs every suite for n = 2..=max_n, capping each suite at its own
/// exhaustive limit. `max_n` must not exceed the block-move table cap.
pub fn run_suite(max_n: usize) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    for n in 2..=max_n.min(LEMMA_CAP) {
        checks.push(tagged(lemma_check(n), n));
    }
    for n in 2..=max_n.min(PROPOSITION_CAP) {
        checks.push(tagged(proposition_check(n), n));
    }
    for n in 2..=max_n.min(THEOREM_CAP) {
        checks.push(tagged(theorem_check(n), n));
    }
    for n in 2..=max_n.min(default_cap(MoveKind::BlockMove)) {
        let report = check_bounds(n)?;
        for check in report.checks {
            checks.push(tagged(check, n));
        }
    }
    Ok(VerifyReport { max_n, checks })
}

fn tagged(mut check: Check, n: usize) -> Check {
    check.name = format!("{}[n={n}]", check.name);
    check
}
