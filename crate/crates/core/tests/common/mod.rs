//! Test-side oracles, independent of the rank-indexed BFS tables they
//! cross-check.

use std::collections::HashSet;

use blockmoves::perm::{
    apply_block_move, combined_lower_bound, enumerate_block_moves, BlockMove, MoveKind, Permutation,
};

/// Exact sorting distance by iterative deepening from `p` toward the
/// identity, pruned with the combined lower bound and finished against the
/// set of identity neighbors. Returns `None` if `max_depth` is too small.
pub fn iddfs_distance(p: &Permutation, kind: MoveKind, max_depth: usize) -> Option<usize> {
    if p.is_identity() {
        return Some(0);
    }
    let n = p.len();
    let moves = enumerate_block_moves(n, kind);
    let identity = Permutation::identity(n);
    let neighbors: HashSet<Vec<u32>> = moves
        .iter()
        .map(|m| apply_block_move(&identity, m).unwrap().entries().to_vec())
        .collect();
    if neighbors.contains(p.entries()) {
        return Some(1);
    }
    (2..=max_depth).find(|&limit| dfs(p, limit, &moves, &neighbors))
}

fn dfs(
    cur: &Permutation,
    remaining: usize,
    moves: &[BlockMove],
    neighbors: &HashSet<Vec<u32>>,
) -> bool {
    if remaining == 1 {
        return neighbors.contains(cur.entries());
    }
    for m in moves {
        let child = apply_block_move(cur, m).unwrap();
        if child.is_identity() {
            return true;
        }
        if combined_lower_bound(&child) < remaining && dfs(&child, remaining - 1, moves, neighbors)
        {
            return true;
        }
    }
    false
}
