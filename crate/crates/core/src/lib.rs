//! Sorting permutations of `{1..n}` by block moves.
//!
//! A block move interchanges two disjoint blocks of consecutive entries,
//! which do not have to be adjacent; a block transposition is the adjacent
//! special case. This crate provides the permutation statistics that bound
//! the sorting distance (descents, good/bad pairs), a constructive sorter
//! that removes at least two bad pairs per move, exact distances for small
//! `n` via breadth-first search over the whole symmetric group, and seeded
//! experiment harnesses.
//!
//! ```
//! use blockmoves::perm::parse_permutation;
//! use blockmoves::sorter::sort_constructive;
//!
//! let p = parse_permutation("1 4 3 2 5").unwrap();
//! let trace = sort_constructive(&p);
//! assert_eq!(trace.move_count(), 1);
//! ```

pub mod error;
pub mod exact;
pub mod perm;
pub mod sorter;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use perm::{BlockMove, MoveKind, Permutation};
