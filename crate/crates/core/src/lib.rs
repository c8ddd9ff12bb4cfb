//! Unique representation bases for the integers.
//!
//! A set `A` of integers is a unique representation basis when every integer
//! `n` is `a + a'` for exactly one pair `a <= a'` from `A`. This crate builds
//! finite prefixes `A_1 ⊆ A_2 ⊆ ...` of such bases, either greedily (giving
//! logarithmic growth) or with a prescribed slow growth, checks them with an
//! independent brute-force oracle, and evaluates the known density bounds.
//!
//! ```
//! use urbasis::construction::run_greedy;
//! use urbasis::intset::IntSet;
//!
//! let trace = run_greedy(3).unwrap();
//! assert_eq!(trace.steps[2].set, IntSet::from_i64s(&[-14, -4, 0, 1, 3, 12]));
//! ```

pub mod bounds;
pub mod cli;
pub mod construction;
pub mod growth;
pub mod intset;
pub mod oracle;
pub mod tracefile;

pub use construction::{run_greedy, run_with_growth, BasisTrace, ConstructionStep};
pub use growth::{GrowthSpec, Threshold};
pub use intset::IntSet;
