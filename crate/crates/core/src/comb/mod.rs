//! Exact combinatorics of weighted sums: representation tables, window
//! pigeonholes, the integer and prime hypothesis checkers, and the additive
//! objects (sum sets, popular pairs, generalized progressions).

mod additive;
mod hyp;
mod rep;
mod window;
mod wset;

pub use additive::{
    gap_rep_check, pair_counts, popular_pairs, restricted_sumset, sumset, Gap, GapRepReport,
    PopularPairSet, GAP_ELEMENTS,
};
pub use hyp::{
    a_to_primes, hyp_a_check, hyp_p_check, hypothesis_primes, primes_to_a, realization_gap,
    thm71_count, HypAReport, HypARow, HypPReport, HypPRow, PrimeCells, A_TO_PRIMES_MAX_N,
};
pub use rep::{
    rep_table, rep_table_with, RepLayer, RepTable, EXACT_WEIGHT_BITS, EXACT_WEIGHT_WORK, REP_CELLS,
};
pub use window::{
    prime_product_window, window_best_k, ProductRow, ProductWindow, WindowBest, EXACT_TUPLES,
    MAX_WINDOW_K,
};
pub use wset::WeightedIntegerSet;
