//! Decomposition builders: exact for tiny graphs, clique trees for chordal
//! graphs, and recursion on balanced clique separators.

mod chordal;
mod exact;
mod separators;

pub use chordal::{chordless_cycle, clique_tree_chordal, is_perfect_elimination_order, lex_bfs};
pub use exact::{exact_tree_alpha, EXACT_TREE_ALPHA_CAP};
pub use separators::{
    build_from_separators, greedy_clique_cover, greedy_clique_separator, interval_clique_separator, interval_graph,
    CliqueSeparator, GreedyFinder, Interval, IntervalFinder, SeparatorDecomposition, SeparatorFinder,
};
