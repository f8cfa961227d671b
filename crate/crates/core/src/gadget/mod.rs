//! The ±1/0 → 0/1 gadget, regular graphs, automorphisms and exact walk
//! counting, plus the path-difference decision problem.

mod graph;
mod paths;
mod signed;

pub use graph::{
    adjacency_matrix, check_graph, find_exchanging_automorphism, relabel, AdjacencyOracle, Graph, Permutation,
};
pub use paths::{
    decide_path_difference, path_difference_exact, psi_minus_moment, verify_reduction_identity, walk_counts,
    PathDecision, PathDifferenceInstance, ReductionReport,
};
pub use signed::{direct_sum_check, DirectSumReport, GadgetGraph, SignedSparseMatrix};
