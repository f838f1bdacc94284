//! Constructions, verification and bound evaluation for Turán `(n,s,r)`-systems:
//! `r`-uniform hypergraphs on `n` vertices in which every `s`-set contains an edge.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod combinatorics;
pub mod constructions;
pub mod error;
pub mod exact_solver;
pub mod hypergraph;

pub use combinatorics::{BigCount, KSubset, LogValue, Magnitude};
pub use error::{Error, Result};
pub use exact_solver::{solve_min_turan, SolveResult};
pub use hypergraph::{is_turan_system, UniformHypergraph, VerifyReport};
