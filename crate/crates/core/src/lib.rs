//! Finite-domain constraint propagation and search with first-class
//! multidimensional array constraints `x = a[y1, …, yn]`.
//!
//! Two interchangeable propagation engines are provided:
//!
//! * [`rules::rsarr_closure`] — a declarative rule set (`Rarx`, `Rary`,
//!   `Rara`, with an optional rewriting variant of the cell rule) driven by
//!   a worklist until fixpoint;
//! * [`arrac::arrac_fixpoint`] — a one-pass algorithm per constraint that
//!   reads each array cell at most once and skips provably redundant index
//!   tuples.
//!
//! Both reach the same closure: the largest arc-consistent subdomains.
//! A brute-force [`oracle`] provides independently computed solutions and
//! closures for testing, [`solver`] adds backtracking search on top of
//! either engine, and [`crossword`] compiles crossword grids into models as
//! an end-to-end exercise of nested array access.

pub mod arrac;
pub mod crossword;
pub mod domain;
pub mod expr;
pub mod fixtures;
pub mod generate;
pub mod model;
pub mod oracle;
pub mod rules;
pub mod solver;
pub mod stats;

pub use arrac::{arrac_fixpoint, arrac_run, supporting_cells, ArracOptions, IndexOrder};
pub use domain::{Domain, Interner, Token, Value};
pub use expr::{decompose_all, Expression};
pub use model::{
    Assignment, Constraint, CspModel, DomainTable, IndexTuple, ValidateOptions, VarId,
};
pub use oracle::{ac_closure_oracle, enumerate_solutions};
pub use rules::{rsarr_closure, CellMode, ClosureOptions, ClosureResult};
pub use solver::{solve, Engine, SearchOptions, SolveResult};
pub use stats::PropagationStats;
