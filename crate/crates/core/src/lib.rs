//! Exact treedepth: a deterministic polynomial-space counting solver, a
//! randomized linear-fpt solver and a brute-force oracle.

pub mod construct;
pub mod counting;
pub mod error;
pub mod forest;
pub mod graph;
pub mod linear;
pub mod oracle;
pub mod pace;
pub mod polyring;

pub use construct::{construct_elim_forest, solve_deterministic, Outcome};
pub use counting::{count_elim_forests, count_elim_trees, EngineOptions};
pub use error::{CountError, ForestError, GraphError, OracleError, PaceError, RingError};
pub use forest::{validate_elimination_forest, RootedForest};
pub use graph::Graph;
pub use linear::{solve_randomized, LinearConfig};
pub use polyring::{CoefficientRing, TruncatedPolynomial};
