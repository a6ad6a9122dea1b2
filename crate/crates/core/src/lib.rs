//! k-center clustering with set outliers.
//!
//! Solvers for general metrics with arbitrary outlier sets, Euclidean points
//! with rectangle-induced outlier sets, and relational data where outliers
//! are join results or input tuples. Every guarantee can be checked against
//! the exhaustive oracles shipped alongside.

pub mod constants;
pub mod cso_disjoint;
pub mod cso_general;
pub mod error;
pub mod gen;
pub mod gcso;
pub mod gcso_disjoint;
pub mod geo;
pub mod instance;
pub mod metric;
pub mod mwu;
pub mod outliers;
pub mod relational;
pub mod search;

pub use error::{Error, Result};
pub use instance::{
    clustering_cost, validate_solution, Bound, Claim, GeneralInstance, GeometricInstance, Instance, Metric, Params, Rect, SetSystem,
    TriSolution, ValidityReport,
};
