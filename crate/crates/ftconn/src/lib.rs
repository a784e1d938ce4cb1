//! A three-fault-tolerant connectivity oracle for undirected graphs.
//!
//! After near-linear preprocessing, the oracle answers whether two vertices
//! are connected once up to three vertices fail, how many connected
//! components remain, and whether the failed set is a vertex cut.

pub mod batch;
pub mod dsu;
pub mod graph;
pub mod oracle;
pub mod params;
pub mod tables;
pub mod tree;
pub mod verify;

pub use graph::{Graph, GraphError, Vertex};
pub use oracle::{Case, ComponentRef, FailureContext, Mutation, Oracle, OracleError};
