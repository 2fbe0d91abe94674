//! Laplacians on weighted graphs `(V, b, c, m)` with Dirichlet, Neumann and
//! mixed boundary conditions, computed through finite exhaustions.

pub mod completeness;
pub mod error;
pub mod formal;
pub mod forms;
pub mod geometry;
pub mod graph;
pub mod harmonic;
pub mod linalg;
pub mod selftest;
pub mod spectral;
pub mod truncation;

pub use error::{Error, Result};
pub use graph::{
    build_family, combinatorial_ball, load_graph, radial_reduce, save_graph, validate, Exhaustion, Family,
    GraphGenerator, RadialProfile, Region, ValidationReport, VertexId, WeightedGraph,
};
