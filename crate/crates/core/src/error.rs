use std::path::PathBuf;

use thiserror::Error;

use crate::graph::{ValidationReport, VertexId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid graph: {0}")]
    Validation(ValidationReport),

    #[error("unknown graph family `{0}`")]
    UnknownFamily(String),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("function has no value at vertex {0}")]
    Coverage(VertexId),

    #[error("vertex {0} is not part of the operator's vertex set")]
    UnknownVertex(VertexId),

    #[error("generator is not spherically symmetric: {0}")]
    Asymmetry(String),

    #[error("empty vertex set")]
    EmptySet,

    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("input must be real-valued (vertex {0} has a non-zero imaginary part)")]
    NonReal(VertexId),

    #[error("problem too large: {0}")]
    SizeCap(String),

    #[error("no boundary point along this ray: {0}")]
    NotCauchy(String),
}
