use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    Validation(String),

    #[error(
        "edge {edge} ({first} - {second}) has length {length} but the two endpoints are \
         only {distance} apart through the rest of the graph"
    )]
    MetricEdgeViolation {
        edge: usize,
        first: String,
        second: String,
        length: f64,
        distance: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("the edge set is empty")]
    EmptyEdgeSet,

    #[error("graph is not a tree")]
    NotATree,

    #[error("graph is not a cactus: {0}")]
    NotACactus(String),

    #[error("graph is not uniform: edge lengths range over [{min}, {max}]")]
    NotUniform { min: f64, max: f64 },

    #[error("{what} would need {requested}, above the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("bound violated: {0}")]
    BoundViolation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
