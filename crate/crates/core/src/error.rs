use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix dimension must be at least 1")]
    ZeroDimension,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    #[error("dimension n={0} is too small (need n >= 2)")]
    DimensionTooSmall(usize),
    #[error("S must be nonempty")]
    EmptyS,
    #[error("T must be nonempty")]
    EmptyT,
    #[error("element {value} of {set} lies outside [1, {max}]")]
    ElementOutOfRange { set: char, value: i64, max: usize },
    #[error("invalid spec literal {literal:?}: {reason}")]
    InvalidLiteral { literal: String, reason: String },

    #[error("the competition sequence starts at m = 1")]
    ZeroStep,
    #[error("no limit exists: sequence period is {0}")]
    NoLimit(usize),
    #[error("multiplication budget of {0} exhausted before the sequence repeated")]
    BudgetExceeded(usize),

    #[error("vertex {vertex} outside [1, {n}]")]
    VertexOutOfRange { vertex: i64, n: usize },
    #[error("expected {expected} higher-index counts for {set}, got {got}")]
    CountArity {
        set: char,
        expected: usize,
        got: usize,
    },
    #[error("walk endpoint {endpoint} falls outside [1, {n}]")]
    EndpointOutOfRange { endpoint: i64, n: usize },
    #[error("no ordering of the steps keeps every position inside [1, {n}]")]
    NoValidOrdering { n: usize },
    #[error("requested {requested} {kind}1-arcs but the base walk already uses {used}")]
    CountTooSmall {
        kind: char,
        requested: usize,
        used: usize,
    },
    #[error("conditions max S + min T <= n and min S + max T <= n are required")]
    ConditionsUnmet,
    #[error("malformed walk: {0}")]
    MalformedWalk(String),
}
