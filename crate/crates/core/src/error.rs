use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("negative cost on line {line}")]
    NegativeCost { line: usize },
    #[error("endpoint {vertex} out of range for {n} vertices")]
    EndpointOutOfRange { vertex: usize, n: usize },
    #[error("link {id} joins vertex {vertex} to itself")]
    LoopLink { id: usize, vertex: usize },
    #[error("a ring needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("unknown link id {0}")]
    UnknownLink(usize),
    #[error("cost arithmetic overflowed")]
    Overflow,
    #[error("instance is infeasible: the link set does not cover every 2-cut")]
    Infeasible,
    #[error("directed link set is not a directed solution")]
    NotDirectedSolution,
    #[error("directed solution violates the arborescence structure: {0}")]
    Structure(String),
    #[error("link set is not connected in the link intersection graph")]
    NotConnected,
    #[error("link {link} has no endpoint in cut [{lo}, {hi}]")]
    LinkOutsideCut { link: usize, lo: usize, hi: usize },
    #[error("patterns are not compatible")]
    Incompatible,
    #[error("not a cactus: {0}")]
    NotCactus(String),
    #[error("epsilon {0} is outside the allowed range")]
    EpsilonOutOfRange(String),
    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("decomposition check failed: {0}")]
    Decomposition(String),
    #[error("algorithm invariant violated: {0}")]
    InvariantViolated(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
