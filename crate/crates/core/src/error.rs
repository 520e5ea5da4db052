use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("({0}, {1}) is not a diagonal of the triangulation")]
    NotADiagonal(usize, usize),
    #[error("diagonal ({0}, {1}) is not flippable")]
    NotFlippable(usize, usize),
    #[error("apex {apex} does not see vertex {vertex}")]
    ApexNotVisible { apex: usize, vertex: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("more than {0} triangulations")]
    CapExceeded(usize),
    #[error("point is not in the flip-kernel right of the closing edge")]
    PointNotInKernel,
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("slide precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("{0} sinks exceed the solver cap of {1}")]
    TooManySinks(usize, usize),
    #[error("instance too large for brute force: {0}")]
    TooLarge(String),
    #[error("triangulation does not belong to a chain polygon: {0}")]
    WrongPolygon(String),
    #[error("chain path leaves the {0}x{0} grid")]
    PathOutOfRange(usize),
    #[error("not a flip traversal: {0}")]
    NotATraversal(String),
    #[error("sink ({0}, {1}) has an odd coordinate relative to the root")]
    OddSinkCoordinate(i64, i64),
    #[error("sink ({0}, {1}) is not covered")]
    SinkNotCovered(i64, i64),
    #[error("two sinks share the y-coordinate {0}")]
    DuplicateYCoordinate(i64),
    #[error("gadget placement failed: {0}")]
    GadgetPlacementFailed(String),
    #[error("invalid arborescence: {0}")]
    InvalidArborescence(String),
    #[error("replay failed at flip {index}: {reason}")]
    ReplayFailure { index: usize, reason: String },
    #[error("sequence of length {len} is not shorter than (d-1)^2 = {limit}")]
    BudgetTooLarge { len: usize, limit: usize },
    #[error("pipeline failed during {stage}: {reason}")]
    PipelineFailure { stage: &'static str, reason: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
