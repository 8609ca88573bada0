use thiserror::Error;

/// Every failure the toolkit can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid vector set: {0}")]
    InvalidVectors(String),
    #[error("set does not dominate the clique: vertex {0} has no neighbour in it")]
    NotDominating(String),
    #[error("labels {0} and {1} are parallel rays")]
    DuplicateRay(String, String),
    #[error("label sets differ: {0}")]
    LabelMismatch(String),
    #[error("distinguished vertices are not an independent set: {0}")]
    InvalidDistinguished(String),
    #[error("search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
    #[error("graph is {{0,1}}-colourable, so it is not a KS graph")]
    NotKS,
    #[error("dimension {0} given, dimension 3 required")]
    NotDimensionThree(usize),
    #[error("edge {0}-{1} lies in no triangle; complete the bases first")]
    CompletionRequired(String, String),
    #[error("could not solve for phi: {0}")]
    SolveFailure(String),
    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),
    #[error("infeasible angles: {0}")]
    InfeasibleAngles(String),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("bad bases: {0}")]
    BadBases(String),
    #[error("frame vectors {0} and {1} collapse onto one ray")]
    RayCollapse(String, String),
    #[error("parameter bound violated: {0}")]
    BoundViolated(String),
    #[error("pattern {0} has arity {1}, expected {2}")]
    PatternArityMismatch(String, usize, usize),
    #[error("no partition into maximum cliques: {0}")]
    CoverNotFound(String),
    #[error("no channel with an entanglement advantage: {0}")]
    NoAdvantage(String),
    #[error("w* = {0} is outside (1,2)")]
    WStarOutOfRange(f64),
    #[error("{0} distinguished inputs cannot be independent under a cover by {1} cliques")]
    DistinguishedExceedsCover(usize, usize),
    #[error("external solver: {0}")]
    Solver(String),
    #[error("{0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
