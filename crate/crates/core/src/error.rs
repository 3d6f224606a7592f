use crate::algebra::{AlgebraTag, GroundField};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("algebra mismatch: {0} vs {1}")]
    TagMismatch(AlgebraTag, AlgebraTag),
    #[error("ground field {field:?} does not embed in {tag}")]
    FieldNotEmbedded { field: GroundField, tag: AlgebraTag },
    #[error("coefficient vector has length {got}, expected {expected}")]
    BadLength { got: usize, expected: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("linearly dependent input: {0}")]
    Dependent(String),
    #[error("proportional pair: a·k = c·k")]
    ProportionalPair,
    #[error("inner products differ by {0:e}")]
    InnerProductMismatch(f64),
    #[error("norm violation: |x|^2 = {0}")]
    NotUnit(f64),
    #[error("element is not orthogonal to the image (defect {0:e})")]
    NotOrthogonal(f64),
    #[error("lines are not coplanar (defect {0:e})")]
    NotCoplanar(f64),
    #[error("incidence failure: {0}")]
    Incidence(String),
    #[error("ill-conditioned system: {0}")]
    IllConditioned(String),
    #[error("vertices belong to different geometry cases")]
    CaseMismatch,
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("not contractible: {0}")]
    NotContractible(String),
    #[error("move budget exceeded: {used} > {budget}")]
    BudgetExceeded { used: usize, budget: usize },
    #[error("search failed: {0}")]
    SearchFailed(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}
