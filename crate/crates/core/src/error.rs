use thiserror::Error;

/// Errors raised across the crate.
///
/// Variants are grouped by the layer that produces them; callers that only
/// care about validation vs. check failures can use [`Error::is_validation`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid functions live on different grids")]
    GridMismatch,
    #[error("non-finite value at node {node}")]
    NonFiniteValue { node: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("exponent p = {0} is not in [1, inf]")]
    InvalidExponent(f64),
    #[error("ladder invalid: {0}")]
    InvalidLadder(String),
    #[error("epsilon {epsilon} is under-resolved: {nodes_across:.2} nodes across the support, need {required}")]
    UnderResolved {
        epsilon: f64,
        nodes_across: f64,
        required: usize,
    },
    #[error("epsilon {epsilon} does not fit inside the domain")]
    EpsilonTooLarge { epsilon: f64 },
    #[error("no node is farther than epsilon = {epsilon} from the boundary")]
    EmptyTrustedInterior { epsilon: f64 },
    #[error("multi-index order {order} exceeds the supported maximum of 3")]
    OrderUnsupported { order: usize },
    #[error("test-function panel invalid: {0}")]
    InvalidPanel(String),
    #[error("derivative unavailable for alpha {alpha:?}: {reason}")]
    DerivativeUnavailable { alpha: Vec<usize>, reason: String },
    #[error("unsupported function family: {0}")]
    UnsupportedFamily(String),
    #[error("catalog invalid: {0}")]
    InvalidCatalog(String),
    #[error("involution undefined: essential infimum {ess_inf:e} is below {eta:e}")]
    InvolutionUndefined { ess_inf: f64, eta: f64 },
    #[error("relation is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("unknown object {0}")]
    UnknownObject(usize),
    #[error("unknown arrow {0}")]
    UnknownArrow(usize),
    #[error("{objects} objects exceed the exhaustive bisection limit of 8")]
    TooManyObjects { objects: usize },
    #[error("invalid Haar system: {0}")]
    InvalidHaar(String),
    #[error("left translation by arrow {arrow} is not a bijection of fibres ({} unmatched arrows)", unmatched.len())]
    TranslationNotBijective { arrow: usize, unmatched: Vec<usize> },
    #[error("section length {got} does not match {expected} arrows")]
    SectionMismatch { expected: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by bad inputs rather than failed checks.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::TranslationNotBijective { .. } | Error::Io(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
