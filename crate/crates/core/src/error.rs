use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what}: requested {requested}, ceiling is {ceiling}")]
    BudgetExceeded {
        what: &'static str,
        requested: u64,
        ceiling: u64,
    },
    #[error("enumeration exceeded its node budget of {budget}")]
    ExplosionGuard { budget: u64 },
    #[error("residue {a} is not invertible modulo {q}")]
    InvalidResidue { a: u64, q: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition failed: {0}")]
    PreconditionFail(String),
    #[error("boundary comparison is within the error bar: {0}")]
    BoundaryTie(String),
    #[error("tolerance {tol:e} unreachable within the refinement budget")]
    ToleranceUnreachable { tol: f64 },
    #[error("discretization could not certify the window: {0}")]
    DiscretizationInconclusive(String),
    #[error("sum set grew to {components} components")]
    IntervalBlowup { components: usize },
    #[error("error bar {error_bar:e} exceeds tolerance {tolerance:e}")]
    ResolutionTooCoarse { error_bar: f64, tolerance: f64 },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
