use unsieved_core::Error as CoreError;

/// Everything an experiment can fail with, mapped onto process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("configuration: {0}")]
    Config(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("format: {0}")]
    Format(String),
}

pub type LabResult<T> = Result<T, LabError>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;
/// IO and serialization failures.
pub const EXIT_IO: i32 = 1;

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Core(e) => match e {
                CoreError::BudgetExceeded { .. }
                | CoreError::ExplosionGuard { .. }
                | CoreError::IntervalBlowup { .. }
                | CoreError::Overflow(_)
                | CoreError::ToleranceUnreachable { .. }
                | CoreError::DiscretizationInconclusive(_)
                | CoreError::ResolutionTooCoarse { .. } => EXIT_BUDGET,
                CoreError::InvalidResidue { .. }
                | CoreError::InvalidArgument(_)
                | CoreError::PreconditionFail(_)
                | CoreError::BoundaryTie(_) => EXIT_PRECONDITION,
            },
            LabError::Config(_) => EXIT_PRECONDITION,
            LabError::Invariant(_) => EXIT_INVARIANT,
            LabError::Io(_) | LabError::Format(_) => EXIT_IO,
        }
    }
}

pub fn config_err(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}
