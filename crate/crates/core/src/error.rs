use alloc::string::String;
use core::fmt;

/// Errors surfaced by the estimation pipeline.
///
/// Solver errors carry enough context (stage, residual, component index)
/// for callers to report what failed without re-running the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument was outside its documented domain.
    InvalidArgument(String),
    /// A graphon evaluation left `[0, 1]` by more than the floating-point
    /// tolerance.
    ModelValidity { value: f64 },
    /// The exact-count enumeration would exceed the configured step budget.
    ResourceBudget { needed: u64, budget: u64 },
    /// Moment normalization requires `n > r + 2`.
    InsufficientNodes { n: usize, rank: usize },
    /// The eigenvalue system did not converge within the restart budget.
    SolverFailure { residual: f64 },
    /// Two recovered eigenvalues are closer than the strict-ordering gap.
    Degeneracy { gap: f64 },
    /// A linear system's condition number exceeded the acceptance gate.
    IllConditioned { cond: f64 },
    /// A component integral estimate is (numerically) zero, so the
    /// corresponding node values cannot be identified.
    UnidentifiableComponent { component: usize },
    /// The graph has no edges, so degree-based scaling is undefined.
    DegenerateGraph,
    /// A pipeline stage failed; wraps the underlying error.
    Stage { stage: &'static str, source: alloc::boxed::Box<Error> },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: alloc::boxed::Box::new(self) }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::ModelValidity { value } => {
                write!(f, "graphon value {value} outside [0, 1]")
            }
            Error::ResourceBudget { needed, budget } => {
                write!(f, "exact count needs ~{needed} steps, budget is {budget}")
            }
            Error::InsufficientNodes { n, rank } => {
                write!(f, "n = {n} too small for rank {rank} moments")
            }
            Error::SolverFailure { residual } => {
                write!(f, "eigenvalue solver failed to converge (best residual {residual:e})")
            }
            Error::Degeneracy { gap } => {
                write!(f, "eigenvalue gap {gap:e} violates strict ordering")
            }
            Error::IllConditioned { cond } => {
                write!(f, "linear system condition number {cond:e} too large")
            }
            Error::UnidentifiableComponent { component } => {
                write!(f, "component {component} has zero integral estimate")
            }
            Error::DegenerateGraph => write!(f, "graph has no edges"),
            Error::Stage { stage, source } => write!(f, "{stage}: {source}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
