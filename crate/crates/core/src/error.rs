use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed groupoid: {0}")]
    MalformedGroupoid(String),
    #[error("missing composite for composable pair ({0}, {1})")]
    MissingComposite(String, String),
    #[error("not a group action: {0}")]
    NotAnAction(String),
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("unknown unit {0:?}")]
    UnknownUnit(String),
    #[error("unknown arrow {0:?}")]
    UnknownArrow(String),
    #[error("not a cocycle: c({a}{b}) != c({a}) + c({b})", a = .0, b = .1)]
    NotACocycle(String, String),
    #[error("elements belong to different groupoids")]
    GroupoidMismatch,
    #[error("operation requires float mode")]
    ExactModeUnsupported,
    #[error("operation requires exact mode")]
    FloatModeUnsupported,
    #[error("functional is not hermitian at arrow {0:?}")]
    NotHermitian(String),
    #[error("temperature parameter must be a positive rational, got {0}")]
    InvalidTemperature(String),
    #[error("character table verification failed: {0}")]
    VerificationFailed(String),
    #[error("trace supplied for the wrong group: {0}")]
    TraceOnWrongGroup(String),
    #[error("measure charges orbit {0} with nontrivial isotropy but no trace was given")]
    MissingTrace(usize),
    #[error("classification and oracle describe different instances")]
    InstanceMismatch,
    #[error("moment index {m} exceeds cutoff {cutoff}")]
    CutoffExceeded { m: i64, cutoff: usize },
    #[error("not a trace: {0}")]
    NotATrace(crate::crossed::TraceViolation),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    #[error("group is not abelian")]
    NonAbelian,
    #[error("ideal class {0} has no ideals of norm <= {1}")]
    EmptyClassInTruncation(String, u64),
    #[error("unknown {kind} strategy {name:?}; available: {available}")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
}

impl Error {
    /// Schema errors are input-format problems; everything else is a domain error.
    pub fn is_schema(&self) -> bool {
        matches!(self, Error::Schema { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
