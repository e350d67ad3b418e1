use alloc::string::String;
use core::fmt;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A percentile was requested against an empty reference cohort.
    EmptyCohort,
    /// A score fell outside `0..=100`.
    ScoreOutOfRange { id: String, score: i64 },
    /// An identifier was empty or contained characters outside `[A-Za-z0-9_-]`.
    InvalidId(String),
    /// Two patients (or two organs) share an identifier.
    DuplicateId(String),
    /// A donor or recipient profile violated its bounds.
    InvalidProfile(&'static str),
    /// A scenario or weight configuration is unusable.
    InvalidConfig(&'static str),
    /// An allocation does not fit the instance it is checked against.
    InfeasibleAllocation(String),
    /// An exhaustive routine was asked to enumerate a too-large instance.
    InstanceTooLarge { min_side: usize, limit: usize },
    /// The patient id is not part of the instance.
    UnknownPatient(String),
    /// A trace and an offline allocation come from different instances.
    ProvenanceMismatch(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyCohort => f.write_str("no reference population: cohort is empty"),
            Error::ScoreOutOfRange { id, score } => {
                write!(f, "score {score} of `{id}` is outside 0..=100")
            }
            Error::InvalidId(id) => write!(f, "invalid id `{id}` (expected [A-Za-z0-9_-]+)"),
            Error::DuplicateId(id) => write!(f, "duplicate id `{id}`"),
            Error::InvalidProfile(msg) => write!(f, "invalid profile: {msg}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::InfeasibleAllocation(msg) => write!(f, "infeasible allocation: {msg}"),
            Error::InstanceTooLarge { min_side, limit } => write!(
                f,
                "instance too large for exhaustive enumeration: smaller side {min_side} exceeds {limit}"
            ),
            Error::UnknownPatient(id) => write!(f, "unknown patient `{id}`"),
            Error::ProvenanceMismatch(msg) => {
                write!(f, "trace and offline allocation disagree: {msg}")
            }
        }
    }
}

impl core::error::Error for Error {}
