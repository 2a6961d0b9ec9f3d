use thiserror::Error;

/// Everything that can go wrong across the library.
///
/// The split matters to callers: `RankUndefined` is a perfectly normal answer
/// for inputs sharing a factor with `a2`, while `CapNotReached` means a search
/// budget was exhausted and says nothing about whether the rank exists.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid coefficients (a1, a2) = ({a1}, {a2}): {reason}")]
    InvalidCoefficients { a1: i64, a2: i64, reason: &'static str },

    #[error("degenerate sequence for (a1, a2) = ({a1}, {a2}): {reason}")]
    DegenerateSequence { a1: i64, a2: i64, reason: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// gcd(m, a2) > 1, so no term of the sequence is divisible by m.
    #[error("rank of appearance undefined for m = {m}: gcd(m, a2) > 1")]
    RankUndefined { m: u64 },

    /// The oracle scanned `cap` terms without finding a zero residue.
    #[error("no zero residue modulo {m} within {cap} terms")]
    CapNotReached { m: u64, cap: u64 },

    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),

    /// An assembled candidate failed its membership check. This is fail-closed
    /// on purpose: emitting an unverified certificate would be a silent bug.
    #[error("construction failure: {0}")]
    ConstructionFailure(String),

    #[error("snapshot rejected: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line frontend.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapacityExceeded(_) => 3,
            Error::ConstructionFailure(_) | Error::CapNotReached { .. } | Error::Internal(_) => 4,
            _ => 2,
        }
    }
}
