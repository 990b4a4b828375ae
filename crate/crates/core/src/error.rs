use thiserror::Error;

/// Every failure the library can report. Each variant carries a stable
/// machine-readable code (see [`Error::code`]) used by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    BadPrime(u64),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("denominator vanishes at the origin; no power-series expansion exists")]
    NotExpandable,
    #[error("term budget exceeded: {needed} terms requested, ceiling is {ceiling}")]
    Budget { needed: u128, ceiling: u128 },
    #[error("zero input to resultant")]
    ZeroInput,
    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("numerator degree {degree} exceeds the invariant-space cap {cap}")]
    DegreeOverflow { degree: u32, cap: u32 },
    #[error("orbit closure exceeded the state budget ({reached} states reached)")]
    StateBudget { reached: usize },
    #[error("insufficient precision: need order {needed}, have {available}")]
    InsufficientPrecision { needed: usize, available: usize },
    #[error("series is zero up to the stored precision; valuation cannot be certified")]
    ZeroUpToPrecision,
    #[error("rank {low} at order {low_order} differs from rank {high} at order {high_order}")]
    RankUnstable {
        low: usize,
        high: usize,
        low_order: usize,
        high_order: usize,
    },
    #[error("transition matrix is singular")]
    SingularA,
    #[error("annihilator verification failed: residue at order {order}")]
    VerifyFail { order: usize },
    #[error("polynomial is inseparable in the last variable (derivative vanishes)")]
    Inseparable,
    #[error("resultant with the derivative vanishes identically (polynomial not squarefree)")]
    ResultantZero,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("certificate failed: {0}")]
    CertFail(String),
    #[error("bit budget exceeded: value needs about {needed_bits} bits, budget is {budget}")]
    BitBudget { needed_bits: u128, budget: u64 },
    #[error("family cannot be realized as a rational diagonal: {0}")]
    NotRealizable(String),
    #[error("malformed input: {0}")]
    Format(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Domain,
    Budget,
    Verification,
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::BadPrime(_) => "E_BAD_PRIME",
            Error::Syntax { .. } => "E_SYNTAX",
            Error::NotExpandable => "E_NOT_EXPANDABLE",
            Error::Budget { .. } => "E_BUDGET",
            Error::ZeroInput => "E_ZERO_INPUT",
            Error::DimMismatch { .. } => "E_DIM_MISMATCH",
            Error::DegreeOverflow { .. } => "E_DEGREE_OVERFLOW",
            Error::StateBudget { .. } => "E_STATE_BUDGET",
            Error::InsufficientPrecision { .. } => "E_INSUFFICIENT_PRECISION",
            Error::ZeroUpToPrecision => "E_ZERO_UP_TO_PRECISION",
            Error::RankUnstable { .. } => "E_RANK_UNSTABLE",
            Error::SingularA => "E_SINGULAR_A",
            Error::VerifyFail { .. } => "E_VERIFY_FAIL",
            Error::Inseparable => "E_INSEPARABLE",
            Error::ResultantZero => "E_RESULTANT_ZERO",
            Error::Precondition(_) => "E_PRECONDITION",
            Error::CertFail(_) => "E_CERT_FAIL",
            Error::BitBudget { .. } => "E_BIT_BUDGET",
            Error::NotRealizable(_) => "E_NOT_REALIZABLE",
            Error::Format(_) => "E_FORMAT",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Budget { .. } | Error::StateBudget { .. } | Error::BitBudget { .. } => {
                ErrorClass::Budget
            }
            Error::VerifyFail { .. } | Error::CertFail(_) => ErrorClass::Verification,
            _ => ErrorClass::Domain,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
