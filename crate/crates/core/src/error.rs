use core::fmt;

use crate::lp::LpStatus;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// First violated metric invariant, with the offending indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricError {
    DimensionMismatch { expected: usize, found: usize },
    NotFinite { i: usize, j: usize },
    Negative { i: usize, j: usize },
    NonzeroDiagonal { i: usize },
    Asymmetric { i: usize, j: usize },
    Triangle { i: usize, h: usize, j: usize },
    BudgetOutOfRange { k: usize, n: usize },
}

impl fmt::Display for MetricError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MetricError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected} entries, found {found}")
            }
            MetricError::NotFinite { i, j } => write!(f, "distance ({i},{j}) is not finite"),
            MetricError::Negative { i, j } => write!(f, "distance ({i},{j}) is negative"),
            MetricError::NonzeroDiagonal { i } => write!(f, "distance ({i},{i}) is not zero"),
            MetricError::Asymmetric { i, j } => write!(f, "distances ({i},{j}) and ({j},{i}) differ"),
            MetricError::Triangle { i, h, j } => {
                write!(f, "triangle inequality violated: d({i},{j}) > d({i},{h}) + d({h},{j})")
            }
            MetricError::BudgetOutOfRange { k, n } => {
                write!(f, "k < n violated: need 1 <= k < n, got k={k}, n={n}")
            }
        }
    }
}

impl core::error::Error for MetricError {}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    Metric(MetricError),
    LengthMismatch { expected: usize, found: usize },
    EmptyCenters,
    CenterOutOfRange { index: usize, n: usize },
    InvalidWeights(&'static str),
    InvalidParameter(&'static str),
    Lp(LpStatus),
    /// Every proxy distance is zero, so the Lagrangian search cannot separate
    /// center counts; callers handle this case directly.
    ZeroProxy,
    LambdaCap,
    BisectionStalled { lo: f64, hi: f64 },
    BudgetOutsideBracket { k: usize, k1: usize, k2: usize },
    Certificate { what: &'static str, lhs: f64, rhs: f64 },
    OracleCap { subsets: u128, cap: u128 },
    GuessCap { guesses: u128, cap: u128 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Metric(e) => write!(f, "invalid metric: {e}"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::EmptyCenters => f.write_str("center set is empty"),
            Error::CenterOutOfRange { index, n } => {
                write!(f, "center {index} out of range for {n} points")
            }
            Error::InvalidWeights(why) => write!(f, "invalid weights: {why}"),
            Error::InvalidParameter(why) => write!(f, "invalid parameter: {why}"),
            Error::Lp(status) => write!(f, "LP solve failed: {status:?}"),
            Error::ZeroProxy => f.write_str("all proxy distances are zero"),
            Error::LambdaCap => f.write_str("facility price exceeded 2^64 without reaching k centers"),
            Error::BisectionStalled { lo, hi } => {
                write!(f, "price bisection stalled in [{lo}, {hi}]")
            }
            Error::BudgetOutsideBracket { k, k1, k2 } => {
                write!(f, "k={k} is not strictly between k2={k2} and k1={k1}")
            }
            Error::Certificate { what, lhs, rhs } => {
                write!(f, "certificate violated ({what}): {lhs} > {rhs}")
            }
            Error::OracleCap { subsets, cap } => {
                write!(f, "oracle would enumerate {subsets} subsets (cap {cap})")
            }
            Error::GuessCap { guesses, cap } => {
                write!(f, "guess enumeration has {guesses} guesses (cap {cap})")
            }
        }
    }
}

impl core::error::Error for Error {}

impl From<MetricError> for Error {
    fn from(e: MetricError) -> Self {
        Error::Metric(e)
    }
}
