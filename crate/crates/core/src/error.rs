use alloc::string::String;
use core::fmt;

/// Errors produced by the numerical routines.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Two operands have incompatible shapes.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// A NaN or infinite value was supplied or produced.
    NonFinite {
        what: &'static str,
    },
    /// A pivot column of the regression matrix vanished during projection.
    RankDeficient {
        column: usize,
        squared_norm: f64,
    },
    /// An elimination pivot was not strictly positive. `step` is the 1-based
    /// index of the variable being eliminated.
    NotPositiveDefinite {
        step: usize,
        pivot: f64,
    },
    /// A matrix that must be inverted is singular.
    Singular,
    /// A solution entry that was not forward-substituted was requested.
    Unsolved {
        index: usize,
    },
    /// An argument is outside its admissible range.
    InvalidArgument(&'static str),
    /// A size or index is outside `1..=max` (or `0..max` for indices).
    OutOfRange {
        what: &'static str,
        value: usize,
        max: usize,
    },
    UnknownDataset(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(
                f,
                "dimension mismatch for {what}: expected {expected}, found {found}"
            ),
            Error::NonFinite { what } => write!(f, "non-finite value in {what}"),
            Error::RankDeficient {
                column,
                squared_norm,
            } => write!(
                f,
                "matrix is rank deficient: projected column {} has squared norm {squared_norm:e}",
                column + 1
            ),
            Error::NotPositiveDefinite { step, pivot } => write!(
                f,
                "matrix is not positive definite: pivot {pivot:e} at elimination of variable {step}"
            ),
            Error::Singular => f.write_str("matrix is singular"),
            Error::Unsolved { index } => {
                write!(f, "variable {} was not solved for", index + 1)
            }
            Error::InvalidArgument(msg) => f.write_str(msg),
            Error::OutOfRange { what, value, max } => {
                write!(f, "{what} {value} out of range (max {max})")
            }
            Error::UnknownDataset(name) => write!(f, "unknown dataset `{name}`"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
