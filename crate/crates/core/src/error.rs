use alloc::string::String;
use core::fmt;

use crate::experiment::Treatment;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong in the core crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two sequences that must be paired have different lengths.
    LengthMismatch { expected: usize, found: usize },
    /// A response or parameter is NaN or infinite.
    NonFinite,
    /// A sample vector has no units.
    EmptySample,
    /// A unit identifier appears twice in a sample.
    DuplicateUnit(usize),
    /// A 1-based unit identifier or position is outside `1..=bound`.
    IndexOutOfRange { index: usize, bound: usize },
    /// An arm has fewer observations than the procedure needs.
    ArmTooSmall { treatment: Treatment, required: usize, found: usize },
    /// Explicit design probabilities are negative, do not sum to one, or the
    /// support has duplicates.
    InvalidDesign(String),
    /// A first-order inclusion probability is zero where it must be positive.
    ZeroInclusion { treatment: Treatment, position: usize },
    /// Exact enumeration was requested over a support larger than the cap.
    /// `support` is `None` when the size does not even fit in 128 bits.
    EnumerationTooLarge { support: Option<u128>, cap: u128 },
    /// A binomial coefficient does not fit in 128 bits.
    BinomialOverflow { n: u64, k: u64 },
    /// An argument is outside the domain of the function.
    Domain(&'static str),
    /// Too few values to compute the quantity.
    InsufficientData { required: usize, found: usize },
    /// The data make the statistic undefined (for example a zero standard
    /// error with a nonzero difference).
    DegenerateData(&'static str),
    /// The procedure is not defined for the given design.
    UnsupportedDesign(&'static str),
    /// The null distribution exists but cannot be computed from observed data.
    NoncomputableDistribution,
    /// A series or continued fraction failed to converge.
    NonConvergence(&'static str),
    /// The requested engine cannot produce a p-value for this procedure.
    EngineNotApplicable(&'static str),
    /// Monte Carlo budget below the minimum of 1000 draws.
    BudgetTooSmall(u64),
    /// A named scenario or fixed vector does not exist.
    NotFound(String),
}

pub(crate) const NONCOMPUTABLE_EXPLANATION: &str = "the selection-based null distribution of the \
difference statistic depends on y[1.P, 2.P], which the observed data do not determine even under \
the sharp population null: for any sample s' != s some unit has both potential values unobserved. \
Use fisher_randomization_test (inference about the sampled units) or neyman_selection_test \
(approximate, population averages) instead";

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::NonFinite => f.write_str("non-finite value"),
            Error::EmptySample => f.write_str("sample is empty"),
            Error::DuplicateUnit(id) => write!(f, "unit {id} appears more than once in the sample"),
            Error::IndexOutOfRange { index, bound } => {
                write!(f, "index {index} outside 1..={bound}")
            }
            Error::ArmTooSmall { treatment, required, found } => write!(
                f,
                "treatment {treatment} arm has {found} observation(s), at least {required} required"
            ),
            Error::InvalidDesign(msg) => write!(f, "invalid design: {msg}"),
            Error::ZeroInclusion { treatment, position } => write!(
                f,
                "design assigns treatment {treatment} to position {position} with probability 0 \
                 (first-order inclusion probabilities must be positive)"
            ),
            Error::EnumerationTooLarge { support, cap } => match support {
                Some(size) => write!(
                    f,
                    "support has {size} points, above the enumeration cap of {cap}; use a Monte Carlo engine"
                ),
                None => write!(
                    f,
                    "support exceeds 2^128 points, above the enumeration cap of {cap}; use a Monte Carlo engine"
                ),
            },
            Error::BinomialOverflow { n, k } => write!(f, "C({n}, {k}) does not fit in 128 bits"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::InsufficientData { required, found } => {
                write!(f, "need at least {required} values, found {found}")
            }
            Error::DegenerateData(msg) => write!(f, "degenerate data: {msg}"),
            Error::UnsupportedDesign(msg) => write!(f, "unsupported design: {msg}"),
            Error::NoncomputableDistribution => {
                write!(f, "no exact Fisher selection test: {NONCOMPUTABLE_EXPLANATION}")
            }
            Error::NonConvergence(what) => write!(f, "{what} did not converge"),
            Error::EngineNotApplicable(msg) => write!(f, "engine not applicable: {msg}"),
            Error::BudgetTooSmall(b) => {
                write!(f, "Monte Carlo budget {b} is below the minimum of 1000")
            }
            Error::NotFound(what) => write!(f, "not found: {what}"),
        }
    }
}

impl core::error::Error for Error {}
