//! Error type shared by all modules.

use core::fmt;

/// Everything that can go wrong when building problems, evaluating
/// stepsize rules, or running the simplex dynamics.
///
/// Runtime blow-ups inside the solver loop (overflow to `inf`/`NaN`)
/// are *not* errors: the solver reports them through
/// [`Status::NumericalFailure`](crate::solver::Status). Errors are for
/// malformed inputs and for rules queried in states where they are
/// undefined.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An eigenvalue is zero, negative, NaN, or infinite.
    NonPositiveEigenvalue {
        /// Index of the offending entry (0-based).
        index: usize,
        /// The offending value.
        value: f64,
    },
    /// Eigenvalues must be sorted in ascending order.
    UnsortedSpectrum {
        /// First index where the order breaks (0-based).
        index: usize,
    },
    /// Two slices that must have equal length do not.
    DimensionMismatch {
        /// Expected length.
        expected: usize,
        /// Actual length.
        got: usize,
    },
    /// A structured spectrum family was asked for an unknown id.
    UnknownSpectrumSet {
        /// The id (valid ids are 1..=7).
        id: u8,
    },
    /// `n` is too small to populate every index block of the requested
    /// structured spectrum family.
    SpectrumTooSmall {
        /// The family id.
        id: u8,
        /// The requested dimension.
        n: usize,
    },
    /// A scalar parameter is outside its documented range.
    InvalidParameter {
        /// Name of the parameter.
        name: &'static str,
        /// The rejected value.
        value: f64,
    },
    /// Random sampling failed to produce strictly distinct interior
    /// eigenvalues after many retries (practically unreachable).
    SamplingFailed,
    /// A stepsize rule was evaluated at a zero gradient.
    ZeroGradient,
    /// A two-point rule needs the previous iterate, and the state holds
    /// none.
    MissingHistory,
    /// The state does not carry moments of high enough order for the
    /// requested rule.
    MomentsUnavailable {
        /// Moment order required (`j` in `g'A^j g`).
        needed: usize,
        /// Highest order present.
        have: usize,
    },
    /// The 2x2 compression passed to the short-step rule is not
    /// symmetric positive definite.
    NotSpd,
    /// A `Psi` given as a per-eigenvalue table cannot be applied to a
    /// rotated (implicit) problem, and fractional monomial powers have
    /// no matrix–vector realization.
    PsiNotRepresentable,
    /// Simplex weights are empty, negative, or sum to zero.
    InvalidWeights,
    /// The map `T` is undefined at single-eigenvalue support (every
    /// residual `lambda_i - gamma` vanishes).
    SingleSupport,
    /// Cycle iteration needs strictly positive weight on both extreme
    /// eigenvalues of the spectrum.
    ZeroExtremeWeight,
    /// The two-cycle iteration did not settle within the step budget.
    CycleNotConverged {
        /// Last observed even-subsequence residual.
        residual: f64,
    },
    /// The limiting support did not concentrate on the extreme
    /// eigenvalue pair.
    UnexpectedSupport {
        /// Indices of the two heaviest limiting weights (0-based).
        support: (usize, usize),
    },
    /// A trace component needed by an estimator vanished exactly.
    ComponentVanished {
        /// Which eigencomponent (0-based).
        index: usize,
    },
    /// Not enough trailing iterates to form the requested tail average.
    TailTooShort {
        /// Tail length requested.
        requested: usize,
        /// Tail length available.
        available: usize,
    },
    /// A spectral bound was asked for with no interior eigenvalues.
    NoInteriorEigenvalues,
    /// A schedule string did not parse.
    BadSchedule {
        /// Why the string was rejected.
        reason: &'static str,
    },
    /// The requested trace option does not apply to this problem or
    /// schedule (e.g. eigencomponent capture on a rotated matrix).
    UnsupportedTrace {
        /// What was refused.
        reason: &'static str,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPositiveEigenvalue { index, value } => {
                write!(f, "eigenvalue {index} is {value}, expected a finite positive value")
            }
            Error::UnsortedSpectrum { index } => {
                write!(f, "spectrum is not ascending at index {index}")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::UnknownSpectrumSet { id } => {
                write!(f, "unknown spectrum set id {id} (valid ids are 1..=7)")
            }
            Error::SpectrumTooSmall { id, n } => {
                write!(f, "n = {n} is too small for the index blocks of spectrum set {id}")
            }
            Error::InvalidParameter { name, value } => {
                write!(f, "parameter {name} = {value} is outside its valid range")
            }
            Error::SamplingFailed => {
                write!(f, "could not sample strictly distinct interior eigenvalues")
            }
            Error::ZeroGradient => write!(f, "stepsize rule evaluated at a zero gradient"),
            Error::MissingHistory => {
                write!(f, "rule needs the previous iterate but the state has no history")
            }
            Error::MomentsUnavailable { needed, have } => {
                write!(f, "rule needs gradient moments up to order {needed}, state has {have}")
            }
            Error::NotSpd => write!(f, "2x2 compression is not symmetric positive definite"),
            Error::PsiNotRepresentable => {
                write!(f, "Psi has no matrix-vector realization on an implicit (rotated) matrix")
            }
            Error::InvalidWeights => {
                write!(f, "weights must be a nonempty, nonnegative vector with positive sum")
            }
            Error::SingleSupport => {
                write!(f, "the simplex map is undefined at single-eigenvalue support")
            }
            Error::ZeroExtremeWeight => {
                write!(f, "cycle iteration needs positive weight on both extreme eigenvalues")
            }
            Error::CycleNotConverged { residual } => {
                write!(f, "two-cycle iteration did not converge (residual {residual:e})")
            }
            Error::UnexpectedSupport { support } => {
                write!(
                    f,
                    "limiting support concentrated on indices {} and {}, not the extremes",
                    support.0, support.1
                )
            }
            Error::ComponentVanished { index } => {
                write!(f, "eigencomponent {index} vanished exactly along the trace")
            }
            Error::TailTooShort { requested, available } => {
                write!(f, "tail of {requested} iterates requested, only {available} available")
            }
            Error::NoInteriorEigenvalues => {
                write!(f, "no interior eigenvalues: the spectral bound is undefined")
            }
            Error::BadSchedule { reason } => write!(f, "bad schedule string: {reason}"),
            Error::UnsupportedTrace { reason } => write!(f, "unsupported trace option: {reason}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
