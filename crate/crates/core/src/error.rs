use alloc::string::String;
use core::fmt;

/// Failure modes across the crate.
///
/// Variants carry enough context to report the violated hypothesis by name;
/// messages state what was required and what was measured.
#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// Grid construction rejected (size not a power of two, size below 16,
    /// non-positive extent).
    InvalidGrid(String),
    /// A sample is NaN or infinite.
    NonFiniteSample { index: usize },
    /// Two grid functions live on different grids.
    SpecMismatch,
    /// Lebesgue exponent outside `[1, inf]`.
    InvalidExponent(f64),
    /// Rescaling would leave the kernel support on fewer than the minimum
    /// number of grid points per axis.
    UnderResolved { eps: f64, points_per_axis: usize },
    /// Rescaling drifted the discrete mass beyond the relative tolerance.
    MassDrift { expected: f64, actual: f64 },
    /// Kernel mass must equal 1 (normalization hypothesis on mollifiers).
    MassNotUnit { mass: f64 },
    /// Kernel parameters rejected (non-positive variance or radius,
    /// degenerate corners, empty mixture).
    InvalidKernel(String),
    /// Moment order must satisfy `1 <= k <= k_max`.
    InvalidMomentOrder { k: usize, k_max: usize },
    /// Filter transition window must be positive and contained in (1, 2).
    InvalidFilter(String),
    /// Grid resolves fewer than the minimum number of dyadic bands.
    GridTooCoarse { levels: i32 },
    /// Besov parameters rejected (`s <= 0`).
    InvalidSmoothness(f64),
    /// Epsilon grid parameters rejected (`j_max < 3` or `m < 1`).
    InvalidEpsilonGrid(String),
    /// The convergence test function must have non-vanishing discrete mean.
    ZeroMeanEta { mean: f64 },
    /// The cancellation test function must have vanishing discrete mean.
    NonZeroMeanPsi { mean: f64 },
    /// Too few usable points for a regression fit.
    TooFewPoints { found: usize, needed: usize },
    /// Schur analysis operates on entrywise-nonnegative matrices.
    NegativeEntry { row: usize, col: usize },
    /// Matrix rows have inconsistent lengths or the matrix is empty.
    BadMatrixShape,
    /// Linear system for moment-engineered weights is singular.
    SingularSystem,
    /// Requested scale parameter outside `(0, 1]`.
    InvalidScale(f64),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGrid(why) => write!(f, "invalid grid: {why}"),
            Error::NonFiniteSample { index } => {
                write!(f, "sample {index} is not finite")
            }
            Error::SpecMismatch => write!(f, "grid functions live on different grids"),
            Error::InvalidExponent(p) => {
                write!(f, "Lebesgue exponent must lie in [1, inf], got {p}")
            }
            Error::UnderResolved { eps, points_per_axis } => write!(
                f,
                "scale eps = {eps} leaves the kernel support on {points_per_axis} \
                 grid points per axis (minimum 4); refine the grid or raise eps"
            ),
            Error::MassDrift { expected, actual } => write!(
                f,
                "rescaled kernel mass {actual} drifted from {expected} beyond \
                 the 1e-3 relative tolerance"
            ),
            Error::MassNotUnit { mass } => write!(
                f,
                "kernel mass is {mass}, but mollifiers must integrate to 1"
            ),
            Error::InvalidKernel(why) => write!(f, "invalid kernel: {why}"),
            Error::InvalidMomentOrder { k, k_max } => {
                write!(f, "moment order {k} outside 1..={k_max}")
            }
            Error::InvalidFilter(why) => write!(f, "invalid filter bank: {why}"),
            Error::GridTooCoarse { levels } => write!(
                f,
                "grid resolves only {levels} dyadic bands; at least 3 required"
            ),
            Error::InvalidSmoothness(s) => {
                write!(f, "smoothness parameter must be positive, got {s}")
            }
            Error::InvalidEpsilonGrid(why) => write!(f, "invalid epsilon grid: {why}"),
            Error::ZeroMeanEta { mean } => write!(
                f,
                "test function has discrete mean {mean}; the convergence test \
                 requires a non-vanishing integral"
            ),
            Error::NonZeroMeanPsi { mean } => write!(
                f,
                "test function has discrete mean {mean}; the cancellation test \
                 requires mean zero (below 1e-10)"
            ),
            Error::TooFewPoints { found, needed } => write!(
                f,
                "regression needs {needed} points above the noise floor, found {found}"
            ),
            Error::NegativeEntry { row, col } => write!(
                f,
                "matrix entry ({row}, {col}) is negative; bounds apply to |K|"
            ),
            Error::BadMatrixShape => write!(f, "matrix is empty or ragged"),
            Error::SingularSystem => write!(f, "moment system is singular"),
            Error::InvalidScale(eps) => {
                write!(f, "scale parameter must lie in (0, 1], got {eps}")
            }
        }
    }
}

impl core::error::Error for Error {}
