use core::fmt;

/// Failures raised by the numerical core.
///
/// Validation problems (bad parameters, grids, sites) are kept apart from
/// numerical failures so that front ends can map them to different exit
/// statuses.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter failed validation; the string names it and the constraint.
    InvalidParameter(&'static str),
    /// A grid was empty or not strictly ascending.
    InvalidGrid(&'static str),
    /// A site lies outside the region where the request is meaningful.
    SiteOutOfRange { site: i64, limit: i64 },
    /// The state vector has zero norm.
    ZeroState,
    /// Implicit QL did not converge within its iteration cap.
    NoConvergence { dimension: usize },
    /// The doubling test did not settle before the largest allowed truncation.
    TruncationNotConverged { half_width: usize, change: f64 },
    /// The coarse scan found its minimum on the bracket boundary.
    NoInteriorMinimum { lower: f64, upper: f64 },
    /// Two-level model with V = 0 and ε = F has no defined mixing angle.
    DegenerateTwoLevel,
    /// Norm of a propagated state drifted beyond tolerance.
    NormDrift { drift: f64 },
    /// The one-period propagator lost unitarity; a smaller step is needed.
    UnitarityDrift { drift: f64 },
    /// The trajectory has no interior maximum at the target site.
    NoInteriorMaximum { target_site: i64 },
    /// Too few eigenstates stay clear of the hard walls.
    NoInteriorStates { dimension: usize },
}

impl Error {
    /// True for input-validation errors, false for numerical failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::InvalidGrid(_)
                | Error::SiteOutOfRange { .. }
                | Error::ZeroState
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::InvalidGrid(what) => write!(f, "invalid grid: {what}"),
            Error::SiteOutOfRange { site, limit } => {
                write!(f, "site {site} outside the allowed interior |n| <= {limit}")
            }
            Error::ZeroState => write!(f, "state vector has zero norm"),
            Error::NoConvergence { dimension } => write!(
                f,
                "tridiagonal eigensolver did not converge for a {dimension}x{dimension} matrix"
            ),
            Error::TruncationNotConverged { half_width, change } => write!(
                f,
                "truncation not converged at N = {half_width} (eigenvalue change {change:e} under doubling)"
            ),
            Error::NoInteriorMinimum { lower, upper } => write!(
                f,
                "coarse scan found no interior minimum in the bracket [{lower}, {upper}]"
            ),
            Error::DegenerateTwoLevel => {
                write!(f, "two-level model is degenerate (V = 0 and epsilon = F)")
            }
            Error::NormDrift { drift } => write!(f, "state norm drifted by {drift:e}"),
            Error::UnitarityDrift { drift } => write!(
                f,
                "one-period propagator unitarity drift {drift:e}; use a smaller step"
            ),
            Error::NoInteriorMaximum { target_site } => write!(
                f,
                "no interior maximum of P_{target_site}(t); use a longer time span"
            ),
            Error::NoInteriorStates { dimension } => write!(
                f,
                "too few eigenstates away from the walls at dimension {dimension}; the coupling is too strong for this truncation"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
