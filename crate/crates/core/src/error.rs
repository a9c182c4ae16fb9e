//! Crate-wide error type.
//!
//! Every failure mode is a distinct variant so callers can branch on the
//! condition rather than parse message strings.  The two variants that
//! warrant special attention:
//!
//! * [`Error::InconsistentDataset`] — a labelled dataset admits **no**
//!   consistent parameter.  This is a meaningful experimental outcome (it is
//!   how label noise manifests for interpolating learners) and must never be
//!   silently mapped to "empty region of probability zero".
//! * [`Error::BracketViolation`] — an empirical excess risk escaped the
//!   [lower bound, upper bound] sandwich it was supposed to obey.  Drivers
//!   map this to a dedicated process exit code.

use thiserror::Error;

/// Unified error type for the laboratory.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A parameter vector lies outside the family's support.
    #[error("parameter outside family support: {0}")]
    UnsupportedParameter(String),

    /// The requested operation is undefined for this family
    /// (e.g. a classifier-discrepancy query on a regression family).
    #[error("operation not defined for family {family}: {op}")]
    UnsupportedOperation {
        /// Family display name.
        family: String,
        /// Operation that was requested.
        op: String,
    },

    /// A labelled dataset has no consistent parameter.  Distinct from an
    /// empty interval produced by degenerate geometry: this is the signal
    /// that the realizability assumption failed for the observed labels.
    #[error("dataset admits no consistent parameter")]
    InconsistentDataset,

    /// An iterative solver exhausted its iteration budget before meeting
    /// its convergence tolerance.
    #[error("{what} did not converge within {max_iter} iterations (residual {residual:.3e}, tolerance {tol:.3e})")]
    NoConvergence {
        /// Human-readable solver name.
        what: &'static str,
        /// Iteration budget that was exhausted.
        max_iter: usize,
        /// Residual at the final iterate.
        residual: f64,
        /// Convergence tolerance that was requested.
        tol: f64,
    },

    /// A quantity that must be monotone was observed to violate
    /// monotonicity (e.g. a rate-distortion evaluator increasing in D).
    #[error("monotonicity violation in {what}: f({x0:.6e}) = {y0:.6e} but f({x1:.6e}) = {y1:.6e}")]
    MonotonicityViolation {
        /// What was being checked.
        what: &'static str,
        /// Smaller abscissa.
        x0: f64,
        /// Larger abscissa.
        x1: f64,
        /// Value at `x0`.
        y0: f64,
        /// Value at `x1`.
        y1: f64,
    },

    /// A numerical invariant failed during computation (NaN, negative
    /// probability mass, diverging Lagrangian, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A rejection sampler exceeded its attempt budget.
    #[error("rejection sampler exceeded {max_attempts} attempts (one-sided region mass estimate {mass_upper_bound:.3e})")]
    RejectionBudgetExhausted {
        /// Attempt budget that was exhausted.
        max_attempts: u64,
        /// One-sided 95% upper estimate of the acceptance-region mass
        /// implied by observing zero hits in `max_attempts` draws.
        mass_upper_bound: f64,
    },

    /// An empirical excess risk escaped its [lower, upper] sandwich.
    #[error("bound bracket violated at n = {n}: lower {lower:.6e}, empirical {empirical:.6e} (se {std_error:.3e}), upper {upper:.6e}")]
    BracketViolation {
        /// Sample size at which the violation occurred.
        n: usize,
        /// Lower bound value.
        lower: f64,
        /// Empirical mean excess risk.
        empirical: f64,
        /// Standard error of the empirical mean.
        std_error: f64,
        /// Upper bound value.
        upper: f64,
    },

    /// A per-trial identity that must hold exactly (e.g. zero training
    /// error for an interpolating learner on consistent data) failed.
    #[error("identity violation in trial {trial}: {what}")]
    IdentityViolation {
        /// Trial index within the experiment.
        trial: usize,
        /// Which identity failed.
        what: String,
    },
}

impl Error {
    /// Shorthand constructor for [`Error::InvalidInput`].
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
