//! Numerical laboratory for information-theoretic lower bounds on the excess
//! risk of Bayesian learning.
//!
//! The crate is organised around one pipeline:
//!
//! ```text
//!   model family  ──►  mutual-information estimate  I(Z^n; W)
//!        │                          │
//!        ▼                          ▼
//!   rate-distortion curve  R(D) ──► invert:  E_n ≥ sup { D : R(D) ≥ I }
//!                                           │
//!                                           ▼
//!                     simulation harness validating the bracket
//!                     lower bound ≤ empirical excess risk ≤ upper bound
//! ```
//!
//! * [`families`] — the model families under study (threshold classifiers on
//!   an interval or circle, half-spaces on the unit sphere, a Gaussian
//!   location family) together with their priors, consistency sets and
//!   parameter-discrepancy metrics.
//! * [`rdtheory`] — rate-distortion machinery: closed-form lower bounds on
//!   R(D) for zero-one and smooth losses, plus a Blahut–Arimoto solver for
//!   discretised problems.
//! * [`miest`] — estimators and analytic caps for the sample-parameter mutual
//!   information I(Z^n; W).
//! * [`bounds`] — excess-risk lower bounds obtained by inverting R(D) against
//!   a mutual-information budget, plus reference upper bounds.
//! * [`simlab`] — Bayesian learners and experiment drivers that measure
//!   empirical excess risk and check it against the bounds.
//!
//! All information quantities are in **nats**. All stochastic routines are
//! driven by explicit seed handles ([`rng::Streams`]) so that results are
//! bit-for-bit reproducible regardless of how many worker threads execute
//! them.

pub mod bounds;
pub mod csvfmt;
pub mod error;
pub mod families;
pub mod math;
pub mod miest;
pub mod rdtheory;
pub mod rng;
pub mod simlab;

pub use error::Error;

/// Convenience alias used by every fallible operation in the crate.
pub type Result<T> = std::result::Result<T, Error>;
