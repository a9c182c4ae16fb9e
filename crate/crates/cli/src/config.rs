//! Experiment configuration: a TOML schema with strict field checking,
//! conversions into core types, and semantic validation.
//!
//! The schema is strict on purpose: unknown keys are rejected everywhere so
//! a typo in a budget name fails loudly instead of silently running with a
//! default.  Serializing a parsed config and re-parsing it yields an
//! identical structure, which is what lets the run manifest embed the
//! effective configuration verbatim.

use bayeslab_core::families::ModelFamily;
use bayeslab_core::rdtheory::BA_DEFAULT_MAX_ITER;
use bayeslab_core::simlab::{Learner, NoiseSpec};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Which pipeline a config drives.  The invoked subcommand must match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    /// Closed-form excess-risk bounds per sample size.
    Bounds,
    /// Mutual-information estimates per sample size.
    Mi,
    /// Rate-distortion curve of the discretised family.
    Rd,
    /// Bayesian learning trials with bound brackets.
    Simulate,
    /// Paired clean/noisy information-gap estimates.
    Noise,
    /// SVG summary plots from a previously written experiments table.
    Report,
}

impl CommandKind {
    /// Stable lowercase name, used in file names and error messages.
    #[must_use]
    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::Bounds => "bounds",
            CommandKind::Mi => "mi",
            CommandKind::Rd => "rd",
            CommandKind::Simulate => "simulate",
            CommandKind::Noise => "noise",
            CommandKind::Report => "report",
        }
    }
}

/// Which model family the run studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Threshold classifier on [0, 1].
    Interval1d,
    /// Threshold classifier on the normalized angle of a planar input.
    HalfspaceAngle2d,
    /// Homogeneous half-space classifier on the unit sphere.
    HalfspaceUnitSphere,
    /// Gaussian location estimation with a Gaussian prior.
    GaussianLocation,
}

/// Family selector plus the parameters some families need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    /// Family selector.
    pub kind: FamilyKind,
    /// Ambient dimension, required by (and only by) the sphere family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient_dim: Option<usize>,
    /// Observation noise σ, required by (and only by) the location family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_sigma: Option<f64>,
    /// Prior scale τ, required by (and only by) the location family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior_tau: Option<f64>,
}

impl FamilySpec {
    /// Builds the core family, rejecting missing or stray parameters.
    pub fn build(&self) -> Result<ModelFamily, String> {
        let classifier = !matches!(self.kind, FamilyKind::GaussianLocation);
        if classifier && (self.noise_sigma.is_some() || self.prior_tau.is_some()) {
            return Err(format!(
                "noise_sigma/prior_tau only apply to gaussian_location, not {:?}",
                self.kind
            ));
        }
        if !matches!(self.kind, FamilyKind::HalfspaceUnitSphere) && self.ambient_dim.is_some() {
            return Err("ambient_dim only applies to halfspace_unit_sphere".to_string());
        }
        match self.kind {
            FamilyKind::Interval1d => Ok(ModelFamily::Interval1D),
            FamilyKind::HalfspaceAngle2d => Ok(ModelFamily::HalfSpaceAngle2D),
            FamilyKind::HalfspaceUnitSphere => {
                let ambient_dim = self
                    .ambient_dim
                    .ok_or("halfspace_unit_sphere requires ambient_dim")?;
                if ambient_dim < 2 {
                    return Err(format!("ambient_dim must be at least 2, got {ambient_dim}"));
                }
                Ok(ModelFamily::HalfSpaceUnitSphere { ambient_dim })
            }
            FamilyKind::GaussianLocation => {
                let noise_sigma =
                    self.noise_sigma.ok_or("gaussian_location requires noise_sigma")?;
                let prior_tau = self.prior_tau.ok_or("gaussian_location requires prior_tau")?;
                if !(noise_sigma.is_finite() && noise_sigma > 0.0) {
                    return Err(format!("noise_sigma must be positive, got {noise_sigma}"));
                }
                if !(prior_tau.is_finite() && prior_tau > 0.0) {
                    return Err(format!("prior_tau must be positive, got {prior_tau}"));
                }
                Ok(ModelFamily::GaussianLocation { noise_sigma, prior_tau })
            }
        }
    }
}

fn default_trials() -> usize {
    1000
}
fn default_outer_mc() -> usize {
    2000
}
fn default_inner_mc() -> usize {
    400
}
fn default_ba_slopes() -> Vec<f64> {
    vec![-0.25, -0.5, -1.0, -2.0, -4.0, -8.0, -16.0, -32.0]
}
fn default_max_iter() -> usize {
    BA_DEFAULT_MAX_ITER
}
// Certified suboptimality gap in nats.  The grid problems produced by the
// rd command converge sublinearly, so the default must be reachable within
// the default iteration cap; 1e-4 is, with a large margin.
fn default_tol() -> f64 {
    1e-4
}
fn default_grid() -> usize {
    256
}

/// Computational budgets; every field has a default so `[budgets]` may be
/// partial or absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    /// Trials per experiment (simulate).
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Outer Monte Carlo replicates (mi, noise).
    #[serde(default = "default_outer_mc")]
    pub outer_mc: usize,
    /// Inner Monte Carlo replicates for families without closed-form
    /// region masses (mi on the sphere).
    #[serde(default = "default_inner_mc")]
    pub inner_mc: usize,
    /// Trade-off slopes for the rate-distortion solver (rd).
    #[serde(default = "default_ba_slopes")]
    pub ba_slopes: Vec<f64>,
    /// Iteration cap for the rate-distortion solver.
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Convergence tolerance (certified suboptimality gap, nats).
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Number of grid atoms when discretising a family (rd).
    #[serde(default = "default_grid")]
    pub grid: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            trials: default_trials(),
            outer_mc: default_outer_mc(),
            inner_mc: default_inner_mc(),
            ba_slopes: default_ba_slopes(),
            max_iter: default_max_iter(),
            tol: default_tol(),
            grid: default_grid(),
        }
    }
}

fn default_true() -> bool {
    true
}

/// Label-noise channel configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// Flip probability ρ ∈ (0, 1/2].
    pub rho: f64,
    /// Whether training labels pass through the channel (simulate).
    #[serde(default = "default_true")]
    pub train_noisy: bool,
    /// Whether risk is measured against the noisy distribution (simulate).
    #[serde(default = "default_true")]
    pub test_noisy: bool,
}

impl NoiseConfig {
    /// The core channel descriptor.
    #[must_use]
    pub fn to_spec(&self) -> NoiseSpec {
        NoiseSpec { rho: self.rho, train_noisy: self.train_noisy, test_noisy: self.test_noisy }
    }
}

/// Learning rule selector (simulate).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    /// Exact posterior sampling by rejection.
    PosteriorSample,
    /// Midpoint of the explicit consistency region.
    ConsistentMidpoint,
    /// Infimum-side endpoint of the consistency region.
    FirstConsistent,
}

impl LearnerKind {
    /// The core learner with default internal budgets.
    #[must_use]
    pub fn to_learner(self) -> Learner {
        match self {
            LearnerKind::PosteriorSample => Learner::posterior_sample(),
            LearnerKind::ConsistentMidpoint => Learner::ConsistentMidpoint,
            LearnerKind::FirstConsistent => Learner::FirstConsistent,
        }
    }
}

/// The full experiment configuration, exactly as found in the TOML file
/// (after any command-line overrides).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Pipeline this config drives; must match the invoked subcommand.
    pub command: CommandKind,
    /// Master seed for all pseudo-randomness in the run.
    pub master_seed: u64,
    /// Directory that receives the manifest and every output file.
    pub output_dir: PathBuf,
    /// Model family under study.
    pub family: FamilySpec,
    /// Sample sizes, one output row (or plot abscissa) per entry.
    #[serde(default)]
    pub n_list: Vec<usize>,
    /// Computational budgets.
    #[serde(default)]
    pub budgets: Budgets,
    /// Label-noise channel; required by `noise`, optional for `simulate`
    /// and `bounds`, ignored elsewhere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    /// Learning rule for `simulate`; defaults to posterior sampling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learner: Option<LearnerKind>,
}

impl ExperimentConfig {
    /// Parses a TOML document into a config, rejecting unknown keys.
    /// The error string carries toml's line/column diagnostics.
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Reads and parses a config file.
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    /// Canonical TOML for the (post-override) effective configuration.
    /// Parsing this text reproduces `self` exactly.
    #[must_use]
    pub fn canonical_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes to TOML")
    }

    /// Semantic checks that do not require any computation.  Violations
    /// are configuration errors, reported before any output is written.
    pub fn validate(&self) -> Result<(), String> {
        let family = self.family.build()?;

        let needs_n = !matches!(self.command, CommandKind::Rd | CommandKind::Report);
        if needs_n && self.n_list.is_empty() {
            return Err(format!("{} requires a non-empty n_list", self.command.as_str()));
        }

        if matches!(self.command, CommandKind::Noise) && self.noise.is_none() {
            return Err("noise requires a [noise] table with a flip probability".to_string());
        }
        if let Some(noise) = &self.noise {
            if !(noise.rho.is_finite() && noise.rho > 0.0 && noise.rho <= 0.5) {
                return Err(format!("noise.rho must lie in (0, 1/2], got {}", noise.rho));
            }
        }

        if matches!(self.command, CommandKind::Rd)
            && !matches!(family, ModelFamily::Interval1D | ModelFamily::HalfSpaceAngle2D)
        {
            return Err(format!(
                "rd discretises a 1-D threshold family; {} has no grid form",
                family.name()
            ));
        }
        if matches!(self.command, CommandKind::Simulate | CommandKind::Noise)
            && !family.realizable()
        {
            return Err(format!(
                "{} requires a realizable classifier family, not {}",
                self.command.as_str(),
                family.name()
            ));
        }

        let b = &self.budgets;
        if b.trials < 100 {
            return Err(format!("budgets.trials must be at least 100, got {}", b.trials));
        }
        if b.outer_mc < 100 {
            return Err(format!("budgets.outer_mc must be at least 100, got {}", b.outer_mc));
        }
        if b.max_iter == 0 {
            return Err("budgets.max_iter must be positive".to_string());
        }
        if !(b.tol.is_finite() && b.tol > 0.0) {
            return Err(format!("budgets.tol must be positive, got {}", b.tol));
        }
        if b.grid < 2 {
            return Err(format!("budgets.grid must be at least 2, got {}", b.grid));
        }
        if matches!(self.command, CommandKind::Rd) {
            if b.ba_slopes.is_empty() {
                return Err("rd requires at least one entry in budgets.ba_slopes".to_string());
            }
            if let Some(bad) = b.ba_slopes.iter().find(|s| !(s.is_finite() && **s < 0.0)) {
                return Err(format!("trade-off slopes must be negative and finite, got {bad}"));
            }
        }
        Ok(())
    }
}
