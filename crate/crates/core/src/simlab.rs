//! End-to-end Bayesian learning simulations.
//!
//! Draws parameters from the prior, generates (optionally noise-corrupted)
//! datasets, runs interpolating learning rules, and measures excess risk
//! **exactly** through closed-form discrepancy probabilities — no test-set
//! Monte Carlo unless explicitly requested.  [`sandwich_sweep`] assembles
//! the headline experiment: empirical excess risk pinched between the
//! module's lower bounds and a reference upper bound, with the log-log
//! rate read off by least squares.
//!
//! Trials are embarrassingly parallel and deterministically seeded: trial
//! t always consumes the derived stream `streams.child(t)`, and reductions
//! run in fixed order, so results are bit-identical for any worker count.

use rayon::prelude::*;

use crate::bounds::{excess_lb_cor7, excess_lb_margin, vc_upper_reference, BoundReport};
use crate::error::Error;
use crate::families::{
    zero_hit_upper_bound, ConsistencyRegion, Dataset, IntervalRegion, ModelFamily, NoisyFamily,
    Param,
};
use crate::math::{mean_and_std_error, ols_line};
use crate::rng::Streams;
use crate::Result;
use rand::Rng;

/// Default rejection cap for the posterior sampler.  At the tested sample
/// sizes the expected number of rejections per trial is n + 1, so this cap
/// only guards pathological configurations.
pub const DEFAULT_MAX_REJECTIONS: u64 = 1_000_000;

/// Minimum trials per experiment.
pub const MIN_TRIALS: usize = 100;

/// An interpolating learning rule: on consistent data every variant
/// returns a parameter of the consistency region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Learner {
    /// Exact posterior sampling for realizable families with uniform
    /// priors: draw from the prior, retry until consistent.
    PosteriorSample {
        /// Rejection budget per call.
        max_rejections: u64,
    },
    /// Midpoint of the explicit consistency interval/arc.
    ConsistentMidpoint,
    /// Infimum-side endpoint of the region, nudged inward by half a
    /// machine epsilon.
    FirstConsistent,
}

impl Learner {
    /// Posterior sampler with the default rejection cap.
    #[must_use]
    pub fn posterior_sample() -> Self {
        Learner::PosteriorSample { max_rejections: DEFAULT_MAX_REJECTIONS }
    }

    /// Stable identifier used in CSV output.
    #[must_use]
    pub fn kind_str(&self) -> &'static str {
        match self {
            Learner::PosteriorSample { .. } => "PosteriorSample",
            Learner::ConsistentMidpoint => "ConsistentMidpoint",
            Learner::FirstConsistent => "FirstConsistent",
        }
    }
}

/// Which of the two dataset roles the label-flipping channel corrupts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Flip probability ρ ∈ (0, 1/2].
    pub rho: f64,
    /// Corrupt the training labels the learner sees.
    pub train_noisy: bool,
    /// Measure risk against the noisy label distribution.
    pub test_noisy: bool,
}

/// How noisy-test excess loss is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestEvaluation {
    /// The exact identity: noisy excess loss = (1 − 2ρ)·P[labels differ].
    Analytic,
    /// Monte Carlo over a fresh test set — a cross-check path for the
    /// analytic identity, never the default.
    MonteCarlo {
        /// Test draws per trial.
        budget: usize,
    },
}

/// Aggregated outcome of one experiment (one family/learner/n cell).
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    /// Family display name.
    pub family: String,
    /// Learner identifier.
    pub learner: String,
    /// Flip probability (0 for fully clean runs).
    pub rho: f64,
    /// Whether training labels passed through the channel.
    pub train_noisy: bool,
    /// Whether risk was measured against the noisy distribution.
    pub test_noisy: bool,
    /// Sample size.
    pub n: usize,
    /// Number of trials aggregated.
    pub trials: usize,
    /// Mean empirical excess risk.
    pub excess_mean: f64,
    /// Standard error of the mean.
    pub excess_se: f64,
    /// Mean empirical training error (exactly 0 for interpolating
    /// learners on consistent data).
    pub train_err: f64,
    /// Matching excess-risk lower bound, when defined at this n.
    pub lower_bound: Option<BoundReport>,
    /// Reference upper bound, when defined at this n.
    pub upper_bound: Option<BoundReport>,
    /// Master seed of the stream that produced the experiment.
    pub seed: u64,
}

/// Runs one learning rule on one dataset.
///
/// Consistent data: `PosteriorSample` draws from the prior until the draw
/// is consistent (for a uniform prior this is exact posterior sampling);
/// `ConsistentMidpoint` and `FirstConsistent` read their point off the
/// explicit region and therefore need a family with closed-form regions.
///
/// Inconsistent data (possible under label noise): every learner falls
/// back to minimizing training 0-1 error over the ≤ n+1 candidate
/// prediction segments, returning the midpoint of the lexicographically
/// first minimizing segment.  The fallback is a deliberate artifact
/// decision — any measurable rule is admissible for bound validation —
/// and reports label it through the experiment's noise fields.
///
/// # Errors
/// `PosteriorSample` exceeding its rejection budget (the error carries a
/// one-sided estimate of the region mass); region-based learners on
/// families without explicit regions; non-realizable families.
pub fn learn<R: Rng>(
    learner: &Learner,
    family: &ModelFamily,
    data: &Dataset,
    rng: &mut R,
) -> Result<Param> {
    match family.consistency_region(data) {
        Ok(ConsistencyRegion::Interval(region)) => match learner {
            Learner::PosteriorSample { max_rejections } => {
                posterior_sample(family, *max_rejections, rng, |v| {
                    Ok(region.contains(v.scalar()?))
                })
            }
            Learner::ConsistentMidpoint => Ok(Param::Scalar(region.midpoint())),
            Learner::FirstConsistent => first_consistent_point(&region).map(Param::Scalar),
        },
        Ok(ConsistencyRegion::Implicit) => match learner {
            Learner::PosteriorSample { max_rejections } => {
                posterior_sample(family, *max_rejections, rng, |v| family.is_consistent(data, v))
            }
            _ => Err(Error::UnsupportedOperation {
                family: family.name(),
                op: format!("{} needs an explicit consistency region", learner.kind_str()),
            }),
        },
        Err(Error::InconsistentDataset) => erm_fallback(family, data),
        Err(e) => Err(e),
    }
}

/// Prior-rejection sampler shared by both consistency-test flavours.
fn posterior_sample<R: Rng, F>(
    family: &ModelFamily,
    max_rejections: u64,
    rng: &mut R,
    mut accepts: F,
) -> Result<Param>
where
    F: FnMut(&Param) -> Result<bool>,
{
    if max_rejections == 0 {
        return Err(Error::invalid("rejection budget must be positive"));
    }
    for _ in 0..max_rejections {
        let v = family.sample_prior(rng);
        if accepts(&v)? {
            return Ok(v);
        }
    }
    Err(Error::RejectionBudgetExhausted {
        max_attempts: max_rejections,
        mass_upper_bound: zero_hit_upper_bound(max_rejections as usize),
    })
}

/// The infimum-side point of a region: lo + ε/2, falling back to interior
/// or closed endpoints if the nudge rounds outside a very thin region.
fn first_consistent_point(region: &IntervalRegion) -> Result<f64> {
    let nudged = region.lo + 0.5 * f64::EPSILON;
    for candidate in [nudged, region.midpoint(), region.hi, region.lo] {
        if region.contains(candidate) {
            return Ok(candidate);
        }
    }
    Err(Error::Numerical(format!(
        "no representable point inside region [{}, {}]",
        region.lo, region.hi
    )))
}

/// Empirical-risk-minimizing fallback for inconsistent 1-D threshold data:
/// scan the n+1 prediction segments between sorted input coordinates,
/// track each segment's training 0-1 error, and return the midpoint of
/// the first segment attaining the minimum.
fn erm_fallback(family: &ModelFamily, data: &Dataset) -> Result<Param> {
    if !matches!(family, ModelFamily::Interval1D | ModelFamily::HalfSpaceAngle2D) {
        return Err(Error::InconsistentDataset);
    }
    let mut coords = family.threshold_coords(data)?;
    coords.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Below the smallest coordinate every prediction is 1, so the error
    // count starts at the number of zero labels; crossing a coordinate
    // flips its prediction 1 → 0.
    let mut k: i64 = coords.iter().filter(|(_, y)| !*y).count() as i64;
    let mut best_k = i64::MAX;
    let mut best_mid = 0.5;
    let mut prev = 0.0f64;
    for &(coord, y) in &coords {
        if coord > prev && k < best_k {
            best_k = k;
            best_mid = 0.5 * (prev + coord);
        }
        k += if y { 1 } else { -1 };
        prev = coord;
    }
    if prev < 1.0 && k < best_k {
        best_mid = 0.5 * (prev + 1.0);
    }
    Ok(Param::Scalar(best_mid))
}

/// Fraction of `data` labels that parameter `v` misclassifies.
fn train_error(family: &ModelFamily, data: &Dataset, v: &Param) -> Result<f64> {
    if data.is_empty() {
        return Ok(0.0);
    }
    let mut wrong = 0usize;
    for s in data {
        if family.classify(&s.x, v)? != s.y.class()? {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / data.len() as f64)
}

/// Runs `trials` independent learning trials and aggregates the excess
/// risk, by the recipe: draw W, draw an n-sample dataset (training labels
/// flipped with probability ρ when `train_noisy`), learn ŵ, and score.
///
/// Scoring is exact: the clean-test excess loss of ŵ against w is the
/// closed-form discrepancy probability, and the noisy-test excess loss is
/// (1 − 2ρ) times it (each disagreeing input contributes 1 − 2ρ after
/// passing both labels through the independent flip channel; the
/// derivation lives with [`NoisyFamily::excess_loss_exact`]).  A Monte
/// Carlo scoring path exists for cross-checks via [`TestEvaluation`].
///
/// The matching lower bound (realizable, or the margin variant with
/// t = 1 − 2ρ for noisy-test runs) and the reference upper bound are
/// attached whenever they are defined at this n; any trial error aborts
/// the whole experiment with partial results discarded.
///
/// # Errors
/// `trials` < 100; invalid ρ; learner failures.
pub fn run_experiment(
    family: &ModelFamily,
    learner: &Learner,
    n: usize,
    trials: usize,
    noise: Option<NoiseSpec>,
    evaluation: TestEvaluation,
    streams: Streams,
) -> Result<ExperimentResult> {
    if trials < MIN_TRIALS {
        return Err(Error::invalid(format!("trials must be at least {MIN_TRIALS}, got {trials}")));
    }
    if let TestEvaluation::MonteCarlo { budget } = evaluation {
        if budget < 100 {
            return Err(Error::invalid(format!(
                "Monte Carlo test budget must be at least 100, got {budget}"
            )));
        }
    }
    let channel = match noise {
        // Validates ρ ∈ (0, 1/2].
        Some(spec) => Some((NoisyFamily::new(family.clone(), spec.rho)?, spec)),
        None => None,
    };
    let train_noisy = channel.as_ref().is_some_and(|(_, s)| s.train_noisy);
    let test_noisy = channel.as_ref().is_some_and(|(_, s)| s.test_noisy);

    let per_trial: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, f64)> {
            let mut rng = streams.child(t as u64).rng();
            let w = family.sample_prior(&mut rng);
            let clean = family.draw_dataset(&w, n, &mut rng)?;
            let train_data = if train_noisy {
                let (flipped, _) = channel.as_ref().unwrap().0.flip_labels(&clean, &mut rng)?;
                flipped
            } else {
                clean
            };
            let w_hat = learn(learner, family, &train_data, &mut rng)?;
            let err = train_error(family, &train_data, &w_hat)?;
            let excess = if test_noisy {
                let noisy = &channel.as_ref().unwrap().0;
                match evaluation {
                    TestEvaluation::Analytic => noisy.excess_loss_exact(&w, &w_hat)?,
                    TestEvaluation::MonteCarlo { budget } => {
                        noisy.excess_loss_mc(&w, &w_hat, budget, &mut rng)?.value
                    }
                }
            } else {
                family.excess_loss(&w, &w_hat)?
            };
            Ok((excess, err))
        })
        .collect::<Result<Vec<_>>>()?;

    let excesses: Vec<f64> = per_trial.iter().map(|(e, _)| *e).collect();
    let errors: Vec<f64> = per_trial.iter().map(|(_, t)| *t).collect();
    let (excess_mean, excess_se) = mean_and_std_error(&excesses);
    let train_err = errors.iter().sum::<f64>() / trials as f64;

    let rho = noise.map_or(0.0, |s| s.rho);
    let lower_bound = matching_lower_bound(family, n, test_noisy, rho);
    let upper_bound = vc_upper_reference(family.d_vc(), n).ok();

    Ok(ExperimentResult {
        family: family.name(),
        learner: learner.kind_str().to_string(),
        rho,
        train_noisy,
        test_noisy,
        n,
        trials,
        excess_mean,
        excess_se,
        train_err,
        lower_bound,
        upper_bound,
        seed: streams.master_seed(),
    })
}

/// The lower bound matching a noise configuration: the realizable
/// parametric bound for clean-test runs, its margin variant with
/// t = 1 − 2ρ for noisy-test runs, and nothing when the bound is
/// undefined (n < d_vc, missing μ, or t = 0 at ρ = ½).
fn matching_lower_bound(
    family: &ModelFamily,
    n: usize,
    test_noisy: bool,
    rho: f64,
) -> Option<BoundReport> {
    let mu = family.mu()?;
    let (d_w, d_vc, h_w) = (family.d_w(), family.d_vc(), family.prior_entropy());
    if test_noisy {
        let t = 1.0 - 2.0 * rho;
        if t <= 0.0 {
            return None;
        }
        excess_lb_margin(d_w, d_vc, n, mu, h_w, t).ok()
    } else {
        excess_lb_cor7(d_w, d_vc, n, mu, h_w).ok()
    }
}

/// A sweep over sample sizes with its fitted log-log rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichSweep {
    /// One experiment per requested n, in order.
    pub results: Vec<ExperimentResult>,
    /// OLS slope of ln(excess) against ln(n).
    pub slope: f64,
    /// OLS intercept.
    pub intercept: f64,
}

/// Runs a clean experiment per n, asserts the bound sandwich at every n,
/// and fits the log-log rate.
///
/// # Errors
/// `n_list` not strictly increasing, shorter than 4, or spanning less
/// than a factor of 16; [`Error::BracketViolation`] naming the first n
/// where the empirical mean escapes [lower − 3σ-slack, upper + 3σ-slack];
/// experiment failures.
pub fn sandwich_sweep(
    family: &ModelFamily,
    learner: &Learner,
    n_list: &[usize],
    trials: usize,
    streams: Streams,
) -> Result<SandwichSweep> {
    if n_list.len() < 4 {
        return Err(Error::invalid(format!(
            "sweep needs at least 4 sample sizes, got {}",
            n_list.len()
        )));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("sweep sample sizes must be strictly increasing"));
    }
    let (first, last) = (n_list[0], *n_list.last().unwrap());
    if first == 0 || last < 16 * first {
        return Err(Error::invalid(format!(
            "sweep must span at least a factor of 16 in n, got {first}..{last}"
        )));
    }

    let mut results = Vec::with_capacity(n_list.len());
    for (i, &n) in n_list.iter().enumerate() {
        let result = run_experiment(
            family,
            learner,
            n,
            trials,
            None,
            TestEvaluation::Analytic,
            streams.child(i as u64),
        )?;
        check_bracket(&result)?;
        results.push(result);
    }

    let xy: Vec<(f64, f64)> = results
        .iter()
        .map(|r| -> Result<(f64, f64)> {
            if r.excess_mean <= 0.0 {
                return Err(Error::Numerical(format!(
                    "cannot fit a log-log rate through excess mean {} at n = {}",
                    r.excess_mean, r.n
                )));
            }
            Ok(((r.n as f64).ln(), r.excess_mean.ln()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (slope, intercept) = ols_line(&xy);
    Ok(SandwichSweep { results, slope, intercept })
}

/// Verifies lower − 3σ ≤ empirical ≤ upper + 3σ for one experiment
/// (bounds that are undefined at this n are skipped).
pub fn check_bracket(result: &ExperimentResult) -> Result<()> {
    let slack = 3.0 * result.excess_se;
    let lower = result.lower_bound.as_ref().map_or(0.0, |b| b.value);
    let upper = result.upper_bound.as_ref().map_or(f64::INFINITY, |b| b.value);
    if lower > result.excess_mean + slack || result.excess_mean - slack > upper {
        return Err(Error::BracketViolation {
            n: result.n,
            lower,
            empirical: result.excess_mean,
            std_error: result.excess_se,
            upper,
        });
    }
    Ok(())
}

/// Outcome of [`generalization_identity_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    /// Whether the identity was verified or did not apply.
    pub status: IdentityStatus,
    /// Largest observed |generalization gap − excess risk| = largest
    /// training error (exactly 0 when verified).
    pub max_deviation: f64,
    /// Trials inspected (0 when not applicable).
    pub trials: usize,
}

/// Status of the interpolation identity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityStatus {
    /// Every trial had exactly zero training error, so the empirical
    /// generalization gap coincides with the empirical excess risk.
    Verified,
    /// Training labels were noisy: the interpolation hypothesis does not
    /// hold and the identity is not claimed.
    NotApplicable,
}

/// Verifies that an interpolating learner on clean realizable data has
/// exactly zero training error in every trial — which forces the
/// empirical generalization gap to equal the empirical excess risk as an
/// identity, not a statistical statement.
///
/// With noisy training labels the hypothesis fails and the check reports
/// [`IdentityStatus::NotApplicable`] instead of running.
///
/// # Errors
/// [`Error::IdentityViolation`] naming the first trial with nonzero
/// training error; learner/trial failures.
pub fn generalization_identity_check(
    family: &ModelFamily,
    learner: &Learner,
    n: usize,
    trials: usize,
    noise: Option<NoiseSpec>,
    streams: Streams,
) -> Result<IdentityReport> {
    if trials < MIN_TRIALS {
        return Err(Error::invalid(format!("trials must be at least {MIN_TRIALS}, got {trials}")));
    }
    if noise.is_some_and(|s| s.train_noisy) {
        return Ok(IdentityReport {
            status: IdentityStatus::NotApplicable,
            max_deviation: 0.0,
            trials: 0,
        });
    }
    let deviations: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let mut rng = streams.child(t as u64).rng();
            let w = family.sample_prior(&mut rng);
            let data = family.draw_dataset(&w, n, &mut rng)?;
            let w_hat = learn(learner, family, &data, &mut rng)?;
            let err = train_error(family, &data, &w_hat)?;
            if err != 0.0 {
                return Err(Error::IdentityViolation {
                    trial: t,
                    what: format!(
                        "interpolating learner left training error {err} on consistent data"
                    ),
                });
            }
            Ok(err)
        })
        .collect::<Result<Vec<_>>>()?;
    let max_deviation = deviations.iter().cloned().fold(0.0f64, f64::max);
    Ok(IdentityReport { status: IdentityStatus::Verified, max_deviation, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{Label, Point, Sample};

    fn ds(pairs: &[(f64, bool)]) -> Dataset {
        pairs
            .iter()
            .map(|&(x, y)| Sample { x: Point::Scalar(x), y: Label::Class(y) })
            .collect()
    }

    #[test]
    fn midpoint_learner_on_example_region() {
        let data = ds(&[(0.2, false), (0.8, true)]);
        let mut rng = Streams::new(1).rng();
        let w = learn(&Learner::ConsistentMidpoint, &ModelFamily::Interval1D, &data, &mut rng)
            .unwrap();
        assert_eq!(w.scalar().unwrap(), 0.5);
    }

    #[test]
    fn posterior_sample_always_lands_in_region() {
        let family = ModelFamily::Interval1D;
        let data = ds(&[(0.2, false), (0.8, true)]);
        let learner = Learner::posterior_sample();
        let streams = Streams::new(7);
        for t in 0..200 {
            let mut rng = streams.child(t).rng();
            let w = learn(&learner, &family, &data, &mut rng).unwrap().scalar().unwrap();
            assert!(w > 0.2 && w <= 0.8, "draw {w} escaped (0.2, 0.8]");
        }
    }

    #[test]
    fn first_consistent_sits_on_infimum_side() {
        let family = ModelFamily::Interval1D;
        let data = ds(&[(0.2, false), (0.8, true)]);
        let mut rng = Streams::new(1).rng();
        let w = learn(&Learner::FirstConsistent, &family, &data, &mut rng)
            .unwrap()
            .scalar()
            .unwrap();
        assert!(w > 0.2, "must lie strictly inside the open end");
        assert!(w - 0.2 <= f64::EPSILON);
    }

    #[test]
    fn rejection_budget_error_carries_mass_estimate() {
        let family = ModelFamily::Interval1D;
        // Tiny region: (0.5, 0.500001] — with a budget of 100 the sampler
        // will essentially never hit it.
        let data = ds(&[(0.5, false), (0.500_001, true)]);
        let learner = Learner::PosteriorSample { max_rejections: 100 };
        let mut rng = Streams::new(3).rng();
        match learn(&learner, &family, &data, &mut rng) {
            Err(Error::RejectionBudgetExhausted { max_attempts, mass_upper_bound }) => {
                assert_eq!(max_attempts, 100);
                assert!(mass_upper_bound > 0.0 && mass_upper_bound < 0.05);
            }
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn erm_fallback_minimizes_training_error() {
        let family = ModelFamily::Interval1D;
        // Inverted labels: no consistent threshold exists.
        let data = ds(&[(0.3, true), (0.6, false)]);
        let mut rng = Streams::new(5).rng();
        let w_hat = learn(&Learner::ConsistentMidpoint, &family, &data, &mut rng).unwrap();
        assert_eq!(w_hat.scalar().unwrap(), 0.15, "first minimizing segment is [0, 0.3]");
        let achieved = train_error(&family, &data, &w_hat).unwrap();
        // Grid-scan oracle: no candidate on a 10^4 grid does better.
        for i in 0..=10_000 {
            let candidate = Param::Scalar(i as f64 / 10_000.0);
            let err = train_error(&family, &data, &candidate).unwrap();
            assert!(achieved <= err + 1e-15, "grid candidate {i} beats ERM output");
        }
    }

    #[test]
    fn erm_fallback_triggers_for_all_learners() {
        let family = ModelFamily::Interval1D;
        let data = ds(&[(0.3, true), (0.6, false)]);
        let streams = Streams::new(11);
        for learner in
            [Learner::posterior_sample(), Learner::ConsistentMidpoint, Learner::FirstConsistent]
        {
            let mut rng = streams.child(1).rng();
            let w = learn(&learner, &family, &data, &mut rng).unwrap();
            assert_eq!(w.scalar().unwrap(), 0.15, "{}", learner.kind_str());
        }
    }

    #[test]
    fn region_learners_rejected_on_implicit_families() {
        let family = ModelFamily::half_space_unit_sphere(3).unwrap();
        let mut rng = Streams::new(2).rng();
        let w = family.sample_prior(&mut rng);
        let data = family.draw_dataset(&w, 5, &mut rng).unwrap();
        let err = learn(&Learner::ConsistentMidpoint, &family, &data, &mut rng);
        assert!(matches!(err, Err(Error::UnsupportedOperation { .. })));
        // The posterior sampler works from membership tests alone.
        let v = learn(&Learner::posterior_sample(), &family, &data, &mut rng).unwrap();
        assert!(family.is_consistent(&data, &v).unwrap());
    }

    #[test]
    fn clean_experiment_brackets_and_interpolates() {
        let family = ModelFamily::Interval1D;
        let result = run_experiment(
            &family,
            &Learner::ConsistentMidpoint,
            50,
            400,
            None,
            TestEvaluation::Analytic,
            Streams::new(21),
        )
        .unwrap();
        assert_eq!(result.train_err, 0.0, "interpolation must be exact");
        assert!(result.excess_mean > 0.0 && result.excess_se > 0.0);
        // Midpoint learner: expected excess is 1/(2(n+2)).
        let theory = 1.0 / (2.0 * 52.0);
        assert!((result.excess_mean - theory).abs() < 5.0 * result.excess_se);
        let lb = result.lower_bound.as_ref().unwrap();
        let ub = result.upper_bound.as_ref().unwrap();
        assert!(lb.value <= result.excess_mean && result.excess_mean <= ub.value);
        // Plumbing identity: attached bound equals the bounds module's.
        let direct = excess_lb_cor7(1, 1, 50, 1.0, 0.0).unwrap();
        assert_eq!(lb.value.to_bits(), direct.value.to_bits());
        check_bracket(&result).unwrap();
    }

    #[test]
    fn posterior_sample_matches_its_expected_excess() {
        // Posterior sampling on the interval family: E[excess] = 2/(3(n+2)).
        let result = run_experiment(
            &ModelFamily::Interval1D,
            &Learner::posterior_sample(),
            30,
            3000,
            None,
            TestEvaluation::Analytic,
            Streams::new(33),
        )
        .unwrap();
        let theory = 2.0 / (3.0 * 32.0);
        assert!(
            (result.excess_mean - theory).abs() < 4.0 * result.excess_se,
            "{} vs {theory} (se {})",
            result.excess_mean,
            result.excess_se
        );
    }

    #[test]
    fn zero_samples_gives_prior_level_risk() {
        let result = run_experiment(
            &ModelFamily::Interval1D,
            &Learner::ConsistentMidpoint,
            0,
            2000,
            None,
            TestEvaluation::Analytic,
            Streams::new(8),
        )
        .unwrap();
        // ŵ = 0.5 always: E|W − ½| = ¼.
        assert!((result.excess_mean - 0.25).abs() < 4.0 * result.excess_se);
        assert!(result.lower_bound.is_none());
        assert!(result.upper_bound.is_none());
    }

    #[test]
    fn noisy_train_cannot_beat_clean() {
        let family = ModelFamily::Interval1D;
        let clean = run_experiment(
            &family,
            &Learner::ConsistentMidpoint,
            40,
            600,
            None,
            TestEvaluation::Analytic,
            Streams::new(55),
        )
        .unwrap();
        let noisy = run_experiment(
            &family,
            &Learner::ConsistentMidpoint,
            40,
            600,
            Some(NoiseSpec { rho: 0.1, train_noisy: true, test_noisy: false }),
            TestEvaluation::Analytic,
            Streams::new(56),
        )
        .unwrap();
        assert!(
            noisy.excess_mean >= clean.excess_mean - 3.0 * (clean.excess_se + noisy.excess_se),
            "label noise cannot reduce excess risk: {} vs {}",
            noisy.excess_mean,
            clean.excess_mean
        );
        assert!(noisy.train_err > 0.0, "noisy labels force training errors");
    }

    #[test]
    fn noisy_test_uses_margin_bound_and_analytic_identity() {
        let family = ModelFamily::Interval1D;
        let spec = NoiseSpec { rho: 0.2, train_noisy: true, test_noisy: true };
        let result = run_experiment(
            &family,
            &Learner::ConsistentMidpoint,
            60,
            500,
            Some(spec),
            TestEvaluation::Analytic,
            Streams::new(77),
        )
        .unwrap();
        let lb = result.lower_bound.as_ref().unwrap();
        assert_eq!(lb.name.as_str(), "Thm11");
        assert_eq!(lb.inputs.t, Some(1.0 - 2.0 * 0.2));
        check_bracket(&result).unwrap();

        // The Monte Carlo cross-check path agrees within its own noise.
        let mc = run_experiment(
            &family,
            &Learner::ConsistentMidpoint,
            60,
            500,
            Some(spec),
            TestEvaluation::MonteCarlo { budget: 4000 },
            Streams::new(77),
        )
        .unwrap();
        assert!(
            (mc.excess_mean - result.excess_mean).abs()
                < 4.0 * (mc.excess_se + result.excess_se + 1e-4),
            "analytic {} vs MC {}",
            result.excess_mean,
            mc.excess_mean
        );
        // At ρ = ½ the margin bound degenerates and is omitted.
        let degenerate = run_experiment(
            &family,
            &Learner::ConsistentMidpoint,
            60,
            200,
            Some(NoiseSpec { rho: 0.5, train_noisy: true, test_noisy: true }),
            TestEvaluation::Analytic,
            Streams::new(78),
        )
        .unwrap();
        assert!(degenerate.lower_bound.is_none());
    }

    #[test]
    fn experiments_are_deterministic() {
        let family = ModelFamily::Interval1D;
        let a = run_experiment(
            &family,
            &Learner::posterior_sample(),
            20,
            300,
            None,
            TestEvaluation::Analytic,
            Streams::new(101),
        )
        .unwrap();
        let b = run_experiment(
            &family,
            &Learner::posterior_sample(),
            20,
            300,
            None,
            TestEvaluation::Analytic,
            Streams::new(101),
        )
        .unwrap();
        assert_eq!(a.excess_mean.to_bits(), b.excess_mean.to_bits());
        assert_eq!(a.excess_se.to_bits(), b.excess_se.to_bits());
        let c = run_experiment(
            &family,
            &Learner::posterior_sample(),
            20,
            300,
            None,
            TestEvaluation::Analytic,
            Streams::new(102),
        )
        .unwrap();
        assert_ne!(a.excess_mean.to_bits(), c.excess_mean.to_bits());
    }

    #[test]
    fn sweep_smoke_run_fits_inverse_rate() {
        let sweep = sandwich_sweep(
            &ModelFamily::Interval1D,
            &Learner::ConsistentMidpoint,
            &[4, 8, 16, 64],
            200,
            Streams::new(404),
        )
        .unwrap();
        assert_eq!(sweep.results.len(), 4);
        assert!(sweep.slope < -0.55 && sweep.slope > -1.6, "slope {}", sweep.slope);
        for r in &sweep.results {
            assert_eq!(r.train_err, 0.0);
        }
    }

    #[test]
    fn sweep_validation() {
        let family = ModelFamily::Interval1D;
        let learner = Learner::ConsistentMidpoint;
        let s = Streams::new(1);
        assert!(sandwich_sweep(&family, &learner, &[4, 8, 16], 200, s).is_err());
        assert!(sandwich_sweep(&family, &learner, &[4, 8, 8, 64], 200, s).is_err());
        assert!(sandwich_sweep(&family, &learner, &[4, 8, 16, 32], 200, s).is_err());
        assert!(run_experiment(
            &family,
            &learner,
            10,
            99,
            None,
            TestEvaluation::Analytic,
            s
        )
        .is_err());
    }

    #[test]
    fn identity_check_verifies_clean_interpolation() {
        let report = generalization_identity_check(
            &ModelFamily::Interval1D,
            &Learner::ConsistentMidpoint,
            50,
            500,
            None,
            Streams::new(61),
        )
        .unwrap();
        assert_eq!(report.status, IdentityStatus::Verified);
        assert_eq!(report.max_deviation, 0.0);
        assert_eq!(report.trials, 500);

        let angle = generalization_identity_check(
            &ModelFamily::HalfSpaceAngle2D,
            &Learner::posterior_sample(),
            50,
            200,
            None,
            Streams::new(62),
        )
        .unwrap();
        assert_eq!(angle.status, IdentityStatus::Verified);
        assert_eq!(angle.max_deviation, 0.0);
    }

    #[test]
    fn identity_check_not_applicable_under_train_noise() {
        let report = generalization_identity_check(
            &ModelFamily::Interval1D,
            &Learner::ConsistentMidpoint,
            50,
            200,
            Some(NoiseSpec { rho: 0.2, train_noisy: true, test_noisy: false }),
            Streams::new(63),
        )
        .unwrap();
        assert_eq!(report.status, IdentityStatus::NotApplicable);
        assert_eq!(report.trials, 0);
    }

    #[test]
    fn angle_family_midpoint_experiment() {
        let result = run_experiment(
            &ModelFamily::HalfSpaceAngle2D,
            &Learner::ConsistentMidpoint,
            32,
            400,
            None,
            TestEvaluation::Analytic,
            Streams::new(88),
        )
        .unwrap();
        assert_eq!(result.train_err, 0.0);
        assert!(result.excess_mean > 0.0);
        check_bracket(&result).unwrap();
        let lb = result.lower_bound.as_ref().unwrap();
        assert_eq!(lb.inputs.d_vc, Some(2));
    }
}
