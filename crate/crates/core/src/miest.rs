//! Mutual-information estimators for I(Z^n; W).
//!
//! The workhorse is the nested Monte Carlo estimator
//! ([`mi_nested_mc`]): I(Z^n;W) equals the expected negative log prior
//! mass of the consistency set for realizable families, so an outer loop
//! samples (w, z^n) pairs and an inner evaluation measures
//! P[V ∈ C(z^n)] — exactly for the 1-D threshold families, by Monte Carlo
//! for implicit regions.  Closed-form caps and asymptotics
//! ([`mi_vc_bound`], [`mi_digamma_2d`], [`mi_clarke_barron`]) give
//! independent checks, [`mi_dimension_fit`] reads the effective dimension
//! off a sweep, and [`noise_info_gap`] measures the information destroyed
//! by label noise with a variance-cancelling paired estimator.

use rayon::prelude::*;

use crate::error::Error;
use crate::families::{ConsistencyRegion, ModelFamily, NoisyFamily};
use crate::math::{digamma, mean_and_std_error, ols_line, wls_line, EULER_GAMMA};
use crate::rng::Streams;
use crate::Result;

/// Estimates whose flagged fraction exceeds this are unreliable.
pub const FLAGGED_FRACTION_LIMIT: f64 = 0.05;

/// Minimum outer replicate budget.
pub const MIN_OUTER_MC: usize = 100;

/// Minimum inner Monte Carlo budget (implicit-region families).
pub const MIN_INNER_MC: usize = 100;

/// How a mutual-information figure was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MIMethod {
    /// Nested Monte Carlo over consistency sets.
    NestedMC,
    /// Combinatorial-dimension cap (an upper bound, not an estimate).
    VCBound,
    /// Exact digamma identity for the 2-D angular half-space family.
    Digamma2D,
    /// Smooth-family asymptotic via Fisher information.
    ClarkeBarron,
    /// Paired Monte Carlo for the label-noise information gap.
    NoiseGapMC,
}

impl MIMethod {
    /// Stable identifier used in CSV output.
    #[must_use]
    pub fn as_str(&self) -> &'static str {
        match self {
            MIMethod::NestedMC => "NestedMC",
            MIMethod::VCBound => "VCBound",
            MIMethod::Digamma2D => "Digamma2D",
            MIMethod::ClarkeBarron => "ClarkeBarron",
            MIMethod::NoiseGapMC => "NoiseGapMC",
        }
    }
}

/// A mutual-information value (nats) with its provenance and error bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MIEstimate {
    /// Point value in nats.
    pub value: f64,
    /// Standard error of the mean over outer replicates (0 for closed
    /// forms).
    pub std_error: f64,
    /// Estimator provenance.
    pub method: MIMethod,
    /// Sample size the information refers to.
    pub n: usize,
    /// Outer replicate budget (0 for closed forms).
    pub outer_mc: usize,
    /// Inner Monte Carlo budget (0 when the inner value is exact).
    pub inner_mc: usize,
    /// Fraction of outer replicates whose inner estimator saw zero hits
    /// and fell back to the one-sided sentinel.
    pub flagged_fraction: f64,
}

impl MIEstimate {
    /// Wraps an exact closed-form value.
    #[must_use]
    pub fn exact(method: MIMethod, n: usize, value: f64) -> Self {
        MIEstimate {
            value,
            std_error: 0.0,
            method,
            n,
            outer_mc: 0,
            inner_mc: 0,
            flagged_fraction: 0.0,
        }
    }

    /// True when too many inner estimates were zero-hit sentinels for the
    /// value to be trusted (> [`FLAGGED_FRACTION_LIMIT`]).
    #[must_use]
    pub fn unreliable(&self) -> bool {
        self.flagged_fraction > FLAGGED_FRACTION_LIMIT
    }
}

fn check_outer_budget(outer_mc: usize) -> Result<()> {
    if outer_mc < MIN_OUTER_MC {
        return Err(Error::invalid(format!(
            "outer_mc must be at least {MIN_OUTER_MC}, got {outer_mc}"
        )));
    }
    Ok(())
}

/// Nested Monte Carlo estimate of I(Z^n; W) for a realizable family:
/// the mean over `outer_mc` replicates of −ln P[V ∈ C(z^n)], with the
/// inner probability exact for the 1-D threshold families and an
/// `inner_mc`-draw Monte Carlo estimate for implicit regions.
///
/// The estimator is exactly unbiased when the inner probability is exact.
/// With a Monte Carlo inner estimate, Jensen's inequality biases each
/// replicate upward (E[−ln p̂] ≥ −ln E[p̂]); the bias shrinks with
/// `inner_mc` and zero-hit replicates are flagged so
/// [`MIEstimate::unreliable`] can veto the result.
///
/// Replicates are split across threads deterministically: replicate `r`
/// always consumes the substream `streams.child(r)`, and the reduction is
/// a fixed-order sequential sum, so results are bit-identical for any
/// worker count.
///
/// # Errors
/// Rejects non-realizable families, `outer_mc` < 100, and — only for
/// families whose consistency mass needs inner Monte Carlo (implicit
/// regions) — `inner_mc` < 100.  Families with closed-form mass ignore
/// `inner_mc` and report it as 0.
pub fn mi_nested_mc(
    family: &ModelFamily,
    n: usize,
    outer_mc: usize,
    inner_mc: usize,
    streams: Streams,
) -> Result<MIEstimate> {
    if !family.realizable() {
        return Err(Error::UnsupportedOperation {
            family: family.name(),
            op: "nested Monte Carlo mutual information".to_string(),
        });
    }
    check_outer_budget(outer_mc)?;
    let exact_inner = matches!(family, ModelFamily::Interval1D | ModelFamily::HalfSpaceAngle2D);
    let inner_mc = if exact_inner { 0 } else { inner_mc };
    if !exact_inner && inner_mc < MIN_INNER_MC {
        return Err(Error::invalid(format!(
            "inner_mc must be at least {MIN_INNER_MC}, got {inner_mc}"
        )));
    }
    if n == 0 {
        // Zero samples reveal nothing: I(Z^0; W) = 0 identically.
        return Ok(MIEstimate {
            value: 0.0,
            std_error: 0.0,
            method: MIMethod::NestedMC,
            n,
            outer_mc,
            inner_mc,
            flagged_fraction: 0.0,
        });
    }

    let replicates: Vec<(f64, bool)> = (0..outer_mc)
        .into_par_iter()
        .map(|r| -> Result<(f64, bool)> {
            let mut rng = streams.child(r as u64).rng();
            let w = family.sample_prior(&mut rng);
            let data = family.draw_dataset(&w, n, &mut rng)?;
            let prob = family.consistency_prob(&data, inner_mc, &mut rng)?;
            Ok((-prob.value.ln(), prob.flagged))
        })
        .collect::<Result<Vec<_>>>()?;

    let values: Vec<f64> = replicates.iter().map(|(v, _)| *v).collect();
    let flagged = replicates.iter().filter(|(_, f)| *f).count();
    let (mean, se) = mean_and_std_error(&values);
    Ok(MIEstimate {
        value: mean,
        std_error: se,
        method: MIMethod::NestedMC,
        n,
        outer_mc,
        inner_mc,
        flagged_fraction: flagged as f64 / outer_mc as f64,
    })
}

/// Combinatorial-dimension cap on I(Z^n; W) for a binary family of
/// dimension `d_vc`: `d_vc·ln(e·n/d_vc)` once n ≥ d_vc, `d_vc·ln(e·n)`
/// below that, and 0 at n = 0.
#[must_use]
pub fn mi_vc_bound(d_vc: usize, n: usize) -> f64 {
    if n == 0 || d_vc == 0 {
        return 0.0;
    }
    let e = std::f64::consts::E;
    let (d, nf) = (d_vc as f64, n as f64);
    if n < d_vc {
        d * (e * nf).ln()
    } else {
        d * (e * nf / d).ln()
    }
}

/// Exact mutual information of the 2-D angular half-space family:
/// I(Z^n; W) = ψ(n) + γ (= H_{n−1}) in nats, 0 at n = 0.
#[must_use]
pub fn mi_digamma_2d(n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    digamma(n as f64) + EULER_GAMMA
}

/// Smooth-family asymptotic for I(Z^n; W):
///
/// ```text
/// (d_w/2)·ln(n/(2πe)) + (1/2)·E[ln det I_Z(W)] + h(W)
/// ```
///
/// Supported for families that expose Fisher determinants.  The o_n(1)
/// remainder is omitted.
///
/// # Errors
/// Rejects n = 0 and families without Fisher information.
pub fn mi_clarke_barron(family: &ModelFamily, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("the smooth-family asymptotic needs n >= 1"));
    }
    let dets = family.fisher_determinants().ok_or_else(|| Error::UnsupportedOperation {
        family: family.name(),
        op: "Fisher-information asymptotic".to_string(),
    })?;
    let dw = family.d_w() as f64;
    let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
    Ok(0.5 * dw * (n as f64 / two_pi_e).ln() + 0.5 * dets.det_z.ln() + family.prior_entropy())
}

/// Exact mutual information of the Gaussian location family with noise
/// scale σ and prior scale τ: I(Z^n; W) = ½·ln(1 + n·τ²/σ²).
pub fn mi_gaussian_exact(noise_sigma: f64, prior_tau: f64, n: usize) -> Result<f64> {
    if !(noise_sigma.is_finite() && noise_sigma > 0.0) {
        return Err(Error::invalid(format!("noise_sigma must be positive, got {noise_sigma}")));
    }
    if !(prior_tau.is_finite() && prior_tau > 0.0) {
        return Err(Error::invalid(format!("prior_tau must be positive, got {prior_tau}")));
    }
    let snr = prior_tau * prior_tau / (noise_sigma * noise_sigma);
    Ok(0.5 * (n as f64 * snr).ln_1p())
}

/// Dimension read off an information sweep: slope and intercept of the
/// least-squares line value ≈ slope·ln n + intercept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionFit {
    /// Fitted slope — the effective parameter dimension.
    pub slope: f64,
    /// Fitted intercept in nats.
    pub intercept: f64,
    /// Number of points used.
    pub points: usize,
}

fn check_fit_span(ns: &[usize]) -> Result<()> {
    if ns.len() < 3 {
        return Err(Error::invalid(format!(
            "dimension fit needs at least 3 points, got {}",
            ns.len()
        )));
    }
    if ns.contains(&0) {
        return Err(Error::invalid("dimension fit needs n >= 1 at every point"));
    }
    let min = *ns.iter().min().unwrap() as f64;
    let max = *ns.iter().max().unwrap() as f64;
    if max < 8.0 * min {
        return Err(Error::invalid(format!(
            "dimension fit needs an 8x spread in n, got {min}..{max}"
        )));
    }
    Ok(())
}

/// Unweighted least-squares fit of MI values against ln n.  Requires at
/// least 3 points spanning a factor of 8 in n.
pub fn mi_dimension_fit(points: &[(usize, f64)]) -> Result<DimensionFit> {
    let ns: Vec<usize> = points.iter().map(|(n, _)| *n).collect();
    check_fit_span(&ns)?;
    let xy: Vec<(f64, f64)> = points.iter().map(|&(n, v)| ((n as f64).ln(), v)).collect();
    let (slope, intercept) = ols_line(&xy);
    Ok(DimensionFit { slope, intercept, points: points.len() })
}

/// Variance-weighted variant of [`mi_dimension_fit`] (weights 1/σ²) for
/// sweeps whose error bars differ a lot across n.  Points are
/// (n, value, std_error) with std_error > 0.
pub fn mi_dimension_fit_weighted(points: &[(usize, f64, f64)]) -> Result<DimensionFit> {
    let ns: Vec<usize> = points.iter().map(|(n, _, _)| *n).collect();
    check_fit_span(&ns)?;
    if points.iter().any(|&(_, _, se)| !(se.is_finite() && se > 0.0)) {
        return Err(Error::invalid("weighted dimension fit needs positive std errors"));
    }
    let xyw: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|&(n, v, se)| ((n as f64).ln(), v, 1.0 / (se * se)))
        .collect();
    let (slope, intercept) = wls_line(&xyw);
    Ok(DimensionFit { slope, intercept, points: points.len() })
}

/// Result of the paired label-noise information measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseGap {
    /// Flip probability of the noisy channel.
    pub rho: f64,
    /// Sample size.
    pub n: usize,
    /// Estimate of the clean information I(X^n, Y^n; W).
    pub clean_mi: MIEstimate,
    /// Estimate of the noisy information I(X^n, Ỹ^n; W).
    pub noisy_mi: MIEstimate,
    /// Estimate of the gap I(X^n, Y^n; W) − I(X^n, Ỹ^n; W) ≥ 0.
    pub gap: MIEstimate,
}

impl NoiseGap {
    /// The gap per example, `gap / n`.
    ///
    /// The total gap equals H(flips | X^n, Ỹ^n) and **grows** with n
    /// toward an O(1) limit: more labels mean more flips to be uncertain
    /// about, even as each individual flip becomes easier to infer.  The
    /// quantity that decays to zero for a learnable family is this
    /// per-example version — the average information lost to the channel
    /// per label — so sample-size comparisons of "how much the noise
    /// hurts" should use it, not the total.
    ///
    /// Returns zero (exactly) at n = 0, where the total gap is zero too.
    #[must_use]
    pub fn gap_per_sample(&self) -> MIEstimate {
        if self.n == 0 {
            return self.gap;
        }
        let scale = self.n as f64;
        MIEstimate {
            value: self.gap.value / scale,
            std_error: self.gap.std_error / scale,
            ..self.gap
        }
    }
}

/// Measures the information destroyed when labels pass through a binary
/// symmetric channel with flip probability `rho`, for the 1-D threshold
/// families.
///
/// Each replicate draws (w, x^n, y^n), flips labels into ỹ^n, and
/// computes three exact per-replicate quantities:
///
/// * clean: −ln mass C(x^n, y^n);
/// * noisy: ln p(ỹ^n|x^n, w) − ln p(ỹ^n|x^n), with the evidence
///   integral evaluated in closed form by scanning the n+1 prediction
///   segments between sorted input coordinates (log-sum-exp, so extreme
///   flip counts cannot overflow);
/// * gap: their difference.
///
/// Pairing clean and noisy terms on the same replicate makes the realized
/// log-likelihood ln p(ỹ^n|x^n, w) act as a mean-exact control variate:
/// segments consistent with the clean labels mismatch ỹ exactly where the
/// channel flipped, so the gap is O(1) per replicate instead of carrying
/// the O(√n) fluctuation of the flip count, and it is nonnegative
/// replicate by replicate.  At ρ = ½ the noisy term vanishes and the gap
/// equals the clean term identically.
///
/// # Errors
/// Rejects families without closed-form consistency regions, ρ outside
/// (0, ½], and `outer_mc` < 100.
pub fn noise_info_gap(
    family: &ModelFamily,
    rho: f64,
    n: usize,
    outer_mc: usize,
    streams: Streams,
) -> Result<NoiseGap> {
    if !matches!(family, ModelFamily::Interval1D | ModelFamily::HalfSpaceAngle2D) {
        return Err(Error::UnsupportedOperation {
            family: family.name(),
            op: "label-noise information gap".to_string(),
        });
    }
    // Validates rho ∈ (0, ½] up front.
    let noisy_family = NoisyFamily::new(family.clone(), rho)?;
    check_outer_budget(outer_mc)?;

    let estimate = |value: f64, std_error: f64| MIEstimate {
        value,
        std_error,
        method: MIMethod::NoiseGapMC,
        n,
        outer_mc,
        inner_mc: 0,
        flagged_fraction: 0.0,
    };
    if n == 0 {
        return Ok(NoiseGap {
            rho,
            n,
            clean_mi: estimate(0.0, 0.0),
            noisy_mi: estimate(0.0, 0.0),
            gap: estimate(0.0, 0.0),
        });
    }

    let ln_ratio = (rho / (1.0 - rho)).ln();
    let replicates: Vec<(f64, f64)> = (0..outer_mc)
        .into_par_iter()
        .map(|r| -> Result<(f64, f64)> {
            let mut rng = streams.child(r as u64).rng();
            let w = family.sample_prior(&mut rng);
            let clean = family.draw_dataset(&w, n, &mut rng)?;
            let (noisy, flips) = noisy_family.flip_labels(&clean, &mut rng)?;
            let k_w = flips.iter().filter(|f| **f).count() as f64;

            let mass = match family.consistency_region(&clean)? {
                ConsistencyRegion::Interval(region) => region.mass(),
                ConsistencyRegion::Implicit => unreachable!("threshold families are closed-form"),
            };
            if mass <= 0.0 {
                return Err(Error::Numerical(
                    "clean consistency region has zero prior mass".to_string(),
                ));
            }
            let clean_value = -mass.ln();
            let noisy_value = -ln_evidence_ratio(
                &family.threshold_coords(&noisy)?,
                k_w,
                ln_ratio,
            );
            Ok((clean_value, noisy_value))
        })
        .collect::<Result<Vec<_>>>()?;

    let clean: Vec<f64> = replicates.iter().map(|(c, _)| *c).collect();
    let noisy: Vec<f64> = replicates.iter().map(|(_, v)| *v).collect();
    let gaps: Vec<f64> = replicates.iter().map(|(c, v)| c - v).collect();
    let (cm, cs) = mean_and_std_error(&clean);
    let (nm, ns) = mean_and_std_error(&noisy);
    let (gm, gs) = mean_and_std_error(&gaps);
    Ok(NoiseGap {
        rho,
        n,
        clean_mi: estimate(cm, cs),
        noisy_mi: estimate(nm, ns),
        gap: estimate(gm, gs),
    })
}

/// Computes ln [ p(ỹ^n|x^n) / p(ỹ^n|x^n, w) ] for a 1-D threshold family:
/// the evidence integral over v splits into the prediction segments
/// between sorted input coordinates, and on segment j the likelihood
/// ratio against the true parameter is r^(k_j − k_w) with r = ρ/(1−ρ)
/// and k_j the number of labels the segment's predictor mismatches.
///
/// Predictions are ŷ_i(v) = 1{coord_i ≥ v}; crossing a coordinate from
/// below flips that prediction from 1 to 0, so the mismatch count updates
/// by ±1 per coordinate and the whole scan is O(n log n).
fn ln_evidence_ratio(coords: &[(f64, bool)], k_w: f64, ln_ratio: f64) -> f64 {
    let mut sorted: Vec<(f64, bool)> = coords.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Below the smallest coordinate every prediction is 1, so mismatches
    // are exactly the zero labels.
    let mut k = sorted.iter().filter(|(_, y)| !*y).count() as f64;
    let mut terms: Vec<f64> = Vec::with_capacity(sorted.len() + 1);
    let mut prev = 0.0f64;
    for &(coord, y) in &sorted {
        let len = coord - prev;
        if len > 0.0 {
            terms.push(len.ln() + (k - k_w) * ln_ratio);
        }
        // v has crossed `coord`: its prediction flips 1 → 0.
        k += if y { 1.0 } else { -1.0 };
        prev = coord;
    }
    let len = 1.0 - prev;
    if len > 0.0 {
        terms.push(len.ln() + (k - k_w) * ln_ratio);
    }
    log_sum_exp(&terms)
}

/// Numerically stable ln Σ exp(t_j).
fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return f64::NEG_INFINITY;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}
