//! Rate-distortion machinery.
//!
//! Two complementary ways to evaluate the rate-distortion function
//!
//! ```text
//! R(D) = inf { I(W; Ŵ) : E[excess loss of Ŵ against W] ≤ D }
//! ```
//!
//! 1. **Analytic lower bounds** ([`slb_zero_one`], [`slb_smooth`]): Shannon
//!    lower bounds specialised to zero-one excess loss over μ-sensitive
//!    families, with optional worst-case-error and margin corrections, and
//!    to smooth families via Fisher information.  These are bounds, not the
//!    exact curve, and are what the excess-risk machinery in
//!    [`crate::bounds`] inverts.
//! 2. **Numerical solves** ([`blahut_arimoto`]): exact curves for
//!    finite-alphabet discretisations via the classic alternating
//!    minimisation, parameterised by curve slope, with the standard
//!    upper/lower Lagrangian gap as the convergence certificate.
//!
//! All rates are in nats.

use rayon::prelude::*;

use crate::error::Error;
use crate::families::ModelFamily;
use crate::Result;

/// Default convergence tolerance (nats) for the Blahut–Arimoto gap.
pub const BA_DEFAULT_TOL: f64 = 1e-8;

/// Default iteration budget per slope for Blahut–Arimoto.
pub const BA_DEFAULT_MAX_ITER: usize = 200_000;

/// Parameters of the zero-one-loss Shannon-style lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlbParams {
    /// Prior differential entropy h(W) in nats.
    pub prior_entropy: f64,
    /// Effective parameter dimension d_w ≥ 1.
    pub d_w: usize,
    /// Sensitivity constant μ > 0 linking discrepancy mass to ‖w−v‖∞.
    pub mu: f64,
    /// Worst-case error L_max ∈ [0, 1/2) of the known-parameter predictor.
    pub l_max: f64,
    /// Margin exponent t ∈ (0, 1]; t = 1 is the realizable case.
    pub margin_t: f64,
}

impl SlbParams {
    /// Realizable parameters (l_max = 0, margin 1).
    pub fn realizable(prior_entropy: f64, d_w: usize, mu: f64) -> Result<Self> {
        Self::new(prior_entropy, d_w, mu, 0.0, 1.0)
    }

    /// Fully general constructor with validation.
    pub fn new(prior_entropy: f64, d_w: usize, mu: f64, l_max: f64, margin_t: f64) -> Result<Self> {
        if !prior_entropy.is_finite() {
            return Err(Error::invalid("prior entropy must be finite"));
        }
        if d_w == 0 {
            return Err(Error::invalid("d_w must be a positive integer"));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::invalid(format!("mu must be positive and finite, got {mu}")));
        }
        if !(0.0..0.5).contains(&l_max) {
            return Err(Error::invalid(format!("l_max must lie in [0, 1/2), got {l_max}")));
        }
        if !(margin_t > 0.0 && margin_t <= 1.0) {
            return Err(Error::invalid(format!("margin_t must lie in (0, 1], got {margin_t}")));
        }
        Ok(SlbParams { prior_entropy, d_w, mu, l_max, margin_t })
    }

    /// Realizable parameters read off a classifier family (μ required).
    pub fn for_family(family: &ModelFamily) -> Result<Self> {
        let mu = family.mu().ok_or_else(|| {
            Error::invalid(format!("family {} has no sensitivity constant", family.name()))
        })?;
        Self::realizable(family.prior_entropy(), family.d_w(), mu)
    }

    /// The distortion at which the zero-one bound's positive-part clamp
    /// activates: the unique D with bracket = 0,
    /// `(1 − 2·l_max)·μ·t·exp(h/d_w) / (2e)`.
    #[must_use]
    pub fn zero_crossing(&self) -> f64 {
        (1.0 - 2.0 * self.l_max) * self.mu * self.margin_t
            * (self.prior_entropy / self.d_w as f64).exp()
            / (2.0 * std::f64::consts::E)
    }
}

/// Shannon-style lower bound on R(D) for zero-one excess loss:
///
/// ```text
/// R(D) ≥ [ h(W) − d_w · ln( 2eD / ((1 − 2·l_max) · μ · t) ) ]⁺
/// ```
///
/// With `l_max = 0`, `margin_t = 1` this is the realizable bound; the
/// margin factor inserts t the way the margin-condition variant does, so the
/// bound shifts by `d_w·ln(1/t)`.  The positive part clamps to exactly 0.
///
/// # Errors
/// Rejects `D ≤ 0` (and non-finite D).
pub fn slb_zero_one(params: &SlbParams, d: f64) -> Result<f64> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::invalid(format!("distortion must be positive and finite, got {d}")));
    }
    let denom = (1.0 - 2.0 * params.l_max) * params.mu * params.margin_t;
    let arg = 2.0 * std::f64::consts::E * d / denom;
    let bound = params.prior_entropy - params.d_w as f64 * arg.ln();
    Ok(bound.max(0.0))
}

/// Shannon lower bound on R(D) for smooth families under log loss:
///
/// ```text
/// R(D) ≥ [ h(W) − (d_w/2)·ln(4πeD/d_w) + (1/2)·ln det E[I_{Y|X,W}] ]⁺
/// ```
///
/// The asymptotic o_n(1) correction of the underlying statement is omitted;
/// the value returned is the leading term only.
///
/// # Errors
/// Rejects nonpositive `D`, nonpositive determinant, `d_w = 0`.
pub fn slb_smooth(h_w: f64, d_w: usize, det_fisher_y: f64, d: f64) -> Result<f64> {
    if d_w == 0 {
        return Err(Error::invalid("d_w must be a positive integer"));
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::invalid(format!("distortion must be positive and finite, got {d}")));
    }
    if !(det_fisher_y.is_finite() && det_fisher_y > 0.0) {
        return Err(Error::invalid(format!(
            "det_fisher_y must be positive and finite, got {det_fisher_y}"
        )));
    }
    let dw = d_w as f64;
    let arg = 4.0 * std::f64::consts::PI * std::f64::consts::E * d / dw;
    let bound = h_w - 0.5 * dw * arg.ln() + 0.5 * det_fisher_y.ln();
    Ok(bound.max(0.0))
}

/// A finite-alphabet rate-distortion problem: a prior over source atoms and
/// a square distortion matrix (reproduction alphabet = source alphabet).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteRDProblem {
    prior: Vec<f64>,
    distortion: Vec<Vec<f64>>,
}

impl DiscreteRDProblem {
    /// Validates and normalises a problem.  The prior may be given up to a
    /// positive scale factor; it is normalised here, which makes every
    /// downstream output invariant to uniform rescaling.
    pub fn new(prior: Vec<f64>, distortion: Vec<Vec<f64>>) -> Result<Self> {
        let k = prior.len();
        if k == 0 {
            return Err(Error::invalid("prior must be non-empty"));
        }
        if prior.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::invalid("prior entries must be nonnegative and finite"));
        }
        let total: f64 = prior.iter().sum();
        if total <= 0.0 {
            return Err(Error::invalid("prior must have positive total mass"));
        }
        if distortion.len() != k {
            return Err(Error::invalid(format!(
                "distortion matrix must have {k} rows, got {}",
                distortion.len()
            )));
        }
        for (i, row) in distortion.iter().enumerate() {
            if row.len() != k {
                return Err(Error::invalid(format!(
                    "distortion row {i} must have {k} entries, got {}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::invalid(format!(
                    "distortion entries must be nonnegative and finite (row {i})"
                )));
            }
            if row[i] != 0.0 {
                return Err(Error::invalid(format!(
                    "distortion must vanish on the diagonal, got {} at [{i}][{i}]",
                    row[i]
                )));
            }
        }
        let prior = prior.into_iter().map(|p| p / total).collect();
        Ok(DiscreteRDProblem { prior, distortion })
    }

    /// The classic binary source with Hamming distortion and uniform prior
    /// (closed form R(D) = ln 2 − H_b(D) for D ≤ 1/2).
    #[must_use]
    pub fn binary_hamming() -> Self {
        DiscreteRDProblem {
            prior: vec![0.5, 0.5],
            distortion: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        }
    }

    /// Uniform midpoint-grid discretisation of a 1-D threshold family:
    /// atoms w_i = (i + 1/2)/k with the family's own discrepancy as
    /// distortion.
    pub fn from_threshold_family(family: &ModelFamily, grid: usize) -> Result<Self> {
        if !matches!(family, ModelFamily::Interval1D | ModelFamily::HalfSpaceAngle2D) {
            return Err(Error::invalid(format!(
                "grid discretisation is defined for the 1-D threshold families, not {}",
                family.name()
            )));
        }
        if grid < 2 {
            return Err(Error::invalid(format!("grid must have at least 2 atoms, got {grid}")));
        }
        let atoms: Vec<f64> = (0..grid).map(|i| (i as f64 + 0.5) / grid as f64).collect();
        let mut distortion = vec![vec![0.0; grid]; grid];
        for i in 0..grid {
            for j in 0..grid {
                distortion[i][j] = family.discrepancy_prob(
                    &crate::families::Param::Scalar(atoms[i]),
                    &crate::families::Param::Scalar(atoms[j]),
                )?;
            }
        }
        DiscreteRDProblem::new(vec![1.0; grid], distortion)
    }

    /// Number of source atoms.
    #[must_use]
    pub fn len(&self) -> usize {
        self.prior.len()
    }

    /// True when the problem has no atoms (never, post-construction).
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.prior.is_empty()
    }

    /// Normalised prior vector.
    #[must_use]
    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    /// Distortion matrix.
    #[must_use]
    pub fn distortion(&self) -> &[Vec<f64>] {
        &self.distortion
    }
}

/// Largest distortion worth plotting: the best single-reproduction expected
/// distortion `min_j Σ_i prior[i]·distortion[i][j]`.  R(D) = 0 for all
/// D at or beyond this point.
#[must_use]
pub fn rd_dmax(problem: &DiscreteRDProblem) -> f64 {
    let k = problem.len();
    (0..k)
        .map(|j| {
            problem
                .prior
                .iter()
                .enumerate()
                .map(|(i, p)| p * problem.distortion[i][j])
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Provenance of a rate-distortion curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RDMethod {
    /// Analytic Shannon lower bound.
    ShannonLB,
    /// Numerical Blahut–Arimoto solve.
    BlahutArimoto,
}

impl RDMethod {
    /// Stable identifier used in CSV output.
    #[must_use]
    pub fn as_str(&self) -> &'static str {
        match self {
            RDMethod::ShannonLB => "ShannonLB",
            RDMethod::BlahutArimoto => "BlahutArimoto",
        }
    }
}

/// One point of a rate-distortion curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RDPoint {
    /// Distortion coordinate D ≥ 0.
    pub distortion: f64,
    /// Rate coordinate R ≥ 0, nats.
    pub rate: f64,
    /// Curve slope dR/dD ≤ 0 at this point (the Lagrange parameter for
    /// Blahut–Arimoto points, the analytic derivative for Shannon bounds).
    pub slope: f64,
    /// Iterations the solver spent on this point (0 for closed forms).
    pub iterations: usize,
    /// Final convergence gap in nats (0 for closed forms).
    pub gap: f64,
}

/// A rate-distortion curve: points sorted by increasing distortion.
#[derive(Debug, Clone, PartialEq)]
pub struct RDCurve {
    /// How the points were produced.
    pub method: RDMethod,
    /// Points sorted by increasing D.
    pub points: Vec<RDPoint>,
}

impl RDCurve {
    /// Verifies R is nonincreasing in D (tolerance for float noise).
    pub fn check_nonincreasing(&self, tol: f64) -> Result<()> {
        for pair in self.points.windows(2) {
            if pair[1].rate > pair[0].rate + tol {
                return Err(Error::MonotonicityViolation {
                    what: "rate-distortion curve",
                    x0: pair[0].distortion,
                    x1: pair[1].distortion,
                    y0: pair[0].rate,
                    y1: pair[1].rate,
                });
            }
        }
        Ok(())
    }

    /// Verifies convexity in D via chord tests on consecutive triples.
    pub fn check_convex(&self, tol: f64) -> Result<()> {
        for triple in self.points.windows(3) {
            let (a, b, c) = (triple[0], triple[1], triple[2]);
            let span = c.distortion - a.distortion;
            if span <= 0.0 {
                continue;
            }
            let lambda = (b.distortion - a.distortion) / span;
            let chord = (1.0 - lambda) * a.rate + lambda * c.rate;
            if b.rate > chord + tol {
                return Err(Error::Numerical(format!(
                    "convexity violation: R({:.6e}) = {:.6e} exceeds chord {:.6e}",
                    b.distortion, b.rate, chord
                )));
            }
        }
        Ok(())
    }
}

/// Internal result of one Blahut–Arimoto solve.
struct BaSolve {
    point: RDPoint,
    /// Reproduction marginal at convergence, reusable as a warm start.
    marginal: Vec<f64>,
}

/// Core Blahut–Arimoto alternating minimisation at a fixed Lagrange slope.
///
/// For β = −slope the algorithm minimises the Lagrangian
/// `F(q) = −Σ_i p_i ln Σ_j q_j exp(−β d_ij)` over reproduction marginals q
/// by the multiplicative update `q_j ← q_j·c_j` with
/// `c_j = Σ_i p_i·exp(−β d_ij)/Z_i`.  The iteration stops when the standard
/// upper/lower bound gap `max_j ln c_j` drops below `tol`; the update never
/// increases F, and that monotonicity is enforced on every iteration.
fn ba_solve(
    problem: &DiscreteRDProblem,
    slope: f64,
    max_iter: usize,
    tol: f64,
    warm_start: Option<&[f64]>,
) -> Result<BaSolve> {
    if !(slope.is_finite() && slope < 0.0) {
        return Err(Error::invalid(format!("slope must be negative and finite, got {slope}")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    if max_iter == 0 {
        return Err(Error::invalid("max_iter must be at least 1"));
    }
    let beta = -slope;
    let k = problem.len();
    let p = &problem.prior;
    // Boltzmann kernel a_ij = exp(−β·d_ij); the diagonal is exp(0) = 1, so
    // every row has at least one O(1) entry and Z_i never underflows.
    let a: Vec<Vec<f64>> = problem
        .distortion
        .iter()
        .map(|row| row.iter().map(|d| (-beta * d).exp()).collect())
        .collect();

    let mut q: Vec<f64> = match warm_start {
        Some(init) if init.len() == k && init.iter().all(|v| *v >= 0.0 && v.is_finite()) => {
            let s: f64 = init.iter().sum();
            if s > 0.0 {
                init.iter().map(|v| v / s).collect()
            } else {
                vec![1.0 / k as f64; k]
            }
        }
        _ => vec![1.0 / k as f64; k],
    };

    let mut z = vec![0.0f64; k];
    let mut c = vec![0.0f64; k];
    let mut prev_lagrangian = f64::INFINITY;
    let mut gap = f64::INFINITY;

    for iter in 1..=max_iter {
        // Partition values Z_i = Σ_j q_j a_ij and Lagrangian F = −Σ p_i ln Z_i.
        let mut lagrangian = 0.0;
        for i in 0..k {
            let zi: f64 = a[i].iter().zip(&q).map(|(aij, qj)| aij * qj).sum();
            if !(zi.is_finite() && zi > 0.0) {
                return Err(Error::Numerical(format!(
                    "Blahut-Arimoto partition value degenerate at row {i}: {zi}"
                )));
            }
            z[i] = zi;
            lagrangian -= p[i] * zi.ln();
        }
        let slack = 1e-9 * (1.0 + lagrangian.abs());
        if lagrangian > prev_lagrangian + slack {
            return Err(Error::Numerical(format!(
                "Blahut-Arimoto Lagrangian increased: {prev_lagrangian:.12e} -> {lagrangian:.12e}"
            )));
        }
        prev_lagrangian = lagrangian;

        // Growth factors c_j and the Blahut optimality gap max_j ln c_j.
        let mut max_c: f64 = 0.0;
        for j in 0..k {
            let cj: f64 = (0..k).map(|i| p[i] * a[i][j] / z[i]).sum();
            c[j] = cj;
            if cj > max_c {
                max_c = cj;
            }
        }
        gap = max_c.ln();
        if gap < tol {
            return Ok(BaSolve { point: assemble_point(problem, &a, &q, &z, slope, iter, gap), marginal: q });
        }

        // Multiplicative update with defensive renormalisation.
        let mut total = 0.0;
        for j in 0..k {
            q[j] *= c[j];
            total += q[j];
        }
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::Numerical("Blahut-Arimoto marginal lost all mass".to_string()));
        }
        for qj in &mut q {
            *qj /= total;
        }
    }

    Err(Error::NoConvergence {
        what: "Blahut-Arimoto",
        max_iter,
        residual: gap,
        tol,
    })
}

/// Builds the (D, R) point induced by the current marginal.
fn assemble_point(
    problem: &DiscreteRDProblem,
    a: &[Vec<f64>],
    q: &[f64],
    z: &[f64],
    slope: f64,
    iterations: usize,
    gap: f64,
) -> RDPoint {
    let k = problem.len();
    let p = &problem.prior;
    // Optimal conditional for this marginal: Q(j|i) = q_j a_ij / Z_i.
    let mut marginal = vec![0.0f64; k];
    let mut distortion = 0.0;
    for i in 0..k {
        for j in 0..k {
            let cond = q[j] * a[i][j] / z[i];
            marginal[j] += p[i] * cond;
            distortion += p[i] * cond * problem.distortion[i][j];
        }
    }
    let mut rate = 0.0;
    for i in 0..k {
        for j in 0..k {
            let cond = q[j] * a[i][j] / z[i];
            if cond > 0.0 && marginal[j] > 0.0 {
                rate += p[i] * cond * (cond / marginal[j]).ln();
            }
        }
    }
    RDPoint { distortion, rate: rate.max(0.0), slope, iterations, gap }
}

/// Solves one rate-distortion point at a fixed curve slope.
pub fn ba_point(
    problem: &DiscreteRDProblem,
    slope: f64,
    max_iter: usize,
    tol: f64,
) -> Result<RDPoint> {
    ba_solve(problem, slope, max_iter, tol, None).map(|s| s.point)
}

/// Sweeps a list of slopes and assembles the rate-distortion curve,
/// sorted by increasing distortion.  Slopes may be evaluated concurrently;
/// the output ordering is deterministic.
pub fn blahut_arimoto(
    problem: &DiscreteRDProblem,
    slopes: &[f64],
    max_iter: usize,
    tol: f64,
) -> Result<RDCurve> {
    if slopes.is_empty() {
        return Err(Error::invalid("slope list must be non-empty"));
    }
    let mut points = slopes
        .par_iter()
        .map(|&s| ba_point(problem, s, max_iter, tol))
        .collect::<Result<Vec<_>>>()?;
    points.sort_by(|x, y| x.distortion.total_cmp(&y.distortion));
    Ok(RDCurve { method: RDMethod::BlahutArimoto, points })
}

/// Finds the curve point at a target distortion by bisection over the slope
/// (distortion is monotone decreasing in β = −slope).  Warm-starts each
/// solve with the previous marginal, which keeps the total iteration count
/// modest.
///
/// # Errors
/// Rejects targets outside (0, rd_dmax); propagates solver failures.
pub fn ba_point_at_distortion(
    problem: &DiscreteRDProblem,
    d_target: f64,
    d_tol: f64,
    max_iter: usize,
    tol: f64,
) -> Result<RDPoint> {
    let dmax = rd_dmax(problem);
    if !(d_target.is_finite() && d_target > 0.0 && d_target < dmax) {
        return Err(Error::invalid(format!(
            "target distortion must lie in (0, {dmax:.6e}), got {d_target}"
        )));
    }
    if !(d_tol.is_finite() && d_tol > 0.0) {
        return Err(Error::invalid("distortion tolerance must be positive"));
    }

    // Bracket the target: distortion(β) decreases from ~dmax (β→0) to ~0.
    let mut beta_lo = 1e-4; // low β, high distortion
    let mut solve_lo = ba_solve(problem, -beta_lo, max_iter, tol, None)?;
    while solve_lo.point.distortion < d_target {
        beta_lo *= 0.25;
        if beta_lo < 1e-18 {
            return Err(Error::Numerical(format!(
                "could not bracket distortion {d_target:.6e} from above"
            )));
        }
        solve_lo = ba_solve(problem, -beta_lo, max_iter, tol, Some(&solve_lo.marginal))?;
    }
    let mut beta_hi = beta_lo.max(1.0);
    let mut solve_hi = ba_solve(problem, -beta_hi, max_iter, tol, Some(&solve_lo.marginal))?;
    while solve_hi.point.distortion > d_target {
        beta_hi *= 4.0;
        if beta_hi > 1e15 {
            return Err(Error::Numerical(format!(
                "could not bracket distortion {d_target:.6e} from below"
            )));
        }
        solve_hi = ba_solve(problem, -beta_hi, max_iter, tol, Some(&solve_hi.marginal))?;
    }

    // Bisection on β.
    let mut warm = solve_hi.marginal.clone();
    let mut best = if (solve_lo.point.distortion - d_target).abs()
        <= (solve_hi.point.distortion - d_target).abs()
    {
        solve_lo.point
    } else {
        solve_hi.point
    };
    for _ in 0..200 {
        if (best.distortion - d_target).abs() <= d_tol {
            break;
        }
        let beta_mid = 0.5 * (beta_lo + beta_hi);
        let solve_mid = ba_solve(problem, -beta_mid, max_iter, tol, Some(&warm))?;
        warm = solve_mid.marginal;
        if (solve_mid.point.distortion - d_target).abs() < (best.distortion - d_target).abs() {
            best = solve_mid.point;
        }
        if solve_mid.point.distortion > d_target {
            beta_lo = beta_mid;
        } else {
            beta_hi = beta_mid;
        }
        if (beta_hi - beta_lo) <= 1e-14 * beta_hi {
            break;
        }
    }
    if (best.distortion - d_target).abs() > d_tol {
        return Err(Error::NoConvergence {
            what: "slope bisection for distortion target",
            max_iter: 200,
            residual: (best.distortion - d_target).abs(),
            tol: d_tol,
        });
    }
    Ok(best)
}

/// Evaluates the zero-one Shannon lower bound on a distortion grid and
/// packages it as a curve.  The slope column carries the analytic
/// derivative −d_w/D where the bound is active and 0 where clamped.
pub fn slb_curve(params: &SlbParams, distortions: &[f64]) -> Result<RDCurve> {
    if distortions.is_empty() {
        return Err(Error::invalid("distortion grid must be non-empty"));
    }
    let mut points = Vec::with_capacity(distortions.len());
    for &d in distortions {
        let rate = slb_zero_one(params, d)?;
        let slope = if rate > 0.0 { -(params.d_w as f64) / d } else { 0.0 };
        points.push(RDPoint { distortion: d, rate, slope, iterations: 0, gap: 0.0 });
    }
    points.sort_by(|x, y| x.distortion.total_cmp(&y.distortion));
    Ok(RDCurve { method: RDMethod::ShannonLB, points })
}
