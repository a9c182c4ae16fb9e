//! Model families under study: priors, sampling, labelling, consistency
//! geometry and parameter-discrepancy metrics.
//!
//! A *family* couples a prior P_W over parameters with a conditional
//! observation law P_{Z|W} for samples Z = (X, Y).  The classifier families
//! are **realizable**: labels are a deterministic function of (X, W), so a
//! labelled dataset carves out a *consistency set*
//!
//! ```text
//! C(z^n) = { v : v labels every xᵢ exactly as observed }
//! ```
//!
//! whose prior mass drives the mutual-information estimators in
//! [`crate::miest`].
//!
//! | family                 | parameter        | d_w  | d_vc | μ    | h(W)            |
//! |------------------------|------------------|------|------|------|-----------------|
//! | `Interval1D`           | w ∈ [0,1]        | 1    | 1    | 1    | 0               |
//! | `HalfSpaceAngle2D`     | w ∈ [0,1)        | 1    | 2    | 1/π  | 0               |
//! | `HalfSpaceUnitSphere`  | w ∈ S^{d−1} ⊂ R^d| d−1  | d    | 1/π  | ln area(S^{d−1})|
//! | `GaussianLocation`     | w ∈ R            | 1    | —    | —    | ½·ln(2πeτ²)     |
//!
//! * d_w is the *effective* parameter dimension (the unit sphere is a
//!   (d−1)-manifold, so the sphere family reports d−1 even though parameters
//!   are stored as ambient d-vectors).
//! * μ is the sensitivity constant tying the zero-one discrepancy to a
//!   parameter metric, `P(labels differ) ≥ μ·‖w−v‖∞`; for unit vectors this
//!   follows from `arccos(w·v) ≥ ‖w−v‖∞`.
//! * h(W) is the differential entropy of the prior in nats.  For the sphere
//!   family it is quoted with respect to the surface measure of S^{d−1}.
//!
//! `GaussianLocation` is the one non-realizable family: Y = W + σ·ε with a
//! Gaussian prior W ~ N(0, τ²).  It exists to exercise the smooth-loss
//! machinery (Fisher determinants, asymptotic mutual-information formulas)
//! and rejects classifier-only operations with a typed error.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::Result;

/// Significance level for the flagged zero-hit sentinel of Monte Carlo
/// consistency probabilities.
pub const ZERO_HIT_ALPHA: f64 = 0.05;

/// Tolerance for accepting an ambient vector as a unit vector.
const UNIT_NORM_TOL: f64 = 1e-9;

/// A parameter or input point: scalar for 1-D families, vector otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum RealVec {
    /// One-dimensional value.
    Scalar(f64),
    /// Ambient vector (unit-norm where the family demands it).
    Vector(Vec<f64>),
}

/// Family parameter.
pub type Param = RealVec;
/// Input point.
pub type Point = RealVec;

impl RealVec {
    /// Extracts the scalar payload.
    pub fn scalar(&self) -> Result<f64> {
        match self {
            RealVec::Scalar(v) => Ok(*v),
            RealVec::Vector(_) => Err(Error::invalid("expected a scalar, got a vector")),
        }
    }

    /// Extracts the vector payload.
    pub fn vector(&self) -> Result<&[f64]> {
        match self {
            RealVec::Vector(v) => Ok(v),
            RealVec::Scalar(_) => Err(Error::invalid("expected a vector, got a scalar")),
        }
    }
}

/// Observation label: a class bit for classifier families, a real response
/// for regression families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Label {
    /// Binary class label.
    Class(bool),
    /// Real-valued response.
    Value(f64),
}

impl Label {
    /// Extracts the class bit.
    pub fn class(&self) -> Result<bool> {
        match self {
            Label::Class(b) => Ok(*b),
            Label::Value(_) => Err(Error::invalid("expected a class label, got a real value")),
        }
    }
}

/// One observation Z = (X, Y).
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// Input point.
    pub x: Point,
    /// Observed label.
    pub y: Label,
}

/// A dataset z^n is an ordered list of samples.
pub type Dataset = Vec<Sample>;

/// Closed-form description of a consistency set, when one exists.
#[derive(Debug, Clone, PartialEq)]
pub enum ConsistencyRegion {
    /// Sub-interval of the 1-D parameter space (for `HalfSpaceAngle2D` this
    /// is the arc between the two observed classes, in normalized-angle
    /// coordinates).
    Interval(IntervalRegion),
    /// No closed form; membership must be tested point-by-point via
    /// [`ModelFamily::is_consistent`].
    Implicit,
}

/// A (possibly half-open) interval region inside the unit parameter range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalRegion {
    /// Lower endpoint.
    pub lo: f64,
    /// Upper endpoint.
    pub hi: f64,
    /// Whether `lo` itself belongs to the region.
    pub lo_closed: bool,
    /// Whether `hi` itself belongs to the region.
    pub hi_closed: bool,
}

impl IntervalRegion {
    /// Prior mass of the region under the uniform prior on the unit range.
    #[must_use]
    pub fn mass(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    /// Membership test honouring endpoint closedness.
    #[must_use]
    pub fn contains(&self, w: f64) -> bool {
        let above = if self.lo_closed { w >= self.lo } else { w > self.lo };
        let below = if self.hi_closed { w <= self.hi } else { w < self.hi };
        above && below
    }

    /// Midpoint of the region.
    #[must_use]
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Probability estimate with provenance: exact closed form or Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbEstimate {
    /// Point estimate of the probability.
    pub value: f64,
    /// Standard error (0 for closed forms and flagged sentinels).
    pub std_error: f64,
    /// True when a Monte Carlo estimator saw zero hits and `value` is the
    /// one-sided sentinel [`zero_hit_upper_bound`], not an unbiased estimate.
    pub flagged: bool,
    /// True when the value is an exact closed form.
    pub exact: bool,
}

/// One-sided upper bound reported when an `inner_mc`-draw Monte Carlo
/// estimator records zero hits: `1 − (1 − α)^(1/inner_mc)` with α = 0.05.
/// It is monotone decreasing in the budget and keeps downstream logarithms
/// finite; estimates built from it are flagged, never silently trusted.
#[must_use]
pub fn zero_hit_upper_bound(inner_mc: usize) -> f64 {
    1.0 - (1.0 - ZERO_HIT_ALPHA).powf(1.0 / inner_mc as f64)
}

/// Fisher-information determinants of a smooth family, per observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherDets {
    /// det of the Fisher information of a full observation Z = (X, Y).
    pub det_z: f64,
    /// det of the Fisher information of the response Y given X.
    pub det_y: f64,
}

/// The model families of the laboratory.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelFamily {
    /// Threshold classifier on [0,1]: X ~ U[0,1], Y = 1 iff X ≥ W,
    /// W ~ U[0,1].
    Interval1D,
    /// Half-plane classifier on the circle, parameterised by the normalized
    /// angle W ~ U[0,1): X is a uniform direction in R² and Y = 1 iff the
    /// normalized angle of X is ≥ W.
    HalfSpaceAngle2D,
    /// Homogeneous half-space in R^d: W uniform on the unit sphere S^{d−1},
    /// X uniform on S^{d−1}, Y = 1 iff ⟨W, X⟩ ≥ 0.
    HalfSpaceUnitSphere {
        /// Ambient dimension d ≥ 2.
        ambient_dim: usize,
    },
    /// Gaussian location family: W ~ N(0, τ²), Y = W + σ·ε with ε ~ N(0,1).
    /// X is a standard normal scalar that carries no information about W.
    GaussianLocation {
        /// Observation noise σ > 0.
        noise_sigma: f64,
        /// Prior scale τ > 0.
        prior_tau: f64,
    },
}

impl ModelFamily {
    /// Constructs the sphere family, validating the dimension.
    pub fn half_space_unit_sphere(ambient_dim: usize) -> Result<Self> {
        if ambient_dim < 2 {
            return Err(Error::invalid(format!(
                "unit-sphere family needs ambient dimension >= 2, got {ambient_dim}"
            )));
        }
        Ok(ModelFamily::HalfSpaceUnitSphere { ambient_dim })
    }

    /// Constructs the Gaussian location family, validating the scales.
    pub fn gaussian_location(noise_sigma: f64, prior_tau: f64) -> Result<Self> {
        if !(noise_sigma.is_finite() && noise_sigma > 0.0 && prior_tau.is_finite() && prior_tau > 0.0)
        {
            return Err(Error::invalid(format!(
                "Gaussian location family needs positive finite scales, got sigma={noise_sigma}, tau={prior_tau}"
            )));
        }
        Ok(ModelFamily::GaussianLocation { noise_sigma, prior_tau })
    }

    /// Stable machine-readable name (used in CSV columns and file names).
    #[must_use]
    pub fn name(&self) -> String {
        match self {
            ModelFamily::Interval1D => "interval1d".to_string(),
            ModelFamily::HalfSpaceAngle2D => "halfspace_angle2d".to_string(),
            ModelFamily::HalfSpaceUnitSphere { ambient_dim } => {
                format!("halfspace_sphere{ambient_dim}")
            }
            ModelFamily::GaussianLocation { .. } => "gaussian_location".to_string(),
        }
    }

    /// Effective parameter dimension d_w.
    #[must_use]
    pub fn d_w(&self) -> usize {
        match self {
            ModelFamily::Interval1D | ModelFamily::HalfSpaceAngle2D => 1,
            ModelFamily::HalfSpaceUnitSphere { ambient_dim } => ambient_dim - 1,
            ModelFamily::GaussianLocation { .. } => 1,
        }
    }

    /// VC dimension of the induced classifier class.  The Gaussian location
    /// family induces no classifier; it reports 1 so the accessor stays
    /// total, and every classifier-specific operation rejects it anyway.
    #[must_use]
    pub fn d_vc(&self) -> usize {
        match self {
            ModelFamily::Interval1D => 1,
            ModelFamily::HalfSpaceAngle2D => 2,
            ModelFamily::HalfSpaceUnitSphere { ambient_dim } => *ambient_dim,
            ModelFamily::GaussianLocation { .. } => 1,
        }
    }

    /// Sensitivity constant μ with `P(labels differ) ≥ μ·‖w−v‖∞`, when the
    /// family has one.
    #[must_use]
    pub fn mu(&self) -> Option<f64> {
        match self {
            ModelFamily::Interval1D => Some(1.0),
            ModelFamily::HalfSpaceAngle2D | ModelFamily::HalfSpaceUnitSphere { .. } => {
                Some(std::f64::consts::FRAC_1_PI)
            }
            ModelFamily::GaussianLocation { .. } => None,
        }
    }

    /// Differential entropy h(W) of the prior, in nats.
    #[must_use]
    pub fn prior_entropy(&self) -> f64 {
        match self {
            ModelFamily::Interval1D | ModelFamily::HalfSpaceAngle2D => 0.0,
            ModelFamily::HalfSpaceUnitSphere { ambient_dim } => {
                ln_sphere_surface_area(*ambient_dim)
            }
            ModelFamily::GaussianLocation { prior_tau, .. } => {
                0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * prior_tau * prior_tau)
                    .ln()
            }
        }
    }

    /// Whether labels are a deterministic function of (X, W).
    #[must_use]
    pub fn realizable(&self) -> bool {
        !matches!(self, ModelFamily::GaussianLocation { .. })
    }

    /// Per-observation Fisher determinants for smooth families.
    ///
    /// For the location family the score w.r.t. w of N(w, σ²) has variance
    /// 1/σ² whatever X is, so det I_{Z|W} = det I_{Y|X,W} = 1/σ².
    #[must_use]
    pub fn fisher_determinants(&self) -> Option<FisherDets> {
        match self {
            ModelFamily::GaussianLocation { noise_sigma, .. } => {
                let det = 1.0 / (noise_sigma * noise_sigma);
                Some(FisherDets { det_z: det, det_y: det })
            }
            _ => None,
        }
    }

    /// Validates that `w` lies in the family's parameter support.
    pub fn check_param(&self, w: &Param) -> Result<()> {
        match self {
            ModelFamily::Interval1D => {
                let v = w.scalar()?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::UnsupportedParameter(format!(
                        "interval1d parameter must lie in [0,1], got {v}"
                    )));
                }
            }
            ModelFamily::HalfSpaceAngle2D => {
                let v = w.scalar()?;
                if !(0.0..1.0).contains(&v) {
                    return Err(Error::UnsupportedParameter(format!(
                        "halfspace_angle2d parameter must lie in [0,1), got {v}"
                    )));
                }
            }
            ModelFamily::HalfSpaceUnitSphere { ambient_dim } => {
                let v = w.vector()?;
                if v.len() != *ambient_dim {
                    return Err(Error::UnsupportedParameter(format!(
                        "sphere parameter must have dimension {ambient_dim}, got {}",
                        v.len()
                    )));
                }
                let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > UNIT_NORM_TOL {
                    return Err(Error::UnsupportedParameter(format!(
                        "sphere parameter must be unit-norm, got norm {norm}"
                    )));
                }
            }
            ModelFamily::GaussianLocation { .. } => {
                let v = w.scalar()?;
                if !v.is_finite() {
                    return Err(Error::UnsupportedParameter(format!(
                        "location parameter must be finite, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Draws one parameter from the prior.
    pub fn sample_prior<R: Rng>(&self, rng: &mut R) -> Param {
        match self {
            ModelFamily::Interval1D | ModelFamily::HalfSpaceAngle2D => {
                Param::Scalar(rng.random::<f64>())
            }
            ModelFamily::HalfSpaceUnitSphere { ambient_dim } => {
                Param::Vector(sample_unit_vector(*ambient_dim, rng))
            }
            ModelFamily::GaussianLocation { prior_tau, .. } => {
                let z: f64 = rng.sample(StandardNormal);
                Param::Scalar(prior_tau * z)
            }
        }
    }

    /// Draws one input point from P_X (independent of W for every family).
    pub fn sample_input<R: Rng>(&self, rng: &mut R) -> Point {
        match self {
            ModelFamily::Interval1D => Point::Scalar(rng.random::<f64>()),
            ModelFamily::HalfSpaceAngle2D => {
                let theta = rng.random::<f64>();
                let rad = 2.0 * std::f64::consts::PI * theta;
                Point::Vector(vec![rad.cos(), rad.sin()])
            }
            ModelFamily::HalfSpaceUnitSphere { ambient_dim } => {
                Point::Vector(sample_unit_vector(*ambient_dim, rng))
            }
            ModelFamily::GaussianLocation { .. } => {
                Point::Scalar(rng.sample(StandardNormal))
            }
        }
    }

    /// Deterministic class bit assigned by parameter `w` to input `x`
    /// (classifier families only).
    ///
    /// Boundary convention: ties go to class 1 (`x = w` labels 1 for
    /// `Interval1D`, `⟨w,x⟩ = 0` labels 1 on the sphere).
    pub fn classify(&self, x: &Point, w: &Param) -> Result<bool> {
        match self {
            ModelFamily::Interval1D => Ok(x.scalar()? >= w.scalar()?),
            ModelFamily::HalfSpaceAngle2D => Ok(normalized_angle(x)? >= w.scalar()?),
            ModelFamily::HalfSpaceUnitSphere { ambient_dim } => {
                let xv = x.vector()?;
                let wv = w.vector()?;
                if xv.len() != *ambient_dim || wv.len() != *ambient_dim {
                    return Err(Error::invalid(format!(
                        "sphere classify needs {ambient_dim}-vectors, got x:{} w:{}",
                        xv.len(),
                        wv.len()
                    )));
                }
                Ok(dot(wv, xv) >= 0.0)
            }
            ModelFamily::GaussianLocation { .. } => Err(self.unsupported("classify")),
        }
    }

    /// Draws the label of `x` under parameter `w`.  Deterministic for
    /// classifier families; consumes randomness only for regression noise.
    pub fn label<R: Rng>(&self, x: &Point, w: &Param, rng: &mut R) -> Result<Label> {
        match self {
            ModelFamily::GaussianLocation { noise_sigma, .. } => {
                let eps: f64 = rng.sample(StandardNormal);
                Ok(Label::Value(w.scalar()? + noise_sigma * eps))
            }
            _ => Ok(Label::Class(self.classify(x, w)?)),
        }
    }

    /// Draws an n-sample dataset z^n ~ P_{Z|W=w}^{⊗n}.
    pub fn draw_dataset<R: Rng>(&self, w: &Param, n: usize, rng: &mut R) -> Result<Dataset> {
        let mut data = Vec::with_capacity(n);
        for _ in 0..n {
            let x = self.sample_input(rng);
            let y = self.label(&x, w, rng)?;
            data.push(Sample { x, y });
        }
        Ok(data)
    }

    /// Probability, over a fresh input X, that parameters `w` and `v`
    /// assign different labels.
    ///
    /// Closed forms:
    /// * `Interval1D`: |w − v| (exactly the inputs between the two
    ///   thresholds).
    /// * `HalfSpaceAngle2D`: |w − v| — the classifier thresholds the
    ///   normalized angle, so the two rules disagree exactly on inputs
    ///   whose angle falls between the two thresholds, an arc of measure
    ///   |w − v| under the isotropic input law.
    /// * `HalfSpaceUnitSphere`: arccos(⟨w, v⟩)/π, the classic spherical
    ///   wedge fraction.
    pub fn discrepancy_prob(&self, w: &Param, v: &Param) -> Result<f64> {
        self.check_param(w)?;
        self.check_param(v)?;
        match self {
            ModelFamily::Interval1D => Ok((w.scalar()? - v.scalar()?).abs()),
            ModelFamily::HalfSpaceAngle2D => Ok((w.scalar()? - v.scalar()?).abs()),
            ModelFamily::HalfSpaceUnitSphere { .. } => {
                let cos = dot(w.vector()?, v.vector()?).clamp(-1.0, 1.0);
                Ok(cos.acos() / std::f64::consts::PI)
            }
            ModelFamily::GaussianLocation { .. } => Err(self.unsupported("discrepancy_prob")),
        }
    }

    /// Excess zero-one risk of predicting with `v` when the truth is `w`.
    ///
    /// For a realizable family the true parameter has zero risk, so the
    /// excess risk of `v` is exactly the label-disagreement probability
    /// [`ModelFamily::discrepancy_prob`].
    pub fn excess_loss(&self, w: &Param, v: &Param) -> Result<f64> {
        if !self.realizable() {
            return Err(self.unsupported("excess_loss (exact form needs a realizable family)"));
        }
        self.discrepancy_prob(w, v)
    }

    /// Extracts `(threshold coordinate, class bit)` pairs for the 1-D
    /// threshold families.
    pub(crate) fn threshold_coords(&self, data: &Dataset) -> Result<Vec<(f64, bool)>> {
        data.iter()
            .map(|s| {
                let coord = match self {
                    ModelFamily::Interval1D => s.x.scalar()?,
                    ModelFamily::HalfSpaceAngle2D => normalized_angle(&s.x)?,
                    _ => return Err(self.unsupported("threshold_coords")),
                };
                Ok((coord, s.y.class()?))
            })
            .collect()
    }

    /// Consistency set C(z^n) = { v : v reproduces every observed label }.
    ///
    /// * `Interval1D`: the interval `(max{xᵢ : yᵢ=0}, min{xᵢ : yᵢ=1}]`
    ///   intersected with [0,1]; the full interval for n = 0.
    /// * `HalfSpaceAngle2D`: the same construction in normalized-angle
    ///   coordinates — the arc between the last 0-labelled and first
    ///   1-labelled angle.
    /// * `HalfSpaceUnitSphere`: no closed form; returns
    ///   [`ConsistencyRegion::Implicit`].
    ///
    /// # Errors
    /// [`Error::InconsistentDataset`] when no parameter reproduces the
    /// labels.  This is a distinct signal, never conflated with a valid
    /// region of small mass.
    pub fn consistency_region(&self, data: &Dataset) -> Result<ConsistencyRegion> {
        match self {
            ModelFamily::Interval1D => {
                let coords = self.threshold_coords(data)?;
                Ok(ConsistencyRegion::Interval(threshold_region(&coords, true)?))
            }
            ModelFamily::HalfSpaceAngle2D => {
                let coords = self.threshold_coords(data)?;
                Ok(ConsistencyRegion::Interval(threshold_region(&coords, false)?))
            }
            ModelFamily::HalfSpaceUnitSphere { .. } => Ok(ConsistencyRegion::Implicit),
            ModelFamily::GaussianLocation { .. } => Err(self.unsupported("consistency_region")),
        }
    }

    /// Whether parameter `v` reproduces every label in `data` exactly.
    pub fn is_consistent(&self, data: &Dataset, v: &Param) -> Result<bool> {
        if !self.realizable() {
            return Err(self.unsupported("is_consistent"));
        }
        for s in data {
            if self.classify(&s.x, v)? != s.y.class()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Prior mass of the consistency set, P_{V~P_W}[V ∈ C(z^n)].
    ///
    /// Uses the closed-form region for the threshold families (exact, zero
    /// standard error).  For implicit regions it Monte Carlo samples
    /// `inner_mc` prior draws and reports a binomial standard error; zero
    /// hits yield the flagged sentinel [`zero_hit_upper_bound`].
    ///
    /// # Errors
    /// [`Error::InconsistentDataset`] if no consistent parameter exists
    /// (closed-form path), and [`Error::Numerical`] if a valid region has
    /// zero prior mass (possible only for measure-zero datasets such as a
    /// point labelled 1 at exactly x = 0).
    pub fn consistency_prob<R: Rng>(
        &self,
        data: &Dataset,
        inner_mc: usize,
        rng: &mut R,
    ) -> Result<ProbEstimate> {
        match self.consistency_region(data)? {
            ConsistencyRegion::Interval(region) => {
                let mass = region.mass();
                if mass == 0.0 {
                    return Err(Error::Numerical(
                        "consistency region is a single point of zero prior mass".to_string(),
                    ));
                }
                Ok(ProbEstimate { value: mass, std_error: 0.0, flagged: false, exact: true })
            }
            ConsistencyRegion::Implicit => {
                if inner_mc < 100 {
                    return Err(Error::invalid(format!(
                        "inner_mc must be at least 100, got {inner_mc}"
                    )));
                }
                let mut hits = 0usize;
                for _ in 0..inner_mc {
                    let v = self.sample_prior(rng);
                    if self.is_consistent(data, &v)? {
                        hits += 1;
                    }
                }
                if hits == 0 {
                    return Ok(ProbEstimate {
                        value: zero_hit_upper_bound(inner_mc),
                        std_error: 0.0,
                        flagged: true,
                        exact: false,
                    });
                }
                let p = hits as f64 / inner_mc as f64;
                let se = (p * (1.0 - p) / inner_mc as f64).sqrt();
                Ok(ProbEstimate { value: p, std_error: se, flagged: false, exact: false })
            }
        }
    }

    fn unsupported(&self, op: &str) -> Error {
        Error::UnsupportedOperation { family: self.name(), op: op.to_string() }
    }
}

/// Uniform draw from the unit sphere S^{d−1}: normalized standard Gaussian.
fn sample_unit_vector<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.iter().map(|c| c / norm).collect();
        }
    }
}

/// Normalized angle of a 2-D direction, in [0, 1).
fn normalized_angle(x: &Point) -> Result<f64> {
    let v = x.vector()?;
    if v.len() != 2 {
        return Err(Error::invalid(format!("normalized angle needs a 2-vector, got {}", v.len())));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let t = v[1].atan2(v[0]).rem_euclid(two_pi) / two_pi;
    // rem_euclid can return exactly two_pi after rounding for tiny negative
    // angles; fold that back onto 0.
    Ok(if t >= 1.0 { 0.0 } else { t })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// log surface area of S^{d−1} ⊂ R^d: ln(2·π^{d/2}/Γ(d/2)).
fn ln_sphere_surface_area(d: usize) -> f64 {
    let half_d = d as f64 / 2.0;
    std::f64::consts::LN_2 + half_d * std::f64::consts::PI.ln() - ln_gamma_half_integer(d)
}

/// ln Γ(k/2) for positive integer k, by upward recurrence from Γ(1/2) = √π
/// and Γ(1) = 1.
fn ln_gamma_half_integer(k: usize) -> f64 {
    assert!(k >= 1);
    let (mut x, mut acc) = if k % 2 == 1 {
        (0.5, 0.5 * std::f64::consts::PI.ln())
    } else {
        (1.0, 0.0)
    };
    while x + 0.5 < k as f64 / 2.0 + 0.25 {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

/// Shared consistency-region builder for the 1-D threshold families.
///
/// Every sample constrains the threshold: a 1-label at coordinate x forces
/// w ≤ x, a 0-label forces w > x.  `hi_boundary_closed` states whether the
/// upper end of the parameter range itself is a legal parameter (true for
/// [0,1], false for [0,1)).
fn threshold_region(coords: &[(f64, bool)], hi_boundary_closed: bool) -> Result<IntervalRegion> {
    let mut lo = 0.0f64;
    let mut lo_closed = true;
    let mut hi = 1.0f64;
    let mut hi_closed = hi_boundary_closed;
    for &(x, y) in coords {
        if y {
            if x < hi {
                hi = x;
                hi_closed = true;
            }
        } else if x >= lo {
            lo = x;
            lo_closed = false;
        }
    }
    let empty = lo > hi || (lo == hi && !(lo_closed && hi_closed));
    if empty {
        return Err(Error::InconsistentDataset);
    }
    Ok(IntervalRegion { lo, hi, lo_closed, hi_closed })
}

/// A realizable classifier family observed through i.i.d. label flips:
/// each label is replaced by its complement independently with probability
/// `flip_prob`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyFamily {
    /// The clean family generating inputs and true labels.
    pub base: ModelFamily,
    /// Flip probability ρ ∈ (0, 1/2].
    pub flip_prob: f64,
}

/// Monte Carlo excess-loss estimate for a noisy family, with the analytic
/// sandwich it must respect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcessLossEstimate {
    /// Monte Carlo mean of the per-sample loss difference.
    pub value: f64,
    /// Standard error of the mean.
    pub std_error: f64,
    /// Analytic lower edge (1 − 2ρ)·P(labels differ).
    pub sandwich_lo: f64,
    /// Analytic upper edge P(labels differ).
    pub sandwich_hi: f64,
}

impl NoisyFamily {
    /// Wraps a realizable classifier family with label flips.
    pub fn new(base: ModelFamily, flip_prob: f64) -> Result<Self> {
        if !base.realizable() {
            return Err(Error::invalid("label flips require a realizable classifier family"));
        }
        if !(flip_prob > 0.0 && flip_prob <= 0.5) {
            return Err(Error::invalid(format!(
                "flip probability must lie in (0, 1/2], got {flip_prob}"
            )));
        }
        Ok(NoisyFamily { base, flip_prob })
    }

    /// Flips each class label independently with probability ρ.  Returns
    /// the flipped dataset and the flip-indicator vector u^n.
    pub fn flip_labels<R: Rng>(&self, data: &Dataset, rng: &mut R) -> Result<(Dataset, Vec<bool>)> {
        let mut noisy = Vec::with_capacity(data.len());
        let mut flips = Vec::with_capacity(data.len());
        for s in data {
            let bit = s.y.class()?;
            let flip = rng.random::<f64>() < self.flip_prob;
            noisy.push(Sample { x: s.x.clone(), y: Label::Class(bit ^ flip) });
            flips.push(flip);
        }
        Ok((noisy, flips))
    }

    /// Draws a noisy dataset: clean observations from the base family, then
    /// i.i.d. label flips.  Returns the dataset and the flip indicators.
    pub fn draw_dataset<R: Rng>(
        &self,
        w: &Param,
        n: usize,
        rng: &mut R,
    ) -> Result<(Dataset, Vec<bool>)> {
        let clean = self.base.draw_dataset(w, n, rng)?;
        self.flip_labels(&clean, rng)
    }

    /// Exact excess zero-one risk of `v` against the *noisy* test
    /// distribution when the truth is `w`.
    ///
    /// Derivation: on the disagreement event E(w,v) the candidate `v`
    /// mislabels exactly when the flip did not occur and vice versa, so its
    /// conditional risk is 1 − ρ against the true parameter's ρ; off E both
    /// risks are ρ.  Hence excess = (1 − 2ρ)·P(E).
    pub fn excess_loss_exact(&self, w: &Param, v: &Param) -> Result<f64> {
        Ok((1.0 - 2.0 * self.flip_prob) * self.base.discrepancy_prob(w, v)?)
    }

    /// Monte Carlo estimate of the excess loss of `v` under the noisy test
    /// distribution, with the analytic sandwich
    /// `(1 − 2ρ)·P(E) ≤ excess ≤ P(E)` attached for cross-checking.
    ///
    /// # Errors
    /// Rejects budgets below 100 samples.
    pub fn excess_loss_mc<R: Rng>(
        &self,
        w: &Param,
        v: &Param,
        mc_budget: usize,
        rng: &mut R,
    ) -> Result<ExcessLossEstimate> {
        if mc_budget < 100 {
            return Err(Error::invalid(format!(
                "excess-loss Monte Carlo budget must be at least 100, got {mc_budget}"
            )));
        }
        let p_disagree = self.base.discrepancy_prob(w, v)?;
        let mut diffs = Vec::with_capacity(mc_budget);
        for _ in 0..mc_budget {
            let x = self.base.sample_input(rng);
            let clean = self.base.classify(&x, w)?;
            let flip = rng.random::<f64>() < self.flip_prob;
            let observed = clean ^ flip;
            let loss_v = (self.base.classify(&x, v)? != observed) as i8;
            let loss_w = (clean != observed) as i8;
            diffs.push(f64::from(loss_v - loss_w));
        }
        let (value, std_error) = crate::math::mean_and_std_error(&diffs);
        Ok(ExcessLossEstimate {
            value,
            std_error,
            sandwich_lo: (1.0 - 2.0 * self.flip_prob) * p_disagree,
            sandwich_hi: p_disagree,
        })
    }
}
