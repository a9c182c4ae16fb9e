//! Deterministic CSV serialization for every table the toolkit emits.
//!
//! One dialect, no options: comma separator, `.` decimal point, a
//! mandatory header row, LF line endings, and floats printed with 17
//! significant digits (`{:.16e}`) so that every finite `f64` round-trips
//! bit-exactly through its textual form.  Identical inputs therefore
//! produce byte-identical files on every platform and worker count.
//!
//! The writers here are pure string builders; file IO stays with the
//! caller.  None of the emitted fields can contain separators or quotes,
//! so no quoting layer is needed.

use crate::bounds::BoundReport;
use crate::miest::{MIEstimate, NoiseGap};
use crate::rdtheory::{RDCurve, RDPoint};
use crate::simlab::ExperimentResult;

/// Formats a float with 17 significant digits in scientific notation —
/// enough to reconstruct the exact bit pattern of any finite `f64`.
#[must_use]
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Formats an optional float, rendering `None` as an empty cell.
#[must_use]
pub fn fmt_opt_f64(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Formats an optional integer, rendering `None` as an empty cell.
#[must_use]
pub fn fmt_opt_usize(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Assembles a full document: header, one line per row, LF endings, and
/// a trailing newline.
#[must_use]
pub fn csv_document<I>(header: &str, rows: I) -> String
where
    I: IntoIterator<Item = String>,
{
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

/// Header for rate-distortion curve tables.
pub const RD_HEADER: &str = "method,slope,D,R,iterations,gap";

/// One rate-distortion point as a CSV row.
#[must_use]
pub fn rd_row(method: &str, point: &RDPoint) -> String {
    format!(
        "{method},{},{},{},{},{}",
        fmt_f64(point.slope),
        fmt_f64(point.distortion),
        fmt_f64(point.rate),
        point.iterations,
        fmt_f64(point.gap),
    )
}

/// A whole curve as a CSV document.
#[must_use]
pub fn rd_curve_csv(curve: &RDCurve) -> String {
    let method = curve.method.as_str();
    csv_document(RD_HEADER, curve.points.iter().map(|p| rd_row(method, p)))
}

/// Header for mutual-information tables.
pub const MI_HEADER: &str = "family,method,n,value,std_error,outer_mc,inner_mc,flagged_fraction,seed";

/// One mutual-information estimate as a CSV row.
#[must_use]
pub fn mi_row(family: &str, estimate: &MIEstimate, seed: u64) -> String {
    format!(
        "{family},{},{},{},{},{},{},{},{seed}",
        estimate.method.as_str(),
        estimate.n,
        fmt_f64(estimate.value),
        fmt_f64(estimate.std_error),
        estimate.outer_mc,
        estimate.inner_mc,
        fmt_f64(estimate.flagged_fraction),
    )
}

/// Header for bound tables: identity and value first, then one column per
/// recorded input, then the external-result marker.  Bounds that do not
/// use an input leave its cell empty.
pub const BOUNDS_HEADER: &str =
    "name,n,value,d_w,d_vc,mu,h_W,t,l_max,det_fisher_y,det_fisher_z,mi,external";

/// One bound report as a CSV row.
#[must_use]
pub fn bound_row(report: &BoundReport) -> String {
    let i = &report.inputs;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        report.name.as_str(),
        i.n,
        fmt_f64(report.value),
        fmt_opt_usize(i.d_w),
        fmt_opt_usize(i.d_vc),
        fmt_opt_f64(i.mu),
        fmt_opt_f64(i.h_w),
        fmt_opt_f64(i.t),
        fmt_opt_f64(i.l_max),
        fmt_opt_f64(i.det_fisher_y),
        fmt_opt_f64(i.det_fisher_z),
        fmt_opt_f64(i.mi),
        report.external,
    )
}

/// Header for simulation-experiment tables.
pub const EXPERIMENT_HEADER: &str = "family,learner,rho,train_noisy,test_noisy,n,trials,\
excess_mean,excess_se,train_err,lb_name,lb_value,ub_name,ub_value,seed";

/// One experiment result as a CSV row.  Bounds that were undefined at
/// this configuration leave their name and value cells empty.
#[must_use]
pub fn experiment_row(result: &ExperimentResult) -> String {
    let (lb_name, lb_value) = match &result.lower_bound {
        Some(b) => (b.name.as_str().to_string(), fmt_f64(b.value)),
        None => (String::new(), String::new()),
    };
    let (ub_name, ub_value) = match &result.upper_bound {
        Some(b) => (b.name.as_str().to_string(), fmt_f64(b.value)),
        None => (String::new(), String::new()),
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{lb_name},{lb_value},{ub_name},{ub_value},{}",
        result.family,
        result.learner,
        fmt_f64(result.rho),
        result.train_noisy,
        result.test_noisy,
        result.n,
        result.trials,
        fmt_f64(result.excess_mean),
        fmt_f64(result.excess_se),
        fmt_f64(result.train_err),
        result.seed,
    )
}

/// Header for label-noise information-gap tables: the paired clean/noisy
/// estimates, their difference, and the per-example difference.
pub const NOISE_HEADER: &str = "family,rho,n,clean,clean_se,noisy,noisy_se,gap,gap_se,\
gap_per_sample,gap_per_sample_se,outer_mc,seed";

/// One noise-gap measurement as a CSV row.
#[must_use]
pub fn noise_row(family: &str, gap: &NoiseGap, seed: u64) -> String {
    let per = gap.gap_per_sample();
    format!(
        "{family},{},{},{},{},{},{},{},{},{},{},{},{seed}",
        fmt_f64(gap.rho),
        gap.n,
        fmt_f64(gap.clean_mi.value),
        fmt_f64(gap.clean_mi.std_error),
        fmt_f64(gap.noisy_mi.value),
        fmt_f64(gap.noisy_mi.std_error),
        fmt_f64(gap.gap.value),
        fmt_f64(gap.gap.std_error),
        fmt_f64(per.value),
        fmt_f64(per.std_error),
        gap.gap.outer_mc,
    )
}
