//! The six pipelines behind the subcommands.
//!
//! Every pipeline is a pure function from configuration to a list of named
//! artifacts; nothing here touches the file system except `report`, which
//! reads a previously written experiments table.  The caller persists the
//! artifacts only after the whole computation has succeeded, so an output
//! directory never holds a partial result set.

use bayeslab_core::bounds::{
    excess_lb_cor7, excess_lb_halfspace2d, excess_lb_margin, mer_upper, smooth_excess_lb,
    vc_upper_reference,
};
use bayeslab_core::csvfmt::{
    bound_row, csv_document, experiment_row, mi_row, noise_row, rd_row, BOUNDS_HEADER,
    EXPERIMENT_HEADER, MI_HEADER, NOISE_HEADER, RD_HEADER,
};
use bayeslab_core::{Error, Result};
use bayeslab_core::families::ModelFamily;
use bayeslab_core::miest::{
    mi_clarke_barron, mi_digamma_2d, mi_nested_mc, mi_vc_bound, noise_info_gap, MIEstimate,
    MIMethod,
};
use bayeslab_core::rdtheory::{blahut_arimoto, slb_curve, DiscreteRDProblem, SlbParams};
use bayeslab_core::rng::Streams;
use bayeslab_core::simlab::{
    check_bracket, run_experiment, sandwich_sweep, ExperimentResult, TestEvaluation,
};

use crate::config::{CommandKind, ExperimentConfig, LearnerKind};
use crate::svg::{self, PlotPoint, Series};

/// One output file: name relative to the output directory, plus content.
#[derive(Debug, Clone)]
pub struct Artifact {
    /// File name (no directories).
    pub name: String,
    /// Full file content.
    pub content: String,
}

impl Artifact {
    fn new(name: impl Into<String>, content: String) -> Self {
        Artifact { name: name.into(), content }
    }
}

/// Runs the configured pipeline and returns its artifacts.
///
/// `quiet` silences the informational stdout lines (the fitted sweep
/// slope); it never changes any artifact.
pub fn run(config: &ExperimentConfig, quiet: bool) -> Result<Vec<Artifact>> {
    let family = config.family.build().map_err(Error::invalid)?;
    match config.command {
        CommandKind::Bounds => bounds(config, &family),
        CommandKind::Mi => mi(config, &family),
        CommandKind::Rd => rd(config, &family),
        CommandKind::Simulate => simulate(config, &family, quiet),
        CommandKind::Noise => noise(config, &family),
        CommandKind::Report => report(config),
    }
}

/// Closed-form bounds per sample size: the parametric excess-risk lower
/// bound (plus its margin variant under label noise and the angular
/// family's pinned constant), the realizable upper bound, and the
/// agnostic reference upper bound.  The smooth location family instead
/// gets its Fisher-information lower bound.
fn bounds(config: &ExperimentConfig, family: &ModelFamily) -> Result<Vec<Artifact>> {
    let mut rows = Vec::new();
    for &n in &config.n_list {
        if let Some(mu) = family.mu() {
            let (d_w, d_vc, h_w) = (family.d_w(), family.d_vc(), family.prior_entropy());
            rows.push(bound_row(&excess_lb_cor7(d_w, d_vc, n, mu, h_w)?));
            if let Some(noise) = &config.noise {
                let t = 1.0 - 2.0 * noise.rho;
                if t > 0.0 {
                    rows.push(bound_row(&excess_lb_margin(d_w, d_vc, n, mu, h_w, t)?));
                }
            }
            if matches!(family, ModelFamily::HalfSpaceAngle2D) {
                rows.push(bound_row(&excess_lb_halfspace2d(n)?));
            }
            rows.push(bound_row(&mer_upper(d_vc, n)?));
            rows.push(bound_row(&vc_upper_reference(d_vc, n)?));
        } else {
            let dets = family
                .fisher_determinants()
                .expect("non-classifier families are smooth");
            rows.push(bound_row(&smooth_excess_lb(family.d_w(), n, dets.det_y, dets.det_z)?));
        }
    }
    Ok(vec![Artifact::new("bounds.csv", csv_document(BOUNDS_HEADER, rows))])
}

/// Mutual-information estimates per sample size: the nested Monte Carlo
/// estimator plus every closed form the family admits.  Sample size i
/// draws from child stream i of the master seed, so adding an n to the
/// list never perturbs the others.
fn mi(config: &ExperimentConfig, family: &ModelFamily) -> Result<Vec<Artifact>> {
    let seed = config.master_seed;
    let b = &config.budgets;
    let name = family.name();
    let mut rows = Vec::new();
    for (i, &n) in config.n_list.iter().enumerate() {
        let streams = Streams::new(seed).child(i as u64);
        if family.realizable() {
            let est = mi_nested_mc(family, n, b.outer_mc, b.inner_mc, streams)?;
            rows.push(mi_row(&name, &est, seed));
            let cap = MIEstimate::exact(MIMethod::VCBound, n, mi_vc_bound(family.d_vc(), n));
            rows.push(mi_row(&name, &cap, seed));
            if matches!(family, ModelFamily::HalfSpaceAngle2D) {
                let cap = MIEstimate::exact(MIMethod::Digamma2D, n, mi_digamma_2d(n));
                rows.push(mi_row(&name, &cap, seed));
            }
        } else {
            let value = mi_clarke_barron(family, n)?;
            rows.push(mi_row(&name, &MIEstimate::exact(MIMethod::ClarkeBarron, n, value), seed));
        }
    }
    Ok(vec![Artifact::new("mi.csv", csv_document(MI_HEADER, rows))])
}

/// Rate-distortion curve of the grid-discretised family at the configured
/// trade-off slopes, with the analytic zero-one rate lower bound evaluated
/// at the same distortions for comparison.
fn rd(config: &ExperimentConfig, family: &ModelFamily) -> Result<Vec<Artifact>> {
    let b = &config.budgets;
    let problem = DiscreteRDProblem::from_threshold_family(family, b.grid)?;
    let curve = blahut_arimoto(&problem, &b.ba_slopes, b.max_iter, b.tol)?;

    let params = SlbParams::for_family(family)?;
    let distortions: Vec<f64> =
        curve.points.iter().map(|p| p.distortion).filter(|d| *d > 0.0).collect();

    let mut rows: Vec<String> =
        curve.points.iter().map(|p| rd_row(curve.method.as_str(), p)).collect();
    if !distortions.is_empty() {
        let reference = slb_curve(&params, &distortions)?;
        rows.extend(reference.points.iter().map(|p| rd_row(reference.method.as_str(), p)));
    }
    Ok(vec![Artifact::new("rd.csv", csv_document(RD_HEADER, rows))])
}

/// Bayesian learning trials per sample size.  Clean runs over a widening
/// n_list additionally fit the empirical log-log convergence rate; every
/// experiment is checked against its bound sandwich, and a violation
/// aborts the run before anything is written.
fn simulate(config: &ExperimentConfig, family: &ModelFamily, quiet: bool) -> Result<Vec<Artifact>> {
    let learner = config.learner.unwrap_or(LearnerKind::PosteriorSample).to_learner();
    let trials = config.budgets.trials;
    let streams = Streams::new(config.master_seed);

    let results: Vec<ExperimentResult> = if let Some(noise) = &config.noise {
        let mut results = Vec::with_capacity(config.n_list.len());
        for (i, &n) in config.n_list.iter().enumerate() {
            let result = run_experiment(
                family,
                &learner,
                n,
                trials,
                Some(noise.to_spec()),
                TestEvaluation::Analytic,
                streams.child(i as u64),
            )?;
            check_bracket(&result)?;
            results.push(result);
        }
        results
    } else if sweep_eligible(&config.n_list) {
        let sweep = sandwich_sweep(family, &learner, &config.n_list, trials, streams)?;
        if !quiet {
            println!(
                "fitted log-log rate: excess ≈ exp({:.4}) · n^{:.4}",
                sweep.intercept, sweep.slope
            );
        }
        sweep.results
    } else {
        let mut results = Vec::with_capacity(config.n_list.len());
        for (i, &n) in config.n_list.iter().enumerate() {
            let result = run_experiment(
                family,
                &learner,
                n,
                trials,
                None,
                TestEvaluation::Analytic,
                streams.child(i as u64),
            )?;
            check_bracket(&result)?;
            results.push(result);
        }
        results
    };

    let rows = results.iter().map(experiment_row);
    Ok(vec![Artifact::new("experiments.csv", csv_document(EXPERIMENT_HEADER, rows))])
}

/// A clean n_list qualifies for a rate fit when it can support one:
/// at least four strictly increasing sizes spanning a factor of 16.
fn sweep_eligible(n_list: &[usize]) -> bool {
    n_list.len() >= 4
        && n_list.windows(2).all(|w| w[0] < w[1])
        && n_list[0] >= 1
        && *n_list.last().unwrap() >= 16 * n_list[0]
}

/// Paired clean/noisy information estimates and their gap, one row per
/// sample size, each on its own child stream.
fn noise(config: &ExperimentConfig, family: &ModelFamily) -> Result<Vec<Artifact>> {
    let noise = config
        .noise
        .as_ref()
        .ok_or_else(|| Error::invalid("the information-gap pipeline needs a [noise] table"))?;
    let seed = config.master_seed;
    let name = family.name();
    let mut rows = Vec::with_capacity(config.n_list.len());
    for (i, &n) in config.n_list.iter().enumerate() {
        let streams = Streams::new(seed).child(i as u64);
        let gap = noise_info_gap(family, noise.rho, n, config.budgets.outer_mc, streams)?;
        rows.push(noise_row(&name, &gap, seed));
    }
    Ok(vec![Artifact::new("noise.csv", csv_document(NOISE_HEADER, rows))])
}

/// Field order of the experiments table.
mod col {
    pub const FAMILY: usize = 0;
    pub const N: usize = 5;
    pub const EXCESS_MEAN: usize = 7;
    pub const EXCESS_SE: usize = 8;
    pub const LB_NAME: usize = 10;
    pub const LB_VALUE: usize = 11;
    pub const UB_NAME: usize = 12;
    pub const UB_VALUE: usize = 13;
    pub const WIDTH: usize = 15;
}

/// One log-log summary plot per family found in the experiments table:
/// the empirical curve with ±2σ whiskers, the lower and upper bounds
/// recorded alongside it, and the realizable upper bound for reference.
fn report(config: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let path = config.output_dir.join("experiments.csv");
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == EXPERIMENT_HEADER => {}
        Some(header) => {
            return Err(Error::invalid(format!(
                "unrecognised experiments header in {}: {header}",
                path.display()
            )))
        }
        None => return Err(Error::invalid(format!("{} is empty", path.display()))),
    }

    let mut groups: Vec<(String, Vec<Vec<String>>)> = Vec::new();
    for line in lines.filter(|l| !l.is_empty()) {
        let fields: Vec<String> = line.split(',').map(str::to_string).collect();
        if fields.len() != col::WIDTH {
            return Err(Error::invalid(format!(
                "malformed experiments row ({} fields, expected {}): {line}",
                fields.len(),
                col::WIDTH
            )));
        }
        let family = fields[col::FAMILY].clone();
        match groups.iter_mut().find(|(name, _)| *name == family) {
            Some((_, rows)) => rows.push(fields),
            None => groups.push((family, vec![fields])),
        }
    }
    if groups.is_empty() {
        return Err(Error::invalid(format!("{} has a header but no data rows", path.display())));
    }

    let mut artifacts = Vec::with_capacity(groups.len());
    for (family, rows) in &groups {
        let series = family_series(family, rows)?;
        let svg = svg::render_loglog(
            &format!("{family}: excess risk vs sample size"),
            "sample size n",
            "excess risk",
            &series,
        )?;
        artifacts.push(Artifact::new(format!("report_{family}.svg"), svg));
    }
    Ok(artifacts)
}

fn parse_f64(field: &str, what: &str) -> Result<f64> {
    field
        .parse()
        .map_err(|_| Error::invalid(format!("cannot parse {what} from {field:?}")))
}

/// Builds the plot series for one family's rows: empirical ±2σ first,
/// then the recorded lower and upper bounds, then the realizable upper
/// bound recomputed from the family's VC dimension.
fn family_series(family: &str, rows: &[Vec<String>]) -> Result<Vec<Series>> {
    let mut rows: Vec<&Vec<String>> = rows.iter().collect();
    rows.sort_by_key(|r| r[col::N].parse::<u64>().unwrap_or(u64::MAX));

    let mut empirical = Vec::with_capacity(rows.len());
    let mut lower: (Option<String>, Vec<PlotPoint>) = (None, Vec::new());
    let mut upper: (Option<String>, Vec<PlotPoint>) = (None, Vec::new());
    let mut mer = Vec::new();
    let d_vc = vc_dim_from_name(family);

    for row in &rows {
        let n: usize = row[col::N]
            .parse()
            .map_err(|_| Error::invalid(format!("cannot parse n from {:?}", row[col::N])))?;
        let x = n as f64;
        let mean = parse_f64(&row[col::EXCESS_MEAN], "excess_mean")?;
        let se = parse_f64(&row[col::EXCESS_SE], "excess_se")?;
        empirical.push(PlotPoint { x, y: mean, bar: Some(2.0 * se) });

        if !row[col::LB_NAME].is_empty() {
            lower.0.get_or_insert_with(|| row[col::LB_NAME].clone());
            let value = parse_f64(&row[col::LB_VALUE], "lb_value")?;
            lower.1.push(PlotPoint { x, y: value, bar: None });
        }
        if !row[col::UB_NAME].is_empty() {
            upper.0.get_or_insert_with(|| row[col::UB_NAME].clone());
            let value = parse_f64(&row[col::UB_VALUE], "ub_value")?;
            upper.1.push(PlotPoint { x, y: value, bar: None });
        }
        if let Some(d) = d_vc {
            if let Ok(bound) = mer_upper(d, n) {
                mer.push(PlotPoint { x, y: bound.value, bar: None });
            }
        }
    }

    let mut series = vec![Series {
        label: "empirical excess (±2σ)".to_string(),
        points: empirical,
        dashed: false,
    }];
    if let (Some(name), points) = lower {
        series.push(Series { label: format!("{name} (lower)"), points, dashed: false });
    }
    if let (Some(name), points) = upper {
        series.push(Series { label: format!("{name} (upper)"), points, dashed: true });
    }
    if !mer.is_empty() {
        series.push(Series { label: "MER_UB (upper)".to_string(), points: mer, dashed: true });
    }
    Ok(series)
}

/// VC dimension recoverable from a family display name; None for the
/// non-classifier family.
fn vc_dim_from_name(name: &str) -> Option<usize> {
    match name {
        "interval1d" => Some(1),
        "halfspace_angle2d" => Some(2),
        "gaussian_location" => None,
        other => other.strip_prefix("halfspace_sphere").and_then(|d| d.parse().ok()),
    }
}
