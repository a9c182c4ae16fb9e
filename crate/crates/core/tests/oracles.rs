//! Cross-checks of the crate's closed forms against independent
//! re-derivations: direct Monte Carlo simulation written from scratch in
//! this file, textbook identities (order statistics of uniforms, Gaussian
//! conjugacy, the binary-source rate-distortion curve), and hand-solved
//! algebra.  Every expected value here is computed by a route that shares
//! no code with the implementation under test.

use bayeslab_core::bounds::{
    excess_lb_cor7, excess_lb_halfspace2d, invert_bound, mer_upper, smooth_excess_lb,
    vc_upper_reference,
};
use bayeslab_core::families::{
    ConsistencyRegion, Label, ModelFamily, NoisyFamily, Param, Point, Sample,
};
use bayeslab_core::math::{binary_entropy_nats, harmonic, mean_and_std_error, EULER_GAMMA};
use bayeslab_core::miest::{mi_digamma_2d, mi_gaussian_exact, mi_nested_mc, mi_vc_bound};
use bayeslab_core::rdtheory::{
    ba_point, rd_dmax, slb_smooth, slb_zero_one, DiscreteRDProblem, SlbParams,
    BA_DEFAULT_MAX_ITER,
};
use bayeslab_core::rng::Streams;
use bayeslab_core::simlab::{run_experiment, Learner, TestEvaluation};
use bayeslab_core::Error;
use rand_distr::{Distribution, Normal};
use std::f64::consts::{E, LN_2, PI};

/// For a uniform threshold on [0,1] observed through n uniform inputs, the
/// consistency set is the uniform-spacing gap containing the parameter, and
/// order statistics give I(Z^n;W) = H_{n+1} - 1 exactly (the expected log
/// of a size-biased Beta(1,n) spacing).  The nested estimator must land on
/// that value, and at n = 1 on exactly 1/2 nat.
#[test]
fn interval_information_matches_harmonic_identity() {
    let family = ModelFamily::Interval1D;

    let one = mi_nested_mc(&family, 1, 150_000, 0, Streams::new(7101)).unwrap();
    assert!(
        (one.value - 0.5).abs() <= 5.0 * one.std_error + 1e-9,
        "n=1: estimate {} +/- {} vs exact 0.5",
        one.value,
        one.std_error
    );

    let n = 25;
    let exact = harmonic(n as u64 + 1) - 1.0;
    let est = mi_nested_mc(&family, n, 150_000, 0, Streams::new(7102)).unwrap();
    assert!(
        (est.value - exact).abs() <= 5.0 * est.std_error + 1e-9,
        "n={n}: estimate {} +/- {} vs exact {exact}",
        est.value,
        est.std_error
    );
    // The tolerance is tight enough to reject the neighbouring harmonic
    // values H_n - 1 and H_{n+2} - 1 (off by ~1/n nats).
    assert!(5.0 * est.std_error < 0.5 / (n as f64 + 2.0));
}

/// The circular-threshold family has the same order-statistics structure
/// as the interval family (the classifier thresholds the normalized angle,
/// so the consistency set is again the spacing gap containing the
/// parameter), hence the same exact value H_{n+1} - 1.
#[test]
fn angle_information_matches_harmonic_identity() {
    let family = ModelFamily::HalfSpaceAngle2D;
    let n = 25;
    let exact = harmonic(n as u64 + 1) - 1.0;
    let est = mi_nested_mc(&family, n, 150_000, 0, Streams::new(7103)).unwrap();
    assert!(
        (est.value - exact).abs() <= 5.0 * est.std_error + 1e-9,
        "n={n}: estimate {} +/- {} vs exact {exact}",
        est.value,
        est.std_error
    );
}

/// The closed-form disagreement probability of every classifier family must
/// match a from-scratch Monte Carlo estimate of
/// P_X[classify(X, w) != classify(X, v)].
#[test]
fn discrepancy_matches_simulated_disagreement() {
    let families = [
        ModelFamily::Interval1D,
        ModelFamily::HalfSpaceAngle2D,
        ModelFamily::half_space_unit_sphere(2).unwrap(),
        ModelFamily::half_space_unit_sphere(4).unwrap(),
    ];
    let mc = 50_000usize;
    for (f_idx, family) in families.iter().enumerate() {
        let mut rng = Streams::new(7200 + f_idx as u64).rng();
        for _ in 0..8 {
            let w = family.sample_prior(&mut rng);
            let v = family.sample_prior(&mut rng);
            let closed = family.discrepancy_prob(&w, &v).unwrap();
            let mut disagreements = 0usize;
            for _ in 0..mc {
                let x = family.sample_input(&mut rng);
                if family.classify(&x, &w).unwrap() != family.classify(&x, &v).unwrap() {
                    disagreements += 1;
                }
            }
            let freq = disagreements as f64 / mc as f64;
            let sigma = (closed.max(1e-12) * (1.0 - closed).max(1e-12) / mc as f64).sqrt();
            assert!(
                (freq - closed).abs() <= 4.0 * sigma + 1e-3,
                "{}: closed form {closed} vs simulated {freq}",
                family.name()
            );
        }
        // Identical parameters never disagree.
        let w = family.sample_prior(&mut rng);
        assert!(family.discrepancy_prob(&w, &w).unwrap() < 1e-7);
    }
}

/// The closed-form consistency region must agree pointwise with a brute
/// scan of `is_consistent` over a fine parameter grid, and its mass with
/// the grid fraction.
#[test]
fn consistency_region_agrees_with_grid_scan() {
    for (f_idx, family) in
        [ModelFamily::Interval1D, ModelFamily::HalfSpaceAngle2D].into_iter().enumerate()
    {
        let mut rng = Streams::new(7300 + f_idx as u64).rng();
        for _ in 0..5 {
            let w = family.sample_prior(&mut rng);
            let data = family.draw_dataset(&w, 12, &mut rng).unwrap();
            let region = match family.consistency_region(&data).unwrap() {
                ConsistencyRegion::Interval(r) => r,
                other => panic!("expected an interval region, got {other:?}"),
            };
            let grid = 2_000usize;
            let mut inside = 0usize;
            for k in 0..grid {
                let g = (k as f64 + 0.5) / grid as f64;
                let by_region = region.contains(g);
                let by_scan = family.is_consistent(&data, &Param::Scalar(g)).unwrap();
                assert_eq!(
                    by_region,
                    by_scan,
                    "{}: region and label scan disagree at {g}",
                    family.name()
                );
                inside += usize::from(by_scan);
            }
            let grid_mass = inside as f64 / grid as f64;
            assert!(
                (grid_mass - region.mass()).abs() <= 2.0 / grid as f64,
                "{}: grid mass {grid_mass} vs closed-form mass {}",
                family.name(),
                region.mass()
            );
            // The true parameter is always consistent with its own labels.
            assert!(region.contains(w.scalar().unwrap()));
        }
        // Contradictory labels must raise the dedicated error, never a
        // zero-mass region.
        let bad = vec![
            Sample { x: Point::Scalar(0.5), y: Label::Class(false) },
            Sample { x: Point::Scalar(0.4), y: Label::Class(true) },
        ];
        if matches!(family, ModelFamily::Interval1D) {
            assert!(matches!(
                family.consistency_region(&bad),
                Err(Error::InconsistentDataset)
            ));
        }
    }
}

/// On the symmetric binary source with Hamming distortion the solver's
/// (D, R) pairs must land on the textbook curve R(D) = ln 2 - H_b(D).
#[test]
fn binary_source_curve_matches_textbook_form() {
    let problem = DiscreteRDProblem::binary_hamming();
    for &slope in &[-0.7f64, -1.5, -3.0, -6.0] {
        let point = ba_point(&problem, slope, BA_DEFAULT_MAX_ITER, 1e-12).unwrap();
        let exact = LN_2 - binary_entropy_nats(point.distortion);
        assert!(
            (point.rate - exact).abs() < 1e-8,
            "slope {slope}: rate {} vs ln2 - H_b({}) = {exact}",
            point.rate,
            point.distortion
        );
    }
    // The zero-rate distortion of the binary source is exactly 1/2 ...
    assert_eq!(rd_dmax(&DiscreteRDProblem::binary_hamming()), 0.5);
    // ... and for a uniform grid on [0,1] it is E|U - 1/2| = 1/4, the mean
    // distance to the best single reproduction point (the median).
    let grid = DiscreteRDProblem::from_threshold_family(&ModelFamily::Interval1D, 2048).unwrap();
    assert!((rd_dmax(&grid) - 0.25).abs() < 2e-3, "grid d_max {}", rd_dmax(&grid));
}

/// The conjugate Gaussian information value must match a from-scratch
/// simulation that only uses the two normal log-densities of the
/// sufficient statistic (sample mean).
#[test]
fn gaussian_information_matches_direct_simulation() {
    let (sigma, tau, n) = (1.0f64, 2.0f64, 8usize);
    let exact = mi_gaussian_exact(sigma, tau, n).unwrap();

    let mut rng = Streams::new(7400).rng();
    let prior = Normal::new(0.0, tau).unwrap();
    let nf = n as f64;
    let cond_var = sigma * sigma / nf;
    let marg_var = tau * tau + cond_var;
    let noise = Normal::new(0.0, cond_var.sqrt()).unwrap();
    let reps = 250_000usize;
    let mut log_ratios = Vec::with_capacity(reps);
    for _ in 0..reps {
        let w = prior.sample(&mut rng);
        let xbar = w + noise.sample(&mut rng);
        let ln_cond = -0.5 * (2.0 * PI * cond_var).ln() - (xbar - w) * (xbar - w) / (2.0 * cond_var);
        let ln_marg = -0.5 * (2.0 * PI * marg_var).ln() - xbar * xbar / (2.0 * marg_var);
        log_ratios.push(ln_cond - ln_marg);
    }
    let (mean, se) = mean_and_std_error(&log_ratios);
    assert!(
        (mean - exact).abs() <= 5.0 * se + 1e-6,
        "simulated {mean} +/- {se} vs closed form {exact}"
    );
}

/// Inverting the analytic rate lower bound must reproduce the hand-solved
/// crossing D* = (1-2*l_max)*mu*t*exp((h - I)/d_w) / (2e).
#[test]
fn bound_inversion_matches_hand_solved_crossing() {
    let (h, d_w, mu, l_max, t) = (1.3f64, 2usize, 0.7f64, 0.1f64, 0.8f64);
    let params = SlbParams::new(h, d_w, mu, l_max, t).unwrap();
    for &mi in &[0.5f64, 2.0, 4.0] {
        let d_star = (1.0 - 2.0 * l_max) * mu * t * ((h - mi) / d_w as f64).exp() / (2.0 * E);
        let inverted = invert_bound(
            |d| slb_zero_one(&params, d),
            mi,
            d_star / 4.0,
            d_star * 4.0,
            1e-18,
        )
        .unwrap();
        assert!(
            ((inverted - d_star) / d_star).abs() < 1e-9,
            "mi={mi}: inverted {inverted} vs hand-solved {d_star}"
        );
    }
}

/// Reference bounds pinned to their hand-derived closed forms.
#[test]
fn reference_bounds_match_hand_derived_forms() {
    // Uniform threshold family: inverting at the VC information budget
    // ln(e*n) gives exactly 1/(2*e^2*n).
    let cor7 = excess_lb_cor7(1, 1, 50, 1.0, 0.0).unwrap();
    let expect = (2.0 * E * E * 50.0).recip();
    assert!(((cor7.value - expect) / expect).abs() < 1e-12, "{} vs {expect}", cor7.value);

    // Circular family at the digamma information budget: 1/(4*pi*e^(gamma+1)*n).
    let half = excess_lb_halfspace2d(100).unwrap();
    let expect = (4.0 * PI * (EULER_GAMMA + 1.0).exp() * 100.0).recip();
    assert!(((half.value - expect) / expect).abs() < 1e-12, "{} vs {expect}", half.value);
    assert!((half.value - 1.6437e-4).abs() < 1e-8);

    // Analytic rate lower bound for the uniform threshold family at D=0.05:
    // -ln(2*e*0.05) = ln 10 - 1.
    let params = SlbParams::for_family(&ModelFamily::Interval1D).unwrap();
    let r = slb_zero_one(&params, 0.05).unwrap();
    assert!((r - 1.302_585_092_994_045_7).abs() < 1e-14, "slb {r}");

    // Smooth-source bound at unit Fisher determinant, d_w=1, D=0.01:
    // [0 - 0.5*ln(4*pi*e*0.01) + 0]_+.
    let smooth = slb_smooth(0.0, 1, 1.0, 0.01).unwrap();
    let expect = (-0.5 * (4.0 * PI * E * 0.01f64).ln()).max(0.0);
    assert!((smooth - expect).abs() < 1e-14, "{smooth} vs {expect}");

    // Smooth-family excess bound: (d_w/(2n)) * (det_y/det_z)^(1/d_w).
    let s = smooth_excess_lb(1, 100, 1.0, 1.0).unwrap();
    assert!(((s.value - 0.005) / 0.005).abs() < 1e-14, "{}", s.value);

    // Upper references.
    let mer = mer_upper(1, 100).unwrap();
    let expect = 3.0 * (E * 100.0f64).ln() / 100.0;
    assert!(((mer.value - expect) / expect).abs() < 1e-14);
    let vc = vc_upper_reference(1, 100).unwrap();
    let expect = (3.0 * 100.0f64.ln() + 6.0) / 100.0;
    assert!(((vc.value - expect) / expect).abs() < 1e-14);

    // Information budgets.
    assert!((mi_vc_bound(1, 100) - (E * 100.0f64).ln()).abs() < 1e-12);
    assert!((mi_vc_bound(2, 50) - 2.0 * (E * 25.0f64).ln()).abs() < 1e-12);
    assert!((mi_digamma_2d(50) - harmonic(49)).abs() < 1e-9);
    assert!((EULER_GAMMA - 0.577_215_664_901_532_9).abs() < 1e-16);
}

/// Flipping each label with probability rho scales the excess loss of a
/// fixed pair by exactly (1 - 2*rho), and the Monte Carlo estimator must
/// agree within its own error bars and sit inside its analytic sandwich.
#[test]
fn noisy_excess_loss_matches_analytic_scaling() {
    let nf = NoisyFamily::new(ModelFamily::Interval1D, 0.1).unwrap();
    let (w, v) = (Param::Scalar(0.3), Param::Scalar(0.5));
    let exact = nf.excess_loss_exact(&w, &v).unwrap();
    assert!((exact - 0.16).abs() < 1e-12, "analytic excess {exact}");

    let mut rng = Streams::new(7500).rng();
    let est = nf.excess_loss_mc(&w, &v, 200_000, &mut rng).unwrap();
    assert!((est.sandwich_lo - 0.16).abs() < 1e-12);
    assert!((est.sandwich_hi - 0.2).abs() < 1e-12);
    assert!(
        (est.value - exact).abs() <= 4.0 * est.std_error + 1e-9,
        "MC {} +/- {} vs analytic {exact}",
        est.value,
        est.std_error
    );
    assert!(est.value >= est.sandwich_lo - 3.0 * est.std_error);
    assert!(est.value <= est.sandwich_hi + 3.0 * est.std_error);
}

/// Posterior sampling on the uniform threshold family has excess risk
/// exactly 2/(3(n+2)) (both the sampled parameter and the truth are
/// uniform on the same spacing gap, and the size-biased gap has mean
/// 2/(n+2)); the simulation harness must reproduce it.
#[test]
fn posterior_sampler_matches_order_statistics_theory() {
    let n = 13usize;
    let expect = 2.0 / (3.0 * (n as f64 + 2.0));
    let result = run_experiment(
        &ModelFamily::Interval1D,
        &Learner::posterior_sample(),
        n,
        20_000,
        None,
        TestEvaluation::Analytic,
        Streams::new(7600),
    )
    .unwrap();
    assert!(
        (result.excess_mean - expect).abs() <= 5.0 * result.excess_se + 1e-9,
        "simulated {} +/- {} vs theory {expect}",
        result.excess_mean,
        result.excess_se
    );
    assert_eq!(result.train_err, 0.0);
}

/// With no data the midpoint learner always answers 1/2, whose excess risk
/// against a uniform truth is E|W - 1/2| = 1/4.
#[test]
fn midpoint_learner_prior_risk_is_one_quarter() {
    let result = run_experiment(
        &ModelFamily::Interval1D,
        &Learner::ConsistentMidpoint,
        0,
        2_000,
        None,
        TestEvaluation::Analytic,
        Streams::new(7601),
    )
    .unwrap();
    assert!(
        (result.excess_mean - 0.25).abs() <= 4.0 * result.excess_se + 1e-9,
        "simulated {} +/- {} vs exact 0.25",
        result.excess_mean,
        result.excess_se
    );
}
