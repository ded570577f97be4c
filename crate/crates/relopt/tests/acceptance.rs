//! Acceptance suite: one test per release criterion, each printing a
//! pass line with the computed values. Run with
//! `cargo test --test acceptance -- --nocapture` to see the numbers.

use std::sync::LazyLock;
use std::time::Instant;

use relopt::dynamics::{
    build_wolbachia_model, check_hypotheses, wolbachia_separated, CarryingCapacity, ModelSpec,
    WolbachiaParams,
};
use relopt::integrate::{integrate_scalar, sup_distance, ControlPiece, ControlSignal};
use relopt::optimize::{cost_curve, eta_sweep, finite_s_infimum, pulse_ocp, CostCurve};
use relopt::periodic::{
    envelope_at, find_periodic_envelope, poincare_map, sample_poincare, BasinOutcome,
    EnvelopeSide, PeriodicEnvelope,
};
use relopt::release::{
    build_cost_potential, simulate_finite_rate, simulate_impulsive, CostPotential, Release,
    ReleaseSchedule,
};

const PERIOD: f64 = 12.0;

fn reference_params() -> WolbachiaParams {
    WolbachiaParams { b1: 0.8, b2: 0.6, d1: 0.27, d2: 0.3, sh: 0.9 }
}

fn reference_capacity() -> CarryingCapacity {
    CarryingCapacity::cosine(0.06, 0.02, PERIOD).unwrap()
}

static MODEL: LazyLock<ModelSpec> =
    LazyLock::new(|| build_wolbachia_model(reference_params(), reference_capacity()).unwrap());

static ENVELOPE: LazyLock<PeriodicEnvelope> =
    LazyLock::new(|| find_periodic_envelope(&MODEL, 256, 1e-9).unwrap());

static POTENTIAL: LazyLock<CostPotential> =
    LazyLock::new(|| build_cost_potential(&MODEL, 1e-6, 1e-12).unwrap());

static CURVE: LazyLock<CostCurve> =
    LazyLock::new(|| cost_curve(&MODEL, &ENVELOPE, &POTENTIAL, 256).unwrap());

fn separated_model() -> ModelSpec {
    let params = WolbachiaParams { d1: 0.3, d2: 0.3, ..reference_params() };
    wolbachia_separated(params, reference_capacity()).unwrap()
}

#[test]
fn criterion_01_asymptotic_optimum_value() {
    let started = Instant::now();
    let curve = &*CURVE;
    let elapsed = started.elapsed();
    assert!(
        (curve.c_star - 0.01739).abs() < 5e-4,
        "C* = {} outside 0.01739 +/- 5e-4",
        curve.c_star
    );
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}, budget 60 s");
    println!(
        "criterion 01 (asymptotic optimum): PASS - C* = {:.6} (ref 0.01739 +/- 5e-4), t* = {:.4}, {elapsed:?}",
        curve.c_star, curve.t_star
    );
}

#[test]
fn criterion_02_bounded_pulse_surrogate() {
    let started = Instant::now();
    let mut costs = Vec::new();
    for m in [0.02, 0.04, 0.06] {
        let plan = pulse_ocp(&MODEL, &ENVELOPE, m, None, 48, 1e-9).unwrap();
        assert!(
            (plan.cost - 0.01742).abs() < 0.05 * 0.01742,
            "M = {m}: cost {} outside 0.01742 +/- 5%",
            plan.cost
        );
        assert!(
            (plan.start - 6.0).abs() < 1.5,
            "M = {m}: start {} further than 1.5 from 6",
            plan.start
        );
        costs.push(plan.cost);
    }
    let hi = costs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = costs.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi / lo < 1.05, "costs spread beyond 5%: {costs:?}");
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 300, "took {elapsed:?}, budget 5 min");
    println!(
        "criterion 02 (bounded pulses): PASS - costs {costs:?} within 5% of 0.01742, {elapsed:?}"
    );
}

#[test]
fn criterion_03_finite_rate_convergence() {
    let started = Instant::now();
    let c_star = CURVE.c_star;
    let mut gaps = Vec::new();
    for s in [10.0, 100.0, 1000.0] {
        let r = finite_s_infimum(&MODEL, &ENVELOPE, s, 48, 1e-7).unwrap();
        gaps.push((r.c_s_star - c_star).abs());
    }
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "gaps not strictly decreasing: {gaps:?}");
    assert!(gaps[2] < 1e-3, "gap at S = 1000 is {}", gaps[2]);
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 600, "took {elapsed:?}, budget 10 min");
    println!(
        "criterion 03 (finite-rate convergence): PASS - gaps {:.3e} > {:.3e} > {:.3e}, {elapsed:?}",
        gaps[0], gaps[1], gaps[2]
    );
}

#[test]
fn criterion_04_separated_variables_exactness() {
    let model = separated_model();
    let theta = 5.0 / 18.0; // (b1 - b2) / (sh b1)
    let env = find_periodic_envelope(&model, 256, 1e-10).unwrap();
    let mut worst = 0.0_f64;
    for i in 0..=4096 {
        let t = PERIOD * i as f64 / 4096.0;
        worst = worst.max((envelope_at(&env, EnvelopeSide::Max, t) - theta).abs());
    }
    assert!(worst < 1e-8, "sup |p - theta| = {worst:e}");
    let pot = build_cost_potential(&model, 1e-6, 1e-12).unwrap();
    let curve = cost_curve(&model, &env, &pot, 256).unwrap();
    assert!((curve.t_star - 6.0).abs() < 1e-3, "minimizer {} vs 6.0", curve.t_star);
    println!(
        "criterion 04 (separated exactness): PASS - sup gap {worst:.2e} < 1e-8, minimizer {:.6}",
        curve.t_star
    );
}

#[test]
fn criterion_05_two_release_failure() {
    let model = separated_model();
    let pot = build_cost_potential(&model, 1e-6, 1e-12).unwrap();
    let report =
        relopt::optimize::two_release_experiment(&model, &pot, 6.0, 8.0, 0.5).unwrap();
    assert_eq!(report.verdict.outcome, BasinOutcome::ConvergesToZero);
    assert!(
        report.p_before_second < report.p_after_first,
        "no decay: {} !< {}",
        report.p_before_second,
        report.p_after_first
    );
    println!(
        "criterion 05 (two-release failure): PASS - verdict {:?}, p({}-) = {:.6} < p({}+) = {:.6}",
        report.verdict.outcome, 8.0, report.p_before_second, 6.0, report.p_after_first
    );
}

#[test]
fn criterion_06_jump_limit_consistency() {
    let (t0, amount) = (6.0, 0.02);
    let schedule = ReleaseSchedule::new(vec![Release::Impulse { time: t0, amount }]).unwrap();
    let limit = simulate_impulsive(&MODEL, &POTENTIAL, &schedule, 0.0, (0.0, 12.0), 1e-11).unwrap();
    let target = limit.eval(t0);
    let gap_at = |eps: f64| {
        let pulse =
            simulate_finite_rate(&MODEL, &schedule, eps, 0.0, (0.0, 12.0), 1e-11).unwrap();
        (pulse.eval(t0) - target).abs()
    };
    let fine = gap_at(1e-3);
    assert!(fine < 0.01, "gap at width 1e-3 is {fine}");
    let seq = [gap_at(1e-2), gap_at(5e-3), gap_at(2.5e-3)];
    for w in seq.windows(2) {
        let ratio = w[1] / w[0];
        assert!(
            (0.35..=0.65).contains(&ratio),
            "halving the width scaled the gap by {ratio}, sequence {seq:?}"
        );
    }
    println!(
        "criterion 06 (jump limit): PASS - gap(1e-3) = {fine:.2e}, halving ratios {:.2} and {:.2}",
        seq[1] / seq[0],
        seq[2] / seq[1]
    );
}

#[test]
fn criterion_07_poincare_derivative_identity() {
    let mut checked = Vec::new();
    for (model, env) in [
        (&*MODEL, (*ENVELOPE).clone()),
        (&separated_model(), find_periodic_envelope(&separated_model(), 128, 1e-10).unwrap()),
    ] {
        for (x, lambda) in [(env.x_min, env.lambda_min), (env.x_max, env.lambda_max)] {
            let h = 1e-5;
            let fd = (poincare_map(model, 0.0, x + h, 1e-11).unwrap()
                - poincare_map(model, 0.0, x - h, 1e-11).unwrap())
                / (2.0 * h);
            let expected = (-lambda * PERIOD).exp();
            let rel = ((fd - expected) / expected).abs();
            assert!(rel < 1e-3, "P'({x}) = {fd} vs {expected} (rel {rel:e})");
            checked.push(rel);
        }
    }
    let worst = checked.iter().cloned().fold(0.0, f64::max);
    println!(
        "criterion 07 (flow derivative identity): PASS - {} fixed points, worst rel err {worst:.2e}",
        checked.len()
    );
}

#[test]
fn criterion_08_hypothesis_arithmetic() {
    let report = check_hypotheses(&MODEL, 64).unwrap();
    assert!(report.all_passed, "failed checks: {:?}", report.failed());
    assert!(
        (report.mean_dfdp_at_zero - (-0.0975)).abs() < 1e-8,
        "mean at 0: {}",
        report.mean_dfdp_at_zero
    );
    assert!(
        (report.mean_dfdp_at_one - (-0.23)).abs() < 1e-8,
        "mean at 1: {}",
        report.mean_dfdp_at_one
    );
    println!(
        "criterion 08 (boundary growth means): PASS - {:.10} and {:.10}",
        report.mean_dfdp_at_zero, report.mean_dfdp_at_one
    );
}

#[test]
fn criterion_09_eta_sweep_rates() {
    let base = WolbachiaParams { d1: 0.3, d2: 0.3, ..reference_params() };
    let report = eta_sweep(&base, &reference_capacity(), &[0.04, 0.02, 0.01, 0.005]).unwrap();
    assert!(
        (report.slope_sup_gap - 1.0).abs() <= 0.25,
        "sup-gap slope {}",
        report.slope_sup_gap
    );
    assert!(report.slope_minimizer_drift >= 0.25, "drift slope {}", report.slope_minimizer_drift);
    println!(
        "criterion 09 (death-rate sweep orders): PASS - slopes {:.3} (gap) and {:.3} (drift)",
        report.slope_sup_gap, report.slope_minimizer_drift
    );
}

// criterion 10: the named invariant suites, one standalone test each

#[test]
fn criterion_10a_equilibrium_preservation() {
    for p0 in [0.0, 1.0] {
        let traj =
            integrate_scalar(&MODEL, &ControlSignal::zero(), p0, (0.0, 5.0 * PERIOD), 1e-10)
                .unwrap();
        let mut worst = 0.0_f64;
        for i in 0..=600 {
            let t = 5.0 * PERIOD * i as f64 / 600.0;
            worst = worst.max((traj.eval(t) - p0).abs());
        }
        assert!(worst < 1e-11, "equilibrium {p0} drifted by {worst:e}");
    }
    println!("criterion 10a (equilibrium preservation): PASS");
}

#[test]
fn criterion_10b_poincare_monotonicity() {
    for t_shift in [0.0, 3.7, 9.1] {
        let sample = sample_poincare(&MODEL, t_shift, 128, 1e-9).unwrap();
        assert!(sample.is_strictly_increasing(), "map not increasing at shift {t_shift}");
    }
    println!("criterion 10b (flow-map monotonicity): PASS");
}

#[test]
fn criterion_10c_phi_sign_structure() {
    let env = &*ENVELOPE;
    for i in 1..128 {
        let x = i as f64 / 128.0;
        if x < env.x_min - 1e-6 {
            let phi = poincare_map(&MODEL, 0.0, x, 1e-9).unwrap() - x;
            assert!(phi < 0.0, "Phi({x}) = {phi} >= 0 below the envelope");
        } else if x > env.x_max + 1e-6 {
            let phi = poincare_map(&MODEL, 0.0, x, 1e-9).unwrap() - x;
            assert!(phi > 0.0, "Phi({x}) = {phi} <= 0 above the envelope");
        }
    }
    println!("criterion 10c (displacement sign structure): PASS");
}

#[test]
fn criterion_10d_envelope_trapping() {
    // the interior orbit is repelling (lambda < 0): a starting error d0
    // grows like d0 e^{|lambda| T n}, so the five-period band test needs
    // a starting value resolved well below the 1e-8 budget
    let env = find_periodic_envelope(&MODEL, 256, 1e-12).unwrap();
    let env = &env;
    let inside = 0.5 * (env.x_min + env.x_max);
    let traj =
        integrate_scalar(&MODEL, &ControlSignal::zero(), inside, (0.0, 5.0 * PERIOD), 1e-12)
            .unwrap();
    for i in 0..=1000 {
        let t = 5.0 * PERIOD * i as f64 / 1000.0;
        let p = traj.eval(t);
        let hi = envelope_at(env, EnvelopeSide::Max, t) + 1e-8;
        let lo = envelope_at(env, EnvelopeSide::Min, t) - 1e-8;
        assert!(p <= hi && p >= lo, "escaped band at t = {t}: p = {p}, band [{lo}, {hi}]");
    }
    println!("criterion 10d (envelope trapping): PASS");
}

#[test]
fn criterion_10e_jump_additivity() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(23);
    for _ in 0..40 {
        let p: f64 = rng.gen_range(0.0..0.6);
        let ca: f64 = rng.gen_range(0.0..0.02);
        let cb: f64 = rng.gen_range(0.0..0.02);
        let t0: f64 = rng.gen_range(0.0..PERIOD);
        let mid = relopt::release::jump_map(&MODEL, &POTENTIAL, p, ca, t0).unwrap();
        let two = relopt::release::jump_map(&MODEL, &POTENTIAL, mid, cb, t0).unwrap();
        let one = relopt::release::jump_map(&MODEL, &POTENTIAL, p, ca + cb, t0).unwrap();
        assert!((two - one).abs() < 1e-9, "additivity broke at p = {p}: {two} vs {one}");
    }
    println!("criterion 10e (jump additivity): PASS");
}

#[test]
fn criterion_10f_comparison_principle() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(31);
    for case in 0..8 {
        let p0: f64 = rng.gen_range(0.0..0.5);
        let start: f64 = rng.gen_range(0.0..8.0);
        let width: f64 = rng.gen_range(0.5..3.0);
        let rate: f64 = rng.gen_range(0.001..0.02);
        // u_hi >= u_lo pointwise: same window, higher rate
        let hi_ctl = ControlSignal::new(vec![ControlPiece {
            start,
            end: start + width,
            rate: rate * 1.5,
        }])
        .unwrap();
        let lo_ctl =
            ControlSignal::new(vec![ControlPiece { start, end: start + width, rate }]).unwrap();
        let hi = integrate_scalar(&MODEL, &hi_ctl, p0, (0.0, 2.0 * PERIOD), 1e-10).unwrap();
        let lo = integrate_scalar(&MODEL, &lo_ctl, p0, (0.0, 2.0 * PERIOD), 1e-10).unwrap();
        for i in 0..=400 {
            let t = 2.0 * PERIOD * i as f64 / 400.0;
            assert!(
                hi.eval(t) >= lo.eval(t) - 1e-9,
                "case {case}: ordering lost at t = {t}"
            );
        }
    }
    println!("criterion 10f (comparison principle): PASS");
}

#[test]
fn reduction_gap_decreases_with_sigma() {
    // supporting check for the compartment-to-scalar reduction
    let params = reference_params();
    let capacity = reference_capacity();
    let control = ControlSignal::pulse(5.5, 0.5, 0.03).unwrap();
    let span = (0.0, 2.0 * PERIOD);
    let scalar = integrate_scalar(&MODEL, &control, 0.0, span, 1e-9).unwrap();
    let mut gaps = Vec::new();
    for sigma in [0.1, 0.025] {
        let init = relopt::integrate::CompartmentState::new(
            capacity.value(0.0) * (1.0 - sigma),
            0.0,
        )
        .unwrap();
        let (_, prop) = relopt::integrate::integrate_compartments(
            &params, &capacity, sigma, &control, init, span, 1e-9,
        )
        .unwrap();
        gaps.push(sup_distance(&prop, &scalar, span).unwrap());
    }
    assert!(gaps[1] < gaps[0], "gap did not shrink: {gaps:?}");
    println!("reduction check: PASS - gap(0.025) = {:.4} < gap(0.1) = {:.4}", gaps[1], gaps[0]);
}
