//! Poincaré maps, interior periodic solutions and basins of attraction.
//!
//! The time-T flow map P of the uncontrolled equation fixes 0 and 1; its
//! interior fixed points are the starting values of T-periodic solutions.
//! The displacement Phi = P - Id is sampled on a grid and every sign
//! change is refined by bisection. The largest and smallest zeros start
//! the maximal and minimal periodic orbits, whose principal eigenvalue
//! lambda = -(1/T) integral of df/dp along the orbit decides attractivity
//! (lambda > 0 attractive). Above the maximal orbit solutions converge to
//! 1, below the minimal orbit to 0.

use serde::Serialize;

use crate::dynamics::ModelSpec;
use crate::error::{Error, Result};
use crate::integrate::{integrate_scalar, ControlSignal, Trajectory};
use crate::numerics::parallel::parallel_map;
use crate::numerics::quad;
use crate::numerics::roots::bisect;

/// Attractivity verdict from the sign of the principal eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Attractivity {
    Attractive,
    NotAttractive,
    /// |lambda| below resolution; the sign test is inconclusive.
    Indeterminate,
}

fn attractivity_of(lambda: f64) -> Attractivity {
    if lambda > 1e-8 {
        Attractivity::Attractive
    } else if lambda < -1e-8 {
        Attractivity::NotAttractive
    } else {
        Attractivity::Indeterminate
    }
}

/// Time-T flow map started at `t_shift`: p0 -> p(t_shift + T; p0).
pub fn poincare_map(model: &ModelSpec, t_shift: f64, p0: f64, tol: f64) -> Result<f64> {
    let period = model.period();
    if !(0.0..period).contains(&t_shift) {
        return Err(Error::Domain(format!(
            "t_shift must lie in [0, T) = [0, {period}), got {t_shift}"
        )));
    }
    let traj = integrate_scalar(
        model,
        &ControlSignal::zero(),
        p0,
        (t_shift, t_shift + period),
        tol,
    )?;
    Ok(traj.final_value())
}

/// Sampled Poincaré map at a fixed base time.
#[derive(Debug, Clone)]
pub struct PoincareSample {
    pub t_shift: f64,
    pub p0: Vec<f64>,
    pub values: Vec<f64>,
    /// Displacement Phi = P - Id on the same grid.
    pub phi: Vec<f64>,
}

impl PoincareSample {
    pub fn is_strictly_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] > w[0])
    }

    /// CSV rows `p0,phi`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("p0,phi\n");
        for (p0, phi) in self.p0.iter().zip(self.phi.iter()) {
            s.push_str(&format!("{p0},{phi}\n"));
        }
        s
    }
}

/// Evaluate P and Phi on a uniform grid of [0, 1] (endpoints included).
pub fn sample_poincare(
    model: &ModelSpec,
    t_shift: f64,
    grid_n: usize,
    tol: f64,
) -> Result<PoincareSample> {
    let p0: Vec<f64> = (0..=grid_n).map(|i| i as f64 / grid_n as f64).collect();
    let values: Vec<Result<f64>> =
        parallel_map(p0.len(), |i| poincare_map(model, t_shift, p0[i], tol));
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    let phi = p0.iter().zip(values.iter()).map(|(a, b)| b - a).collect();
    Ok(PoincareSample { t_shift, p0, values, phi })
}

/// Maximal and minimal interior periodic solutions with their starting
/// values, orbits, and principal eigenvalues.
#[derive(Debug, Clone)]
pub struct PeriodicEnvelope {
    /// All refined interior zeros of Phi, ascending.
    pub zeros: Vec<f64>,
    pub x_min: f64,
    pub x_max: f64,
    orbit_min: Trajectory,
    orbit_max: Trajectory,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub attractivity_min: Attractivity,
    pub attractivity_max: Attractivity,
    /// Grid points where Phi touches zero without changing sign.
    pub tangent_points: Vec<f64>,
    period: f64,
}

/// Which side of the envelope to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeSide {
    Max,
    Min,
}

impl PeriodicEnvelope {
    pub fn period(&self) -> f64 {
        self.period
    }

    /// True when the interior periodic solution is unique (x_min = x_max
    /// up to refinement width).
    pub fn is_unique(&self) -> bool {
        (self.x_max - self.x_min).abs() < 1e-9
    }

    pub fn orbit(&self, side: EnvelopeSide) -> &Trajectory {
        match side {
            EnvelopeSide::Max => &self.orbit_max,
            EnvelopeSide::Min => &self.orbit_min,
        }
    }

    /// CSV rows `t,p_min,p_max` on a uniform grid over one period.
    pub fn to_csv(&self, samples: usize) -> String {
        let mut s = String::from("t,p_min,p_max\n");
        for i in 0..=samples {
            let t = self.period * i as f64 / samples as f64;
            s.push_str(&format!(
                "{t},{},{}\n",
                envelope_at(self, EnvelopeSide::Min, t),
                envelope_at(self, EnvelopeSide::Max, t)
            ));
        }
        s
    }
}

/// Periodic evaluation of one side of the envelope at any time.
pub fn envelope_at(env: &PeriodicEnvelope, side: EnvelopeSide, t: f64) -> f64 {
    let tau = t.rem_euclid(env.period);
    env.orbit(side).eval(tau)
}

/// Locate all interior periodic solutions: sample Phi on an interior grid,
/// refine every sign change by bisection to width 1e-11, integrate the
/// extreme orbits and compute their eigenvalues by quadrature along the
/// orbit.
pub fn find_periodic_envelope(
    model: &ModelSpec,
    grid_n: usize,
    tol: f64,
) -> Result<PeriodicEnvelope> {
    if grid_n < 64 {
        return Err(Error::Domain(format!("envelope grid needs >= 64 points, got {grid_n}")));
    }
    let period = model.period();
    let xs: Vec<f64> = (1..grid_n).map(|i| i as f64 / grid_n as f64).collect();
    let phi_of = |x: f64| poincare_map(model, 0.0, x, tol).map(|p| p - x);
    let phis: Vec<f64> =
        parallel_map(xs.len(), |i| phi_of(xs[i])).into_iter().collect::<Result<_>>()?;

    let mut zeros = Vec::new();
    let mut tangent_points = Vec::new();
    for i in 0..xs.len() {
        let (x, phi) = (xs[i], phis[i]);
        if phi == 0.0 {
            // exact grid zero: treat as a zero, transversality unknown
            zeros.push(x);
            continue;
        }
        if i + 1 < xs.len() && (phi < 0.0) != (phis[i + 1] < 0.0) {
            let zero = bisect(
                |p| phi_of(p).expect("bisection stays inside the sampled bracket"),
                x,
                xs[i + 1],
                1e-11,
            );
            zeros.push(zero);
        }
        // deep local dip of |Phi| without a sign change: refine it and
        // flag a tangency when the minimum hugs zero
        if i > 0 && i + 1 < xs.len() {
            let local_min = phi.abs() <= phis[i - 1].abs() && phi.abs() <= phis[i + 1].abs();
            let same_sign = (phis[i - 1] < 0.0) == (phis[i + 1] < 0.0)
                && (phis[i - 1] < 0.0) == (phi < 0.0);
            if local_min && same_sign && phi.abs() < 1e-3 {
                let (px, pv) = crate::numerics::minimize::golden_section(
                    |p| phi_of(p).map(f64::abs).unwrap_or(f64::INFINITY),
                    xs[i - 1],
                    xs[i + 1],
                    1e-9,
                );
                if pv < 1e-8 {
                    tangent_points.push(px);
                }
            }
        }
    }
    zeros.sort_by(|a, b| a.partial_cmp(b).unwrap());
    zeros.dedup_by(|a, b| (*a - *b).abs() < 1e-10);
    if zeros.is_empty() {
        return Err(Error::NoInteriorZero);
    }

    let x_min = zeros[0];
    let x_max = *zeros.last().unwrap();
    let orbit_of = |x: f64| -> Result<Trajectory> {
        integrate_scalar(model, &ControlSignal::zero(), x, (0.0, period), tol)
    };
    let orbit_min = orbit_of(x_min)?;
    let orbit_max = if x_max == x_min { orbit_min.clone() } else { orbit_of(x_max)? };

    let lambda_along = |orbit: &Trajectory| -> f64 {
        -quad::periodic_mean(|t| model.dfdp(t, orbit.eval(t)), period, 1e-10)
    };
    let lambda_min = lambda_along(&orbit_min);
    let lambda_max = if x_max == x_min { lambda_min } else { lambda_along(&orbit_max) };

    Ok(PeriodicEnvelope {
        zeros,
        x_min,
        x_max,
        orbit_min,
        orbit_max,
        lambda_min,
        lambda_max,
        attractivity_min: attractivity_of(lambda_min),
        attractivity_max: attractivity_of(lambda_max),
        tangent_points,
        period,
    })
}

/// Long-run fate of a state, decided by its position relative to the
/// envelope at the observation time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BasinOutcome {
    ConvergesToOne,
    ConvergesToZero,
    /// Inside (or within the tie margin of) the envelope band.
    BetweenEnvelope,
}

/// Classification of an initial state (t_bar, p0).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BasinVerdict {
    pub outcome: BasinOutcome,
    /// Envelope value the state was compared against.
    pub witness: f64,
}

/// Margin around the envelope inside which no verdict is made.
pub const BASIN_MARGIN: f64 = 1e-9;

pub fn classify_basin(env: &PeriodicEnvelope, t_bar: f64, p0: f64) -> BasinVerdict {
    let upper = envelope_at(env, EnvelopeSide::Max, t_bar);
    let lower = envelope_at(env, EnvelopeSide::Min, t_bar);
    if p0 > upper + BASIN_MARGIN {
        BasinVerdict { outcome: BasinOutcome::ConvergesToOne, witness: upper }
    } else if p0 < lower - BASIN_MARGIN {
        BasinVerdict { outcome: BasinOutcome::ConvergesToZero, witness: lower }
    } else {
        BasinVerdict { outcome: BasinOutcome::BetweenEnvelope, witness: upper }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{
        build_wolbachia_model, wolbachia_separated, CarryingCapacity, WolbachiaParams,
    };

    fn reference_model() -> ModelSpec {
        build_wolbachia_model(
            WolbachiaParams::default(),
            CarryingCapacity::cosine(0.06, 0.02, 12.0).unwrap(),
        )
        .unwrap()
    }

    fn separated_model() -> ModelSpec {
        let params = WolbachiaParams { d1: 0.3, d2: 0.3, ..WolbachiaParams::default() };
        wolbachia_separated(params, CarryingCapacity::cosine(0.06, 0.02, 12.0).unwrap()).unwrap()
    }

    #[test]
    fn boundary_fixed_points() {
        let model = reference_model();
        assert!(poincare_map(&model, 0.0, 0.0, 1e-10).unwrap().abs() < 1e-11);
        assert!((poincare_map(&model, 0.0, 1.0, 1e-10).unwrap() - 1.0).abs() < 1e-11);
        assert!(poincare_map(&model, 3.0, 0.0, 1e-10).unwrap().abs() < 1e-11);
    }

    #[test]
    fn separated_threshold_is_fixed() {
        let model = separated_model();
        let theta = model.known_threshold().unwrap();
        let p = poincare_map(&model, 0.0, theta, 1e-10).unwrap();
        assert!((p - theta).abs() < 1e-10);
    }

    #[test]
    fn map_is_strictly_increasing() {
        let model = reference_model();
        let sample = sample_poincare(&model, 0.0, 64, 1e-9).unwrap();
        assert!(sample.is_strictly_increasing());
    }

    #[test]
    fn separated_envelope_is_the_constant_threshold() {
        let model = separated_model();
        let env = find_periodic_envelope(&model, 128, 1e-10).unwrap();
        let theta = model.known_threshold().unwrap();
        assert_eq!(env.zeros.len(), 1);
        assert!(env.is_unique());
        assert!((env.x_max - theta).abs() < 1e-9, "x_max = {}", env.x_max);
        assert!(env.lambda_max < 0.0);
        assert_eq!(env.attractivity_max, Attractivity::NotAttractive);
        for i in 0..=32 {
            let t = 12.0 * i as f64 / 32.0;
            assert!((envelope_at(&env, EnvelopeSide::Max, t) - theta).abs() < 1e-8);
        }
    }

    #[test]
    fn autonomous_envelope_sits_at_mean_threshold() {
        let params = WolbachiaParams::default();
        let model =
            build_wolbachia_model(params, CarryingCapacity::cosine(0.06, 0.0, 12.0).unwrap())
                .unwrap();
        let env = find_periodic_envelope(&model, 128, 1e-10).unwrap();
        assert_eq!(env.zeros.len(), 1);
        assert!((env.x_max - params.theta_bar()).abs() < 1e-9, "x = {}", env.x_max);
        assert!((env.x_max - 0.361_111_111).abs() < 1e-8);
    }

    #[test]
    fn seasonal_envelope_exists_with_unstable_orbits() {
        let model = reference_model();
        let env = find_periodic_envelope(&model, 256, 1e-9).unwrap();
        assert!(0.0 < env.x_min && env.x_min <= env.x_max && env.x_max < 1.0);
        assert!(env.lambda_min < 0.0 && env.lambda_max < 0.0);
        // orbit closes up to tolerance
        let back = envelope_at(&env, EnvelopeSide::Max, 12.0);
        assert!((back - env.x_max).abs() < 1e-9);
        assert!((envelope_at(&env, EnvelopeSide::Max, 0.0) - env.x_max).abs() < 1e-12);
    }

    #[test]
    fn derivative_at_fixed_point_matches_eigenvalue() {
        let model = reference_model();
        let env = find_periodic_envelope(&model, 256, 1e-11).unwrap();
        let h = 1e-5;
        let lo = poincare_map(&model, 0.0, env.x_max - h, 1e-11).unwrap();
        let hi = poincare_map(&model, 0.0, env.x_max + h, 1e-11).unwrap();
        let fd = (hi - lo) / (2.0 * h);
        let expected = (-env.lambda_max * 12.0).exp();
        assert!(
            (fd - expected).abs() < 1e-4 * expected.abs(),
            "P' = {fd} vs e^(-lambda T) = {expected}"
        );
    }

    #[test]
    fn phi_sign_structure_around_envelope() {
        let model = reference_model();
        let env = find_periodic_envelope(&model, 256, 1e-9).unwrap();
        for i in 1..128 {
            let x = i as f64 / 128.0;
            if x < env.x_min - 1e-6 {
                let phi = poincare_map(&model, 0.0, x, 1e-9).unwrap() - x;
                assert!(phi < 0.0, "Phi({x}) = {phi} should be negative");
            } else if x > env.x_max + 1e-6 {
                let phi = poincare_map(&model, 0.0, x, 1e-9).unwrap() - x;
                assert!(phi > 0.0, "Phi({x}) = {phi} should be positive");
            }
        }
    }

    #[test]
    fn basin_classification_trivia() {
        let model = reference_model();
        let env = find_periodic_envelope(&model, 128, 1e-9).unwrap();
        assert_eq!(classify_basin(&env, 0.0, 1.0).outcome, BasinOutcome::ConvergesToOne);
        assert_eq!(classify_basin(&env, 0.0, 0.0).outcome, BasinOutcome::ConvergesToZero);
        assert_eq!(
            classify_basin(&env, 4.2, envelope_at(&env, EnvelopeSide::Max, 4.2)).outcome,
            BasinOutcome::BetweenEnvelope
        );
    }

    #[test]
    fn verdicts_match_long_simulations() {
        use rand::{Rng, SeedableRng};
        let model = reference_model();
        let env = find_periodic_envelope(&model, 128, 1e-9).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let mut confirmed = 0;
        while confirmed < 50 {
            let t_bar: f64 = rng.gen_range(0.0..12.0);
            let p0: f64 = rng.gen_range(0.0..1.0);
            let verdict = classify_basin(&env, t_bar, p0);
            let target = match verdict.outcome {
                BasinOutcome::ConvergesToOne => 1.0,
                BasinOutcome::ConvergesToZero => 0.0,
                BasinOutcome::BetweenEnvelope => continue,
            };
            // skip states inside the numerical escape boundary layer
            if (p0 - verdict.witness).abs() < 1e-4 {
                continue;
            }
            let traj = integrate_scalar(
                &model,
                &ControlSignal::zero(),
                p0,
                (t_bar, t_bar + 20.0 * 12.0),
                1e-9,
            )
            .unwrap();
            let end = traj.final_value();
            assert!(
                (end - target).abs() < 1e-3,
                "verdict {:?} from (t = {t_bar}, p0 = {p0}) but p(end) = {end}",
                verdict.outcome
            );
            confirmed += 1;
        }
    }

    #[test]
    fn above_envelope_state_replaces_within_ten_periods() {
        let model = reference_model();
        let env = find_periodic_envelope(&model, 128, 1e-9).unwrap();
        let t_bar = 3.0;
        let p0 = envelope_at(&env, EnvelopeSide::Max, t_bar) + 0.01;
        assert_eq!(classify_basin(&env, t_bar, p0).outcome, BasinOutcome::ConvergesToOne);
        let traj = integrate_scalar(
            &model,
            &ControlSignal::zero(),
            p0,
            (t_bar, t_bar + 120.0),
            1e-9,
        )
        .unwrap();
        assert!(traj.final_value() > 0.99);
    }

    #[test]
    fn envelope_trapping_over_five_periods() {
        let model = reference_model();
        let env = find_periodic_envelope(&model, 256, 1e-10).unwrap();
        let t_bar = 0.0;
        let inside = 0.5 * (env.x_min + env.x_max);
        let traj = integrate_scalar(
            &model,
            &ControlSignal::zero(),
            inside,
            (t_bar, t_bar + 5.0 * 12.0),
            1e-10,
        )
        .unwrap();
        for i in 0..=600 {
            let t = 60.0 * i as f64 / 600.0;
            let p = traj.eval(t);
            let hi = envelope_at(&env, EnvelopeSide::Max, t);
            let lo = envelope_at(&env, EnvelopeSide::Min, t);
            assert!(
                p <= hi + 1e-8 && p >= lo - 1e-8,
                "escaped envelope at t = {t}: p = {p}, band = [{lo}, {hi}]"
            );
        }
    }

    #[test]
    fn rejects_foolish_grids_and_missing_zeros() {
        let model = reference_model();
        assert!(find_periodic_envelope(&model, 32, 1e-9).is_err());
    }

    #[test]
    fn monostable_drift_has_no_interior_zero() {
        use crate::dynamics::{CarryingCapacity, ModelSpec};
        use std::sync::Arc;
        let model = ModelSpec::custom(
            "monostable",
            Arc::new(|_t, p: f64| -p * (1.0 - p)),
            Arc::new(|_t, p: f64| -(1.0 - 2.0 * p)),
            Arc::new(|p: f64| 1.0 - p),
            CarryingCapacity::cosine(0.05, 0.0, 12.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            find_periodic_envelope(&model, 128, 1e-9),
            Err(crate::error::Error::NoInteriorZero)
        ));
    }

    #[test]
    fn tangent_zero_is_flagged_next_to_a_transversal_one() {
        use crate::dynamics::{CarryingCapacity, ModelSpec};
        use std::sync::Arc;
        // autonomous drift with a simple zero at 0.25 and a double zero
        // at 0.6: the flow map displacement touches zero at the tangency
        let f = |p: f64| p * (1.0 - p) * (p - 0.25) * (p - 0.6) * (p - 0.6);
        let model = ModelSpec::custom(
            "tangency",
            Arc::new(move |_t, p: f64| f(p)),
            Arc::new(move |_t, p: f64| {
                let h = 1e-6;
                (f(p + h) - f(p - h)) / (2.0 * h)
            }),
            Arc::new(|p: f64| 1.0 - p),
            CarryingCapacity::cosine(0.05, 0.0, 12.0).unwrap(),
        )
        .unwrap();
        let env = find_periodic_envelope(&model, 128, 1e-10).unwrap();
        assert_eq!(env.zeros.len(), 1);
        assert!((env.x_max - 0.25).abs() < 1e-8, "x = {}", env.x_max);
        assert_eq!(env.tangent_points.len(), 1, "tangents: {:?}", env.tangent_points);
        assert!((env.tangent_points[0] - 0.6).abs() < 1e-4);
    }
}
