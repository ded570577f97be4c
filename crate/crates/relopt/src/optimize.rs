//! Release optimization: the minimal-cost curve and its minimizer, the
//! finite-release-rate infimum and its convergence to the impulse limit,
//! the two-release splitting experiment, the death-rate-gap sweep, and a
//! restricted rectangular-pulse search under a bounded release rate.

use serde::Serialize;

use crate::dynamics::{
    build_wolbachia_model, CarryingCapacity, ModelFamily, ModelSpec, WolbachiaParams,
};
use crate::error::{Error, Result};
use crate::integrate::{integrate_scalar, ControlPiece, ControlSignal};
use crate::numerics::fit::log_log_slope;
use crate::numerics::minimize::golden_section;
use crate::numerics::parallel::parallel_map;
use crate::numerics::roots::bisect_predicate;
use crate::periodic::{
    classify_basin, envelope_at, find_periodic_envelope, BasinOutcome, BasinVerdict,
    EnvelopeSide, PeriodicEnvelope,
};
use crate::release::{
    build_cost_potential, simulate_impulsive, CostPotential, Release, ReleaseSchedule,
};

/// The minimal release amount guaranteeing replacement, as a function of
/// the release time: C(t) = K(t) G(p_max(t)).
#[derive(Debug, Clone, Serialize)]
pub struct CostCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Refined global minimizer and minimum.
    pub t_star: f64,
    pub c_star: f64,
    /// All refined local minima within 1% of the global minimum.
    pub near_optima: Vec<(f64, f64)>,
}

impl CostCurve {
    /// CSV rows `t,cbar`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,cbar\n");
        for (t, c) in self.grid.iter().zip(self.values.iter()) {
            s.push_str(&format!("{t},{c}\n"));
        }
        s
    }
}

/// Evaluate the minimal-cost curve on a uniform grid over [0, T] and
/// refine the best bracket (and every near-optimal local minimum) by
/// golden section to 1e-6 T.
pub fn cost_curve(
    model: &ModelSpec,
    env: &PeriodicEnvelope,
    pot: &CostPotential,
    grid_n: usize,
) -> Result<CostCurve> {
    if grid_n < 128 {
        return Err(Error::Domain(format!("cost grid needs >= 128 points, got {grid_n}")));
    }
    let period = model.period();
    let cost = |t: f64| {
        model.capacity().value(t) * pot.value(envelope_at(env, EnvelopeSide::Max, t))
    };
    let grid: Vec<f64> = (0..=grid_n).map(|i| period * i as f64 / grid_n as f64).collect();
    let values = parallel_map(grid.len(), |i| cost(grid[i]));

    let xtol = 1e-6 * period;
    let refine = |idx: usize| -> (f64, f64) {
        let lo = grid[idx.saturating_sub(1)];
        let hi = grid[(idx + 1).min(grid.len() - 1)];
        if lo == hi {
            return (grid[idx], values[idx]);
        }
        golden_section(cost, lo, hi, xtol)
    };

    let best_idx = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let (t_star, c_star) = refine(best_idx);

    let mut near_optima = Vec::new();
    for i in 0..grid.len() {
        let prev = values[(i + grid.len() - 1) % grid.len()];
        let next = values[(i + 1) % grid.len()];
        if values[i] <= prev && values[i] <= next && values[i] <= c_star * 1.01 {
            let (t, c) = refine(i);
            near_optima.push((t.rem_euclid(period), c));
        }
    }
    near_optima.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    near_optima.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-4 * period);

    Ok(CostCurve { grid, values, t_star, c_star, near_optima })
}

/// Infimum of feasible release amounts at a finite release-rate scale S
/// (pulse width 1/S), with the minimizing release end time.
#[derive(Debug, Clone, Serialize)]
pub struct FiniteSResult {
    pub s: f64,
    pub c_s_star: f64,
    pub t0_s_star: f64,
    /// Threshold amount per end-time grid point.
    pub thresholds: Vec<(f64, f64)>,
    /// Bracket sequence of the bisection at the refined minimizer.
    pub bisection_history: Vec<(f64, f64)>,
}

/// Tolerance used for the inner integrations of the threshold search.
const FEASIBILITY_TOL: f64 = 1e-10;

/// A release of amount C at rate C S on [t0 - 1/S, t0] achieves
/// replacement iff the solution exceeds the maximal periodic orbit at t0.
/// The state is identically 0 before the pulse, so only the window is
/// integrated.
fn pulse_feasible(
    model: &ModelSpec,
    env: &PeriodicEnvelope,
    s: f64,
    t0: f64,
    amount: f64,
) -> Result<bool> {
    let width = 1.0 / s;
    let control = ControlSignal::new(vec![ControlPiece {
        start: t0 - width,
        end: t0,
        rate: amount * s,
    }])?;
    let traj = integrate_scalar(model, &control, 0.0, (t0 - width, t0), FEASIBILITY_TOL)?;
    Ok(traj.final_value() > envelope_at(env, EnvelopeSide::Max, t0))
}

/// Minimal feasible amount at one end time, by bracket doubling plus
/// bisection to width `c_tol`. `c_cap` is the theoretical feasibility
/// bound; exceeding it without success is an error.
fn threshold_at(
    model: &ModelSpec,
    env: &PeriodicEnvelope,
    s: f64,
    t0: f64,
    c_tol: f64,
    c_cap: f64,
) -> Result<(f64, Vec<(f64, f64)>)> {
    let mut hi = c_cap / 256.0;
    while !pulse_feasible(model, env, s, t0, hi)? {
        hi *= 2.0;
        if hi > c_cap {
            return Err(Error::NoFeasibleC { t0, c_max: c_cap });
        }
    }
    let mut failure = None;
    let (_, threshold, history) = bisect_predicate(
        |c| match pulse_feasible(model, env, s, t0, c) {
            Ok(ok) => ok,
            Err(e) => {
                failure = Some(e);
                true
            }
        },
        0.0,
        hi,
        c_tol,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok((threshold, history)),
    }
}

/// Sweep release end times over [1/S, T], bisect the feasibility
/// threshold at each, and refine the best end time by golden section.
pub fn finite_s_infimum(
    model: &ModelSpec,
    env: &PeriodicEnvelope,
    s: f64,
    t0_grid_n: usize,
    c_tol: f64,
) -> Result<FiniteSResult> {
    let period = model.period();
    if !(s > 1.0 / period) {
        return Err(Error::Domain(format!("rate scale must exceed 1/T, got S = {s}")));
    }
    if !(c_tol <= 1e-5 && c_tol > 0.0) {
        return Err(Error::Domain(format!("threshold tolerance must be <= 1e-5, got {c_tol}")));
    }
    if t0_grid_n < 8 {
        return Err(Error::Domain(format!("end-time grid needs >= 8 points, got {t0_grid_n}")));
    }
    // feasibility is guaranteed above K_max / g(max p_max); cap at 10x that
    let p_high = (0..=512)
        .map(|i| envelope_at(env, EnvelopeSide::Max, period * i as f64 / 512.0))
        .fold(f64::NEG_INFINITY, f64::max);
    let c_cap = 10.0 * model.capacity().max_value() / model.g(p_high);

    let t_lo = 1.0 / s;
    let t0s: Vec<f64> = (0..=t0_grid_n)
        .map(|i| t_lo + (period - t_lo) * i as f64 / t0_grid_n as f64)
        .collect();
    let thresholds: Vec<Result<(f64, Vec<(f64, f64)>)>> =
        parallel_map(t0s.len(), |i| threshold_at(model, env, s, t0s[i], c_tol, c_cap));
    let mut rows = Vec::with_capacity(t0s.len());
    for (t0, th) in t0s.iter().zip(thresholds.into_iter()) {
        rows.push((*t0, th?.0));
    }

    let best_idx = rows
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let lo = rows[best_idx.saturating_sub(1)].0;
    let hi = rows[(best_idx + 1).min(rows.len() - 1)].0;
    let (t0_s_star, c_s_star) = golden_section(
        |t0| {
            threshold_at(model, env, s, t0, c_tol, c_cap)
                .map(|(c, _)| c)
                .unwrap_or(f64::INFINITY)
        },
        lo,
        hi,
        1e-5 * period,
    );
    let (_, history) = threshold_at(model, env, s, t0_s_star, c_tol, c_cap)?;

    Ok(FiniteSResult { s, c_s_star, t0_s_star, thresholds: rows, bisection_history: history })
}

/// Outcome of splitting the minimal budget across two release times.
#[derive(Debug, Clone, Serialize)]
pub struct TwoReleaseReport {
    pub c0: f64,
    pub c1: f64,
    /// The split budget: G(theta) min K.
    pub c_min_total: f64,
    pub verdict: BasinVerdict,
    pub p_after_first: f64,
    pub p_before_second: f64,
    pub p_after_second: f64,
    /// The state decayed strictly between the releases.
    pub decay_witness: bool,
}

/// Split the minimal single-release budget G(theta) min K as
/// (split, 1 - split) across times t0 < t1 and classify the outcome.
/// Requires a separated-variables model with a positive rate factor.
pub fn two_release_experiment(
    model: &ModelSpec,
    pot: &CostPotential,
    t0: f64,
    t1: f64,
    split: f64,
) -> Result<TwoReleaseReport> {
    let spec = match model.family() {
        ModelFamily::Separated(spec) => spec.clone(),
        _ => {
            return Err(Error::PreconditionFailed(
                "two-release experiment requires a separated-variables model".into(),
            ))
        }
    };
    if !(t1 > t0) || !(t0 > 0.0) {
        return Err(Error::PreconditionFailed(format!(
            "release times must satisfy 0 < t0 < t1, got t0 = {t0}, t1 = {t1}"
        )));
    }
    if !(0.0 < split && split < 1.0) {
        return Err(Error::PreconditionFailed(format!("split must lie in (0, 1), got {split}")));
    }
    let period = model.period();
    for i in 0..256 {
        let t = period * i as f64 / 256.0;
        let m = (spec.m)(t);
        if !(m > 0.0) {
            return Err(Error::PreconditionFailed(format!(
                "rate factor must be positive everywhere; m({t}) = {m}"
            )));
        }
    }

    let c_min_total = pot.value(spec.theta_bar) * model.capacity().min_value();
    let c0 = split * c_min_total;
    let c1 = (1.0 - split) * c_min_total;
    let schedule = ReleaseSchedule::new(vec![
        Release::Impulse { time: t0, amount: c0 },
        Release::Impulse { time: t1, amount: c1 },
    ])?;
    let horizon = t1 + period;
    let traj = simulate_impulsive(model, pot, &schedule, 0.0, (0.0, horizon), 1e-10)?;
    let p_after_first = traj.eval(t0);
    let p_before_second = traj.eval_left(t1);
    let p_after_second = traj.eval(t1);

    let env = find_periodic_envelope(model, 128, 1e-10)?;
    let verdict = classify_basin(&env, t1, p_after_second);
    Ok(TwoReleaseReport {
        c0,
        c1,
        c_min_total,
        verdict,
        p_after_first,
        p_before_second,
        p_after_second,
        decay_witness: p_before_second < p_after_first,
    })
}

/// One row of the death-rate-gap sweep.
#[derive(Debug, Clone, Serialize)]
pub struct EtaRow {
    pub eta: f64,
    /// sup_t |p_eta(t) - theta|, the periodic solution's drift from the
    /// equal-death threshold.
    pub sup_gap: f64,
    /// Distance from the cost minimizer to the nearest capacity minimizer.
    pub minimizer_drift: f64,
    /// The interior periodic solution was not unique at this eta.
    pub non_unique: bool,
}

/// Sweep of the death-rate difference eta = d2 - d1.
#[derive(Debug, Clone, Serialize)]
pub struct EtaSweepReport {
    pub rows: Vec<EtaRow>,
    /// Log-log slope of sup_gap against eta (expected order 1).
    pub slope_sup_gap: f64,
    /// Log-log slope of minimizer drift against eta (expected order 1/2).
    pub slope_minimizer_drift: f64,
    pub theta_bar: f64,
}

impl EtaSweepReport {
    /// CSV rows `eta,e,m`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("eta,e,m\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{}\n", r.eta, r.sup_gap, r.minimizer_drift));
        }
        s
    }
}

/// For each eta set d1 = d2 - eta, recompute the envelope and cost curve,
/// and fit the convergence orders of the periodic solution toward the
/// equal-death threshold and of the cost minimizer toward the capacity
/// minimizers.
pub fn eta_sweep(
    base: &WolbachiaParams,
    capacity: &CarryingCapacity,
    etas: &[f64],
) -> Result<EtaSweepReport> {
    if base.d1 != base.d2 {
        return Err(Error::PreconditionFailed(format!(
            "sweep base must have equal death rates, got d1 = {}, d2 = {}",
            base.d1, base.d2
        )));
    }
    if etas.is_empty() || etas.windows(2).any(|w| w[1] >= w[0]) || etas.iter().any(|&e| e <= 0.0)
    {
        return Err(Error::PreconditionFailed(
            "etas must be positive and strictly decreasing".into(),
        ));
    }
    let theta = base.theta_bar_equal_deaths();
    let minimizers = capacity.minimizers();
    let period = capacity.period();

    let rows: Vec<Result<EtaRow>> = parallel_map(etas.len(), |i| {
        let eta = etas[i];
        let params = WolbachiaParams { d1: base.d2 - eta, ..*base };
        let model = build_wolbachia_model(params, capacity.clone())?;
        let env = find_periodic_envelope(&model, 256, 1e-10)?;
        let non_unique = !env.is_unique();
        let sup_gap = (0..=1024)
            .map(|k| {
                let t = period * k as f64 / 1024.0;
                (envelope_at(&env, EnvelopeSide::Max, t) - theta).abs()
            })
            .fold(0.0, f64::max);
        let pot = build_cost_potential(&model, 1e-6, 1e-12)?;
        let curve = cost_curve(&model, &env, &pot, 256)?;
        let minimizer_drift = minimizers
            .iter()
            .map(|&tau| {
                let d = (curve.t_star - tau).abs();
                d.min(period - d)
            })
            .fold(f64::INFINITY, f64::min);
        Ok(EtaRow { eta, sup_gap, minimizer_drift, non_unique })
    });
    let rows: Vec<EtaRow> = rows.into_iter().collect::<Result<_>>()?;

    let es: Vec<f64> = rows.iter().map(|r| r.eta).collect();
    let gaps: Vec<f64> = rows.iter().map(|r| r.sup_gap.max(1e-300)).collect();
    let drifts: Vec<f64> = rows.iter().map(|r| r.minimizer_drift.max(1e-300)).collect();
    Ok(EtaSweepReport {
        rows,
        slope_sup_gap: log_log_slope(&es, &gaps),
        slope_minimizer_drift: log_log_slope(&es, &drifts),
        theta_bar: theta,
    })
}

/// A rectangular release pulse at the rate bound.
#[derive(Debug, Clone, Serialize)]
pub struct PulsePlan {
    pub rate_bound: f64,
    pub start: f64,
    pub duration: f64,
    pub cost: f64,
    pub feasible: bool,
}

/// Minimal-cost rectangular pulse at height M supported in [0, T] such
/// that the constraint p(2T) > p(T) holds (the control vanishes after T,
/// so the constraint pins the state above the threshold orbit). Outer grid
/// over the start time, inner bisection over the minimal duration,
/// golden-section refinement of the start.
pub fn pulse_ocp(
    model: &ModelSpec,
    env: &PeriodicEnvelope,
    rate_bound: f64,
    horizon: Option<f64>,
    coarse_n: usize,
    tol: f64,
) -> Result<PulsePlan> {
    if !(rate_bound > 0.0) {
        return Err(Error::Domain(format!("rate bound must be positive, got {rate_bound}")));
    }
    if coarse_n < 8 {
        return Err(Error::Domain(format!("start grid needs >= 8 points, got {coarse_n}")));
    }
    let period = model.period();
    let horizon = horizon.unwrap_or(2.0 * period);
    if horizon < 2.0 * period {
        return Err(Error::Domain(format!(
            "horizon must cover two periods, got {horizon} < {}",
            2.0 * period
        )));
    }

    // quick necessary bound: the deliverable M T must reach the impulse
    // optimum built from the envelope
    let impulse_floor = {
        let pot = build_cost_potential(model, 1e-6, 1e-10)?;
        (0..=128)
            .map(|i| {
                let t = period * i as f64 / 128.0;
                model.capacity().value(t) * pot.value(envelope_at(env, EnvelopeSide::Max, t))
            })
            .fold(f64::INFINITY, f64::min)
    };
    if rate_bound * period < impulse_floor {
        return Err(Error::Infeasible { rate_bound });
    }

    let sim_tol = tol.clamp(1e-12, 1e-6);
    let feasible = |start: f64, duration: f64| -> Result<bool> {
        if duration <= 0.0 {
            return Ok(false);
        }
        let control = ControlSignal::new(vec![ControlPiece {
            start,
            end: start + duration,
            rate: rate_bound,
        }])?;
        let traj = integrate_scalar(model, &control, 0.0, (0.0, horizon), sim_tol)?;
        Ok(traj.eval(2.0 * period) > traj.eval(period))
    };

    // minimal feasible duration at a fixed start (monotone in duration)
    let duration_tol = 1e-6;
    let min_duration = |start: f64| -> Result<Option<f64>> {
        let d_max = period - start;
        if d_max <= 0.0 || !feasible(start, d_max)? {
            return Ok(None);
        }
        let mut failure = None;
        let (_, d, _) = bisect_predicate(
            |d| match feasible(start, d) {
                Ok(ok) => ok,
                Err(e) => {
                    failure = Some(e);
                    true
                }
            },
            0.0,
            d_max,
            duration_tol,
        );
        match failure {
            Some(e) => Err(e),
            None => Ok(Some(d)),
        }
    };

    let starts: Vec<f64> = (0..coarse_n).map(|i| period * i as f64 / coarse_n as f64).collect();
    let durations: Vec<Result<Option<f64>>> =
        parallel_map(starts.len(), |i| min_duration(starts[i]));
    let mut best: Option<(f64, f64)> = None;
    let mut costs = vec![f64::INFINITY; starts.len()];
    for (i, d) in durations.into_iter().enumerate() {
        if let Some(d) = d? {
            costs[i] = rate_bound * d;
            if best.map(|(_, c)| costs[i] < c).unwrap_or(true) {
                best = Some((starts[i], costs[i]));
            }
        }
    }
    let (best_start, _) = best.ok_or(Error::Infeasible { rate_bound })?;

    let best_idx = starts.iter().position(|&s| s == best_start).unwrap();
    let lo = starts[best_idx.saturating_sub(1)];
    let hi = starts[(best_idx + 1).min(starts.len() - 1)];
    let (start, _) = golden_section(
        |s| match min_duration(s) {
            Ok(Some(d)) => rate_bound * d,
            _ => f64::INFINITY,
        },
        lo,
        hi,
        1e-4 * period,
    );
    let duration = min_duration(start)?.ok_or(Error::Infeasible { rate_bound })?;
    Ok(PulsePlan {
        rate_bound,
        start,
        duration,
        cost: rate_bound * duration,
        feasible: true,
    })
}

/// Convenience: verdict of a single impulse release (t0, C) from state 0.
pub fn single_impulse_outcome(
    model: &ModelSpec,
    pot: &CostPotential,
    env: &PeriodicEnvelope,
    t0: f64,
    amount: f64,
) -> Result<BasinOutcome> {
    let schedule = ReleaseSchedule::new(vec![Release::Impulse { time: t0, amount }])?;
    let period = model.period();
    let traj = simulate_impulsive(model, pot, &schedule, 0.0, (0.0, t0 + period), 1e-10)?;
    Ok(classify_basin(env, t0, traj.eval(t0)).outcome)
}
