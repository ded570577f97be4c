//! Subcommand implementations: each builds what it needs from the run
//! config, writes its artifacts, and reports success or a domain failure.

use serde::Serialize;

use crate::cli::config::RunConfig;
use crate::dynamics::{check_hypotheses, ModelSpec};
use crate::error::{Error, Result};
use crate::export::{ArtifactWriter, ChartSpec, Series};
use crate::integrate::{integrate_compartments, sup_distance, CompartmentState, ControlSignal};
use crate::optimize::{cost_curve, eta_sweep, finite_s_infimum, pulse_ocp, two_release_experiment};
use crate::periodic::{
    find_periodic_envelope, sample_poincare, Attractivity, PeriodicEnvelope,
};
use crate::release::{
    build_cost_potential, simulate_finite_rate, simulate_impulsive, CostPotential,
};

/// Whether a command's domain-level outcome succeeded (exit 0) or failed
/// (exit 1); usage and config problems surface as `Error::Config`.
pub struct CommandOutcome {
    pub domain_ok: bool,
}

const OK: CommandOutcome = CommandOutcome { domain_ok: true };

fn envelope_for(cfg: &RunConfig, model: &ModelSpec) -> Result<PeriodicEnvelope> {
    find_periodic_envelope(model, cfg.grid_n, cfg.tol)
}

fn potential_for(cfg: &RunConfig, model: &ModelSpec) -> Result<CostPotential> {
    build_cost_potential(model, cfg.delta, (cfg.tol * 1e-2).max(1e-13))
}

#[derive(Serialize)]
struct EnvelopeSummary {
    zeros: Vec<f64>,
    x_min: f64,
    x_max: f64,
    unique: bool,
    lambda_min: f64,
    lambda_max: f64,
    attractivity_min: Attractivity,
    attractivity_max: Attractivity,
    tangent_points: Vec<f64>,
}

impl EnvelopeSummary {
    fn new(env: &PeriodicEnvelope) -> Self {
        EnvelopeSummary {
            zeros: env.zeros.clone(),
            x_min: env.x_min,
            x_max: env.x_max,
            unique: env.is_unique(),
            lambda_min: env.lambda_min,
            lambda_max: env.lambda_max,
            attractivity_min: env.attractivity_min,
            attractivity_max: env.attractivity_max,
            tangent_points: env.tangent_points.clone(),
        }
    }
}

/// `check`: hypothesis verdicts to hypotheses.json; domain failure when
/// any check fails. A parameter set the builder refuses is itself a
/// failed check, reported rather than crashed on.
pub fn cmd_check(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<CommandOutcome> {
    #[derive(Serialize)]
    struct BuildFailure {
        all_passed: bool,
        build_error: String,
    }
    let model = match cfg.model() {
        Ok(model) => model,
        Err(Error::InvalidParams(msg)) => {
            w.write_json(
                "hypotheses.json",
                &BuildFailure { all_passed: false, build_error: msg.clone() },
            )?;
            eprintln!("model construction rejected: {msg}");
            return Ok(CommandOutcome { domain_ok: false });
        }
        Err(e) => return Err(e),
    };
    let report = check_hypotheses(&model, cfg.grid_n.max(64))?;
    w.write_json("hypotheses.json", &report)?;
    w.write_json("model.json", &model.document())?;
    w.mark_stage("check");
    Ok(CommandOutcome { domain_ok: report.all_passed })
}

/// `periodic`: displacement map graph and the periodic envelope.
pub fn cmd_periodic(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<CommandOutcome> {
    let model = cfg.model()?;
    let sample = sample_poincare(&model, 0.0, cfg.grid_n, cfg.tol)?;
    w.write_text("phi.csv", &sample.to_csv())?;
    w.write_chart(
        "phi.svg",
        &ChartSpec {
            title: "Displacement of the time-T map".into(),
            x_label: "p0".into(),
            y_label: "P(p0) - p0".into(),
            series: vec![Series {
                label: "phi".into(),
                points: sample.p0.iter().cloned().zip(sample.phi.iter().cloned()).collect(),
            }],
        },
    )?;
    w.mark_stage("poincare-sample");
    let env = envelope_for(cfg, &model)?;
    w.write_text("envelope.csv", &env.to_csv(cfg.orbit_samples))?;
    w.write_json("envelope.json", &EnvelopeSummary::new(&env))?;
    w.mark_stage("envelope");
    Ok(OK)
}

#[derive(Serialize)]
struct OptimumReport {
    t_star: f64,
    c_star: f64,
    near_optima: Vec<(f64, f64)>,
}

/// `optimize`: minimal-cost curve, its minimizer and near-optima.
pub fn cmd_optimize(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<CommandOutcome> {
    let model = cfg.model()?;
    let env = envelope_for(cfg, &model)?;
    let pot = potential_for(cfg, &model)?;
    let curve = cost_curve(&model, &env, &pot, cfg.grid_n.max(128))?;
    w.write_text("potential.csv", &pot.to_csv())?;
    w.write_text("cbar.csv", &curve.to_csv())?;
    w.write_chart(
        "cbar.svg",
        &ChartSpec {
            title: "Minimal release amount by time".into(),
            x_label: "release time t".into(),
            y_label: "K(t) G(p_max(t))".into(),
            series: vec![Series {
                label: "cbar".into(),
                points: curve.grid.iter().cloned().zip(curve.values.iter().cloned()).collect(),
            }],
        },
    )?;
    w.write_json(
        "optimum.json",
        &OptimumReport {
            t_star: curve.t_star,
            c_star: curve.c_star,
            near_optima: curve.near_optima.clone(),
        },
    )?;
    w.mark_stage("cost-curve");
    Ok(OK)
}

/// `convergence`: finite-rate thresholds against the impulse limit.
pub fn cmd_convergence(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<CommandOutcome> {
    let s_values = cfg.list_or("s_values", &[10.0, 100.0, 1000.0])?;
    if s_values.windows(2).any(|v| v[1] <= v[0]) {
        return Err(Error::Config("[experiment] s_values must be increasing".into()));
    }
    let model = cfg.model()?;
    let env = envelope_for(cfg, &model)?;
    let pot = potential_for(cfg, &model)?;
    let curve = cost_curve(&model, &env, &pot, cfg.grid_n.max(128))?;
    w.mark_stage("reference-optimum");
    let mut csv = String::from("S,c_s_star,t0_s_star,gap\n");
    for &s in &s_values {
        let r = finite_s_infimum(&model, &env, s, 48, 1e-7)?;
        csv.push_str(&format!(
            "{s},{},{},{}\n",
            r.c_s_star,
            r.t0_s_star,
            (r.c_s_star - curve.c_star).abs()
        ));
        w.mark_stage(&format!("threshold-sweep-S{s}"));
    }
    w.write_text("s_convergence.csv", &csv)?;
    Ok(OK)
}

/// `pulse`: minimal rectangular pulses under each rate bound, plus the
/// best plan's solution graph.
pub fn cmd_pulse(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<CommandOutcome> {
    let m_values = cfg.list_or("m_values", &[0.02, 0.04, 0.06])?;
    if m_values.iter().any(|&m| m <= 0.0) {
        return Err(Error::Config("[experiment] m_values must be positive".into()));
    }
    let model = cfg.model()?;
    let env = envelope_for(cfg, &model)?;
    let horizon_periods = cfg.raw.get_f64("experiment", "horizon_periods")?.unwrap_or(2.0);
    let horizon = horizon_periods * model.period();
    #[derive(Serialize)]
    struct PulseReport {
        method: &'static str,
        horizon: f64,
        plans: Vec<serde_json::Value>,
    }
    let mut csv = String::from("M,start,duration,cost\n");
    let mut best: Option<(f64, f64, f64)> = None; // (cost, start, duration) of the cheapest plan
    let mut any_feasible = false;
    let mut plans = Vec::new();
    for &m in &m_values {
        match pulse_ocp(&model, &env, m, Some(horizon), 48, cfg.tol) {
            Ok(plan) => {
                any_feasible = true;
                csv.push_str(&format!("{m},{},{},{}\n", plan.start, plan.duration, plan.cost));
                if best.map(|(c, _, _)| plan.cost < c).unwrap_or(true) {
                    best = Some((plan.cost, plan.start, plan.duration));
                }
                plans.push(serde_json::to_value(&plan).unwrap_or_default());
            }
            Err(Error::Infeasible { .. }) => {
                csv.push_str(&format!("{m},,,inf\n"));
                plans.push(serde_json::json!({ "rate_bound": m, "feasible": false }));
            }
            Err(e) => return Err(e),
        }
        w.mark_stage(&format!("pulse-search-M{m}"));
    }
    w.write_text("pulse_plans.csv", &csv)?;
    w.write_json(
        "pulse_plans.json",
        &PulseReport {
            method: "search restricted to single rectangular pulses at the rate bound; \
                     start gridded then refined, minimal duration by bisection",
            horizon,
            plans,
        },
    )?;
    if let Some((cost, start, duration)) = best {
        let rate = cost / duration;
        let control = ControlSignal::pulse(start, duration, cost)
            .expect("plan duration is positive");
        let traj = crate::integrate::integrate_scalar(&model, &control, 0.0, (0.0, horizon), cfg.tol)?;
        let points: Vec<(f64, f64)> = (0..=800)
            .map(|i| {
                let t = horizon * i as f64 / 800.0;
                (t, traj.eval(t))
            })
            .collect();
        w.write_chart(
            "solution.svg",
            &ChartSpec {
                title: format!("Replacement under the cheapest pulse (rate {rate:.4})"),
                x_label: "t".into(),
                y_label: "proportion p".into(),
                series: vec![Series { label: "p".into(), points }],
            },
        )?;
        w.mark_stage("solution-graph");
    }
    Ok(CommandOutcome { domain_ok: any_feasible })
}

/// `two-release`: split the minimal budget across two times. A plain
/// competition model is replaced by its equal-death separated variant
/// (the experiment needs separated variables).
pub fn cmd_two_release(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<CommandOutcome> {
    let configured = cfg.model()?;
    let model = if configured.known_threshold().is_some() {
        configured
    } else {
        let mut params = cfg.params()?;
        params.d1 = params.d2;
        crate::dynamics::wolbachia_separated(params, cfg.capacity()?)?
    };
    let pot = potential_for(cfg, &model)?;
    let t0 = cfg.raw.get_f64("experiment", "two_release_t0")?.unwrap_or(6.0);
    let t1 = cfg.raw.get_f64("experiment", "two_release_t1")?.unwrap_or(8.0);
    let split = cfg.raw.get_f64("experiment", "two_release_split")?.unwrap_or(0.5);
    let report = two_release_experiment(&model, &pot, t0, t1, split)?;
    w.write_json("two_release.json", &report)?;
    w.mark_stage("two-release");
    Ok(OK)
}

/// `eta-sweep`: dependence of the periodic solution and the cost
/// minimizer on the death-rate gap.
pub fn cmd_eta_sweep(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<CommandOutcome> {
    let etas = cfg.list_or("etas", &[0.04, 0.02, 0.01, 0.005])?;
    let mut base = cfg.params()?;
    base.d1 = base.d2; // sweep is relative to the equal-death limit
    let capacity = cfg.capacity()?;
    let report = eta_sweep(&base, &capacity, &etas)?;
    w.write_text("eta_sweep.csv", &report.to_csv())?;
    w.write_json("eta_sweep.json", &report)?;
    w.mark_stage("eta-sweep");
    Ok(OK)
}

/// `reduction`: compartment model against the scalar limit as the
/// fecundity scale decreases.
pub fn cmd_reduction(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<CommandOutcome> {
    let sigmas = cfg.list_or("sigmas", &[0.2, 0.1, 0.05, 0.025])?;
    if sigmas.windows(2).any(|v| v[1] >= v[0]) || sigmas.iter().any(|&s| !(0.0 < s && s < 1.0)) {
        return Err(Error::Config(
            "[experiment] sigmas must be decreasing and lie in (0, 1)".into(),
        ));
    }
    let params = cfg.params()?;
    let capacity = cfg.capacity()?;
    let model = cfg.model()?;
    let pulse = cfg.list_or("sigma_pulse", &[5.5, 0.5, 0.03])?;
    if pulse.len() != 3 {
        return Err(Error::Config(
            "[experiment] sigma_pulse needs [start, duration, amount]".into(),
        ));
    }
    let control = ControlSignal::pulse(pulse[0], pulse[1], pulse[2])
        .map_err(|e| Error::Config(e.to_string()))?;
    let span = (0.0, 2.0 * model.period());
    let scalar = crate::integrate::integrate_scalar(&model, &control, 0.0, span, cfg.tol)?;
    let mut csv = String::from("sigma,sup_gap\n");
    for &sigma in &sigmas {
        let init = CompartmentState::new(capacity.value(0.0) * (1.0 - sigma), 0.0)?;
        let (_, prop) =
            integrate_compartments(&params, &capacity, sigma, &control, init, span, cfg.tol)?;
        let gap = sup_distance(&prop, &scalar, span)?;
        csv.push_str(&format!("{sigma},{gap}\n"));
        w.mark_stage(&format!("reduction-sigma{sigma}"));
    }
    w.write_text("reduction.csv", &csv)?;
    Ok(OK)
}

/// `simulate`: run an inline schedule and emit the trajectory.
pub fn cmd_simulate(cfg: &RunConfig, w: &mut ArtifactWriter) -> Result<CommandOutcome> {
    let model = cfg.model()?;
    let schedule = cfg.schedule()?;
    let span_list = cfg.list_or("span", &[0.0, 2.0 * model.period()])?;
    if span_list.len() != 2 {
        return Err(Error::Config("[experiment] span needs [start, end]".into()));
    }
    let span = (span_list[0], span_list[1]);
    let p0 = cfg.raw.get_f64("experiment", "p0")?.unwrap_or(0.0);
    let has_impulse = schedule.releases().iter().any(|r| matches!(r, crate::release::Release::Impulse { .. }));
    let has_pulse = schedule.releases().iter().any(|r| matches!(r, crate::release::Release::Pulse { .. }));
    let traj = if has_impulse && has_pulse {
        return Err(Error::Config(
            "[experiment] mix of impulse and pulse releases is not supported; use one kind".into(),
        ));
    } else if has_impulse {
        let pot = potential_for(cfg, &model)?;
        simulate_impulsive(&model, &pot, &schedule, p0, span, cfg.tol)?
    } else {
        simulate_finite_rate(&model, &schedule, 1e-3, p0, span, cfg.tol)?
    };
    w.write_text("trajectory.csv", &traj.to_csv())?;
    w.mark_stage("simulate");
    Ok(OK)
}
