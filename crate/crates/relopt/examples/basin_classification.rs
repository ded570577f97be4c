//! Classify initial states against the periodic envelope and confirm a
//! few verdicts by long simulation.

use relopt::dynamics::{build_wolbachia_model, CarryingCapacity, WolbachiaParams};
use relopt::integrate::{integrate_scalar, ControlSignal};
use relopt::periodic::{classify_basin, envelope_at, find_periodic_envelope, EnvelopeSide};

fn main() {
    let model = build_wolbachia_model(
        WolbachiaParams::default(),
        CarryingCapacity::cosine(0.06, 0.02, 12.0).unwrap(),
    )
    .unwrap();
    let env = find_periodic_envelope(&model, 256, 1e-10).unwrap();

    let t_bar = 4.0;
    let separatrix = envelope_at(&env, EnvelopeSide::Max, t_bar);
    println!("separatrix at t = {t_bar}: p = {separatrix:.6}\n");

    println!("{:>10}  {:>20}  {:>12}", "p0", "verdict", "p after 20T");
    for offset in [-0.05, -0.01, -0.001, 0.001, 0.01, 0.05] {
        let p0 = separatrix + offset;
        let verdict = classify_basin(&env, t_bar, p0);
        let traj = integrate_scalar(
            &model,
            &ControlSignal::zero(),
            p0,
            (t_bar, t_bar + 20.0 * model.period()),
            1e-10,
        )
        .unwrap();
        println!("{p0:>10.6}  {:>20}  {:>12.6}", format!("{:?}", verdict.outcome), traj.final_value());
    }
    println!("\nstates above the maximal periodic orbit replace, states below die out.");
}
