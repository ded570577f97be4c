//! Build the release-cost potential, evaluate the minimal-amount curve
//! K(t) G(p_max(t)) and refine its minimizer.

use relopt::dynamics::{build_wolbachia_model, CarryingCapacity, WolbachiaParams};
use relopt::optimize::{cost_curve, single_impulse_outcome};
use relopt::periodic::find_periodic_envelope;
use relopt::release::{build_cost_potential, invert_cost};

fn main() {
    let model = build_wolbachia_model(
        WolbachiaParams::default(),
        CarryingCapacity::cosine(0.06, 0.02, 12.0).unwrap(),
    )
    .unwrap();
    let env = find_periodic_envelope(&model, 256, 1e-10).unwrap();
    let pot = build_cost_potential(&model, 1e-6, 1e-12).unwrap();

    println!("cost potential: G(0.3) = {:.9}, G(0.5) = {:.9}", pot.value(0.3), pot.value(0.5));
    println!(
        "round trip through the inverse: G^-1(G(0.3)) = {:.12}\n",
        invert_cost(&pot, pot.value(0.3)).unwrap()
    );

    let curve = cost_curve(&model, &env, &pot, 256).unwrap();
    println!("minimal release amount by time (every 16th grid point):");
    for (t, c) in curve.grid.iter().zip(curve.values.iter()).step_by(16) {
        println!("  t = {t:5.2}   C = {c:.6}");
    }
    println!();
    println!("optimal release: t* = {:.5}, C* = {:.6}", curve.t_star, curve.c_star);
    println!("near-optimal minima: {:?}", curve.near_optima);

    // the minimum splits impulse outcomes at the optimal time
    let below = single_impulse_outcome(&model, &pot, &env, curve.t_star, curve.c_star - 1e-4)
        .unwrap();
    let above = single_impulse_outcome(&model, &pot, &env, curve.t_star, curve.c_star + 1e-4)
        .unwrap();
    println!("\nimpulse of C* - 1e-4 at t*: {below:?}");
    println!("impulse of C* + 1e-4 at t*: {above:?}");
}
