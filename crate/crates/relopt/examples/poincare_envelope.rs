//! Sample the displacement of the time-T map, locate the interior
//! periodic solutions and report their eigenvalues.

use relopt::dynamics::{build_wolbachia_model, CarryingCapacity, WolbachiaParams};
use relopt::periodic::{
    envelope_at, find_periodic_envelope, poincare_map, sample_poincare, EnvelopeSide,
};

fn main() {
    let model = build_wolbachia_model(
        WolbachiaParams::default(),
        CarryingCapacity::cosine(0.06, 0.02, 12.0).unwrap(),
    )
    .unwrap();
    let period = model.period();

    let sample = sample_poincare(&model, 0.0, 50, 1e-9).unwrap();
    println!("displacement P(p0) - p0 on 50 grid points:");
    for (p0, phi) in sample.p0.iter().zip(sample.phi.iter()).step_by(5) {
        let bar_len = (phi.abs() * 2000.0).round() as usize;
        let bar: String = std::iter::repeat('#').take(bar_len.min(60)).collect();
        println!("  p0 = {p0:.2}  phi = {phi:+.6}  {bar}");
    }
    println!("  strictly increasing map: {}\n", sample.is_strictly_increasing());

    let env = find_periodic_envelope(&model, 256, 1e-10).unwrap();
    println!("interior periodic starting values: {:?}", env.zeros);
    println!("unique solution: {}", env.is_unique());
    println!(
        "principal eigenvalues: lambda_min = {:+.6}, lambda_max = {:+.6} ({:?})",
        env.lambda_min, env.lambda_max, env.attractivity_max
    );

    // the flow derivative at the fixed point equals exp(-lambda T)
    let h = 1e-5;
    let fd = (poincare_map(&model, 0.0, env.x_max + h, 1e-11).unwrap()
        - poincare_map(&model, 0.0, env.x_max - h, 1e-11).unwrap())
        / (2.0 * h);
    println!(
        "P'(x_max) = {fd:.8} vs exp(-lambda T) = {:.8}",
        (-env.lambda_max * period).exp()
    );

    println!("\nmaximal periodic orbit over one season:");
    for i in 0..=12 {
        let t = period * i as f64 / 12.0;
        println!("  t = {t:5.2}   p = {:.6}", envelope_at(&env, EnvelopeSide::Max, t));
    }
}
