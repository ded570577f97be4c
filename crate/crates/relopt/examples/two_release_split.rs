//! Splitting the minimal single-release budget across two times fails:
//! the state decays between the releases, so the second jump starts from
//! a lower value and never reaches the threshold.

use relopt::dynamics::{wolbachia_separated, CarryingCapacity, WolbachiaParams};
use relopt::optimize::two_release_experiment;
use relopt::release::build_cost_potential;

fn main() {
    let params = WolbachiaParams { d1: 0.3, d2: 0.3, ..WolbachiaParams::default() };
    let model =
        wolbachia_separated(params, CarryingCapacity::cosine(0.06, 0.02, 12.0).unwrap()).unwrap();
    let pot = build_cost_potential(&model, 1e-6, 1e-12).unwrap();
    let theta = model.known_threshold().unwrap();
    println!("equal-death separated model, threshold = {theta:.6}");
    println!("minimal single-release budget: G(theta) min K = {:.8}\n", pot.value(theta) * 0.04);

    for (t0, t1, split) in [(6.0, 8.0, 0.5), (6.0, 6.5, 0.5), (5.0, 9.0, 0.7)] {
        let r = two_release_experiment(&model, &pot, t0, t1, split).unwrap();
        println!("split {:.0}/{:.0} at t0 = {t0}, t1 = {t1}:", split * 100.0, (1.0 - split) * 100.0);
        println!("  after first jump   p = {:.6}", r.p_after_first);
        println!("  before second jump p = {:.6}  (decayed: {})", r.p_before_second, r.decay_witness);
        println!("  after second jump  p = {:.6}  < theta = {theta:.6}", r.p_after_second);
        println!("  verdict: {:?}\n", r.verdict.outcome);
    }
    println!("one release of the full budget at the capacity minimum succeeds;");
    println!("any two-way split of the same total is lost to the decay in between.");
}
