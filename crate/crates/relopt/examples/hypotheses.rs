//! Build the reference competition model and verify every structural
//! assumption on a sampled grid.

use relopt::dynamics::{
    build_wolbachia_model, check_hypotheses, mean_nonlinearity, mean_threshold,
    CarryingCapacity, WolbachiaParams,
};

fn main() {
    let params = WolbachiaParams::default();
    let capacity = CarryingCapacity::cosine(0.06, 0.02, 12.0).unwrap();
    let model = build_wolbachia_model(params, capacity).unwrap();

    let report = check_hypotheses(&model, 64).unwrap();
    println!("structural checks on the reference model\n");
    for check in &report.checks {
        println!(
            "  [{}] {:<45} value = {:+.6e}",
            if check.passed { "pass" } else { "FAIL" },
            check.name,
            check.value
        );
    }
    println!();
    println!(
        "mean growth rate at p = 0: {:+.10}  (closed form {:+.10})",
        report.mean_dfdp_at_zero,
        params.mean_dfdp_at_zero()
    );
    println!(
        "mean growth rate at p = 1: {:+.10}  (closed form {:+.10})",
        report.mean_dfdp_at_one,
        params.mean_dfdp_at_one()
    );

    let theta = mean_threshold(&model).unwrap();
    println!();
    println!("interior zero of the mean drift: {theta:.9} (closed form {:.9})", params.theta_bar());
    println!(
        "mean drift signs: f_m(0.2) = {:+.3e}, f_m(0.5) = {:+.3e}",
        mean_nonlinearity(&model, 0.2).unwrap(),
        mean_nonlinearity(&model, 0.5).unwrap()
    );
    println!();
    println!("all checks passed: {}", report.all_passed);
    std::process::exit(if report.all_passed { 0 } else { 1 });
}
