//! Solve the first-best and second-best contract menus for one instance.
//!
//! Run with: cargo run --example solve_menus

use privacy_contracts::screening::{solve_first_best, solve_second_best};
use privacy_contracts::{
    CostModel, ModelSpec, PrivacyInterval, RiskModel, SolveReport, Theta, TypePair, UtilityModel,
};

fn print_report(title: &str, r: &SolveReport) {
    println!("{title}");
    println!("  low  contract: x = {:.6} ({}), t = {:.6}", r.menu.low.x, r.boundary_low.label(), r.menu.low.t);
    println!("  high contract: x = {:.6} ({}), t = {:.6}", r.menu.high.x, r.boundary_high.label(), r.menu.high.t);
    println!("  information rent = {:.6}", r.information_rent);
    println!("  profit = {:.6}, welfare = {:.6}", r.profit, r.welfare);
    println!(
        "  residuals: ic_high = {:+.2e}, ic_low = {:+.2e}, ir_low = {:+.2e}, ir_high = {:+.2e}",
        r.residuals.ic_high, r.residuals.ic_low, r.residuals.ir_low, r.residuals.ir_high
    );
}

fn main() {
    // Two consumer types valuing privacy at 1 and 2, quadratic operator
    // cost, and a privacy breach whose probability falls linearly as the
    // privacy setting x rises.
    let spec = ModelSpec {
        types: TypePair { theta_low: 1.0, theta_high: 2.0, prior_high: 0.25 },
        interval: PrivacyInterval { x_min: 0.0, x_max: 1.0 },
        utility: UtilityModel::LinearInType,
        cost: CostModel::Quadratic { zeta: 3.0 },
        risk: RiskModel::LinearBreach { m: 0.5, loss_low: 0.2, loss_high: 0.6 },
    };

    let report = spec.validate();
    println!("model valid: {}", report.is_valid());

    let fb = solve_first_best(&spec).expect("first-best solve");
    print_report("first-best (types observable):", &fb);
    println!();

    let sb = solve_second_best(&spec).expect("second-best solve");
    print_report("second-best (types private):", &sb);
    println!();

    // The screening distortion: the low type's allocation shrinks, the high
    // type's is untouched, and the high type keeps a rent.
    println!(
        "distortion at the bottom: {:.6} -> {:.6}",
        fb.menu.low.x, sb.menu.low.x
    );
    println!(
        "no distortion at the top: {:.2e}",
        (fb.menu.high.x - sb.menu.high.x).abs()
    );
    let wedge = spec.effective_utility(sb.menu.low.x, Theta::High).unwrap()
        - spec.effective_utility(sb.menu.low.x, Theta::Low).unwrap();
    println!("rent equals the utility wedge at x_L: {:.2e}", (sb.information_rent - wedge).abs());
}
