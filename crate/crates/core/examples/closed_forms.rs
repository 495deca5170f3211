//! The direct-load-control family has analytic solutions; this compares
//! them against the numeric solver field by field.
//!
//! Run with: cargo run --example closed_forms

use privacy_contracts::dlc::DlcParams;
use privacy_contracts::screening::solve_second_best;

fn main() {
    let params = DlcParams {
        theta_low: 1.0,
        theta_high: 2.0,
        zeta: 3.0,
        m: 0.5,
        loss_low: 0.2,
        loss_high: 0.6,
        prior_high: 0.25,
    };

    for risk in [false, true] {
        let cf = params.closed_form_second_best(risk).expect("closed form");
        let spec = params.to_model_spec(risk);
        let num = solve_second_best(&spec).expect("numeric solve");

        println!("risk {}:", if risk { "on" } else { "off" });
        for (name, a, b) in [
            ("x_L", cf.menu.low.x, num.menu.low.x),
            ("t_L", cf.menu.low.t, num.menu.low.t),
            ("x_H", cf.menu.high.x, num.menu.high.x),
            ("t_H", cf.menu.high.t, num.menu.high.t),
        ] {
            println!("  {name}: closed form {a:.9}  numeric {b:.9}  |diff| {:.2e}", (a - b).abs());
        }
        if cf.out_of_interval {
            println!("  (an unclamped allocation left [0, 1]; the numeric solver governs)");
        }
        println!();
    }

    let th = params.critical_probabilities();
    println!("critical priors:");
    println!("  p_bar (loss ratio)        = {:?}", th.p_bar);
    println!("  p_hat* (no-risk clamping) = {:.6}", th.p_star_norisk);
    println!("  p* (with-risk clamping)   = {:.6}", th.p_star_risk);
}
