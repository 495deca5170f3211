//! Plug in custom utility, cost, and risk functions as closures. Slopes
//! are optional: with them the solver uses derivative-sign bisection,
//! without them it falls back to golden-section search.
//!
//! Run with: cargo run --example custom_model

use std::sync::Arc;

use privacy_contracts::screening::{solve_first_best, solve_second_best};
use privacy_contracts::{
    CostModel, ModelSpec, PrivacyInterval, RiskModel, TypePair, UtilityModel,
};

fn main() {
    // Square-root base utility, cubic-flavored cost (no slope supplied on
    // purpose), and a quadratically vanishing breach probability.
    let spec = ModelSpec {
        types: TypePair { theta_low: 1.0, theta_high: 2.0, prior_high: 0.3 },
        interval: PrivacyInterval { x_min: 0.05, x_max: 1.0 },
        utility: UtilityModel::Custom {
            value: Arc::new(|x: f64, theta: f64| theta * x.sqrt()),
            slope: Some(Arc::new(|x: f64, theta: f64| theta / (2.0 * x.sqrt()))),
        },
        cost: CostModel::Custom {
            value: Arc::new(|x: f64| 0.8 * x * x + 0.4 * x * x * x),
            slope: None,
        },
        risk: RiskModel::Custom {
            // eta is the protection probability; the breach probability
            // 0.3 (1 - x)^2 falls off quadratically.
            eta: Arc::new(|x: f64| 1.0 - 0.3 * (1.0 - x) * (1.0 - x)),
            eta_slope: Some(Arc::new(|x: f64| 0.6 * (1.0 - x))),
            loss_low: 0.1,
            loss_high: 0.3,
        },
    };

    // Grid validation checks monotonicity, concavity, and type sorting of
    // the supplied functions before any solve.
    let report = spec.validate();
    if !report.is_valid() {
        eprintln!("spec rejected: {}", report.summary());
        return;
    }

    let fb = solve_first_best(&spec).expect("first-best");
    let sb = solve_second_best(&spec).expect("second-best");
    println!("first-best:  x = ({:.6}, {:.6})", fb.menu.low.x, fb.menu.high.x);
    println!(
        "second-best: x = ({:.6}, {:.6}), t = ({:.6}, {:.6})",
        sb.menu.low.x, sb.menu.high.x, sb.menu.low.t, sb.menu.high.t
    );
    println!("rent = {:.6}, profit = {:.6}", sb.information_rent, sb.profit);
    println!("low boundary: {}, high boundary: {}", sb.boundary_low.label(), sb.boundary_high.label());
}
