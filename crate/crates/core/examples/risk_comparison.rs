//! Compare the optimal menus with and without breach risk and evaluate the
//! ordering results relating them.
//!
//! Run with: cargo run --example risk_comparison

use privacy_contracts::risk_analysis::{compare, Verdict};
use privacy_contracts::{
    CostModel, ModelSpec, PrivacyInterval, RiskModel, TypePair, UtilityModel,
};

fn main() {
    let spec = ModelSpec {
        types: TypePair { theta_low: 1.0, theta_high: 2.0, prior_high: 0.25 },
        interval: PrivacyInterval { x_min: 0.0, x_max: 1.0 },
        utility: UtilityModel::LinearInType,
        cost: CostModel::Quadratic { zeta: 3.0 },
        risk: RiskModel::LinearBreach { m: 0.5, loss_low: 0.2, loss_high: 0.6 },
    };

    let rep = compare(&spec).expect("compare");

    println!("thresholds:");
    println!("  p_bar  = {:?}", rep.thresholds.p_bar);
    println!("  p_hat* = {:.6}", rep.thresholds.p_star_norisk);
    println!("  p*     = {:.6}", rep.thresholds.p_star_risk);
    println!();
    println!(
        "no risk:   x_L = {:.6}, x_H = {:.6}, rent = {:.6}",
        rep.no_risk.menu.low.x, rep.no_risk.menu.high.x, rep.no_risk.information_rent
    );
    println!(
        "with risk: x_L = {:.6}, x_H = {:.6}, rent = {:.6}",
        rep.with_risk.menu.low.x, rep.with_risk.menu.high.x, rep.with_risk.information_rent
    );
    println!();
    println!("ordering checks:");
    for c in &rep.orderings {
        match c.verdict {
            Verdict::Skipped => println!("  {:<14} SKIPPED  {}", c.name, c.inequality),
            v => println!(
                "  {:<14} {:<16} {}  (slack {:+.3e})",
                c.name,
                v.label(),
                c.inequality,
                c.slack
            ),
        }
    }
}
