//! First-best and second-best contract design.
//!
//! The second-best solver uses the constraint reduction: at the optimum the
//! low type's participation constraint and the high type's incentive
//! constraint bind, which turns the four-constraint program into two
//! independent one-dimensional maximizations and two price identities. The
//! solver re-verifies all four original constraints on its output instead of
//! assuming the reduction.

use crate::error::{Error, Result};
use crate::model::{ModelSpec, Theta};
use crate::scalar_opt::{self, Boundary, OptResult};

/// Default feasibility tolerance for constraint residuals (currency units).
pub const DEFAULT_FEAS_TOL: f64 = 1e-8;

/// Solver knobs; the defaults match the crate-wide tolerances.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Tolerance in `x` for the inner maximizations.
    pub tol: f64,
    /// Tolerance for constraint residual checks.
    pub feas_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: scalar_opt::DEFAULT_TOL,
            feas_tol: DEFAULT_FEAS_TOL,
        }
    }
}

/// A single offer: privacy setting and price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contract {
    pub x: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    FirstBest,
    SecondBest,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::FirstBest => "first_best",
            Regime::SecondBest => "second_best",
        }
    }
}

/// The pair of offers, one per type.
#[derive(Debug, Clone, Copy)]
pub struct ContractMenu {
    pub low: Contract,
    pub high: Contract,
    pub regime: Regime,
    pub risk_active: bool,
}

/// Signed slack of each original constraint (`LHS − RHS`; nonnegative iff
/// satisfied). Computed with the effective utility, so the with-risk versions
/// of the constraints are the same formulas.
#[derive(Debug, Clone, Copy)]
pub struct ConstraintResiduals {
    /// High type prefers its own contract (IC for the high type).
    pub ic_high: f64,
    /// Low type prefers its own contract.
    pub ic_low: f64,
    /// Low type prefers participating over opting out.
    pub ir_low: f64,
    /// High type prefers participating over opting out.
    pub ir_high: f64,
}

impl ConstraintResiduals {
    pub fn min(&self) -> f64 {
        self.ic_high.min(self.ic_low).min(self.ir_low).min(self.ir_high)
    }

    pub fn feasible(&self, feas_tol: f64) -> bool {
        self.min() >= -feas_tol
    }
}

/// A solved menu plus diagnostics.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub menu: ContractMenu,
    pub residuals: ConstraintResiduals,
    /// `U(x_L, θ_H) − U(x_L, θ_L)`; zero in the first-best regime.
    pub information_rent: f64,
    pub profit: f64,
    pub welfare: f64,
    pub boundary_low: Boundary,
    pub boundary_high: Boundary,
}

fn validated(spec: &ModelSpec) -> Result<()> {
    let report = spec.validate();
    if !report.is_valid() {
        return Err(Error::InvalidSpec(report.summary()));
    }
    Ok(())
}

/// Maximizes `U(x, θ) − g(x)`: the first-best program for one type, and
/// problem (P-2b) for the high type.
fn surplus_max(spec: &ModelSpec, sel: Theta, tol: f64) -> Result<OptResult> {
    let f = |x: f64| spec.effective_utility(x, sel).unwrap_or(f64::NAN) - spec.cost(x);
    if spec.differentiable() {
        let s = |x: f64| {
            let u = spec.effective_utility_slope(x, sel).unwrap_or(f64::NAN);
            let g = spec.cost_slope(x).unwrap_or(f64::NAN);
            u - g
        };
        scalar_opt::maximize_with_slope(&f, &s, &spec.interval, tol)
    } else {
        scalar_opt::maximize_golden(&f, &spec.interval, tol)
    }
}

/// Maximizes the low type's reduced objective (P-2a):
/// `U(x, θ_L) − (1 − p)·g(x) − p·U(x, θ_H)`.
fn low_reduced_max(spec: &ModelSpec, tol: f64) -> Result<OptResult> {
    let p = spec.prior_high();
    let f = |x: f64| {
        spec.effective_utility(x, Theta::Low).unwrap_or(f64::NAN)
            - (1.0 - p) * spec.cost(x)
            - p * spec.effective_utility(x, Theta::High).unwrap_or(f64::NAN)
    };
    if spec.differentiable() {
        let s = |x: f64| {
            spec.effective_utility_slope(x, Theta::Low).unwrap_or(f64::NAN)
                - (1.0 - p) * spec.cost_slope(x).unwrap_or(f64::NAN)
                - p * spec.effective_utility_slope(x, Theta::High).unwrap_or(f64::NAN)
        };
        scalar_opt::maximize_with_slope(&f, &s, &spec.interval, tol)
    } else {
        scalar_opt::maximize_golden(&f, &spec.interval, tol)
    }
}

fn build_report(
    spec: &ModelSpec,
    menu: ContractMenu,
    boundary_low: Boundary,
    boundary_high: Boundary,
) -> Result<SolveReport> {
    let residuals = verify_menu(spec, &menu)?;
    let rent = match menu.regime {
        Regime::FirstBest => 0.0,
        Regime::SecondBest => spec.effective_utility(menu.high.x, Theta::High)? - menu.high.t,
    };
    let pi = profit(spec, &menu);
    let p = spec.prior_high();
    let w = pi
        + p * (spec.effective_utility(menu.high.x, Theta::High)? - menu.high.t)
        + (1.0 - p) * (spec.effective_utility(menu.low.x, Theta::Low)? - menu.low.t);
    Ok(SolveReport {
        menu,
        residuals,
        information_rent: rent,
        profit: pi,
        welfare: w,
        boundary_low,
        boundary_high,
    })
}

/// Full-information benchmark: each type's allocation maximizes total surplus
/// and its price extracts the whole consumer value. IC constraints are
/// ignored by the program; the report still carries their residuals so the
/// caller can see why first-best is not implementable.
pub fn solve_first_best(spec: &ModelSpec) -> Result<SolveReport> {
    solve_first_best_with(spec, &SolveOptions::default())
}

pub fn solve_first_best_with(spec: &ModelSpec, opts: &SolveOptions) -> Result<SolveReport> {
    validated(spec)?;
    let low = surplus_max(spec, Theta::Low, opts.tol)?;
    let high = surplus_max(spec, Theta::High, opts.tol)?;
    let t_low = spec.effective_utility(low.argmax, Theta::Low)?;
    let t_high = spec.effective_utility(high.argmax, Theta::High)?;
    let menu = ContractMenu {
        low: Contract { x: low.argmax, t: t_low },
        high: Contract { x: high.argmax, t: t_high },
        regime: Regime::FirstBest,
        risk_active: spec.risk.is_active(),
    };
    build_report(spec, menu, low.at_boundary, high.at_boundary)
}

/// Hidden-type optimum via the constraint reduction, with the four original
/// constraints re-checked on the result.
pub fn solve_second_best(spec: &ModelSpec) -> Result<SolveReport> {
    solve_second_best_with(spec, &SolveOptions::default())
}

pub fn solve_second_best_with(spec: &ModelSpec, opts: &SolveOptions) -> Result<SolveReport> {
    validated(spec)?;
    let p = spec.prior_high();
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::BadPrior(p));
    }

    let high = surplus_max(spec, Theta::High, opts.tol)?;
    let low = low_reduced_max(spec, opts.tol)?;

    // Prices: the componentwise-largest pair satisfying all four
    // constraints at these allocations. The feasible set is an intersection
    // of upper bounds (t_L ≤ c, t_H ≤ d, t_H ≤ t_L + a, t_L ≤ t_H + b) and
    // profit is increasing in both prices, so the optimum is the fixed
    // point of the two min-chains below. When the effective-utility wedge
    // U(x_L, θ_H) − U(x_L, θ_L) is nonnegative this reduces to the binding
    // {IR-low, IC-high} pair; risk losses can push the wedge negative at
    // low privacy settings, in which case IR-high binds instead.
    let c = spec.effective_utility(low.argmax, Theta::Low)?;
    let d = spec.effective_utility(high.argmax, Theta::High)?;
    let a = d - spec.effective_utility(low.argmax, Theta::High)?;
    let b = c - spec.effective_utility(high.argmax, Theta::Low)?;
    let t_low = c.min(d + b);
    let t_high = d.min(t_low + a);

    let menu = ContractMenu {
        low: Contract { x: low.argmax, t: t_low },
        high: Contract { x: high.argmax, t: t_high },
        regime: Regime::SecondBest,
        risk_active: spec.risk.is_active(),
    };
    let report = build_report(spec, menu, low.at_boundary, high.at_boundary)?;
    if !report.residuals.feasible(opts.feas_tol) {
        return Err(Error::Internal(format!(
            "second-best menu violates an original constraint: residuals {:?}",
            report.residuals
        )));
    }
    Ok(report)
}

/// Residuals of the four original constraints for an arbitrary menu,
/// computed with the effective utility.
pub fn verify_menu(spec: &ModelSpec, menu: &ContractMenu) -> Result<ConstraintResiduals> {
    let u_ll = spec.effective_utility(menu.low.x, Theta::Low)?;
    let u_lh = spec.effective_utility(menu.low.x, Theta::High)?;
    let u_hl = spec.effective_utility(menu.high.x, Theta::Low)?;
    let u_hh = spec.effective_utility(menu.high.x, Theta::High)?;
    Ok(ConstraintResiduals {
        ic_high: (u_hh - menu.high.t) - (u_lh - menu.low.t),
        ic_low: (u_ll - menu.low.t) - (u_hl - menu.high.t),
        ir_low: u_ll - menu.low.t,
        ir_high: u_hh - menu.high.t,
    })
}

/// The high type's equilibrium surplus `U(x_H, θ_H) − t_H`. When the
/// incentive constraint binds this equals the mimicking gain
/// `U(x_L, θ_H) − U(x_L, θ_L)`; it is zero when participation binds instead.
/// Only defined for second-best reports.
pub fn information_rent(spec: &ModelSpec, report: &SolveReport) -> Result<f64> {
    if report.menu.regime != Regime::SecondBest {
        return Err(Error::NotSecondBest);
    }
    Ok(spec.effective_utility(report.menu.high.x, Theta::High)? - report.menu.high.t)
}

/// Expected profit `(1−p)(t_L − g(x_L)) + p(t_H − g(x_H))`.
pub fn profit(spec: &ModelSpec, menu: &ContractMenu) -> f64 {
    let p = spec.prior_high();
    (1.0 - p) * (menu.low.t - spec.cost(menu.low.x)) + p * (menu.high.t - spec.cost(menu.high.x))
}

/// Social welfare: profit plus expected consumer surplus, recomputed from
/// the menu.
pub fn welfare(spec: &ModelSpec, report: &SolveReport) -> Result<f64> {
    let menu = &report.menu;
    let p = spec.prior_high();
    Ok(profit(spec, menu)
        + p * (spec.effective_utility(menu.high.x, Theta::High)? - menu.high.t)
        + (1.0 - p) * (spec.effective_utility(menu.low.x, Theta::Low)? - menu.low.t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CostModel, PrivacyInterval, RiskModel, TypePair, UtilityModel};

    fn spec(p: f64, risk: RiskModel) -> ModelSpec {
        ModelSpec {
            types: TypePair { theta_low: 1.0, theta_high: 2.0, prior_high: p },
            interval: PrivacyInterval::new(0.0, 1.0).unwrap(),
            utility: UtilityModel::LinearInType,
            cost: CostModel::Quadratic { zeta: 3.0 },
            risk,
        }
    }

    fn dlc_risk() -> RiskModel {
        RiskModel::LinearBreach { m: 0.5, loss_low: 0.2, loss_high: 0.6 }
    }

    const TOL: f64 = 1e-9;

    #[test]
    fn first_best_no_risk_closed_form() {
        let r = solve_first_best(&spec(0.25, RiskModel::None)).unwrap();
        assert!((r.menu.low.x - 1.0 / 3.0).abs() < TOL);
        assert!((r.menu.high.x - 2.0 / 3.0).abs() < TOL);
        assert!((r.menu.low.t - 1.0 / 3.0).abs() < TOL);
        assert!((r.menu.high.t - 4.0 / 3.0).abs() < TOL);
    }

    #[test]
    fn first_best_with_risk_uses_plus_sign_vertex() {
        let r = solve_first_best(&spec(0.25, dlc_risk())).unwrap();
        assert!((r.menu.low.x - 1.1 / 3.0).abs() < TOL);
        assert!((r.menu.high.x - 2.3 / 3.0).abs() < TOL);
    }

    #[test]
    fn degenerate_risk_matches_no_risk() {
        let base = solve_first_best(&spec(0.25, RiskModel::None)).unwrap();
        let zero = solve_first_best(&spec(
            0.25,
            RiskModel::LinearBreach { m: 0.0, loss_low: 0.2, loss_high: 0.6 },
        ))
        .unwrap();
        assert_eq!(base.menu.low.x, zero.menu.low.x);
        assert_eq!(base.menu.high.t, zero.menu.high.t);
        assert_eq!(base.profit, zero.profit);
        assert_eq!(base.welfare, zero.welfare);
    }

    #[test]
    fn second_best_no_risk_closed_form() {
        let r = solve_second_best(&spec(0.25, RiskModel::None)).unwrap();
        assert!((r.menu.low.x - 2.0 / 9.0).abs() < TOL);
        assert!((r.menu.high.x - 2.0 / 3.0).abs() < TOL);
        assert!((r.menu.low.t - 2.0 / 9.0).abs() < TOL);
        assert!((r.menu.high.t - 10.0 / 9.0).abs() < TOL);
        assert!((r.information_rent - 2.0 / 9.0).abs() < TOL);
        assert!((r.profit - 2.0 / 9.0).abs() < TOL);
        assert!((r.welfare - 5.0 / 18.0).abs() < TOL);
    }

    #[test]
    fn second_best_clamps_beyond_critical_prior() {
        let r = solve_second_best(&spec(0.75, RiskModel::None)).unwrap();
        assert_eq!(r.menu.low.x, 0.0);
        assert_eq!(r.menu.low.t, 0.0);
        assert_eq!(r.boundary_low, Boundary::LowerBound);
        assert!(r.information_rent.abs() < TOL);
        // High type gets first-best allocation and pays its full value.
        assert!((r.menu.high.x - 2.0 / 3.0).abs() < TOL);
        assert!((r.menu.high.t - 4.0 / 3.0).abs() < TOL);
    }

    #[test]
    fn vanishing_prior_approaches_first_best() {
        let sb = solve_second_best(&spec(1e-6, RiskModel::None)).unwrap();
        let fb = solve_first_best(&spec(1e-6, RiskModel::None)).unwrap();
        assert!((sb.menu.low.x - fb.menu.low.x).abs() < 1e-5);
    }

    #[test]
    fn degenerate_prior_rejected() {
        assert!(matches!(
            solve_second_best(&spec(0.0, RiskModel::None)),
            Err(Error::BadPrior(_))
        ));
        assert!(matches!(
            solve_second_best(&spec(1.0, RiskModel::None)),
            Err(Error::BadPrior(_))
        ));
    }

    #[test]
    fn invalid_spec_rejected() {
        let mut s = spec(0.25, RiskModel::None);
        s.types.theta_low = 5.0;
        assert!(matches!(solve_first_best(&s), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn binding_pattern_at_second_best() {
        let r = solve_second_best(&spec(0.25, RiskModel::None)).unwrap();
        assert!(r.residuals.ir_low.abs() <= 1e-9);
        assert!(r.residuals.ic_high.abs() <= 1e-9);
        assert!(r.residuals.ic_low >= -1e-9);
        assert!(r.residuals.ir_high >= -1e-9);
    }

    #[test]
    fn no_risk_menu_fails_ir_under_risk() {
        let base = solve_second_best(&spec(0.25, RiskModel::None)).unwrap();
        let risky = spec(0.25, dlc_risk());
        let res = verify_menu(&risky, &base.menu).unwrap();
        let expected = -0.5 * (1.0 - base.menu.low.x) * 0.2;
        assert!((res.ir_low - expected).abs() < 1e-9);
        assert!(res.ir_low < 0.0);
    }

    #[test]
    fn slack_menu_reports_positive_residual() {
        let s = spec(0.25, RiskModel::None);
        let mut menu = solve_second_best(&s).unwrap().menu;
        menu.low.t -= 1.0;
        let res = verify_menu(&s, &menu).unwrap();
        assert!((res.ir_low - 1.0).abs() < 1e-9);
    }

    #[test]
    fn risk_case_rent() {
        let r = solve_second_best(&spec(0.25, dlc_risk())).unwrap();
        assert!((r.menu.low.x - 0.7 / 3.0).abs() < TOL);
        assert!((r.information_rent - 0.08).abs() < 1e-9);
    }

    #[test]
    fn rent_errors_on_first_best() {
        let s = spec(0.25, RiskModel::None);
        let fb = solve_first_best(&s).unwrap();
        assert!(matches!(
            information_rent(&s, &fb),
            Err(Error::NotSecondBest)
        ));
    }

    #[test]
    fn zero_price_menu_profit() {
        let s = spec(0.4, RiskModel::None);
        let menu = ContractMenu {
            low: Contract { x: 0.2, t: 0.0 },
            high: Contract { x: 0.5, t: 0.0 },
            regime: Regime::SecondBest,
            risk_active: false,
        };
        let expected = -(0.6 * s.cost(0.2) + 0.4 * s.cost(0.5));
        assert!((profit(&s, &menu) - expected).abs() < 1e-15);
    }

    #[test]
    fn first_best_profit_linear_in_p() {
        // (1-p) θ_L²/(2ζ) + p θ_H²/(2ζ)
        for &p in &[0.2, 0.5, 0.8] {
            let r = solve_first_best(&spec(p, RiskModel::None)).unwrap();
            let expected = (1.0 - p) * 1.0 / 6.0 + p * 4.0 / 6.0;
            assert!((r.profit - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn welfare_identity_second_best() {
        let r = solve_second_best(&spec(0.3, dlc_risk())).unwrap();
        assert!((r.welfare - (r.profit + 0.3 * r.information_rent)).abs() < 1e-9);
    }

    #[test]
    fn first_best_welfare_ignores_transfers() {
        let s = spec(0.3, RiskModel::None);
        let r = solve_first_best(&s).unwrap();
        let direct = 0.7
            * (s.effective_utility(r.menu.low.x, Theta::Low).unwrap() - s.cost(r.menu.low.x))
            + 0.3 * (s.effective_utility(r.menu.high.x, Theta::High).unwrap()
                - s.cost(r.menu.high.x));
        assert!((r.welfare - direct).abs() < 1e-12);
    }
}
