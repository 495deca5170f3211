//! Comparative statics between the no-risk and with-risk optima: critical
//! priors, the ordering results for allocations, prices, and information
//! rent, and parameter sweeps over the prior.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ModelSpec, Theta};
use crate::scalar_opt::Boundary;
use crate::screening::{self, Regime, SolveOptions, SolveReport};

/// Comparison tolerance used when classifying ordering checks; twice the
/// optimizer tolerance in `x`.
pub const ORDER_TOL: f64 = 2e-10;

/// Tolerance in `p` for the bisection threshold search.
pub const THRESHOLD_TOL: f64 = 1e-8;

const THRESHOLD_MAX_ITERS: usize = 60;

/// The critical priors governing regime changes.
#[derive(Debug, Clone, Copy)]
pub struct Thresholds {
    /// Loss ratio `ℓ(θ_L)/ℓ(θ_H)`; absent when `ℓ(θ_H) = 0`.
    pub p_bar: Option<f64>,
    /// Smallest prior at which the no-risk low allocation hits `x_min`.
    pub p_star_norisk: f64,
    /// Same threshold with risk; equals `p_star_norisk` when risk is inactive.
    pub p_star_risk: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Both sides clamp to the interval boundary, so the strict inequality in
    /// the underlying strict ordering degenerates to a tie.
    TieAtBoundary,
    /// The check's side condition does not apply at these parameters.
    Skipped,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::TieAtBoundary => "TIE-AT-BOUNDARY",
            Verdict::Skipped => "SKIPPED",
        }
    }
}

/// One ordering check: the literal inequality tested and both sides' values.
#[derive(Debug, Clone)]
pub struct OrderingCheck {
    pub name: &'static str,
    /// Human-readable form of the inequality tested.
    pub inequality: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs` for `≥`-type checks; `rhs − lhs` for `≤`-type checks.
    pub slack: f64,
    pub verdict: Verdict,
}

/// Side-by-side solve of the same instance with risk stripped and kept.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub no_risk: SolveReport,
    pub with_risk: SolveReport,
    pub thresholds: Thresholds,
    pub orderings: Vec<OrderingCheck>,
}

/// One grid point of a sweep, for every solved regime.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub p: f64,
    pub regime: Regime,
    pub risk_on: bool,
    pub report: SolveReport,
}

/// Ordered series of solve reports over a prior grid.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

fn low_allocation(spec: &ModelSpec, p: f64, opts: &SolveOptions) -> Result<f64> {
    let probe = ModelSpec {
        types: crate::model::TypePair { prior_high: p, ..spec.types },
        ..spec.clone()
    };
    Ok(screening::solve_second_best_with(&probe, opts)?.menu.low.x)
}

/// Smallest prior at which `x_L*(p)` reaches `x_min`, by bisection on `p`.
/// `x_L*` is nonincreasing in `p`, so the crossing is unique.
fn p_star_bisect(spec: &ModelSpec, opts: &SolveOptions) -> Result<f64> {
    let x_min = spec.interval.x_min;
    let clamped = |x: f64| x <= x_min + 1e-12;

    let lo0 = 1e-9;
    let hi0 = 1.0 - 1e-9;
    if clamped(low_allocation(spec, lo0, opts)?) {
        return Ok(0.0);
    }
    if !clamped(low_allocation(spec, hi0, opts)?) {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (lo0, hi0);
    for _ in 0..THRESHOLD_MAX_ITERS {
        if hi - lo <= THRESHOLD_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if clamped(low_allocation(spec, mid, opts)?) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Critical priors for a spec: the loss ratio `p̄` and the clamping
/// thresholds with and without risk.
pub fn thresholds(spec: &ModelSpec) -> Result<Thresholds> {
    thresholds_with(spec, &SolveOptions::default())
}

pub fn thresholds_with(spec: &ModelSpec, opts: &SolveOptions) -> Result<Thresholds> {
    let report = spec.validate();
    if !report.is_valid() {
        return Err(Error::InvalidSpec(report.summary()));
    }
    let loss_high = spec.risk.loss(Theta::High);
    let p_bar = if loss_high > 0.0 {
        Some(spec.risk.loss(Theta::Low) / loss_high)
    } else {
        None
    };
    let no_risk = spec.without_risk();
    let p_star_norisk = p_star_bisect(&no_risk, opts)?;
    let p_star_risk = if spec.risk.is_active() {
        p_star_bisect(spec, opts)?
    } else {
        p_star_norisk
    };
    Ok(Thresholds {
        p_bar,
        p_star_norisk,
        p_star_risk,
    })
}

fn check_ge(
    name: &'static str,
    inequality: &'static str,
    lhs: f64,
    rhs: f64,
    tie: bool,
) -> OrderingCheck {
    let slack = lhs - rhs;
    let verdict = if tie && slack.abs() <= ORDER_TOL {
        Verdict::TieAtBoundary
    } else if slack >= -ORDER_TOL {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    OrderingCheck { name, inequality, lhs, rhs, slack, verdict }
}

fn skipped(name: &'static str, inequality: &'static str) -> OrderingCheck {
    OrderingCheck {
        name,
        inequality,
        lhs: f64::NAN,
        rhs: f64::NAN,
        slack: f64::NAN,
        verdict: Verdict::Skipped,
    }
}

/// Solves the instance twice (risk stripped / risk kept) and evaluates the
/// ordering results relating the two optima.
pub fn compare(spec: &ModelSpec) -> Result<ComparisonReport> {
    compare_with(spec, &SolveOptions::default())
}

pub fn compare_with(spec: &ModelSpec, opts: &SolveOptions) -> Result<ComparisonReport> {
    if !spec.risk.is_active() {
        return Err(Error::RiskInactive);
    }
    let p = spec.prior_high();
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::BadPrior(p));
    }

    let base_spec = spec.without_risk();
    let no_risk = screening::solve_second_best_with(&base_spec, opts)?;
    let with_risk = screening::solve_second_best_with(spec, opts)?;
    let th = thresholds_with(spec, opts)?;

    let mut orderings = Vec::new();

    // Allocation of the high type rises with risk, for every p.
    orderings.push(check_ge(
        "prop1_x_high",
        "x_H*(risk) >= x_H*(no risk)",
        with_risk.menu.high.x,
        no_risk.menu.high.x,
        false,
    ));

    let both_low_clamped = with_risk.boundary_low == Boundary::LowerBound
        && no_risk.boundary_low == Boundary::LowerBound;

    // Low allocation ordering flips at the loss ratio p̄.
    match th.p_bar {
        None => orderings.push(skipped("prop2_x_low", "ordering of x_L* by sign of p - p_bar")),
        Some(p_bar) => {
            if (p - p_bar).abs() <= THRESHOLD_TOL {
                let diff = (with_risk.menu.low.x - no_risk.menu.low.x).abs();
                orderings.push(OrderingCheck {
                    name: "prop2_x_low",
                    inequality: "x_L*(risk) = x_L*(no risk) at p = p_bar",
                    lhs: with_risk.menu.low.x,
                    rhs: no_risk.menu.low.x,
                    slack: -diff,
                    verdict: if diff <= ORDER_TOL { Verdict::Pass } else { Verdict::Fail },
                });
            } else if p < p_bar {
                orderings.push(check_ge(
                    "prop2_x_low",
                    "x_L*(risk) >= x_L*(no risk) for p < p_bar",
                    with_risk.menu.low.x,
                    no_risk.menu.low.x,
                    both_low_clamped,
                ));
            } else {
                orderings.push(check_ge(
                    "prop2_x_low",
                    "x_L*(risk) <= x_L*(no risk) for p > p_bar",
                    no_risk.menu.low.x,
                    with_risk.menu.low.x,
                    both_low_clamped,
                ));
            }
        }
    }

    // Price orderings, tested verbatim with their side conditions.
    match th.p_bar {
        None => {
            orderings.push(skipped("prop4_t_low", "price ordering for t_L*"));
            orderings.push(skipped("prop4_t_high", "t_H*(risk) > t_H*(no risk)"));
        }
        Some(p_bar) => {
            if p < p_bar {
                let correction =
                    spec.risk.breach_probability(no_risk.menu.low.x) * spec.risk.loss(Theta::Low);
                orderings.push(check_ge(
                    "prop4_t_low",
                    "t_L*(risk) > t_L*(no risk) - (1 - eta(x_L_hat*)) l(theta_L) for p < p_bar",
                    with_risk.menu.low.t,
                    no_risk.menu.low.t - correction,
                    both_low_clamped,
                ));
            } else if p > p_bar {
                orderings.push(check_ge(
                    "prop4_t_low",
                    "t_L*(risk) < t_L*(no risk) for p > p_bar",
                    no_risk.menu.low.t,
                    with_risk.menu.low.t,
                    both_low_clamped,
                ));
            } else {
                orderings.push(skipped("prop4_t_low", "price ordering undefined at p = p_bar"));
            }

            let denom = spec.risk.breach_probability(with_risk.menu.low.x);
            let side = denom > 0.0
                && 1.0 - spec.risk.breach_probability(with_risk.menu.high.x) / denom > p_bar;
            if p > p_bar && side {
                orderings.push(check_ge(
                    "prop4_t_high",
                    "t_H*(risk) > t_H*(no risk) given the eta side condition",
                    with_risk.menu.high.t,
                    no_risk.menu.high.t,
                    false,
                ));
            } else {
                orderings.push(skipped(
                    "prop4_t_high",
                    "t_H*(risk) > t_H*(no risk): side condition not met",
                ));
            }
        }
    }

    // Rent ordering: without risk the high type extracts more rent once
    // p > p_bar and both low allocations are interior.
    match th.p_bar {
        Some(p_bar)
            if p > p_bar
                && with_risk.boundary_low == Boundary::Interior
                && no_risk.boundary_low == Boundary::Interior =>
        {
            orderings.push(check_ge(
                "prop5_rent",
                "rent(no risk) > rent(risk) for p > p_bar, both interior",
                no_risk.information_rent,
                with_risk.information_rent,
                false,
            ));
        }
        _ => orderings.push(skipped(
            "prop5_rent",
            "rent ordering: requires p > p_bar and interior low allocations",
        )),
    }

    Ok(ComparisonReport {
        no_risk,
        with_risk,
        thresholds: th,
        orderings,
    })
}

/// Solves every regime on a grid of priors. The grid must be strictly
/// increasing and strictly inside `(0, 1)`. Rows are ordered by
/// `(p, regime, risk)`; grid points solve in parallel.
pub fn sweep_p(spec: &ModelSpec, grid: &[f64]) -> Result<SweepTable> {
    sweep_p_with(spec, grid, &SolveOptions::default())
}

pub fn sweep_p_with(spec: &ModelSpec, grid: &[f64], opts: &SolveOptions) -> Result<SweepTable> {
    if grid.is_empty() {
        return Err(Error::BadGrid("empty grid".to_string()));
    }
    for w in grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::BadGrid(format!("grid not strictly increasing at {} -> {}", w[0], w[1])));
        }
    }
    if grid[0] <= 0.0 || *grid.last().unwrap() >= 1.0 {
        return Err(Error::BadGrid("grid must lie strictly inside (0, 1)".to_string()));
    }

    let risk_modes: &[bool] = if spec.risk.is_active() { &[false, true] } else { &[false] };

    let rows: Result<Vec<Vec<SweepRow>>> = grid
        .par_iter()
        .map(|&p| {
            let mut out = Vec::with_capacity(4);
            for regime in [Regime::FirstBest, Regime::SecondBest] {
                for &risk_on in risk_modes {
                    let instance = ModelSpec {
                        types: crate::model::TypePair { prior_high: p, ..spec.types },
                        ..if risk_on { spec.clone() } else { spec.without_risk() }
                    };
                    let report = match regime {
                        Regime::FirstBest => screening::solve_first_best_with(&instance, opts)?,
                        Regime::SecondBest => screening::solve_second_best_with(&instance, opts)?,
                    };
                    out.push(SweepRow { p, regime, risk_on, report });
                }
            }
            Ok(out)
        })
        .collect();

    let mut flat: Vec<SweepRow> = rows?.into_iter().flatten().collect();
    // Parallel collection preserves grid order; enforce (p, regime, risk)
    // ordering within each grid point.
    flat.sort_by(|a, b| {
        a.p.partial_cmp(&b.p)
            .unwrap()
            .then_with(|| a.regime.label().cmp(b.regime.label()))
            .then_with(|| a.risk_on.cmp(&b.risk_on))
    });
    Ok(SweepTable { rows: flat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CostModel, PrivacyInterval, RiskModel, TypePair, UtilityModel};

    fn dlc(p: f64, m: f64, loss_low: f64, loss_high: f64) -> ModelSpec {
        ModelSpec {
            types: TypePair { theta_low: 1.0, theta_high: 2.0, prior_high: p },
            interval: PrivacyInterval::new(0.0, 1.0).unwrap(),
            utility: UtilityModel::LinearInType,
            cost: CostModel::Quadratic { zeta: 3.0 },
            risk: RiskModel::LinearBreach { m, loss_low, loss_high },
        }
    }

    #[test]
    fn thresholds_match_closed_forms() {
        let th = thresholds(&dlc(0.25, 0.5, 0.2, 0.6)).unwrap();
        assert!((th.p_bar.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((th.p_star_norisk - 0.5).abs() < 1e-6);
        assert!((th.p_star_risk - 1.1 / 2.3).abs() < 1e-6);
    }

    #[test]
    fn zero_m_thresholds_coincide() {
        let th = thresholds(&dlc(0.25, 0.0, 0.2, 0.6)).unwrap();
        assert!((th.p_star_risk - th.p_star_norisk).abs() < 1e-12);
    }

    #[test]
    fn zero_low_loss_p_bar_is_zero() {
        let th = thresholds(&dlc(0.25, 0.5, 0.0, 0.6)).unwrap();
        assert_eq!(th.p_bar, Some(0.0));
    }

    #[test]
    fn zero_high_loss_p_bar_absent() {
        let th = thresholds(&dlc(0.25, 0.5, 0.0, 0.0)).unwrap();
        assert!(th.p_bar.is_none());
    }

    #[test]
    fn compare_dlc_below_p_bar() {
        let report = compare(&dlc(0.25, 0.5, 0.2, 0.6)).unwrap();
        assert!((report.with_risk.menu.low.x - 0.7 / 3.0).abs() < 1e-9);
        assert!((report.no_risk.menu.low.x - 2.0 / 9.0).abs() < 1e-9);
        assert!((report.with_risk.menu.high.x - 2.3 / 3.0).abs() < 1e-9);
        let prop1 = report.orderings.iter().find(|c| c.name == "prop1_x_high").unwrap();
        assert_eq!(prop1.verdict, Verdict::Pass);
        let prop2 = report.orderings.iter().find(|c| c.name == "prop2_x_low").unwrap();
        assert_eq!(prop2.verdict, Verdict::Pass);
    }

    #[test]
    fn compare_above_p_bar_clamps_to_tie() {
        // p = 0.5 > p_bar = 1/3: both low allocations hit zero.
        let report = compare(&dlc(0.5, 0.5, 0.2, 0.6)).unwrap();
        assert_eq!(report.with_risk.menu.low.x, 0.0);
        assert_eq!(report.no_risk.menu.low.x, 0.0);
        let prop2 = report.orderings.iter().find(|c| c.name == "prop2_x_low").unwrap();
        assert_eq!(prop2.verdict, Verdict::TieAtBoundary);
    }

    #[test]
    fn zero_losses_with_positive_m_all_tie() {
        let report = compare(&dlc(0.25, 0.5, 0.0, 0.0)).unwrap();
        assert_eq!(report.no_risk.menu.low.x, report.with_risk.menu.low.x);
        assert_eq!(report.no_risk.menu.high.t, report.with_risk.menu.high.t);
    }

    #[test]
    fn compare_requires_active_risk() {
        let spec = dlc(0.25, 0.5, 0.2, 0.6).without_risk();
        assert!(matches!(compare(&spec), Err(Error::RiskInactive)));
    }

    #[test]
    fn sweep_shapes() {
        let spec = dlc(0.25, 0.0, 0.0, 0.0).without_risk();
        let grid: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
        let table = sweep_p(&spec, &grid).unwrap();
        assert_eq!(table.rows.len(), 9 * 2);

        let sb: Vec<&SweepRow> = table
            .rows
            .iter()
            .filter(|r| r.regime == Regime::SecondBest && !r.risk_on)
            .collect();
        // x_H constant at theta_H / zeta.
        for row in &sb {
            assert!((row.report.menu.high.x - 2.0 / 3.0).abs() < 1e-9);
        }
        // x_L nonincreasing in p.
        for w in sb.windows(2) {
            assert!(w[1].report.menu.low.x <= w[0].report.menu.low.x + 1e-12);
        }
        // Second-best welfare never beats first-best pointwise.
        for p_rows in table.rows.chunks(2) {
            let (fb, sb) = (&p_rows[0], &p_rows[1]);
            assert_eq!(fb.regime, Regime::FirstBest);
            assert!(sb.report.welfare <= fb.report.welfare + 1e-9);
        }
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let spec = dlc(0.25, 0.0, 0.0, 0.0);
        assert!(matches!(sweep_p(&spec, &[0.3, 0.2]), Err(Error::BadGrid(_))));
        assert!(matches!(sweep_p(&spec, &[0.0, 0.5]), Err(Error::BadGrid(_))));
        assert!(matches!(sweep_p(&spec, &[]), Err(Error::BadGrid(_))));
    }

    #[test]
    fn profit_decomposition_monotone_terms() {
        let spec = dlc(0.25, 0.5, 0.2, 0.6);
        // Priors kept below the clamp region, where both terms are smooth.
        let grid: Vec<f64> = (1..8).map(|i| i as f64 / 20.0).collect();
        let table = sweep_p(&spec, &grid).unwrap();
        let sb: Vec<&SweepRow> = table
            .rows
            .iter()
            .filter(|r| r.regime == Regime::SecondBest && r.risk_on)
            .collect();
        let high_term = |r: &SweepRow| r.p * (r.report.menu.high.t - spec.cost(r.report.menu.high.x));
        let low_term =
            |r: &SweepRow| (1.0 - r.p) * (r.report.menu.low.t - spec.cost(r.report.menu.low.x));
        for w in sb.windows(2) {
            assert!(high_term(w[1]) >= high_term(w[0]) - 1e-9);
            assert!(low_term(w[1]) <= low_term(w[0]) + 1e-9);
        }
    }
}
