//! Independent brute-force solver of the full four-constraint program.
//!
//! For every allocation pair on an x-grid the inner pricing problem is a
//! two-variable linear program with four half-plane constraints; its maximum
//! sits at a vertex, so enumerating pairwise boundary intersections solves it
//! exactly. The grid argmax certifies the constraint-reduction solver up to
//! a resolution gap bounded by slope evaluations near the optimum.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ModelSpec, Theta};
use crate::screening::{Contract, ContractMenu, Regime};

/// Default allocation grid resolution (h = 5e-4 on the unit interval).
pub const DEFAULT_X_STEPS: usize = 2001;

/// Outcome of a brute-force solve.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub menu: ContractMenu,
    pub profit: f64,
    pub x_grid_step: f64,
    /// Worst-case suboptimality attributable to the grid resolution.
    pub certified_gap_bound: f64,
}

/// Exact maximizer of `(1−p)·t_L + p·t_H` over the four price constraints at
/// fixed allocations. Returns `(t_low, t_high, profit)`; the profit includes
/// the cost terms so it is comparable with the outer objective.
pub fn inner_price_optimum(spec: &ModelSpec, x_low: f64, x_high: f64) -> Result<(f64, f64, f64)> {
    let u_ll = spec.effective_utility(x_low, Theta::Low)?;
    let u_lh = spec.effective_utility(x_low, Theta::High)?;
    let u_hl = spec.effective_utility(x_high, Theta::Low)?;
    let u_hh = spec.effective_utility(x_high, Theta::High)?;
    let p = spec.prior_high();
    let (t_low, t_high, price_value) = price_vertex(u_ll, u_lh, u_hl, u_hh, p)
        .ok_or_else(|| Error::Internal("price polytope unexpectedly infeasible".to_string()))?;
    let profit =
        price_value - (1.0 - p) * spec.cost(x_low) - p * spec.cost(x_high);
    Ok((t_low, t_high, profit))
}

/// Vertex enumeration for the inner LP. Constraint boundaries:
/// `t_L = C` (IR-low), `t_H = D` (IR-high), `t_H = t_L + A` (IC-high),
/// `t_L = t_H + B` (IC-low). The IC boundaries are parallel, so that pair is
/// skipped; the IR constraints bound both prices above, so the optimum is
/// finite and sits on one of the remaining intersections.
fn price_vertex(u_ll: f64, u_lh: f64, u_hl: f64, u_hh: f64, p: f64) -> Option<(f64, f64, f64)> {
    let a = u_hh - u_lh; // t_H − t_L ≤ A
    let b = u_ll - u_hl; // t_L − t_H ≤ B
    let c = u_ll; // t_L ≤ C
    let d = u_hh; // t_H ≤ D

    let feas_eps = 1e-9 * (1.0 + c.abs().max(d.abs()));
    let candidates = [
        (c, d),     // IR-low ∩ IR-high
        (c, c + a), // IR-low ∩ IC-high
        (c, c - b), // IR-low ∩ IC-low
        (d - a, d), // IR-high ∩ IC-high
        (d + b, d), // IR-high ∩ IC-low
    ];

    let mut best: Option<(f64, f64, f64)> = None;
    for &(t_l, t_h) in &candidates {
        let feasible = t_l <= c + feas_eps
            && t_h <= d + feas_eps
            && t_h - t_l <= a + feas_eps
            && t_l - t_h <= b + feas_eps;
        if !feasible {
            continue;
        }
        let value = (1.0 - p) * t_l + p * t_h;
        match best {
            Some((_, _, v)) if value <= v => {}
            _ => best = Some((t_l, t_h, value)),
        }
    }
    best
}

/// Brute-force solve of the full program on an `x_steps × x_steps` grid of
/// allocation pairs with `x_L ≤ x_H`.
pub fn solve_p1_bruteforce(spec: &ModelSpec, x_steps: usize) -> Result<OracleResult> {
    if x_steps < 2 {
        return Err(Error::Argument(format!("x_steps must be at least 2, got {x_steps}")));
    }
    let p = spec.prior_high();
    let iv = spec.interval;
    let n = x_steps;
    let h = iv.width() / (n - 1) as f64;
    let xs: Vec<f64> = (0..n)
        .map(|i| {
            if i == n - 1 {
                iv.x_max
            } else {
                iv.x_min + h * i as f64
            }
        })
        .collect();

    let u_low: Vec<f64> = xs
        .iter()
        .map(|&x| spec.effective_utility(x, Theta::Low))
        .collect::<Result<_>>()?;
    let u_high: Vec<f64> = xs
        .iter()
        .map(|&x| spec.effective_utility(x, Theta::High))
        .collect::<Result<_>>()?;
    let cost: Vec<f64> = xs.iter().map(|&x| spec.cost(x)).collect();

    // Best (profit, i, j) per row of x_L; the reducer prefers higher profit,
    // then lexicographically smaller (x_L, x_H) for determinism.
    let row_best = |i: usize| -> (f64, usize, usize) {
        let mut best = (f64::NEG_INFINITY, i, i);
        for j in i..n {
            if let Some((_, _, value)) = price_vertex(u_low[i], u_high[i], u_low[j], u_high[j], p) {
                let profit = value - (1.0 - p) * cost[i] - p * cost[j];
                if profit > best.0 {
                    best = (profit, i, j);
                }
            }
        }
        best
    };

    let (best_profit, bi, bj) = (0..n)
        .into_par_iter()
        .map(row_best)
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX, usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
                    b
                } else {
                    a
                }
            },
        );
    if !best_profit.is_finite() {
        return Err(Error::Internal("no feasible grid cell".to_string()));
    }

    let (t_low, t_high, profit) = inner_price_optimum(spec, xs[bi], xs[bj])?;
    debug_assert!((profit - best_profit).abs() <= 1e-9 * (1.0 + profit.abs()));

    let gap = gap_bound(spec, &xs, &u_low, &u_high, &cost, h)?;

    Ok(OracleResult {
        menu: ContractMenu {
            low: Contract { x: xs[bi], t: t_low },
            high: Contract { x: xs[bj], t: t_high },
            regime: Regime::SecondBest,
            risk_active: spec.risk.is_active(),
        },
        profit,
        x_grid_step: h,
        certified_gap_bound: gap,
    })
}

/// Grid-resolution gap bound.
///
/// Under the reduced prices the outer objective separates into two concave
/// one-dimensional pieces (the low type's reduced objective scaled by 1−p,
/// and the high type's surplus scaled by p). For a concave function the true
/// maximum exceeds the best grid value by at most `h·|slope|` evaluated at
/// the best grid point, and the grid optimum of the full program is at least
/// the grid optimum of the reduced prices. Slopes are analytic when the
/// model provides them, secant-based otherwise.
fn gap_bound(
    spec: &ModelSpec,
    xs: &[f64],
    u_low: &[f64],
    u_high: &[f64],
    cost: &[f64],
    h: f64,
) -> Result<f64> {
    let n = xs.len();
    let p = spec.prior_high();
    let f_vals: Vec<f64> = (0..n)
        .map(|i| u_low[i] - (1.0 - p) * cost[i] - p * u_high[i])
        .collect();
    let g_vals: Vec<f64> = (0..n).map(|i| p * (u_high[i] - cost[i])).collect();

    let argmax = |v: &[f64]| {
        v.iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc })
            .0
    };
    let i_f = argmax(&f_vals);
    let i_g = argmax(&g_vals);

    let slope_mag = |i: usize, analytic: &dyn Fn(f64) -> Result<f64>, vals: &[f64]| -> Result<f64> {
        if spec.differentiable() {
            analytic(xs[i]).map(f64::abs)
        } else {
            // Widest secant magnitude around the best grid point.
            let left = if i > 0 { (vals[i] - vals[i - 1]) / h } else { 0.0 };
            let right = if i + 1 < vals.len() { (vals[i + 1] - vals[i]) / h } else { 0.0 };
            Ok(left.abs().max(right.abs()))
        }
    };

    let f_slope = |x: f64| -> Result<f64> {
        Ok(spec.effective_utility_slope(x, Theta::Low)?
            - (1.0 - p) * spec.cost_slope(x)?
            - p * spec.effective_utility_slope(x, Theta::High)?)
    };
    let g_slope =
        |x: f64| -> Result<f64> { Ok(p * (spec.effective_utility_slope(x, Theta::High)? - spec.cost_slope(x)?)) };

    let lf = slope_mag(i_f, &f_slope, &f_vals)?;
    let lg = slope_mag(i_g, &g_slope, &g_vals)?;
    Ok(h * (lf + lg) + 1e-12)
}
