//! Closed-form solutions for the direct-load-control example: linear
//! utility `Û(x, θ) = xθ`, quadratic cost `g(x) = ½ζx²`, and breach
//! probability `1 − η(x) = m(1 − x)` on the unit interval.
//!
//! These formulas serve as the analytic oracle for the numeric solvers.
//! When an unclamped allocation falls outside `[0, 1]` above, the closed
//! forms leave their validity range; the result is clamped and flagged and
//! the interval-constrained numeric solver governs.

use crate::error::{Error, Result};
use crate::model::{CostModel, ModelSpec, PrivacyInterval, RiskModel, Theta, TypePair, UtilityModel};
use crate::risk_analysis::Thresholds;
use crate::screening::{Contract, ContractMenu, Regime};

/// Parameters of the direct-load-control example.
#[derive(Debug, Clone, Copy)]
pub struct DlcParams {
    pub theta_low: f64,
    pub theta_high: f64,
    pub zeta: f64,
    pub m: f64,
    pub loss_low: f64,
    pub loss_high: f64,
    pub prior_high: f64,
}

/// A closed-form menu plus a flag marking allocations that exceeded the
/// interval before clamping (formula out of its validity range).
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormMenu {
    pub menu: ContractMenu,
    /// True when an unclamped allocation landed above `x = 1`.
    pub out_of_interval: bool,
}

impl DlcParams {
    /// The equivalent [`ModelSpec`], with or without the risk terms.
    pub fn to_model_spec(&self, risk: bool) -> ModelSpec {
        ModelSpec {
            types: TypePair {
                theta_low: self.theta_low,
                theta_high: self.theta_high,
                prior_high: self.prior_high,
            },
            interval: PrivacyInterval { x_min: 0.0, x_max: 1.0 },
            utility: UtilityModel::LinearInType,
            cost: CostModel::Quadratic { zeta: self.zeta },
            risk: if risk {
                RiskModel::LinearBreach {
                    m: self.m,
                    loss_low: self.loss_low,
                    loss_high: self.loss_high,
                }
            } else {
                RiskModel::None
            },
        }
    }

    fn loss(&self, sel: Theta) -> f64 {
        match sel {
            Theta::Low => self.loss_low,
            Theta::High => self.loss_high,
        }
    }

    /// Effective utility under the example's risk form.
    fn u(&self, x: f64, sel: Theta, risk: bool) -> f64 {
        let theta = match sel {
            Theta::Low => self.theta_low,
            Theta::High => self.theta_high,
        };
        if risk {
            x * theta - self.m * (1.0 - x) * self.loss(sel)
        } else {
            x * theta
        }
    }

    /// Effective marginal valuation `θ + mℓ(θ)` (or `θ` without risk).
    fn marginal(&self, sel: Theta, risk: bool) -> f64 {
        let theta = match sel {
            Theta::Low => self.theta_low,
            Theta::High => self.theta_high,
        };
        if risk {
            theta + self.m * self.loss(sel)
        } else {
            theta
        }
    }

    /// First-best menu: each allocation sits at the vertex of `U − g`, i.e.
    /// `x† = (θ + mℓ(θ))/ζ`, and the price extracts the whole value,
    /// `t† = U(x†, θ)`.
    pub fn closed_form_first_best(&self, risk: bool) -> ClosedFormMenu {
        let raw_low = self.marginal(Theta::Low, risk) / self.zeta;
        let raw_high = self.marginal(Theta::High, risk) / self.zeta;
        let x_low = raw_low.clamp(0.0, 1.0);
        let x_high = raw_high.clamp(0.0, 1.0);
        ClosedFormMenu {
            menu: ContractMenu {
                low: Contract { x: x_low, t: self.u(x_low, Theta::Low, risk) },
                high: Contract { x: x_high, t: self.u(x_high, Theta::High, risk) },
                regime: Regime::FirstBest,
                risk_active: risk && self.m > 0.0,
            },
            out_of_interval: raw_low > 1.0 || raw_high > 1.0,
        }
    }

    /// Second-best menu. The high type keeps its first-best allocation; the
    /// low type's allocation is the clamped reduced-program vertex
    /// `x_L* = (1/ζ)[(mℓ(θ_L) − p·mℓ(θ_H) − p·θ_H + θ_L)/(1 − p)]_+`
    /// (dropping the risk terms recovers the no-risk form). Prices come from
    /// the binding constraints: `t_L* = U(x_L*, θ_L)` and
    /// `t_H* = t_L* + U(x_H*, θ_H) − U(x_L*, θ_H)`, with the latter capped
    /// at `U(x_H*, θ_H)` so the high type never pays past participation.
    pub fn closed_form_second_best(&self, risk: bool) -> Result<ClosedFormMenu> {
        let p = self.prior_high;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::BadPrior(p));
        }
        let raw_high = self.marginal(Theta::High, risk) / self.zeta;
        let numerator = if risk {
            self.m * self.loss_low - p * self.m * self.loss_high - p * self.theta_high
                + self.theta_low
        } else {
            self.theta_low - p * self.theta_high
        };
        let raw_low = (numerator / (1.0 - p) / self.zeta).max(0.0);

        let x_high = raw_high.clamp(0.0, 1.0);
        let x_low = raw_low.clamp(0.0, 1.0);
        let t_low = self.u(x_low, Theta::Low, risk);
        let u_high_own = self.u(x_high, Theta::High, risk);
        // Cap at the participation bound: when the clamped x_L leaves the
        // high type with a negative utility wedge, IR binds in place of IC.
        let t_high = (t_low + u_high_own - self.u(x_low, Theta::High, risk)).min(u_high_own);
        Ok(ClosedFormMenu {
            menu: ContractMenu {
                low: Contract { x: x_low, t: t_low },
                high: Contract { x: x_high, t: t_high },
                regime: Regime::SecondBest,
                risk_active: risk && self.m > 0.0,
            },
            out_of_interval: raw_low > 1.0 || raw_high > 1.0,
        })
    }

    /// The critical priors in closed form:
    /// `p̂* = θ_L/θ_H`, `p* = (θ_L + mℓ(θ_L))/(θ_H + mℓ(θ_H))`,
    /// `p̄ = ℓ(θ_L)/ℓ(θ_H)` (absent when `ℓ(θ_H) = 0`).
    pub fn critical_probabilities(&self) -> Thresholds {
        Thresholds {
            p_bar: if self.loss_high > 0.0 {
                Some(self.loss_low / self.loss_high)
            } else {
                None
            },
            p_star_norisk: self.theta_low / self.theta_high,
            p_star_risk: (self.theta_low + self.m * self.loss_low)
                / (self.theta_high + self.m * self.loss_high),
        }
    }
}
