//! Shared seeded generators for the integration suites.
//!
//! Random model specs are drawn so the effective utility satisfies the
//! model assumptions on the whole interval; in particular the type wedge
//! `U(x, θ_H) − U(x, θ_L)` stays nonnegative, which requires
//! `m·(1 − x_min)·(ℓ_H − ℓ_L) ≤ x_min·(θ_H − θ_L)` under the linear
//! utility / linear breach family. Inside that region the constraint
//! reduction is exact and the solver can be certified against the
//! brute-force oracle.

#![allow(dead_code)]

use privacy_contracts::dlc::DlcParams;
use privacy_contracts::{
    CostModel, ModelSpec, PrivacyInterval, RiskModel, TypePair, UtilityModel,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The running example: θ = (1, 2), ζ = 3, m = 0.5, ℓ = (0.2, 0.6).
pub fn reference_dlc(p: f64) -> DlcParams {
    DlcParams {
        theta_low: 1.0,
        theta_high: 2.0,
        zeta: 3.0,
        m: 0.5,
        loss_low: 0.2,
        loss_high: 0.6,
        prior_high: p,
    }
}

/// Random parameters for the closed-form example on the fixed unit
/// interval. `m·Δℓ` is kept below `Δθ` so the wedge is increasing and the
/// analytic menu stays inside its validity range for interior allocations.
pub fn random_dlc(rng: &mut ChaCha8Rng) -> DlcParams {
    let theta_low = rng.gen_range(0.5..2.0);
    let d_theta = rng.gen_range(0.1..2.0);
    let theta_high = theta_low + d_theta;
    let m = rng.gen_range(0.0..1.0);
    let loss_low = rng.gen_range(0.0..0.5);
    let d_loss = if m > 0.0 {
        rng.gen_range(0.0..(0.5f64).min(0.9 * d_theta / m))
    } else {
        rng.gen_range(0.0..0.5)
    };
    // Size ζ so the high first-best allocation is interior most of the time.
    let target = rng.gen_range(0.55..1.3);
    let zeta = (theta_high + m * (loss_low + d_loss)) / target;
    DlcParams {
        theta_low,
        theta_high,
        zeta,
        m,
        loss_low,
        loss_high: loss_low + d_loss,
        prior_high: rng.gen_range(0.05..0.95),
    }
}

/// Random model spec in the assumption-satisfying region. `risk` forces
/// the risk model on or off; `None` flips a coin.
pub fn random_spec(rng: &mut ChaCha8Rng, risk: Option<bool>) -> ModelSpec {
    let theta_low = rng.gen_range(0.5..2.0);
    let d_theta = rng.gen_range(0.1..2.0);
    let theta_high = theta_low + d_theta;
    let x_min = rng.gen_range(0.1..0.3);
    let with_risk = risk.unwrap_or_else(|| rng.gen_bool(0.5));

    let risk_model = if with_risk {
        let m = rng.gen_range(0.05..1.0);
        // Keep the wedge nonnegative at x_min, then place the loss ratio
        // p̄ = ℓ_L/ℓ_H across (0.05, 0.45) so both branches of the
        // ordering results get exercised.
        let d_loss_cap: f64 = x_min * d_theta / (m * (1.0 - x_min));
        let d_loss = rng.gen_range(0.1..1.0) * d_loss_cap.min(1.0);
        let p_bar = rng.gen_range(0.05..0.45);
        let loss_low = d_loss * p_bar / (1.0 - p_bar);
        RiskModel::LinearBreach { m, loss_low, loss_high: loss_low + d_loss }
    } else {
        RiskModel::None
    };

    let (m, loss_high) = match risk_model {
        RiskModel::LinearBreach { m, loss_high, .. } => (m, loss_high),
        _ => (0.0, 0.0),
    };
    let target = rng.gen_range(0.55..1.3);
    let zeta = (theta_high + m * loss_high) / target;

    ModelSpec {
        types: TypePair {
            theta_low,
            theta_high,
            prior_high: rng.gen_range(0.05..0.95),
        },
        interval: PrivacyInterval { x_min, x_max: 1.0 },
        utility: UtilityModel::LinearInType,
        cost: CostModel::Quadratic { zeta },
        risk: risk_model,
    }
}
