//! Problem instances: consumer utility, operator cost, and breach risk.
//!
//! A [`ModelSpec`] bundles the two consumer types, the admissible privacy
//! interval, and the three parametric families every solver consumes. The
//! effective utility is `U(x, θ) = Û(x, θ) − (1 − η(x))·ℓ(θ)`; with the risk
//! model disabled it reduces to `Û` exactly.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Which of the two consumer types is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theta {
    Low,
    High,
}

/// Shared evaluator for a function of one variable.
pub type Eval1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Shared evaluator for a function of `(x, theta)`.
pub type Eval2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// The two consumer valuations and the prior on the high type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypePair {
    pub theta_low: f64,
    pub theta_high: f64,
    /// `p = P(θ = θ_H)`.
    pub prior_high: f64,
}

impl TypePair {
    pub fn theta(&self, sel: Theta) -> f64 {
        match sel {
            Theta::Low => self.theta_low,
            Theta::High => self.theta_high,
        }
    }
}

/// Closed interval of admissible privacy settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyInterval {
    pub x_min: f64,
    pub x_max: f64,
}

impl PrivacyInterval {
    pub fn new(x_min: f64, x_max: f64) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::Argument(format!(
                "privacy interval must satisfy x_min < x_max with both finite, got [{x_min}, {x_max}]"
            )));
        }
        Ok(Self { x_min, x_max })
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.x_min, self.x_max)
    }
}

/// Consumer base utility `Û(x, θ)`.
#[derive(Clone)]
pub enum UtilityModel {
    /// `Û(x, θ) = x·θ`.
    LinearInType,
    /// User-supplied evaluator, with an optional partial derivative in `x`.
    Custom { value: Eval2, slope: Option<Eval2> },
}

impl UtilityModel {
    pub fn value(&self, x: f64, theta: f64) -> f64 {
        match self {
            UtilityModel::LinearInType => x * theta,
            UtilityModel::Custom { value, .. } => value(x, theta),
        }
    }

    pub fn slope(&self, x: f64, theta: f64) -> Result<f64> {
        match self {
            UtilityModel::LinearInType => Ok(theta),
            UtilityModel::Custom { slope, .. } => match slope {
                Some(s) => Ok(s(x, theta)),
                None => Err(Error::SlopeUnavailable),
            },
        }
    }

    pub fn has_slope(&self) -> bool {
        !matches!(self, UtilityModel::Custom { slope: None, .. })
    }
}

impl std::fmt::Debug for UtilityModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UtilityModel::LinearInType => write!(f, "UtilityModel::LinearInType"),
            UtilityModel::Custom { .. } => write!(f, "UtilityModel::Custom"),
        }
    }
}

/// Operator cost of granting privacy, `g(x)`.
#[derive(Clone)]
pub enum CostModel {
    /// `g(x) = ½ ζ x²`.
    Quadratic { zeta: f64 },
    Custom { value: Eval1, slope: Option<Eval1> },
}

impl CostModel {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            CostModel::Quadratic { zeta } => 0.5 * zeta * x * x,
            CostModel::Custom { value, .. } => value(x),
        }
    }

    pub fn slope(&self, x: f64) -> Result<f64> {
        match self {
            CostModel::Quadratic { zeta } => Ok(zeta * x),
            CostModel::Custom { slope, .. } => match slope {
                Some(s) => Ok(s(x)),
                None => Err(Error::SlopeUnavailable),
            },
        }
    }

    pub fn has_slope(&self) -> bool {
        !matches!(self, CostModel::Custom { slope: None, .. })
    }
}

impl std::fmt::Debug for CostModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CostModel::Quadratic { zeta } => write!(f, "CostModel::Quadratic {{ zeta: {zeta} }}"),
            CostModel::Custom { .. } => write!(f, "CostModel::Custom"),
        }
    }
}

/// Privacy-breach risk: breach probability `1 − η(x)` and type-dependent losses.
#[derive(Clone)]
pub enum RiskModel {
    None,
    /// `1 − η(x) = m(1 − x)`.
    LinearBreach { m: f64, loss_low: f64, loss_high: f64 },
    Custom {
        eta: Eval1,
        eta_slope: Option<Eval1>,
        loss_low: f64,
        loss_high: f64,
    },
}

impl RiskModel {
    /// Whether the risk terms can change the effective utility at all.
    pub fn is_active(&self) -> bool {
        match self {
            RiskModel::None => false,
            RiskModel::LinearBreach { m, .. } => *m > 0.0,
            RiskModel::Custom { .. } => true,
        }
    }

    /// `1 − η(x)`; zero when the risk model is `None`.
    pub fn breach_probability(&self, x: f64) -> f64 {
        match self {
            RiskModel::None => 0.0,
            RiskModel::LinearBreach { m, .. } => m * (1.0 - x),
            RiskModel::Custom { eta, .. } => 1.0 - eta(x),
        }
    }

    /// `η'(x)`; zero when the risk model is `None`.
    pub fn eta_slope(&self, x: f64) -> Result<f64> {
        match self {
            RiskModel::None => Ok(0.0),
            RiskModel::LinearBreach { m, .. } => Ok(*m),
            RiskModel::Custom { eta_slope, .. } => match eta_slope {
                Some(s) => Ok(s(x)),
                None => Err(Error::SlopeUnavailable),
            },
        }
    }

    /// `ℓ(θ)`; zero when the risk model is `None`.
    pub fn loss(&self, sel: Theta) -> f64 {
        match self {
            RiskModel::None => 0.0,
            RiskModel::LinearBreach { loss_low, loss_high, .. }
            | RiskModel::Custom { loss_low, loss_high, .. } => match sel {
                Theta::Low => *loss_low,
                Theta::High => *loss_high,
            },
        }
    }

    pub fn has_slope(&self) -> bool {
        !matches!(self, RiskModel::Custom { eta_slope: None, .. })
    }
}

impl std::fmt::Debug for RiskModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RiskModel::None => write!(f, "RiskModel::None"),
            RiskModel::LinearBreach { m, loss_low, loss_high } => write!(
                f,
                "RiskModel::LinearBreach {{ m: {m}, loss_low: {loss_low}, loss_high: {loss_high} }}"
            ),
            RiskModel::Custom { loss_low, loss_high, .. } => write!(
                f,
                "RiskModel::Custom {{ loss_low: {loss_low}, loss_high: {loss_high} }}"
            ),
        }
    }
}

/// One violated assumption found during validation.
#[derive(Debug, Clone)]
pub struct Violation {
    /// Short name of the violated invariant or assumption.
    pub assumption: String,
    /// The grid point witnessing the violation, when there is one.
    pub witness_x: Option<f64>,
    pub detail: String,
}

/// Outcome of [`ModelSpec::validate`]. Violations are entries, not failures.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, assumption: &str, witness_x: Option<f64>, detail: String) {
        self.violations.push(Violation {
            assumption: assumption.to_string(),
            witness_x,
            detail,
        });
    }

    pub fn summary(&self) -> String {
        self.violations
            .iter()
            .map(|v| match v.witness_x {
                Some(x) => format!("{} (at x = {}): {}", v.assumption, x, v.detail),
                None => format!("{}: {}", v.assumption, v.detail),
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Default number of grid points used for numeric assumption checks.
pub const VALIDATION_GRID_POINTS: usize = 257;
/// Tolerance for numeric assumption checks.
pub const VALIDATION_TOL: f64 = 1e-9;

/// A full problem instance. Immutable after construction; all evaluation
/// methods are pure.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub types: TypePair,
    pub interval: PrivacyInterval,
    pub utility: UtilityModel,
    pub cost: CostModel,
    pub risk: RiskModel,
}

impl ModelSpec {
    fn check_domain(&self, x: f64) -> Result<()> {
        if !self.interval.contains(x) {
            return Err(Error::OutOfDomain {
                x,
                min: self.interval.x_min,
                max: self.interval.x_max,
            });
        }
        Ok(())
    }

    pub fn theta(&self, sel: Theta) -> f64 {
        self.types.theta(sel)
    }

    pub fn prior_high(&self) -> f64 {
        self.types.prior_high
    }

    /// Base utility `Û(x, θ)` without the risk correction.
    pub fn base_utility(&self, x: f64, sel: Theta) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.utility.value(x, self.theta(sel)))
    }

    /// Effective utility `U(x, θ) = Û(x, θ) − (1 − η(x))·ℓ(θ)`.
    ///
    /// With the risk model `None` this is `Û(x, θ)` exactly, with no extra
    /// floating-point operations.
    pub fn effective_utility(&self, x: f64, sel: Theta) -> Result<f64> {
        self.check_domain(x)?;
        let base = self.utility.value(x, self.theta(sel));
        if let RiskModel::None = self.risk {
            return Ok(base);
        }
        Ok(base - self.risk.breach_probability(x) * self.risk.loss(sel))
    }

    /// Marginal effective utility `∂Û/∂x + η'(x)·ℓ(θ)`.
    pub fn effective_utility_slope(&self, x: f64, sel: Theta) -> Result<f64> {
        self.check_domain(x)?;
        let base = self.utility.slope(x, self.theta(sel))?;
        if let RiskModel::None = self.risk {
            return Ok(base);
        }
        Ok(base + self.risk.eta_slope(x)? * self.risk.loss(sel))
    }

    pub fn cost(&self, x: f64) -> f64 {
        self.cost.value(x)
    }

    pub fn cost_slope(&self, x: f64) -> Result<f64> {
        self.cost.slope(x)
    }

    /// True when every slope needed by the derivative-bisection path exists.
    pub fn differentiable(&self) -> bool {
        self.utility.has_slope() && self.cost.has_slope() && self.risk.has_slope()
    }

    /// The same instance with the risk model stripped.
    pub fn without_risk(&self) -> ModelSpec {
        ModelSpec {
            risk: RiskModel::None,
            ..self.clone()
        }
    }

    /// Checks every structural invariant and, for custom models, the
    /// assumptions numerically on the default grid.
    pub fn validate(&self) -> ValidationReport {
        self.validate_with(VALIDATION_GRID_POINTS, VALIDATION_TOL)
    }

    /// Grid-based validation with an explicit grid size and tolerance.
    pub fn validate_with(&self, grid_points: usize, tol: f64) -> ValidationReport {
        let mut report = ValidationReport::default();
        let t = &self.types;

        if !(t.theta_low.is_finite() && t.theta_high.is_finite() && t.theta_low < t.theta_high) {
            report.push(
                "TypePair.theta_low < theta_high",
                None,
                format!("theta_low = {}, theta_high = {}", t.theta_low, t.theta_high),
            );
        }
        if !(0.0..=1.0).contains(&t.prior_high) {
            report.push(
                "TypePair.prior_high in [0, 1]",
                None,
                format!("prior_high = {}", t.prior_high),
            );
        }
        let iv = self.interval;
        if !(iv.x_min.is_finite() && iv.x_max.is_finite() && iv.x_min < iv.x_max) {
            report.push(
                "PrivacyInterval.x_min < x_max, finite",
                None,
                format!("interval = [{}, {}]", iv.x_min, iv.x_max),
            );
            // Grid checks below need a usable interval.
            return report;
        }

        match &self.cost {
            CostModel::Quadratic { zeta } => {
                if !(*zeta > 0.0) {
                    report.push("CostModel.zeta > 0", None, format!("zeta = {zeta}"));
                }
                if iv.x_min < 0.0 {
                    report.push(
                        "CostModel monotone on interval",
                        Some(iv.x_min),
                        "quadratic cost is decreasing for x < 0; interval contains negative x"
                            .to_string(),
                    );
                }
            }
            CostModel::Custom { .. } => {}
        }

        match &self.risk {
            RiskModel::None => {}
            RiskModel::LinearBreach { m, loss_low, loss_high } => {
                if *m < 0.0 {
                    report.push("RiskModel.m >= 0", None, format!("m = {m}"));
                }
                self.check_losses(&mut report, *loss_low, *loss_high);
                // 1 − η(x) = m(1 − x) is linear; checking the endpoints covers
                // the probability bound on the whole interval.
                for x in [iv.x_min, iv.x_max] {
                    let q = m * (1.0 - x);
                    if !(-tol..=1.0 + tol).contains(&q) {
                        report.push(
                            "breach probability in [0, 1]",
                            Some(x),
                            format!("1 - eta({x}) = {q}"),
                        );
                    }
                }
            }
            RiskModel::Custom { loss_low, loss_high, .. } => {
                self.check_losses(&mut report, *loss_low, *loss_high);
            }
        }

        self.grid_checks(&mut report, grid_points, tol);
        report
    }

    fn check_losses(&self, report: &mut ValidationReport, loss_low: f64, loss_high: f64) {
        if loss_low < 0.0 || loss_high < 0.0 {
            report.push(
                "losses nonnegative",
                None,
                format!("loss_low = {loss_low}, loss_high = {loss_high}"),
            );
        }
        if loss_low > loss_high {
            report.push(
                "loss increasing in type",
                None,
                format!("loss_low = {loss_low} > loss_high = {loss_high}"),
            );
        }
    }

    fn grid_checks(&self, report: &mut ValidationReport, grid_points: usize, tol: f64) {
        let n = grid_points.max(3);
        let iv = self.interval;
        let h = iv.width() / (n - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|i| iv.x_min + h * i as f64).collect();

        let eval = |x: f64, sel: Theta| self.utility.value(x, self.theta(sel));
        let eff = |x: f64, sel: Theta| {
            eval(x, sel) - self.risk.breach_probability(x) * self.risk.loss(sel)
        };

        // Assumption A on Û: strictly increasing in x and θ, concave in x.
        for sel in [Theta::Low, Theta::High] {
            let vals: Vec<f64> = xs.iter().map(|&x| eval(x, sel)).collect();
            for (i, w) in vals.windows(2).enumerate() {
                if w[1] - w[0] <= -tol {
                    report.push(
                        "utility strictly increasing in x",
                        Some(xs[i + 1]),
                        format!("U_hat drops from {} to {}", w[0], w[1]),
                    );
                    break;
                }
            }
            for (i, w) in vals.windows(3).enumerate() {
                if w[0] - 2.0 * w[1] + w[2] > tol {
                    report.push(
                        "utility concave in x",
                        Some(xs[i + 1]),
                        format!("positive second difference {}", w[0] - 2.0 * w[1] + w[2]),
                    );
                    break;
                }
            }
        }
        for &x in &xs {
            if eval(x, Theta::High) - eval(x, Theta::Low) < -tol {
                report.push(
                    "utility increasing in theta",
                    Some(x),
                    format!(
                        "U_hat(x, theta_H) = {} < U_hat(x, theta_L) = {}",
                        eval(x, Theta::High),
                        eval(x, Theta::Low)
                    ),
                );
                break;
            }
        }

        // Sorting condition on Û.
        let wedge: Vec<f64> = xs
            .iter()
            .map(|&x| eval(x, Theta::High) - eval(x, Theta::Low))
            .collect();
        for (i, w) in wedge.windows(2).enumerate() {
            if w[1] - w[0] < -tol {
                report.push(
                    "sorting condition",
                    Some(xs[i + 1]),
                    format!("type wedge decreases from {} to {}", w[0], w[1]),
                );
                break;
            }
        }

        if self.risk.is_active() {
            // Breach probability bound and η monotone.
            let probs: Vec<f64> = xs.iter().map(|&x| self.risk.breach_probability(x)).collect();
            for (&x, &q) in xs.iter().zip(&probs) {
                if !(-tol..=1.0 + tol).contains(&q) {
                    report.push(
                        "breach probability in [0, 1]",
                        Some(x),
                        format!("1 - eta({x}) = {q}"),
                    );
                    break;
                }
            }
            for (i, w) in probs.windows(2).enumerate() {
                if w[1] - w[0] >= tol {
                    report.push(
                        "eta strictly increasing",
                        Some(xs[i + 1]),
                        format!("breach probability rises from {} to {}", w[0], w[1]),
                    );
                    break;
                }
            }

            // Standing assumption: the effective utility U must itself satisfy
            // Assumption A on the interval.
            for sel in [Theta::Low, Theta::High] {
                let vals: Vec<f64> = xs.iter().map(|&x| eff(x, sel)).collect();
                for (i, w) in vals.windows(2).enumerate() {
                    if w[1] - w[0] <= -tol {
                        report.push(
                            "effective utility strictly increasing in x",
                            Some(xs[i + 1]),
                            format!("U drops from {} to {}", w[0], w[1]),
                        );
                        break;
                    }
                }
                for (i, w) in vals.windows(3).enumerate() {
                    if w[0] - 2.0 * w[1] + w[2] > tol {
                        report.push(
                            "effective utility concave in x",
                            Some(xs[i + 1]),
                            format!("positive second difference {}", w[0] - 2.0 * w[1] + w[2]),
                        );
                        break;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dlc_spec(m: f64, loss_low: f64, loss_high: f64, p: f64) -> ModelSpec {
        ModelSpec {
            types: TypePair { theta_low: 1.0, theta_high: 2.0, prior_high: p },
            interval: PrivacyInterval::new(0.0, 1.0).unwrap(),
            utility: UtilityModel::LinearInType,
            cost: CostModel::Quadratic { zeta: 3.0 },
            risk: if m == 0.0 && loss_low == 0.0 && loss_high == 0.0 {
                RiskModel::None
            } else {
                RiskModel::LinearBreach { m, loss_low, loss_high }
            },
        }
    }

    #[test]
    fn effective_utility_no_risk() {
        let spec = dlc_spec(0.0, 0.0, 0.0, 0.25);
        assert_eq!(spec.effective_utility(0.5, Theta::High).unwrap(), 1.0);
    }

    #[test]
    fn effective_utility_with_risk() {
        let spec = dlc_spec(0.5, 0.2, 0.6, 0.25);
        let x = 0.7 / 3.0;
        let expect = x * 1.0 - 0.5 * (1.0 - x) * 0.2;
        let got = spec.effective_utility(x, Theta::Low).unwrap();
        assert!((got - expect).abs() < 1e-15);
        assert!((got - 0.1566666666666).abs() < 1e-10);
    }

    #[test]
    fn zero_loss_risk_matches_base_bitwise() {
        let spec = dlc_spec(0.0, 0.0, 0.0, 0.25);
        let risky = ModelSpec {
            risk: RiskModel::LinearBreach { m: 0.0, loss_low: 0.3, loss_high: 0.9 },
            ..spec.clone()
        };
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            let a = spec.effective_utility(x, Theta::High).unwrap();
            let b = risky.effective_utility(x, Theta::High).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn slope_constant_for_linear_breach() {
        let spec = dlc_spec(0.5, 0.2, 0.6, 0.25);
        for x in [0.0, 0.4, 1.0] {
            let s = spec.effective_utility_slope(x, Theta::High).unwrap();
            assert!((s - 2.3).abs() < 1e-15);
        }
        let base = spec.without_risk();
        assert_eq!(base.effective_utility_slope(0.5, Theta::High).unwrap(), 2.0);
    }

    #[test]
    fn slope_matches_central_differences() {
        let spec = dlc_spec(0.5, 0.2, 0.6, 0.25);
        let h = 1e-5;
        for i in 0..100 {
            let x = 0.01 + 0.98 * i as f64 / 99.0;
            for sel in [Theta::Low, Theta::High] {
                let s = spec.effective_utility_slope(x, sel).unwrap();
                let fd = (spec.effective_utility(x + h, sel).unwrap()
                    - spec.effective_utility(x - h, sel).unwrap())
                    / (2.0 * h);
                assert!((s - fd).abs() <= 1e-6, "x = {x}: {s} vs {fd}");
            }
        }
    }

    #[test]
    fn domain_error_outside_interval() {
        let spec = dlc_spec(0.0, 0.0, 0.0, 0.25);
        assert!(matches!(
            spec.effective_utility(1.5, Theta::Low),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn dlc_spec_validates() {
        let report = dlc_spec(0.5, 0.2, 0.6, 0.25).validate();
        assert!(report.is_valid(), "{}", report.summary());
    }

    #[test]
    fn breach_probability_above_one_rejected() {
        let report = dlc_spec(2.0, 0.2, 0.6, 0.25).validate();
        assert!(!report.is_valid());
        assert!(report
            .violations
            .iter()
            .any(|v| v.assumption.contains("breach probability")));
    }

    #[test]
    fn unordered_losses_rejected() {
        let report = dlc_spec(0.5, 0.7, 0.6, 0.25).validate();
        assert!(report
            .violations
            .iter()
            .any(|v| v.assumption.contains("loss increasing")));
    }

    #[test]
    fn risk_never_exceeds_no_risk() {
        let spec = dlc_spec(0.5, 0.2, 0.6, 0.25);
        let base = spec.without_risk();
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            for sel in [Theta::Low, Theta::High] {
                assert!(
                    spec.effective_utility(x, sel).unwrap()
                        <= base.effective_utility(x, sel).unwrap()
                );
            }
        }
    }

    #[test]
    fn sorting_preserved_under_risk() {
        let spec = dlc_spec(0.5, 0.2, 0.6, 0.25);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let wedge = spec.effective_utility(x, Theta::High).unwrap()
                - spec.effective_utility(x, Theta::Low).unwrap();
            assert!(wedge >= prev - 1e-12);
            prev = wedge;
        }
    }

    #[test]
    fn custom_concavity_violation_detected() {
        let spec = ModelSpec {
            utility: UtilityModel::Custom {
                // Convex in x, violating Assumption A.
                value: Arc::new(|x, th| x * x * th),
                slope: Some(Arc::new(|x, th| 2.0 * x * th)),
            },
            ..dlc_spec(0.0, 0.0, 0.0, 0.25)
        };
        let report = spec.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| v.assumption.contains("concave")));
    }
}
