//! One-dimensional concave maximization over a closed interval.
//!
//! This is the single numerical kernel behind every solver in the crate.
//! With a slope evaluator the maximizer is found by bisection on the slope
//! sign; without one, by golden-section search. Concavity is a precondition
//! (validated upstream), so local and global maxima coincide.

use crate::error::{Error, Result};
use crate::model::PrivacyInterval;

/// Default tolerance in `x` for the optimizers.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Where the maximizer landed relative to the interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Interior,
    LowerBound,
    UpperBound,
}

impl Boundary {
    pub fn label(&self) -> &'static str {
        match self {
            Boundary::Interior => "interior",
            Boundary::LowerBound => "lower",
            Boundary::UpperBound => "upper",
        }
    }
}

/// Result of a concave maximization.
#[derive(Debug, Clone, Copy)]
pub struct OptResult {
    pub argmax: f64,
    /// `f(argmax)`, recomputed at the final point.
    pub max_value: f64,
    pub at_boundary: Boundary,
    pub iterations: usize,
    /// `|f'(argmax)|` at an interior optimum (estimated by central
    /// differences on the golden-section path); 0 by convention at a boundary.
    pub residual: f64,
}

fn checked(v: f64, x: f64) -> Result<f64> {
    if v.is_nan() {
        Err(Error::NonFinite { x })
    } else {
        Ok(v)
    }
}

/// Maximizes a concave `f` over `interval`, dispatching on slope availability.
pub fn maximize_concave(
    f: &dyn Fn(f64) -> f64,
    f_slope: Option<&dyn Fn(f64) -> f64>,
    interval: &PrivacyInterval,
    tol: f64,
) -> Result<OptResult> {
    match f_slope {
        Some(s) => maximize_with_slope(f, s, interval, tol),
        None => maximize_golden(f, interval, tol),
    }
}

/// Bisection on the slope sign.
///
/// Returns `LowerBound` when `f'(x_min) <= 0` and `UpperBound` when
/// `f'(x_max) >= 0`. Otherwise two bisections bracket the zero-slope set from
/// both sides and the midpoint of the bracket is returned, which makes flat
/// regions resolve deterministically.
pub fn maximize_with_slope(
    f: &dyn Fn(f64) -> f64,
    f_slope: &dyn Fn(f64) -> f64,
    interval: &PrivacyInterval,
    tol: f64,
) -> Result<OptResult> {
    if !(tol > 0.0) {
        return Err(Error::BadTolerance(tol));
    }
    let (lo, hi) = (interval.x_min, interval.x_max);
    let s_lo = checked(f_slope(lo), lo)?;
    if s_lo <= 0.0 {
        return Ok(OptResult {
            argmax: lo,
            max_value: checked(f(lo), lo)?,
            at_boundary: Boundary::LowerBound,
            iterations: 0,
            residual: 0.0,
        });
    }
    let s_hi = checked(f_slope(hi), hi)?;
    if s_hi >= 0.0 {
        return Ok(OptResult {
            argmax: hi,
            max_value: checked(f(hi), hi)?,
            at_boundary: Boundary::UpperBound,
            iterations: 0,
            residual: 0.0,
        });
    }

    let mut iterations = 0;

    // Upper edge of the region where the slope is still positive.
    let (mut a_lo, mut a_hi) = (lo, hi);
    while a_hi - a_lo > tol {
        let mid = 0.5 * (a_lo + a_hi);
        if checked(f_slope(mid), mid)? > 0.0 {
            a_lo = mid;
        } else {
            a_hi = mid;
        }
        iterations += 1;
        if mid <= a_lo && mid >= a_hi {
            break; // interval no longer representable
        }
    }
    let upper_pos = 0.5 * (a_lo + a_hi);

    // Lower edge of the region where the slope has gone negative.
    let (mut b_lo, mut b_hi) = (lo, hi);
    while b_hi - b_lo > tol {
        let mid = 0.5 * (b_lo + b_hi);
        if checked(f_slope(mid), mid)? >= 0.0 {
            b_lo = mid;
        } else {
            b_hi = mid;
        }
        iterations += 1;
        if mid <= b_lo && mid >= b_hi {
            break;
        }
    }
    let lower_neg = 0.5 * (b_lo + b_hi);

    let argmax = 0.5 * (upper_pos + lower_neg);
    Ok(OptResult {
        argmax,
        max_value: checked(f(argmax), argmax)?,
        at_boundary: Boundary::Interior,
        iterations,
        residual: checked(f_slope(argmax), argmax)?.abs(),
    })
}

/// Golden-section search to bracket width `tol`.
pub fn maximize_golden(
    f: &dyn Fn(f64) -> f64,
    interval: &PrivacyInterval,
    tol: f64,
) -> Result<OptResult> {
    if !(tol > 0.0) {
        return Err(Error::BadTolerance(tol));
    }
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (interval.x_min, interval.x_max);
    let mut x1 = b - INVPHI * (b - a);
    let mut x2 = a + INVPHI * (b - a);
    let mut f1 = checked(f(x1), x1)?;
    let mut f2 = checked(f(x2), x2)?;
    let mut iterations = 0;

    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INVPHI * (b - a);
            f1 = checked(f(x1), x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INVPHI * (b - a);
            f2 = checked(f(x2), x2)?;
        }
        iterations += 1;
        if !(x1 > a && x2 < b) {
            break; // bracket collapsed to machine resolution
        }
    }

    // The bracket may sit flush against an interval endpoint; compare against
    // the endpoints explicitly so monotone objectives report a boundary.
    let mid = 0.5 * (a + b);
    let f_mid = checked(f(mid), mid)?;
    let f_min = checked(f(interval.x_min), interval.x_min)?;
    let f_max = checked(f(interval.x_max), interval.x_max)?;

    let (argmax, max_value, at_boundary) = if f_min >= f_mid && f_min >= f_max {
        (interval.x_min, f_min, Boundary::LowerBound)
    } else if f_max >= f_mid {
        (interval.x_max, f_max, Boundary::UpperBound)
    } else {
        (mid, f_mid, Boundary::Interior)
    };

    let residual = match at_boundary {
        Boundary::Interior => {
            let h = (tol.sqrt() * interval.width()).max(1e-9);
            let lo = (argmax - h).max(interval.x_min);
            let hi = (argmax + h).min(interval.x_max);
            ((checked(f(hi), hi)? - checked(f(lo), lo)?) / (hi - lo)).abs()
        }
        _ => 0.0,
    };

    Ok(OptResult {
        argmax,
        max_value,
        at_boundary,
        iterations,
        residual,
    })
}
