use std::f64::consts::E;

use crate::error::{Error, Result};

/// Slack below `-1/e` accepted as the branch point, to absorb rounding in
/// callers that compute the argument.
const BRANCH_SLACK: f64 = 1e-15;

/// Lower real branch `W₋₁(x)` on `[-1/e, 0)`: the solution of `w·eʷ = x` with
/// `w ≤ -1`.
///
/// Starts from the branch-point series near `-1/e` or the logarithmic
/// asymptote elsewhere, then polishes with Halley steps.
pub fn lambert_w_minus1(x: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if !(x >= branch - BRANCH_SLACK && x < 0.0) {
        return Err(Error::Domain(format!("W₋₁ undefined at {x}")));
    }
    if x <= branch {
        return Ok(-1.0);
    }
    let mut w = if x < -0.25 {
        let p = -(2.0 * (E * x + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = (w - step).min(-1.0);
        if (next - w).abs() <= 4.0 * f64::EPSILON * w.abs() {
            w = next;
            break;
        }
        w = next;
    }
    Ok(w)
}
