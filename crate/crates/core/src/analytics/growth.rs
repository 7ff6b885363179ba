use serde::{Deserialize, Serialize};

use super::popularity::MeanTrajectory;
use super::regression::LinearFit;
use crate::error::{Error, Result};

/// Minimum number of usable points for a growth fit.
pub const MIN_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthModel {
    /// `ln E[deg] = ln a + b ln t`; the parameter is the exponent `b`.
    Power,
    /// `E[deg] = a + s ln t`; the parameter is the scale `s`.
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub model: GrowthModel,
    pub parameter: f64,
    pub r_squared: f64,
    pub fit: LinearFit,
}

/// Fits `(t, mean indegree)` pairs. Points with non-positive `t` or degree
/// are dropped before fitting.
pub fn fit_growth(points: &[(f64, f64)], model: GrowthModel) -> Result<GrowthFit> {
    let transformed: Vec<(f64, f64)> = points
        .iter()
        .filter(|(t, d)| *t > 0.0 && *d > 0.0 && t.is_finite() && d.is_finite())
        .map(|&(t, d)| match model {
            GrowthModel::Power => (t.ln(), d.ln()),
            GrowthModel::Log => (t.ln(), d),
        })
        .collect();
    if transformed.len() < MIN_POINTS {
        return Err(Error::Insufficient {
            what: "growth fit points",
            needed: MIN_POINTS,
            have: transformed.len(),
        });
    }
    let fit = LinearFit::ols(&transformed)
        .ok_or({ Error::Insufficient { what: "growth fit spread", needed: 2, have: 1 } })?;
    Ok(GrowthFit { model, parameter: fit.slope, r_squared: fit.r_squared, fit })
}

/// Samples `n` log-spaced steps of `traj` within `[from, to]`, deduplicated
/// after rounding to whole steps.
pub fn log_spaced_points(traj: &MeanTrajectory, from: u64, to: u64, n: usize) -> Vec<(f64, f64)> {
    let from = from.max(traj.first_step).max(1);
    let to = to.min(traj.last_step());
    if from > to || n == 0 {
        return Vec::new();
    }
    let (lo, hi) = ((from as f64).ln(), (to as f64).ln());
    let mut steps: Vec<u64> = (0..n)
        .map(|k| {
            let frac = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
            ((lo + frac * (hi - lo)).exp().round() as u64).clamp(from, to)
        })
        .collect();
    steps.dedup();
    steps.into_iter().filter_map(|s| traj.value_at(s).map(|v| (s as f64, v))).collect()
}

/// Power fit over the tail `t ≥ 4 × birth`.
pub fn fit_tail(traj: &MeanTrajectory, birth: u64, model: GrowthModel, n: usize) -> Result<GrowthFit> {
    let points = log_spaced_points(traj, 4 * birth, traj.last_step(), n);
    fit_growth(&points, model)
}
