//! Popularity acquisition: hitting times of indegree levels, ensemble-mean
//! trajectories and crossover between two mean trajectories.

use serde::{Deserialize, Serialize};

use super::lft::{Estimate, Stratum};
use crate::error::{Error, Result};
use crate::sim::{Grid, Trajectory};

/// Ensemble-mean indegree, one value per step from `first_step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanTrajectory {
    pub first_step: u64,
    pub values: Vec<f64>,
    /// Number of trajectories averaged.
    pub count: usize,
}

impl MeanTrajectory {
    pub fn last_step(&self) -> u64 {
        self.first_step + self.values.len() as u64 - 1
    }

    pub fn value_at(&self, step: u64) -> Option<f64> {
        let n = step.checked_sub(self.first_step)?;
        self.values.get(n as usize).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.values.iter().enumerate().map(|(n, &v)| (self.first_step + n as u64, v))
    }
}

/// Averages dense trajectories that share a start step, truncated to the
/// shortest.
pub fn mean_trajectory<'a>(trajs: impl IntoIterator<Item = &'a Trajectory>) -> Result<MeanTrajectory> {
    let mut start = None;
    let mut sums: Vec<f64> = Vec::new();
    let mut len = usize::MAX;
    let mut count = 0;
    for t in trajs {
        let Grid::Dense { start: s } = t.grid else {
            return Err(Error::Unsupported("mean of checkpoint trajectories".into()));
        };
        match start {
            None => start = Some(s),
            Some(prev) if prev != s => {
                return Err(Error::Domain(format!("trajectories start at {prev} and {s}")))
            }
            _ => {}
        }
        len = len.min(t.indegree.len());
        if sums.len() < t.indegree.len() {
            sums.resize(t.indegree.len(), 0.0);
        }
        for (acc, &d) in sums.iter_mut().zip(&t.indegree) {
            *acc += f64::from(d);
        }
        count += 1;
    }
    let Some(first_step) = start else {
        return Err(Error::Insufficient { what: "trajectories", needed: 1, have: 0 });
    };
    sums.truncate(len);
    if sums.is_empty() {
        return Err(Error::Insufficient { what: "trajectory steps", needed: 1, have: 0 });
    }
    let values = sums.into_iter().map(|s| s / count as f64).collect();
    Ok(MeanTrajectory { first_step, values, count })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpatEstimate {
    pub estimate: Estimate,
    /// Trajectories that never reached the level before the horizon.
    pub censored: usize,
}

/// Popularity acquisition time `first step with deg⁻ ≥ d - birth + 1` of
/// one trajectory, or `None` if the level is never reached.
pub fn acquisition_time(traj: &Trajectory, d: u32) -> Option<u64> {
    let birth = traj.agent.birth();
    if d == 0 {
        return Some(1);
    }
    traj.iter().find(|&(_, deg)| deg >= d).map(|(step, _)| step - birth + 1)
}

/// Expected time to reach indegree `d` over the trajectories in `stratum`.
pub fn estimate_epat<'a>(
    trajs: impl IntoIterator<Item = &'a Trajectory>,
    d: u32,
    stratum: &Stratum,
) -> Result<EpatEstimate> {
    let mut hits = Vec::new();
    let mut censored = 0;
    for t in trajs.into_iter().filter(|t| stratum.contains(t.ty, t.agent.birth())) {
        match acquisition_time(t, d) {
            Some(h) => hits.push(h as f64),
            None => censored += 1,
        }
    }
    Ok(EpatEstimate { estimate: Estimate::from_samples("EPAT", &hits)?, censored })
}

fn trailing_mean(values: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    let mut out = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for (n, &v) in values.iter().enumerate() {
        sum += v;
        if n >= window {
            sum -= values[n - window];
        }
        out.push(sum / (n + 1).min(window) as f64);
    }
    out
}

/// First step from which `b`'s smoothed mean stays strictly above `a`'s
/// through the end of their common grid, or `None` if `b` is not above `a`
/// at the end.
pub fn crossover_time(a: &MeanTrajectory, b: &MeanTrajectory, window: usize) -> Option<u64> {
    let start = a.first_step.max(b.first_step);
    let end = a.last_step().min(b.last_step());
    if start > end {
        return None;
    }
    let slice = |t: &MeanTrajectory| {
        let lo = (start - t.first_step) as usize;
        let hi = (end - t.first_step) as usize;
        trailing_mean(&t.values[lo..=hi], window)
    };
    let (sa, sb) = (slice(a), slice(b));
    let ahead = sa.iter().zip(&sb).rposition(|(x, y)| y <= x);
    match ahead {
        None => Some(start),
        Some(n) if n + 1 == sa.len() => None,
        Some(n) => Some(start + n as u64 + 1),
    }
}

/// Default smoothing window: 5% of the horizon.
pub fn default_window(horizon: u64) -> usize {
    ((horizon as f64 * 0.05).round() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::AgentId;
    use crate::model::TypeId;

    fn traj(birth: u32, values: &[u32]) -> Trajectory {
        Trajectory {
            agent: AgentId(birth),
            ty: TypeId::from_index(0),
            grid: Grid::Dense { start: u64::from(birth) },
            indegree: values.to_vec(),
        }
    }

    fn mean(first: u64, values: Vec<f64>) -> MeanTrajectory {
        MeanTrajectory { first_step: first, values, count: 1 }
    }

    #[test]
    fn acquisition_times() {
        let t = traj(5, &[0, 0, 1, 1, 3, 4]);
        assert_eq!(acquisition_time(&t, 0), Some(1));
        assert_eq!(acquisition_time(&t, 1), Some(3));
        assert_eq!(acquisition_time(&t, 2), Some(5));
        assert_eq!(acquisition_time(&t, 5), None);
    }

    #[test]
    fn epat_is_monotone_in_level() {
        let trajs: Vec<_> =
            (0..40).map(|k| traj(10, &(0..50).map(|s| (s * (k % 5 + 1)) / 7).collect::<Vec<_>>())).collect();
        let s = Stratum::default();
        let mut last = 0.0;
        for d in 0..6 {
            let e = estimate_epat(&trajs, d, &s).unwrap();
            assert!(e.estimate.mean >= last);
            last = e.estimate.mean;
        }
        assert_eq!(estimate_epat(&trajs, 0, &s).unwrap().estimate.mean, 1.0);
        let far = estimate_epat(&trajs, 30, &s);
        assert!(matches!(far, Err(Error::Insufficient { .. })));
    }

    #[test]
    fn mean_of_dense_trajectories() {
        let m = mean_trajectory(&[traj(3, &[0, 2, 4]), traj(3, &[2, 2, 2, 9])]).unwrap();
        assert_eq!(m.values, vec![1.0, 2.0, 3.0]);
        assert_eq!((m.first_step, m.last_step(), m.count), (3, 5, 2));
        assert!(mean_trajectory(&[traj(3, &[1]), traj(4, &[1])]).is_err());
        assert!(mean_trajectory(std::iter::empty()).is_err());
    }

    #[test]
    fn crossover_of_offset_trajectories() {
        let a = mean(1, (0..100).map(f64::from).collect());
        let b = mean(1, (0..100).map(|x| f64::from(x) + 1.0).collect());
        assert_eq!(crossover_time(&a, &b, 5), Some(1));
        assert_eq!(crossover_time(&b, &a, 5), None);
        assert_eq!(crossover_time(&a, &a.clone(), 5), None);
    }

    #[test]
    fn crossover_with_late_overtake() {
        // b starts below and overtakes a for good at step 50.
        let a = mean(1, vec![10.0; 100]);
        let b = mean(1, (1..=100).map(|t| if t < 50 { 0.0 } else { 20.0 }).collect());
        assert_eq!(crossover_time(&a, &b, 1), Some(50));
        // A trailing window delays the change until the window mean exceeds 10.
        assert_eq!(crossover_time(&a, &b, 4), Some(52));
    }

    #[test]
    fn crossover_uses_common_grid() {
        let a = mean(1, vec![5.0; 200]);
        let b = mean(30, vec![6.0; 100]);
        assert_eq!(crossover_time(&a, &b, 10), Some(30));
    }
}
