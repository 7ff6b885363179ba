use serde::{Deserialize, Serialize};

use super::lft::LftDistribution;

/// Significance level behind the default tolerance.
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    ADominates,
    BDominates,
    Neither,
}

impl Verdict {
    pub fn swapped(self) -> Verdict {
        match self {
            Verdict::ADominates => Verdict::BDominates,
            Verdict::BDominates => Verdict::ADominates,
            Verdict::Neither => Verdict::Neither,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FosdResult {
    pub verdict: Verdict,
    pub epsilon: f64,
    /// `max_x CDF_B(x) - CDF_A(x)`: how far A's CDF sits below B's.
    pub max_a_below: f64,
    /// `max_x CDF_A(x) - CDF_B(x)`.
    pub max_b_below: f64,
}

impl FosdResult {
    pub fn max_gap(&self) -> f64 {
        self.max_a_below.max(self.max_b_below)
    }
}

/// Two-sample Dvoretzky–Kiefer–Wolfowitz band half-width at level `alpha`.
pub fn dkw_epsilon(n: usize, m: usize, alpha: f64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    ((2.0 / alpha).ln() / 2.0 * (n + m) / (n * m)).sqrt()
}

/// First-order stochastic dominance of `a` over `b`: `CDF_A ≤ CDF_B + ε`
/// everywhere while the converse fails somewhere. `epsilon` defaults to the
/// DKW band for the two sample sizes.
pub fn fosd_test(a: &LftDistribution, b: &LftDistribution, epsilon: Option<f64>) -> FosdResult {
    let epsilon = epsilon.unwrap_or_else(|| dkw_epsilon(a.sample_count, b.sample_count, DEFAULT_ALPHA));
    let mut points: Vec<u64> = a.support.iter().chain(&b.support).copied().collect();
    points.sort_unstable();
    points.dedup();
    let (mut max_a_below, mut max_b_below) = (0.0f64, 0.0f64);
    for &x in &points {
        let diff = b.cdf(x) - a.cdf(x);
        max_a_below = max_a_below.max(diff);
        max_b_below = max_b_below.max(-diff);
    }
    let a_ok = max_b_below <= epsilon;
    let b_ok = max_a_below <= epsilon;
    let verdict = match (a_ok, b_ok) {
        (true, false) => Verdict::ADominates,
        (false, true) => Verdict::BDominates,
        _ => Verdict::Neither,
    };
    FosdResult { verdict, epsilon, max_a_below, max_b_below }
}
