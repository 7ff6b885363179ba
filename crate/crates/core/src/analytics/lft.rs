use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::decision::AgentRecord;
use crate::error::{Error, Result};
use crate::model::TypeId;

/// Minimum sample count for any mean estimate.
pub const MIN_SAMPLES: usize = 30;

/// Which agents an estimate is computed over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Stratum {
    pub ty: Option<TypeId>,
    /// Inclusive birth window.
    pub birth_min: u64,
    pub birth_max: Option<u64>,
    /// The γ of the runs the records came from, carried for reporting.
    pub gamma: Option<f64>,
}

impl Stratum {
    pub fn born_after(warmup: u64) -> Self {
        Stratum { birth_min: warmup, ..Stratum::default() }
    }

    pub fn with_type(mut self, ty: TypeId) -> Self {
        self.ty = Some(ty);
        self
    }

    pub fn contains(&self, ty: TypeId, birth: u64) -> bool {
        self.ty.is_none_or(|t| t == ty)
            && birth >= self.birth_min
            && self.birth_max.is_none_or(|b| birth <= b)
    }
}

/// Sample mean with a normal-approximation 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_dev: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn from_samples(what: &'static str, samples: &[f64]) -> Result<Estimate> {
        let n = samples.len();
        if n < MIN_SAMPLES {
            return Err(Error::Insufficient { what, needed: MIN_SAMPLES, have: n });
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let std_dev = var.sqrt();
        let half = 1.96 * std_dev / (n as f64).sqrt();
        Ok(Estimate { mean, std_dev, ci_low: mean - half, ci_high: mean + half, samples: n })
    }

    pub fn relative_error(&self, target: f64) -> f64 {
        ((self.mean - target) / target).abs()
    }
}

fn lft_samples<'a>(records: impl IntoIterator<Item = &'a AgentRecord>, stratum: &Stratum) -> Vec<u64> {
    records
        .into_iter()
        .filter(|r| stratum.contains(r.ty, r.birth))
        .filter_map(AgentRecord::uncensored_lft)
        .collect()
}

/// Mean link formation time over the uncensored agents of `stratum`.
pub fn estimate_elft<'a>(
    records: impl IntoIterator<Item = &'a AgentRecord>,
    stratum: &Stratum,
) -> Result<Estimate> {
    let samples: Vec<f64> = lft_samples(records, stratum).into_iter().map(|t| t as f64).collect();
    Estimate::from_samples("ELFT", &samples)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LftDistribution {
    pub support: Vec<u64>,
    pub pmf: Vec<f64>,
    pub sample_count: usize,
    pub stratum: Stratum,
}

impl LftDistribution {
    pub fn from_samples(samples: &[u64], stratum: Stratum) -> Result<Self> {
        if samples.len() < MIN_SAMPLES {
            return Err(Error::Insufficient { what: "LFT pmf", needed: MIN_SAMPLES, have: samples.len() });
        }
        let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
        for &s in samples {
            *counts.entry(s).or_default() += 1;
        }
        let n = samples.len() as f64;
        Ok(LftDistribution {
            support: counts.keys().copied().collect(),
            pmf: counts.values().map(|&c| c as f64 / n).collect(),
            sample_count: samples.len(),
            stratum,
        })
    }

    /// `P(T ≤ x)`.
    pub fn cdf(&self, x: u64) -> f64 {
        let upto = self.support.partition_point(|&s| s <= x);
        self.pmf[..upto].iter().sum::<f64>().min(1.0)
    }

    pub fn mean(&self) -> f64 {
        self.support.iter().zip(&self.pmf).map(|(&s, &p)| s as f64 * p).sum()
    }

    pub fn is_point_mass(&self) -> bool {
        self.support.len() == 1
    }
}

/// Empirical pmf of the link formation time over `stratum`.
pub fn lft_pmf<'a>(
    records: impl IntoIterator<Item = &'a AgentRecord>,
    stratum: &Stratum,
) -> Result<LftDistribution> {
    LftDistribution::from_samples(&lft_samples(records, stratum), stratum.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::AgentId;

    fn record(birth: u32, ty: u16, lft: Option<u64>, censored: bool) -> AgentRecord {
        let mut r = AgentRecord::new(AgentId(birth), TypeId::new(ty, 2).unwrap());
        if let Some(t) = lft {
            r.last_link_step = Some(u64::from(birth) + t - 1);
            r.links_formed = 1;
        }
        r.lft = lft;
        r.censored = censored;
        r
    }

    #[test]
    fn point_mass_and_censoring() {
        let mut rs: Vec<_> = (1..=60).map(|b| record(b, 1 + (b % 2) as u16, Some(4), false)).collect();
        rs.push(record(61, 1, Some(2), true));
        rs.push(record(62, 1, None, false));
        let e = estimate_elft(&rs, &Stratum::born_after(1)).unwrap();
        assert_eq!((e.mean, e.std_dev, e.samples), (4.0, 0.0, 60));
        let pmf = lft_pmf(&rs, &Stratum::default()).unwrap();
        assert!(pmf.is_point_mass());
        assert_eq!(pmf.support, vec![4]);
        assert_eq!(pmf.cdf(3), 0.0);
        assert_eq!(pmf.cdf(4), 1.0);
    }

    #[test]
    fn stratum_filters() {
        let rs: Vec<_> =
            (1..=100).map(|b| record(b, 1 + (b % 2) as u16, Some(u64::from(b % 5 + 1)), false)).collect();
        let ty2 = TypeId::new(2, 2).unwrap();
        let s = Stratum { ty: Some(ty2), birth_min: 11, birth_max: Some(90), gamma: None };
        let pmf = lft_pmf(&rs, &s).unwrap();
        assert_eq!(pmf.sample_count, 40);
        assert!((pmf.pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(pmf.support.windows(2).all(|w| w[0] < w[1]));
        let e = estimate_elft(&rs, &s).unwrap();
        assert!((e.mean - pmf.mean()).abs() < 1e-12);
    }

    #[test]
    fn too_few_samples() {
        let rs: Vec<_> = (1..=10).map(|b| record(b, 1, Some(3), false)).collect();
        assert!(matches!(estimate_elft(&rs, &Stratum::default()), Err(Error::Insufficient { have: 10, .. })));
        assert!(lft_pmf(&rs, &Stratum::default()).is_err());
    }
}
