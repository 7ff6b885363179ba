//! Exogenous model parameters and the closed-form indices derived from them.
//!
//! The benefit function is `v(x) = A·ln(1+x)` with a per-type scale `A`, and
//! affinities decay geometrically with type distance: `α(θ, θ') =
//! α_max · η^|θ-θ'|`. Every quantity here is a pure function of
//! [`ModelParams`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Iteration cap for the marginal-gain walk in [`ModelParams::gregariousness`].
const MAX_GREGARIOUSNESS: u32 = 10_000_000;

/// Distance from 0 or 1 inside which a homophily index is snapped to the bound.
const HOMOPHILY_SNAP: f64 = 1e-9;

/// A 1-based agent type in `{1, .., |Θ|}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TypeId(u16);

impl TypeId {
    pub fn new(value: u16, num_types: usize) -> Result<Self> {
        if value == 0 || usize::from(value) > num_types {
            return Err(Error::Domain(format!("type {value} outside 1..={num_types}")));
        }
        Ok(TypeId(value))
    }

    /// Builds a type from a zero-based index without range checking.
    pub const fn from_index(index: usize) -> Self {
        assert!(index < u16::MAX as usize, "type index fits in u16");
        TypeId(index as u16 + 1)
    }

    pub fn get(self) -> u16 {
        self.0
    }

    pub fn index(self) -> usize {
        usize::from(self.0) - 1
    }

    fn distance(self, other: TypeId) -> i32 {
        (i32::from(self.0) - i32::from(other.0)).abs()
    }
}

impl fmt::Display for TypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Arrival probability of each type; its length is `|Θ|`.
    pub type_probs: Vec<f64>,
    pub alpha_max: f64,
    /// Affinity decay per unit of type distance, in `[0, 1]`.
    pub alpha_decay: f64,
    /// Benefit scale `A` of each type.
    pub benefit_scales: Vec<f64>,
    pub link_cost: f64,
    /// Probability of meeting a stranger rather than a friend of a friend.
    pub gamma: f64,
}

impl ModelParams {
    /// Parameters sharing one benefit scale across all types.
    pub fn new(
        type_probs: Vec<f64>,
        alpha_max: f64,
        alpha_decay: f64,
        benefit_scale: f64,
        link_cost: f64,
        gamma: f64,
    ) -> Result<Self> {
        let params = ModelParams {
            benefit_scales: vec![benefit_scale; type_probs.len()],
            type_probs,
            alpha_max,
            alpha_decay,
            link_cost,
            gamma,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_benefit_scales(mut self, scales: Vec<f64>) -> Result<Self> {
        self.benefit_scales = scales;
        self.validate()?;
        Ok(self)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        self.gamma = gamma;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidParams(msg));
        if self.type_probs.is_empty() {
            return invalid("at least one type is required".into());
        }
        if self.type_probs.len() > usize::from(u16::MAX) {
            return invalid(format!("too many types ({})", self.type_probs.len()));
        }
        if let Some(p) = self.type_probs.iter().find(|p| !(**p > 0.0)) {
            return invalid(format!("type probabilities must be positive, got {p}"));
        }
        let total: f64 = self.type_probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return invalid(format!("type probabilities sum to {total}, expected 1"));
        }
        if self.benefit_scales.len() != self.type_probs.len() {
            return invalid(format!(
                "{} benefit scales for {} types",
                self.benefit_scales.len(),
                self.type_probs.len()
            ));
        }
        if let Some(a) = self.benefit_scales.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
            return invalid(format!("benefit scale must be positive, got {a}"));
        }
        if !(self.alpha_max > 0.0) || !self.alpha_max.is_finite() {
            return invalid(format!("alpha_max must be positive, got {}", self.alpha_max));
        }
        if !(0.0..=1.0).contains(&self.alpha_decay) {
            return invalid(format!("alpha_decay must lie in [0,1], got {}", self.alpha_decay));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return invalid(format!("gamma must lie in [0,1], got {}", self.gamma));
        }
        if !(self.link_cost > 0.0) || !self.link_cost.is_finite() {
            return Err(Error::UnboundedGregariousness(self.link_cost));
        }
        Ok(())
    }

    pub fn num_types(&self) -> usize {
        self.type_probs.len()
    }

    pub fn types(&self) -> impl Iterator<Item = TypeId> {
        (0..self.num_types()).map(TypeId::from_index)
    }

    pub fn type_id(&self, value: u16) -> Result<TypeId> {
        TypeId::new(value, self.num_types())
    }

    pub fn prob(&self, ty: TypeId) -> f64 {
        self.type_probs[ty.index()]
    }

    pub fn benefit_scale(&self, ty: TypeId) -> f64 {
        self.benefit_scales[ty.index()]
    }

    /// `v(x) = A·ln(1+x)` for an agent of type `ty`.
    pub fn benefit_value(&self, ty: TypeId, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("benefit of negative capital {x}")));
        }
        Ok(self.benefit_scale(ty) * x.ln_1p())
    }

    /// `v(prior + alpha) - v(prior)`. Every link decision and every
    /// gregariousness count goes through this one expression so that the
    /// simulator and the closed forms agree to the last bit.
    pub fn marginal_gain(&self, ty: TypeId, prior: f64, alpha: f64) -> f64 {
        self.benefit_scale(ty) * (alpha / (1.0 + prior)).ln_1p()
    }

    pub fn affinity(&self, from: TypeId, to: TypeId) -> f64 {
        // powi(0) is 1 even for a zero decay, so same-type affinity stays α_max.
        self.alpha_max * self.alpha_decay.powi(from.distance(to))
    }

    /// Largest number of type-`target` links an agent of type `own` with
    /// accumulated benefit `prior_benefit` still finds profitable.
    pub fn gregariousness(&self, own: TypeId, target: TypeId, prior_benefit: f64) -> Result<u32> {
        if !(self.link_cost > 0.0) {
            return Err(Error::UnboundedGregariousness(self.link_cost));
        }
        if !(prior_benefit >= 0.0) {
            return Err(Error::Domain(format!("negative prior benefit {prior_benefit}")));
        }
        let alpha = self.affinity(own, target);
        let mut links = 0;
        let mut capital = prior_benefit;
        while self.marginal_gain(own, capital, alpha) > self.link_cost {
            links += 1;
            capital += alpha;
            if links >= MAX_GREGARIOUSNESS {
                return Err(Error::UnboundedGregariousness(self.link_cost));
            }
        }
        Ok(links)
    }

    /// Same-type gregariousness `L*_k(k, 0)`.
    pub fn own_gregariousness(&self, ty: TypeId) -> Result<u32> {
        self.gregariousness(ty, ty, 0.0)
    }

    /// Exogenous homophily index of type `k`.
    ///
    /// A cross-type term whose denominator vanishes (no link of either kind is
    /// ever profitable) contributes zero. With a single type there is nobody
    /// to be homophilic against and the index is 0.
    pub fn homophily_index(&self, k: TypeId) -> Result<f64> {
        let p_k = self.prob(k);
        if self.num_types() == 1 {
            return Ok(0.0);
        }
        let mut represented = p_k;
        for m in self.types().filter(|&m| m != k) {
            let cross = f64::from(self.gregariousness(k, m, 0.0)?);
            let prior = self.affinity(k, m) * cross;
            let own = f64::from(self.gregariousness(k, k, prior)?);
            let ratio = if cross + own == 0.0 { 0.0 } else { cross / (cross + own) };
            represented += self.prob(m) * ratio;
        }
        let h = (1.0 - represented) / (1.0 - p_k);
        if h.abs() <= HOMOPHILY_SNAP {
            Ok(0.0)
        } else if (h - 1.0).abs() <= HOMOPHILY_SNAP {
            Ok(1.0)
        } else if (0.0..=1.0).contains(&h) {
            Ok(h)
        } else {
            Err(Error::Domain(format!("homophily index {h} of type {k} outside [0,1]")))
        }
    }

    pub fn homophily_indices(&self) -> Result<Vec<f64>> {
        self.types().map(|k| self.homophily_index(k)).collect()
    }

    /// `L̄ = Σ_k p_k L*_k(k, 0)`.
    pub fn mean_gregariousness(&self) -> Result<f64> {
        self.types().map(|k| Ok(self.prob(k) * f64::from(self.own_gregariousness(k)?))).sum()
    }
}
