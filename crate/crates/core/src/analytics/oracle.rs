//! Closed-form predictions for the two homophily extremes.

use serde::{Deserialize, Serialize};

use super::lambert::lambert_w_minus1;
use crate::error::{Error, Result};
use crate::model::{ModelParams, TypeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Every `h_k = 0`: type-indifferent agents.
    H0,
    /// Every `h_k = 1`: agents link only within their own type.
    H1,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::H0 => "h0",
            Regime::H1 => "h1",
        }
    }

    /// The regime of `params`, or `None` when some index is interior.
    pub fn classify(params: &ModelParams) -> Result<Option<Regime>> {
        let h = params.homophily_indices()?;
        Ok(if h.iter().all(|&x| x == 0.0) {
            Some(Regime::H0)
        } else if h.iter().all(|&x| x == 1.0) {
            Some(Regime::H1)
        } else {
            None
        })
    }

    fn require(params: &ModelParams, regime: Regime) -> Result<()> {
        match Regime::classify(params)? {
            Some(r) if r == regime => Ok(()),
            Some(r) => Err(Error::Unsupported(format!(
                "parameters are in regime {} not {}",
                r.label(),
                regime.label()
            ))),
            None => Err(Error::Unsupported("no closed form for interior homophily".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElftPrediction {
    pub ty: TypeId,
    pub regime: Regime,
    pub elft: f64,
    /// Only in h1: the same formula with `L*(θ, 0)` in the numerator instead
    /// of the post-first-link budget `L*(θ, α_θθ)`.
    pub alternative: Option<f64>,
}

/// Expected link formation time per type.
pub fn oracle_elft(params: &ModelParams, regime: Regime) -> Result<Vec<ElftPrediction>> {
    Regime::require(params, regime)?;
    params
        .types()
        .map(|ty| {
            let lstar = f64::from(params.own_gregariousness(ty)?);
            Ok(match regime {
                Regime::H0 => ElftPrediction { ty, regime, elft: lstar, alternative: None },
                Regime::H1 => {
                    let after_first = f64::from(params.gregariousness(ty, ty, params.affinity(ty, ty))?);
                    let elft = h1_elft(params.prob(ty), params.gamma, after_first);
                    let alt = h1_elft(params.prob(ty), params.gamma, lstar);
                    ElftPrediction { ty, regime, elft, alternative: (alt != elft).then_some(alt) }
                }
            })
        })
        .collect()
}

/// `1/p + L / (γp + 1 - γ)`.
pub fn h1_elft(p: f64, gamma: f64, remaining_links: f64) -> f64 {
    1.0 / p + remaining_links / (gamma * p + (1.0 - gamma))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GrowthLaw {
    /// `E[deg⁻(t)] ~ t^exponent`.
    Power { exponent: f64 },
    /// `E[deg⁻(t)] ~ scale · ln t`.
    Log { scale: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthPrediction {
    /// `None` for the society-wide law of the h0 regime.
    pub ty: Option<TypeId>,
    pub law: GrowthLaw,
    /// Gregariousness of one makes the exponent 0.
    pub degenerate: bool,
}

/// Popularity growth law. Closed rates exist only at `γ ∈ {0, 1}`.
pub fn oracle_growth(params: &ModelParams, regime: Regime) -> Result<Vec<GrowthPrediction>> {
    Regime::require(params, regime)?;
    let gamma = params.gamma;
    if gamma != 0.0 && gamma != 1.0 {
        return Err(Error::Unsupported(format!("no closed growth rate at interior γ = {gamma}")));
    }
    let law = |l: f64| {
        if gamma == 0.0 {
            GrowthLaw::Power { exponent: if l > 0.0 { (l - 1.0) / l } else { 0.0 } }
        } else {
            GrowthLaw::Log { scale: l }
        }
    };
    match regime {
        Regime::H0 => {
            let l = params.mean_gregariousness()?;
            Ok(vec![GrowthPrediction { ty: None, law: law(l), degenerate: l <= 1.0 }])
        }
        Regime::H1 => params
            .types()
            .map(|ty| {
                let l = f64::from(params.own_gregariousness(ty)?);
                Ok(GrowthPrediction { ty: Some(ty), law: law(l), degenerate: l <= 1.0 })
            })
            .collect(),
    }
}

/// The factor multiplying the birth date in the crossover prediction,
/// `(-L̄·W₋₁(-(1/L̄)e^{-1/L̄}))^{L̄/(L̄-1)}`.
pub fn crossover_multiplier(mean_gregariousness: f64) -> Result<f64> {
    let l = mean_gregariousness;
    if !(l > 1.0) {
        return Err(Error::Domain(format!("crossover undefined for mean gregariousness {l} <= 1")));
    }
    let w = lambert_w_minus1(-(1.0 / l) * (-1.0 / l).exp())?;
    Ok((-l * w).powf(l / (l - 1.0)))
}

/// Predicted step at which the non-opportunistic (γ=1) popularity of an
/// agent born at `birth` is overtaken by its opportunistic (γ=0) popularity.
pub fn oracle_crossover(birth: u64, mean_gregariousness: f64) -> Result<f64> {
    Ok(birth as f64 * crossover_multiplier(mean_gregariousness)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub homophily: Vec<f64>,
    /// `gregariousness[k][m] = L*_k(m, 0)`.
    pub gregariousness: Vec<Vec<u32>>,
    pub mean_gregariousness: f64,
    pub regime: Option<Regime>,
    pub elft: Vec<ElftPrediction>,
    /// Keyed by γ; only the extremes have closed forms.
    pub growth_gamma0: Vec<GrowthPrediction>,
    pub growth_gamma1: Vec<GrowthPrediction>,
    /// Crossover multiplier for h0 societies (`T_c ≈ birth × multiplier`).
    pub crossover_multiplier: Option<f64>,
    pub warnings: Vec<String>,
}

impl OracleReport {
    pub fn build(params: &ModelParams) -> Result<OracleReport> {
        let homophily = params.homophily_indices()?;
        let gregariousness = params
            .types()
            .map(|k| params.types().map(|m| params.gregariousness(k, m, 0.0)).collect())
            .collect::<Result<Vec<Vec<u32>>>>()?;
        let mean = params.mean_gregariousness()?;
        let regime = Regime::classify(params)?;
        let mut warnings = Vec::new();
        let elft = match regime {
            Some(r) => oracle_elft(params, r)?,
            None => {
                warnings.push("interior homophily: ELFT has no closed form".into());
                Vec::new()
            }
        };
        let growth_at = |gamma: f64| -> Result<Vec<GrowthPrediction>> {
            match regime {
                Some(r) => oracle_growth(&params.clone().with_gamma(gamma)?, r),
                None => Ok(Vec::new()),
            }
        };
        let growth_gamma0 = growth_at(0.0)?;
        let growth_gamma1 = growth_at(1.0)?;
        if params.gamma != 0.0 && params.gamma != 1.0 {
            warnings
                .push(format!("γ = {} is interior: growth law at the configured γ omitted", params.gamma));
        }
        let crossover_multiplier =
            if regime == Some(Regime::H0) && mean > 1.0 { Some(crossover_multiplier(mean)?) } else { None };
        Ok(OracleReport {
            homophily,
            gregariousness,
            mean_gregariousness: mean,
            regime,
            elft,
            growth_gamma0,
            growth_gamma1,
            crossover_multiplier,
            warnings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exclusive(p1: f64, gamma: f64) -> ModelParams {
        ModelParams::new(vec![p1, 1.0 - p1], 1.0, 0.0, 1.0, 0.2, gamma).unwrap()
    }

    fn flat(gamma: f64) -> ModelParams {
        ModelParams::new(vec![0.5, 0.5], 1.0, 1.0, 1.0, 0.2, gamma).unwrap()
    }

    #[test]
    fn regime_classification() {
        assert_eq!(Regime::classify(&flat(0.0)).unwrap(), Some(Regime::H0));
        assert_eq!(Regime::classify(&exclusive(0.5, 0.0)).unwrap(), Some(Regime::H1));
        let mid = ModelParams::new(vec![0.5, 0.5], 1.0, 0.5, 1.0, 0.2, 0.0).unwrap();
        assert_eq!(Regime::classify(&mid).unwrap(), None);
        assert!(oracle_elft(&mid, Regime::H1).is_err());
        assert!(oracle_elft(&flat(0.0), Regime::H1).is_err());
    }

    #[test]
    fn elft_h0_is_gregariousness() {
        let e = oracle_elft(&flat(0.3), Regime::H0).unwrap();
        assert!(e.iter().all(|p| p.elft == 4.0));
    }

    #[test]
    fn elft_h1_examples() {
        let g1 = oracle_elft(&exclusive(0.7, 1.0), Regime::H1).unwrap();
        assert!((g1[0].elft - (1.0 / 0.7 + 3.0 / 0.7)).abs() < 1e-12);
        assert!((g1[0].elft - 5.714).abs() < 1e-3);
        assert_eq!(g1[0].alternative, Some(1.0 / 0.7 + 4.0 / 0.7));
        let g0 = oracle_elft(&exclusive(0.7, 0.0), Regime::H1).unwrap();
        assert!((g0[0].elft - 4.4286).abs() < 1e-4);
        assert!((h1_elft(0.5, 0.0, 3.0) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn elft_h1_monotonicity() {
        let ps = [0.2, 0.4, 0.6, 0.8];
        let gammas = [0.0, 0.25, 0.5, 0.75, 1.0];
        for w in ps.windows(2) {
            assert!(h1_elft(w[0], 0.5, 3.0) > h1_elft(w[1], 0.5, 3.0));
        }
        for w in gammas.windows(2) {
            assert!(h1_elft(0.4, w[0], 3.0) < h1_elft(0.4, w[1], 3.0));
        }
        assert!(h1_elft(0.4, 0.5, 3.0) < h1_elft(0.4, 0.5, 5.0));
    }

    #[test]
    fn growth_laws() {
        let g = oracle_growth(&flat(0.0), Regime::H0).unwrap();
        assert_eq!(g[0].law, GrowthLaw::Power { exponent: 0.75 });
        assert!(!g[0].degenerate);
        let mixed = exclusive(0.5, 1.0).with_benefit_scales(vec![0.8, 1.4]).unwrap();
        let g = oracle_growth(&mixed, Regime::H1).unwrap();
        assert_eq!(g[1].law, GrowthLaw::Log { scale: 6.0 });
        assert_eq!(g[0].law, GrowthLaw::Log { scale: 3.0 });
        assert!(oracle_growth(&flat(0.5), Regime::H0).is_err());

        // A = 0.3: only the first link pays, L̄ = 1.
        let lone = ModelParams::new(vec![1.0], 1.0, 1.0, 0.3, 0.2, 0.0).unwrap();
        assert_eq!(lone.mean_gregariousness().unwrap(), 1.0);
        let g = oracle_growth(&lone, Regime::H0).unwrap();
        assert_eq!(g[0].law, GrowthLaw::Power { exponent: 0.0 });
        assert!(g[0].degenerate);
    }

    #[test]
    fn crossover_examples() {
        let m = crossover_multiplier(4.0).unwrap();
        assert!((m - 22.5).abs() < 0.1, "{m}");
        let at20 = oracle_crossover(20, 4.0).unwrap();
        assert!((at20 - 451.0).abs() < 1.0, "{at20}");
        assert!((oracle_crossover(40, 4.0).unwrap() / at20 - 2.0).abs() < 1e-12);
        let ms: Vec<f64> = (2..=10).map(|l| crossover_multiplier(f64::from(l)).unwrap()).collect();
        assert!(ms.windows(2).all(|w| w[0] < w[1]));
        assert!(crossover_multiplier(1.0).is_err());
    }

    /// The multiplier is where `L ln x = (L/(L-1)) (x^{(L-1)/L} - 1)`:
    /// the log and power mean-field popularity curves meet.
    #[test]
    fn crossover_solves_mean_field_equality() {
        for l in [2.0, 3.0, 4.0, 6.5] {
            let x = crossover_multiplier(l).unwrap();
            let b = (l - 1.0) / l;
            let log_curve = l * x.ln();
            let power_curve = (x.powf(b) - 1.0) / b;
            assert!((log_curve - power_curve).abs() < 1e-9 * log_curve, "L={l}");
        }
    }

    #[test]
    fn report_contents() {
        let r = OracleReport::build(&flat(0.5)).unwrap();
        assert_eq!(r.homophily, vec![0.0, 0.0]);
        assert_eq!(r.mean_gregariousness, 4.0);
        assert_eq!(r.gregariousness, vec![vec![4, 4], vec![4, 4]]);
        assert_eq!(r.warnings.len(), 1);
        assert!(r.crossover_multiplier.is_some());
        let x = OracleReport::build(&exclusive(0.7, 0.0)).unwrap();
        assert_eq!(x.homophily, vec![1.0, 1.0]);
        assert_eq!(x.gregariousness, vec![vec![4, 0], vec![0, 4]]);
        assert!(x.crossover_multiplier.is_none());
    }
}
