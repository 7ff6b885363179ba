//! Python bindings: model parameters, closed-form predictions, simulation
//! ensembles and the estimators that compare the two.

use pyo3::exceptions::{PyFileNotFoundError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use netform::analytics::{
    self, fosd_test, lft_pmf, mean_trajectory, GrowthModel, LftDistribution, OracleReport, Stratum, Verdict,
};
use netform::sim::{ProcessingOrder, TrajectorySample};
use netform::{EnsembleResult, Error, SimConfig, TypeId};

fn err(e: Error) -> PyErr {
    match e {
        Error::MissingInput(p) => PyFileNotFoundError::new_err(p.display().to_string()),
        Error::Config(_)
        | Error::Domain(_)
        | Error::InvalidParams(_)
        | Error::UnboundedGregariousness(_)
        | Error::Insufficient { .. } => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// `(id, type, birth, lft, indegree, outdegree, censored)`.
type AgentRow = (u32, u16, u64, Option<u64>, u32, u32, bool);

fn json_to_py<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Primitive parameters of the formation model. Types are numbered from 1.
#[pyclass(name = "ModelParams", module = "netform", from_py_object)]
#[derive(Clone)]
struct PyModelParams {
    inner: netform::ModelParams,
}

impl PyModelParams {
    fn type_id(&self, value: u16) -> PyResult<TypeId> {
        self.inner.type_id(value).map_err(err)
    }
}

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (type_probs, alpha_max=1.0, alpha_decay=1.0, benefit_scale=1.0, link_cost=0.2, gamma=0.0, benefit_scales=None))]
    fn new(
        type_probs: Vec<f64>,
        alpha_max: f64,
        alpha_decay: f64,
        benefit_scale: f64,
        link_cost: f64,
        gamma: f64,
        benefit_scales: Option<Vec<f64>>,
    ) -> PyResult<Self> {
        let mut inner =
            netform::ModelParams::new(type_probs, alpha_max, alpha_decay, benefit_scale, link_cost, gamma)
                .map_err(err)?;
        if let Some(scales) = benefit_scales {
            inner = inner.with_benefit_scales(scales).map_err(err)?;
        }
        Ok(PyModelParams { inner })
    }

    #[getter]
    fn type_probs(&self) -> Vec<f64> {
        self.inner.type_probs.clone()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[getter]
    fn benefit_scales(&self) -> Vec<f64> {
        self.inner.benefit_scales.clone()
    }

    #[getter]
    fn num_types(&self) -> usize {
        self.inner.num_types()
    }

    /// Copy with a different stranger-meeting probability.
    fn with_gamma(&self, gamma: f64) -> PyResult<Self> {
        let inner = self.inner.clone().with_gamma(gamma).map_err(err)?;
        Ok(PyModelParams { inner })
    }

    fn affinity(&self, own: u16, target: u16) -> PyResult<f64> {
        Ok(self.inner.affinity(self.type_id(own)?, self.type_id(target)?))
    }

    /// Links a type-`own` agent with no friends would form to type `target`.
    fn gregariousness(&self, own: u16, target: u16) -> PyResult<u32> {
        self.inner.gregariousness(self.type_id(own)?, self.type_id(target)?, 0.0).map_err(err)
    }

    fn homophily(&self) -> PyResult<Vec<f64>> {
        self.inner.homophily_indices().map_err(err)
    }

    fn mean_gregariousness(&self) -> PyResult<f64> {
        self.inner.mean_gregariousness().map_err(err)
    }

    /// Every closed-form prediction for these parameters, as a dict.
    fn oracle<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let report = OracleReport::build(&self.inner).map_err(err)?;
        json_to_py(py, &report)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "ModelParams(type_probs={:?}, alpha_max={}, alpha_decay={}, benefit_scales={:?}, link_cost={}, gamma={})",
            p.type_probs, p.alpha_max, p.alpha_decay, p.benefit_scales, p.link_cost, p.gamma
        )
    }
}

/// Results of independent replications of one configuration.
#[pyclass(name = "Ensemble", module = "netform")]
struct PyEnsemble {
    inner: EnsembleResult,
    horizon: u64,
}

impl PyEnsemble {
    fn stratum(&self, warmup: u64, ty: Option<u16>) -> Stratum {
        let s = Stratum::born_after(warmup);
        match ty {
            Some(t) => s.with_type(TypeId::from_index(usize::from(t.max(1) - 1))),
            None => s,
        }
    }

    fn distribution(&self, warmup: u64, ty: Option<u16>) -> PyResult<LftDistribution> {
        let records = self.inner.replications.iter().flat_map(|r| &r.agents);
        lft_pmf(records, &self.stratum(warmup, ty)).map_err(err)
    }
}

#[pymethods]
impl PyEnsemble {
    #[getter]
    fn replications(&self) -> usize {
        self.inner.replications.len()
    }

    #[getter]
    fn horizon(&self) -> u64 {
        self.horizon
    }

    #[getter]
    fn config_hash(&self) -> String {
        self.inner.config_hash.clone()
    }

    /// Per-agent rows of replication `r`.
    fn agents(&self, r: usize) -> PyResult<Vec<AgentRow>> {
        let rep = self
            .inner
            .replications
            .get(r)
            .ok_or_else(|| PyValueError::new_err(format!("no replication {r}")))?;
        Ok(rep
            .agents
            .iter()
            .map(|a| (a.id.0, a.ty.get(), a.birth, a.lft, a.final_indegree, a.final_outdegree, a.censored))
            .collect())
    }

    /// Directed links `(source, target, step)` of replication `r`.
    fn edges(&self, r: usize) -> PyResult<Vec<(u32, u32, u64)>> {
        let rep = self
            .inner
            .replications
            .get(r)
            .ok_or_else(|| PyValueError::new_err(format!("no replication {r}")))?;
        Ok(rep.edges.iter().map(|e| (e.source.0, e.target.0, e.step)).collect())
    }

    /// Uncensored link formation times of agents born at or after `warmup`.
    #[pyo3(signature = (warmup=0, ty=None))]
    fn lft_samples(&self, warmup: u64, ty: Option<u16>) -> Vec<u64> {
        let stratum = self.stratum(warmup, ty);
        self.inner
            .replications
            .iter()
            .flat_map(|r| &r.agents)
            .filter(|a| stratum.contains(a.ty, a.birth))
            .filter_map(|a| a.uncensored_lft())
            .collect()
    }

    /// Mean LFT with a 95% interval: `{mean, ci_low, ci_high, samples}`.
    #[pyo3(signature = (warmup=0, ty=None))]
    fn elft<'py>(&self, py: Python<'py>, warmup: u64, ty: Option<u16>) -> PyResult<Bound<'py, PyDict>> {
        let records = self.inner.replications.iter().flat_map(|r| &r.agents);
        let e = analytics::estimate_elft(records, &self.stratum(warmup, ty)).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("mean", e.mean)?;
        d.set_item("ci_low", e.ci_low)?;
        d.set_item("ci_high", e.ci_high)?;
        d.set_item("samples", e.samples)?;
        Ok(d)
    }

    /// Empirical LFT pmf as `(support, probabilities)`.
    #[pyo3(signature = (warmup=0, ty=None))]
    fn lft_pmf(&self, warmup: u64, ty: Option<u16>) -> PyResult<(Vec<u64>, Vec<f64>)> {
        let d = self.distribution(warmup, ty)?;
        Ok((d.support, d.pmf))
    }

    /// Indegree of the agent born at `birth`, averaged over replications.
    fn mean_trajectory(&self, birth: u64) -> PyResult<Vec<(u64, f64)>> {
        let agent =
            netform::AgentId(u32::try_from(birth).map_err(|_| PyValueError::new_err("birth out of range"))?);
        let trajs: Vec<_> = self.inner.replications.iter().filter_map(|r| r.trajectory(agent)).collect();
        let mean = mean_trajectory(trajs).map_err(err)?;
        Ok(mean.iter().collect())
    }
}

/// Runs `replications` independent replications of `params` in parallel.
#[pyfunction]
#[pyo3(signature = (params, horizon, seed=0, replications=1, warmup=0, tracked=None, record_meetings=true, shuffled=false))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    params: &PyModelParams,
    horizon: u64,
    seed: u64,
    replications: u32,
    warmup: u64,
    tracked: Option<Vec<u64>>,
    record_meetings: bool,
    shuffled: bool,
) -> PyResult<PyEnsemble> {
    let mut config = SimConfig::new(params.inner.clone(), horizon);
    config.seed = seed;
    config.replications = replications;
    config.warmup = warmup;
    config.record.meetings = record_meetings;
    if let Some(births) = tracked {
        config.trajectory_sample = TrajectorySample::Tracked(births);
    }
    if shuffled {
        config.order = ProcessingOrder::Shuffled;
    }
    let inner = py.detach(|| netform::run_ensemble(&config)).map_err(err)?;
    Ok(PyEnsemble { inner, horizon })
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::ADominates => "a",
        Verdict::BDominates => "b",
        Verdict::Neither => "neither",
    }
}

/// First-order dominance test between two LFT samples. Returns
/// `(verdict, epsilon, max_gap)` with verdict one of `"a"`, `"b"`, `"neither"`.
#[pyfunction]
#[pyo3(signature = (a, b, epsilon=None))]
fn fosd(a: Vec<u64>, b: Vec<u64>, epsilon: Option<f64>) -> PyResult<(&'static str, f64, f64)> {
    let a = LftDistribution::from_samples(&a, Stratum::default()).map_err(err)?;
    let b = LftDistribution::from_samples(&b, Stratum::default()).map_err(err)?;
    let r = fosd_test(&a, &b, epsilon);
    Ok((verdict_name(r.verdict), r.epsilon, r.max_gap()))
}

/// Fits a power (`"power"`) or logarithmic (`"log"`) law to `(t, degree)`
/// points and returns `(parameter, r_squared)`.
#[pyfunction]
#[pyo3(signature = (points, model="power"))]
fn fit_growth(points: Vec<(f64, f64)>, model: &str) -> PyResult<(f64, f64)> {
    let model = match model {
        "power" => GrowthModel::Power,
        "log" => GrowthModel::Log,
        other => return Err(PyValueError::new_err(format!("unknown growth model {other:?}"))),
    };
    let fit = analytics::fit_growth(&points, model).map_err(err)?;
    Ok((fit.parameter, fit.r_squared))
}

#[pyfunction]
fn lambert_w_minus1(x: f64) -> PyResult<f64> {
    analytics::lambert_w_minus1(x).map_err(err)
}

#[pyfunction]
fn crossover_multiplier(mean_gregariousness: f64) -> PyResult<f64> {
    analytics::crossover_multiplier(mean_gregariousness).map_err(err)
}

#[pyfunction]
fn oracle_crossover(birth: u64, mean_gregariousness: f64) -> PyResult<f64> {
    analytics::oracle_crossover(birth, mean_gregariousness).map_err(err)
}

#[pyfunction]
fn h1_elft(p: f64, gamma: f64, remaining_links: f64) -> f64 {
    analytics::h1_elft(p, gamma, remaining_links)
}

#[pyfunction]
#[pyo3(signature = (n, m, alpha=0.05))]
fn dkw_epsilon(n: usize, m: usize, alpha: f64) -> f64 {
    analytics::dkw_epsilon(n, m, alpha)
}

#[pymodule]
#[pyo3(name = "netform")]
fn netform_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyEnsemble>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(fosd, m)?)?;
    m.add_function(wrap_pyfunction!(fit_growth, m)?)?;
    m.add_function(wrap_pyfunction!(lambert_w_minus1, m)?)?;
    m.add_function(wrap_pyfunction!(crossover_multiplier, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_crossover, m)?)?;
    m.add_function(wrap_pyfunction!(h1_elft, m)?)?;
    m.add_function(wrap_pyfunction!(dkw_epsilon, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
