//! Flat key-value run configuration.
//!
//! A config file is one JSON object whose keys map onto simulation
//! parameters: `p_1..p_K` (or a `type_probs` array), `alpha_max`,
//! `alpha_decay`, `benefit_scale` (plus optional per-type `benefit_scale_k`),
//! `link_cost`, `gamma`, `horizon`, `warmup`, `seed`, `replications`,
//! `trajectory_sample` and `processing_order`.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::sim::{ProcessingOrder, SimConfig, TrajectorySample};

const SCALAR_KEYS: &[&str] = &[
    "alpha_max",
    "alpha_decay",
    "benefit_scale",
    "link_cost",
    "gamma",
    "horizon",
    "warmup",
    "seed",
    "replications",
    "trajectory_sample",
    "processing_order",
    "record_meetings",
];

/// Keys a sweep may vary, besides any `p_k` or `benefit_scale_k`.
pub const SWEEPABLE: &[&str] = &["alpha_max", "alpha_decay", "benefit_scale", "link_cost", "gamma"];

/// Parsed flat config that remembers where each key was written.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigDoc {
    entries: BTreeMap<String, Value>,
    lines: BTreeMap<String, usize>,
}

fn indexed(key: &str, prefix: &str) -> Option<usize> {
    let rest = key.strip_prefix(prefix)?;
    if rest.is_empty() || rest.starts_with('0') || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

fn line_of(text: &str, key: &str) -> usize {
    let needle = format!("\"{key}\"");
    text.find(&needle).map(|at| text[..at].matches('\n').count() + 1).unwrap_or(0)
}

impl ConfigDoc {
    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        let Value::Object(map) = value else {
            return Err(Error::Config("line 1: config must be a JSON object".into()));
        };
        let mut doc = ConfigDoc { entries: BTreeMap::new(), lines: BTreeMap::new() };
        for (key, value) in map {
            let line = line_of(text, &key);
            if key == "type_probs" {
                let Value::Array(items) = value else {
                    return Err(Error::Config(format!("line {line}, key type_probs: expected an array")));
                };
                for (k, item) in items.into_iter().enumerate() {
                    let name = format!("p_{}", k + 1);
                    doc.lines.insert(name.clone(), line);
                    doc.entries.insert(name, item);
                }
                continue;
            }
            let known = SCALAR_KEYS.contains(&key.as_str())
                || indexed(&key, "p_").is_some()
                || indexed(&key, "benefit_scale_").is_some();
            if !known {
                return Err(Error::Config(format!("line {line}, key {key}: unrecognized key")));
            }
            doc.lines.insert(key.clone(), line);
            doc.entries.insert(key, value);
        }
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.entries.insert(key.to_string(), value);
    }

    fn fail(&self, key: &str, msg: impl std::fmt::Display) -> Error {
        match self.lines.get(key) {
            Some(line) => Error::Config(format!("line {line}, key {key}: {msg}")),
            None => Error::Config(format!("key {key}: {msg}")),
        }
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(Value::Number(n)) => Ok(n.as_f64()),
            Some(other) => Err(self.fail(key, format!("expected a number, got {other}"))),
        }
    }

    fn required(&self, key: &str) -> Result<f64> {
        self.number(key)?.ok_or_else(|| Error::Config(format!("missing key {key}")))
    }

    fn integer(&self, key: &str, default: u64) -> Result<u64> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(Value::Number(n)) => {
                n.as_u64().ok_or_else(|| self.fail(key, format!("expected a non-negative integer, got {n}")))
            }
            Some(other) => Err(self.fail(key, format!("expected an integer, got {other}"))),
        }
    }

    /// Number of types, from the contiguous `p_1..p_K` keys.
    pub fn num_types(&self) -> Result<usize> {
        let mut indices: Vec<usize> = self.entries.keys().filter_map(|k| indexed(k, "p_")).collect();
        indices.sort_unstable();
        if indices.is_empty() {
            return Err(Error::Config("missing key type_probs (or p_1..p_K)".into()));
        }
        for (expect, &got) in (1..).zip(&indices) {
            if expect != got {
                return Err(Error::Config(format!("missing key p_{expect}")));
            }
        }
        Ok(indices.len())
    }

    pub fn to_sim_config(&self) -> Result<SimConfig> {
        let k = self.num_types()?;
        let probs = (1..=k).map(|i| self.required(&format!("p_{i}"))).collect::<Result<Vec<_>>>()?;
        let base_scale = self.required("benefit_scale")?;
        let scales = (1..=k)
            .map(|i| Ok(self.number(&format!("benefit_scale_{i}"))?.unwrap_or(base_scale)))
            .collect::<Result<Vec<_>>>()?;
        if let Some(extra) =
            self.entries.keys().find(|key| indexed(key, "benefit_scale_").is_some_and(|i| i > k))
        {
            return Err(self.fail(extra, format!("only {k} types are configured")));
        }
        let params = ModelParams {
            type_probs: probs,
            alpha_max: self.required("alpha_max")?,
            alpha_decay: self.required("alpha_decay")?,
            benefit_scales: scales,
            link_cost: self.required("link_cost")?,
            gamma: self.required("gamma")?,
        };
        params.validate().map_err(|e| Error::Config(e.to_string()))?;
        let mut config = SimConfig::new(params, self.integer("horizon", 0)?);
        if !self.entries.contains_key("horizon") {
            return Err(Error::Config("missing key horizon".into()));
        }
        config.warmup = self.integer("warmup", 0)?;
        config.seed = self.integer("seed", 0)?;
        let reps = self.integer("replications", 1)?;
        config.replications = u32::try_from(reps).map_err(|_| self.fail("replications", "too large"))?;
        config.trajectory_sample = self.trajectory_sample()?;
        config.order = match self.entries.get("processing_order") {
            None => ProcessingOrder::Ascending,
            Some(Value::String(s)) if s == "ascending" => ProcessingOrder::Ascending,
            Some(Value::String(s)) if s == "shuffled" => ProcessingOrder::Shuffled,
            Some(other) => {
                return Err(self.fail(
                    "processing_order",
                    format!("expected \"ascending\" or \"shuffled\", got {other}"),
                ))
            }
        };
        match self.entries.get("record_meetings") {
            None => {}
            Some(Value::Bool(b)) => config.record.meetings = *b,
            Some(other) => {
                return Err(self.fail("record_meetings", format!("expected a boolean, got {other}")))
            }
        }
        config.validate().map_err(|e| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        })?;
        Ok(config)
    }

    fn trajectory_sample(&self) -> Result<TrajectorySample> {
        const KEY: &str = "trajectory_sample";
        let births: Vec<u64> = match self.entries.get(KEY) {
            None => return Ok(TrajectorySample::All),
            Some(Value::String(s)) if s == "all" => return Ok(TrajectorySample::All),
            Some(Value::String(s)) => s
                .split(',')
                .map(|b| b.trim().parse::<u64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| self.fail(KEY, format!("bad birth list {s:?}: {e}")))?,
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| v.as_u64().ok_or_else(|| self.fail(KEY, format!("bad birth {v}"))))
                .collect::<Result<_>>()?,
            Some(other) => {
                return Err(self.fail(KEY, format!("expected \"all\" or a birth list, got {other}")))
            }
        };
        if births.contains(&0) {
            return Err(self.fail(KEY, "births start at 1"));
        }
        Ok(TrajectorySample::Tracked(births))
    }

    /// Canonical flat form of a simulation config.
    pub fn from_sim_config(config: &SimConfig) -> Self {
        let mut entries = BTreeMap::new();
        let p = &config.params;
        let num = |x: f64| Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null);
        for (k, &prob) in p.type_probs.iter().enumerate() {
            entries.insert(format!("p_{}", k + 1), num(prob));
        }
        let base = p.benefit_scales.first().copied().unwrap_or(1.0);
        entries.insert("benefit_scale".into(), num(base));
        for (k, &a) in p.benefit_scales.iter().enumerate() {
            if a != base {
                entries.insert(format!("benefit_scale_{}", k + 1), num(a));
            }
        }
        entries.insert("alpha_max".into(), num(p.alpha_max));
        entries.insert("alpha_decay".into(), num(p.alpha_decay));
        entries.insert("link_cost".into(), num(p.link_cost));
        entries.insert("gamma".into(), num(p.gamma));
        entries.insert("horizon".into(), config.horizon.into());
        entries.insert("warmup".into(), config.warmup.into());
        entries.insert("seed".into(), config.seed.into());
        entries.insert("replications".into(), config.replications.into());
        let sample = match &config.trajectory_sample {
            TrajectorySample::All => Value::String("all".into()),
            TrajectorySample::Tracked(b) => Value::Array(b.iter().map(|&x| x.into()).collect()),
        };
        entries.insert("trajectory_sample".into(), sample);
        let order = match config.order {
            ProcessingOrder::Ascending => "ascending",
            ProcessingOrder::Shuffled => "shuffled",
        };
        entries.insert("processing_order".into(), Value::String(order.into()));
        entries.insert("record_meetings".into(), Value::Bool(config.record.meetings));
        ConfigDoc { entries, lines: BTreeMap::new() }
    }

    /// The entries as a key-sorted JSON object.
    pub fn to_value(&self) -> Value {
        Value::Object(self.entries.iter().map(|(k, v)| (k.clone(), v.clone())).collect::<Map<_, _>>())
    }

    /// Returns a copy with `key` set to `value`. Setting `p_k` rescales the
    /// other type probabilities so the total stays one; the returned note
    /// describes the rescaling.
    pub fn vary(&self, key: &str, value: f64) -> Result<(ConfigDoc, Option<String>)> {
        let sweepable = SWEEPABLE.contains(&key)
            || indexed(key, "benefit_scale_").is_some()
            || indexed(key, "p_").is_some();
        if !sweepable {
            return Err(Error::Config(format!(
                "key {key}: not a sweepable parameter (expected p_k, benefit_scale_k or one of {})",
                SWEEPABLE.join(", ")
            )));
        }
        let mut out = self.clone();
        let num = Number::from_f64(value)
            .ok_or_else(|| Error::Config(format!("key {key}: value {value} is not finite")))?;
        let Some(target) = indexed(key, "p_") else {
            out.set(key, Value::Number(num));
            return Ok((out, None));
        };
        let k = self.num_types()?;
        if target > k {
            return Err(Error::Config(format!("key {key}: only {k} types are configured")));
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Config(format!("key {key}: probability {value} outside [0, 1]")));
        }
        let others: f64 = (1..=k)
            .filter(|&i| i != target)
            .map(|i| self.required(&format!("p_{i}")))
            .sum::<Result<f64>>()?;
        if others <= 0.0 {
            return Err(Error::Config(format!("key {key}: no remaining mass to rescale")));
        }
        let factor = (1.0 - value) / others;
        for i in (1..=k).filter(|&i| i != target) {
            let name = format!("p_{i}");
            let p = self.required(&name)? * factor;
            out.set(&name, Number::from_f64(p).map(Value::Number).unwrap_or(Value::Null));
        }
        out.set(key, Value::Number(num));
        let note = format!("{key}={value}: other type probabilities scaled by {factor}");
        Ok((out, Some(note)))
    }
}

pub fn load_config(path: &Path) -> Result<SimConfig> {
    ConfigDoc::load(path)?.to_sim_config()
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
  "p_1": 0.5,
  "p_2": 0.5,
  "alpha_max": 1.0,
  "alpha_decay": 1.0,
  "benefit_scale": 1.0,
  "link_cost": 0.2,
  "gamma": 0.0,
  "horizon": 100
}"#;

    fn err(text: &str) -> String {
        ConfigDoc::parse(text).and_then(|d| d.to_sim_config()).unwrap_err().to_string()
    }

    #[test]
    fn parses_minimal_config() {
        let c = ConfigDoc::parse(BASE).unwrap().to_sim_config().unwrap();
        assert_eq!(c.params.type_probs, vec![0.5, 0.5]);
        assert_eq!(c.horizon, 100);
        assert_eq!(c.replications, 1);
        assert_eq!(c.trajectory_sample, TrajectorySample::All);
    }

    #[test]
    fn type_probs_array_and_overrides() {
        let text = BASE.replace("\"p_1\": 0.5,\n  \"p_2\": 0.5,", "\"type_probs\": [0.7, 0.3],").replace(
            "\"horizon\": 100",
            "\"horizon\": 100, \"benefit_scale_2\": 1.4, \"trajectory_sample\": \"10, 20\"",
        );
        let c = ConfigDoc::parse(&text).unwrap().to_sim_config().unwrap();
        assert_eq!(c.params.type_probs, vec![0.7, 0.3]);
        assert_eq!(c.params.benefit_scales, vec![1.0, 1.4]);
        assert_eq!(c.trajectory_sample, TrajectorySample::Tracked(vec![10, 20]));
    }

    #[test]
    fn diagnostics_name_line_and_key() {
        let e = err(&BASE.replace("\"p_2\": 0.5,\n", ""));
        assert!(e.contains("type probabilities sum to 0.5"), "{e}");
        let e = err(&BASE.replace("\"p_1\": 0.5,\n  \"p_2\": 0.5,\n", ""));
        assert!(e.contains("missing key type_probs"), "{e}");
        let e = err(&BASE.replace("\"gamma\": 0.0", "\"gamma\": \"high\""));
        assert!(e.contains("line 8, key gamma"), "{e}");
        let e = err(&BASE.replace("\"gamma\"", "\"gama\""));
        assert!(e.contains("line 8, key gama: unrecognized"), "{e}");
        let e = err("{\n  \"p_1\": 1.0,\n  oops\n}");
        assert!(e.contains("line 3"), "{e}");
    }

    #[test]
    fn key_order_does_not_change_hash() {
        let reordered = r#"{"horizon": 100, "gamma": 0.0, "link_cost": 0.2, "benefit_scale": 1.0,
            "alpha_decay": 1.0, "alpha_max": 1.0, "p_2": 0.5, "p_1": 0.5}"#;
        let a = ConfigDoc::parse(BASE).unwrap().to_sim_config().unwrap();
        let b = ConfigDoc::parse(reordered).unwrap().to_sim_config().unwrap();
        assert_eq!(a.hash(), b.hash());
    }

    #[test]
    fn canonical_form_round_trips() {
        let mut c = ConfigDoc::parse(BASE).unwrap().to_sim_config().unwrap();
        c.params.benefit_scales = vec![0.8, 1.4];
        c.trajectory_sample = TrajectorySample::Tracked(vec![3, 9]);
        c.order = ProcessingOrder::Shuffled;
        let text = ConfigDoc::from_sim_config(&c).to_value().to_string();
        assert_eq!(ConfigDoc::parse(&text).unwrap().to_sim_config().unwrap(), c);
    }

    #[test]
    fn varying_a_probability_rescales_the_rest() {
        let text = BASE.replace("\"p_2\": 0.5,", "\"p_2\": 0.25, \"p_3\": 0.25,");
        let doc = ConfigDoc::parse(&text).unwrap();
        let (v, note) = doc.vary("p_1", 0.8).unwrap();
        let c = v.to_sim_config().unwrap();
        assert!((c.params.type_probs[1] - 0.1).abs() < 1e-12);
        assert!((c.params.type_probs[2] - 0.1).abs() < 1e-12);
        assert!(note.unwrap().starts_with("p_1=0.8: other type probabilities scaled by"));
        assert!(doc.vary("horizon", 5.0).is_err());
        assert!(doc.vary("p_4", 0.5).is_err());
        let (g, none) = doc.vary("gamma", 0.5).unwrap();
        assert_eq!(g.to_sim_config().unwrap().params.gamma, 0.5);
        assert!(none.is_none());
    }
}
