use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use netform::analytics::{estimate_elft, oracle_elft, Regime, Stratum};
use netform::io::{format_float, ConfigDoc, RunManifest};
use netform::sim::{run_ensemble_map, RecordOptions, TrajectorySample};

use crate::error::{CliError, CliResult};

pub const SWEEP_CSV: &str = "sweep.csv";

fn parse_vary(spec: &str) -> CliResult<(String, Vec<f64>)> {
    let (key, values) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--vary expects key=v1,v2,..., got {spec:?}")))?;
    let values: Vec<f64> = values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse().map_err(|_| CliError::Config(format!("--vary {key}: {v:?} is not a number"))))
        .collect::<CliResult<_>>()?;
    if values.is_empty() {
        return Err(CliError::Config(format!("--vary {key}: empty value list")));
    }
    Ok((key.trim().to_string(), values))
}

pub fn run(config: &Path, vary: &str, out: &Path) -> CliResult<ExitCode> {
    if !config.exists() {
        return Err(CliError::MissingInput(config.display().to_string()));
    }
    let doc = ConfigDoc::load(config)?;
    let base = doc.to_sim_config()?;
    let (key, values) = parse_vary(vary)?;
    let variants = values.iter().map(|&v| doc.vary(&key, v)).collect::<netform::Result<Vec<_>>>()?;
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let start = Instant::now();
    let path = out.join(SWEEP_CSV);
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record([
        "key",
        "value",
        "type",
        "homophily",
        "gregariousness",
        "elft",
        "ci_low",
        "ci_high",
        "samples",
        "oracle_elft",
    ])?;
    let mut notes =
        vec![format!("every value shares seed {} so sub-runs use common random numbers", base.seed)];
    for (&value, (variant, note)) in values.iter().zip(&variants) {
        notes.extend(note.clone());
        let mut c = variant.to_sim_config()?;
        c.record = RecordOptions { meetings: false, edges: false };
        c.trajectory_sample = TrajectorySample::Tracked(Vec::new());
        let agents: Vec<_> = run_ensemble_map(&c, |r| r.agents)?.into_iter().flatten().collect();
        let homophily = c.params.homophily_indices()?;
        let oracle = match Regime::classify(&c.params)? {
            Some(r) => Some(oracle_elft(&c.params, r)?),
            None => None,
        };
        for ty in c.params.types() {
            let mut s = Stratum::born_after(c.warmup).with_type(ty);
            s.birth_max = Some(c.horizon.saturating_sub((c.horizon / 10).max(1)));
            let est = estimate_elft(&agents, &s).ok();
            let f = |x: Option<f64>| x.map(format_float).unwrap_or_default();
            w.write_record([
                key.clone(),
                format_float(value),
                ty.to_string(),
                format_float(homophily[ty.index()]),
                c.params.own_gregariousness(ty)?.to_string(),
                f(est.map(|e| e.mean)),
                f(est.map(|e| e.ci_low)),
                f(est.map(|e| e.ci_high)),
                est.map(|e| e.samples.to_string()).unwrap_or_default(),
                f(oracle.as_ref().map(|o| o[ty.index()].elft)),
            ])?;
        }
    }
    w.flush()?;
    let seeds = (0..base.replications).map(|r| (base.seed, u64::from(r))).collect();
    let mut manifest =
        RunManifest::new(&base, seeds, std::slice::from_ref(&path), start.elapsed().as_secs_f64());
    notes.insert(
        0,
        format!(
            "sweep over {key} = {}",
            values.iter().map(|v| format_float(*v)).collect::<Vec<_>>().join(",")
        ),
    );
    manifest.notes = notes;
    manifest.write(out)?;
    crate::emit(&format!("wrote {} sweep values to {}\n", values.len(), path.display()));
    Ok(ExitCode::SUCCESS)
}
