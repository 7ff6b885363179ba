use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use netform::io::{load_config, write_logs, RunManifest};
use netform::sim::run_ensemble;
use netform::SimConfig;

use crate::error::{CliError, CliResult};

pub fn load(path: &Path) -> CliResult<SimConfig> {
    if !path.exists() {
        return Err(CliError::MissingInput(path.display().to_string()));
    }
    Ok(load_config(path)?)
}

pub fn run(config: &Path, seed: Option<u64>, replications: Option<u32>, out: &Path) -> CliResult<ExitCode> {
    let mut config = load(config)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(r) = replications {
        config.replications = r;
    }
    config.validate()?;
    let start = Instant::now();
    let ensemble = run_ensemble(&config)?;
    let files = write_logs(out, &ensemble.replications)?;
    let manifest = RunManifest::new(&config, ensemble.seeds, &files, start.elapsed().as_secs_f64());
    let path = manifest.write(out)?;
    crate::emit(&format!(
        "wrote {} replications of {} steps to {} ({})\n",
        config.replications,
        config.horizon,
        out.display(),
        path.display()
    ));
    Ok(ExitCode::SUCCESS)
}
