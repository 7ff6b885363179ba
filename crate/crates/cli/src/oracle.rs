use std::fmt::Write;
use std::path::Path;
use std::process::ExitCode;

use netform::analytics::{GrowthLaw, OracleReport};
use netform::io::format_float;

use crate::error::{CliError, CliResult};
use crate::simulate::load;

fn law(l: &GrowthLaw) -> String {
    match l {
        GrowthLaw::Power { exponent } => format!("power, exponent {}", format_float(*exponent)),
        GrowthLaw::Log { scale } => format!("log, scale {}", format_float(*scale)),
    }
}

pub fn run(config: &Path, json_only: bool) -> CliResult<ExitCode> {
    let config = load(config)?;
    let report = OracleReport::build(&config.params)?;
    let doc = serde_json::to_string_pretty(&report).map_err(|e| CliError::Other(e.to_string()))?;
    if json_only {
        crate::emit(&format!("{doc}\n"));
        return Ok(ExitCode::SUCCESS);
    }
    let r = &report;
    let mut out = String::new();
    writeln!(out, "type  p        h        L*(own)").unwrap();
    for (k, h) in r.homophily.iter().enumerate() {
        writeln!(
            out,
            "{:<5} {:<8} {:<8} {}",
            k + 1,
            format_float(config.params.type_probs[k]),
            format_float(*h),
            r.gregariousness[k][k]
        )
        .unwrap();
    }
    writeln!(out, "L* table (row: seeker type, column: friend type):").unwrap();
    for row in &r.gregariousness {
        writeln!(out, "  {}", row.iter().map(|l| format!("{l:>3}")).collect::<String>()).unwrap();
    }
    writeln!(out, "mean gregariousness: {}", format_float(r.mean_gregariousness)).unwrap();
    writeln!(out, "regime: {}", r.regime.map(|g| g.label()).unwrap_or("interior")).unwrap();
    for e in &r.elft {
        let alt = e.alternative.map(|a| format!(" (with L*(θ,0): {})", format_float(a))).unwrap_or_default();
        writeln!(out, "ELFT type {}: {}{alt}", e.ty, format_float(e.elft)).unwrap();
    }
    for (gamma, laws) in [(0, &r.growth_gamma0), (1, &r.growth_gamma1)] {
        for g in laws {
            let who = g.ty.map(|t| format!("type {t}")).unwrap_or_else(|| "all".into());
            let flag = if g.degenerate { " [degenerate]" } else { "" };
            writeln!(out, "growth at γ={gamma}, {who}: {}{flag}", law(&g.law)).unwrap();
        }
    }
    if let Some(m) = r.crossover_multiplier {
        writeln!(out, "crossover multiplier: {} (birth 20 → {})", format_float(m), format_float(20.0 * m))
            .unwrap();
    }
    for w in &r.warnings {
        writeln!(out, "warning: {w}").unwrap();
    }
    out.push_str(&doc);
    out.push('\n');
    crate::emit(&out);
    Ok(ExitCode::SUCCESS)
}
