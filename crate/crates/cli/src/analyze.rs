use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::ValueEnum;
use netform::analytics::{
    crossover_time, default_window, estimate_attachment_kernel, estimate_elft, excess_representation,
    fit_tail, fosd_test, lft_pmf, mean_trajectory, oracle_crossover, oracle_elft, oracle_growth, GrowthLaw,
    GrowthModel, KernelKind, KernelStratum, Regime, Stratum, Verdict,
};
use netform::io::{read_logs, RunManifest};
use netform::sim::{ReplicationResult, TrajectorySample};
use netform::{AgentId, SimConfig, TypeId};

use crate::error::{CliError, CliResult};
use crate::report::{self, Row, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum CheckName {
    Elft,
    Fosd,
    Growth,
    Kernel,
    Excess,
    Crossover,
    Invariants,
}

struct Run {
    dir: PathBuf,
    manifest: RunManifest,
    config: SimConfig,
    reps: Vec<ReplicationResult>,
}

impl Run {
    fn load(dir: &Path) -> CliResult<Run> {
        if !dir.is_dir() {
            return Err(CliError::MissingInput(dir.display().to_string()));
        }
        let manifest = RunManifest::read(dir)?;
        if let Some(missing) = manifest.missing_files(dir).first() {
            return Err(CliError::MissingInput(missing.display().to_string()));
        }
        let config = manifest.sim_config()?;
        let reps = read_logs(dir)?;
        Ok(Run { dir: dir.to_path_buf(), manifest, config, reps })
    }

    fn gamma(&self) -> f64 {
        self.config.params.gamma
    }

    fn regime(&self) -> CliResult<Option<Regime>> {
        Ok(Regime::classify(&self.config.params)?)
    }

    /// Agents whose LFT is unlikely to be cut off by the horizon.
    fn lft_stratum(&self, ty: TypeId) -> Stratum {
        let c = &self.config;
        let mut s = Stratum::born_after(c.warmup).with_type(ty);
        s.birth_max = Some(c.horizon.saturating_sub((c.horizon / 10).max(1)));
        s.gamma = Some(c.params.gamma);
        s
    }

    fn agents(&self) -> impl Iterator<Item = &netform::decision::AgentRecord> {
        self.reps.iter().flat_map(|r| r.agents.iter())
    }

    fn tracked_births(&self) -> Vec<u64> {
        match &self.config.trajectory_sample {
            TrajectorySample::Tracked(b) => {
                let mut b = b.clone();
                b.sort_unstable();
                b.dedup();
                b
            }
            TrajectorySample::All => Vec::new(),
        }
    }

    /// Replications whose agents born at `births` have the given types.
    fn conditioned(&self, births: &[(u64, Option<TypeId>)]) -> Vec<&ReplicationResult> {
        self.reps
            .iter()
            .filter(|r| {
                births
                    .iter()
                    .all(|&(b, ty)| r.agent(AgentId(b as u32)).is_some_and(|a| ty.is_none_or(|t| a.ty == t)))
            })
            .collect()
    }
}

fn mean_of<'a>(
    reps: impl IntoIterator<Item = &'a ReplicationResult>,
    birth: u64,
) -> netform::Result<netform::analytics::MeanTrajectory> {
    mean_trajectory(reps.into_iter().filter_map(|r| r.trajectory(AgentId(birth as u32))))
}

fn failed(check: &'static str, stratum: impl Into<String>, e: impl std::fmt::Display) -> Row {
    Row::new(check, stratum).status(Status::Fail).note(e.to_string())
}

fn elft(a: &Run) -> CliResult<Vec<Row>> {
    let regime = a.regime()?;
    let params = &a.config.params;
    let predictions = match regime {
        Some(r) => Some(oracle_elft(params, r)?),
        None => None,
    };
    let mut rows = Vec::new();
    for ty in params.types() {
        let stratum = a.lft_stratum(ty);
        let label = format!("type {ty}");
        let est = match estimate_elft(a.agents(), &stratum) {
            Ok(e) => e,
            Err(e) => {
                rows.push(failed("elft", label, e));
                continue;
            }
        };
        let row = Row::new("elft", label).estimate(est.mean).ci(est.ci_low, est.ci_high).samples(est.samples);
        let Some(pred) = predictions.as_ref().map(|p| &p[ty.index()]) else {
            rows.push(row.note("interior homophily: no closed form"));
            continue;
        };
        let row = row.oracle(pred.elft);
        rows.push(match pred.regime {
            Regime::H0 => {
                let dist = lft_pmf(a.agents(), &stratum)?;
                let exact = dist.is_point_mass() && dist.support[0] as f64 == pred.elft;
                row.pass(exact).note(format!("support {:?}", dist.support))
            }
            Regime::H1 => {
                let rel = est.relative_error(pred.elft);
                let alt = pred.alternative.map(|x| format!("; with L*(θ,0): {x:.4}")).unwrap_or_default();
                row.pass(rel <= 0.05).note(format!("relative error {rel:.4}{alt}"))
            }
        });
    }
    Ok(rows)
}

fn fosd(a: &Run, b: Option<&Run>) -> CliResult<Vec<Row>> {
    let b = b.ok_or_else(|| CliError::Config("check fosd needs --compare <results dir>".into()))?;
    if a.gamma() == b.gamma() {
        return Ok(vec![Row::new("fosd", "all").note("both runs share γ; nothing to order")]);
    }
    let (hi, lo) = if a.gamma() > b.gamma() { (a, b) } else { (b, a) };
    let homophily = a.config.params.homophily_indices()?;
    let mut rows = Vec::new();
    for ty in a.config.params.types() {
        let label = format!("type {ty}, γ={} vs γ={}", hi.gamma(), lo.gamma());
        let (dh, dl) =
            match (lft_pmf(hi.agents(), &hi.lft_stratum(ty)), lft_pmf(lo.agents(), &lo.lft_stratum(ty))) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(e), _) | (_, Err(e)) => {
                    rows.push(failed("fosd", label, e));
                    continue;
                }
            };
        let r = fosd_test(&dh, &dl, None);
        let expected = if homophily[ty.index()] > 0.0 { Verdict::ADominates } else { Verdict::Neither };
        rows.push(
            Row::new("fosd", label)
                .estimate(r.max_gap())
                .samples(dh.sample_count.min(dl.sample_count))
                .oracle(r.epsilon)
                .pass(r.verdict == expected)
                .note(format!("verdict {:?}, expected {expected:?}", r.verdict)),
        );
    }
    Ok(rows)
}

fn growth(a: &Run) -> CliResult<Vec<Row>> {
    let Some(regime) = a.regime()? else {
        return Ok(vec![Row::new("growth", "all").note("interior homophily: no closed form")]);
    };
    let laws = match oracle_growth(&a.config.params, regime) {
        Ok(l) => l,
        Err(e) => return Ok(vec![Row::new("growth", "all").note(e.to_string())]),
    };
    let births = a.tracked_births();
    if births.is_empty() {
        return Ok(vec![failed("growth", "all", "no tracked trajectories (set trajectory_sample)")]);
    }
    let mut rows = Vec::new();
    for law in &laws {
        for &birth in &births {
            let label = match law.ty {
                Some(t) => format!("type {t}, born {birth}"),
                None => format!("born {birth}"),
            };
            let reps = a.conditioned(&[(birth, law.ty)]);
            let fits = mean_of(reps.iter().copied(), birth).and_then(|m| {
                Ok((
                    fit_tail(&m, birth, GrowthModel::Power, 60)?,
                    fit_tail(&m, birth, GrowthModel::Log, 60)?,
                    m.count,
                ))
            });
            let (power, log, n) = match fits {
                Ok(f) => f,
                Err(e) => {
                    rows.push(failed("growth", label, e));
                    continue;
                }
            };
            let row = Row::new("growth", label).samples(n);
            rows.push(match law.law {
                GrowthLaw::Power { exponent } => row
                    .estimate(power.parameter)
                    .oracle(exponent)
                    .pass((power.parameter - exponent).abs() <= 0.1 && power.r_squared >= 0.95)
                    .note(format!("power fit R2 {:.4}", power.r_squared)),
                GrowthLaw::Log { scale } => row
                    .estimate(log.parameter)
                    .oracle(scale)
                    .pass(
                        log.r_squared >= 0.95
                            && (log.parameter - scale).abs() <= 0.3 * scale
                            && log.r_squared > power.r_squared,
                    )
                    .note(format!("log fit R2 {:.4}, power fit R2 {:.4}", log.r_squared, power.r_squared)),
            });
        }
    }
    Ok(rows)
}

fn kernel(a: &Run) -> CliResult<Vec<Row>> {
    if a.reps.iter().all(|r| r.meetings.is_empty()) {
        return Ok(vec![failed("kernel", "all", "meeting log is empty")]);
    }
    let (from, to) = (a.config.horizon / 2, a.config.horizon);
    let mut rows = Vec::new();
    let gamma = a.gamma();
    let kind = if gamma < 1.0 { KernelKind::Linked } else { KernelKind::Met };
    let label = format!("{kind:?} kernel, steps {from}-{to}").to_lowercase();
    match estimate_attachment_kernel(&a.reps, &KernelStratum::new(kind, from, to)) {
        Ok(k) => {
            let f = k.fit;
            let row = Row::new("kernel", label).samples(k.qualifying_bins);
            rows.push(if gamma < 1.0 {
                row.estimate(f.r_squared)
                    .oracle(0.9)
                    .pass(f.r_squared >= 0.9)
                    .note(format!("linear fit R2, slope {:.3e}", f.slope))
            } else {
                row.estimate(f.slope)
                    .ci(f.slope - 1.96 * f.slope_se, f.slope + 1.96 * f.slope_se)
                    .oracle(0.0)
                    .pass(f.slope.abs() <= 1.96 * f.slope_se)
                    .note("slope of meeting probability on indegree")
            });
        }
        Err(e) => rows.push(failed("kernel", label, e)),
    }
    let homophily = a.config.params.homophily_indices()?;
    if homophily.iter().all(|&h| h == 1.0) {
        for k in a.config.params.types() {
            for m in a.config.params.types().filter(|&m| m != k) {
                let mut s = KernelStratum::new(KernelKind::Linked, from, to).between(k, m);
                s.min_events = 0;
                let label = format!("cross-type {k}->{m}");
                rows.push(match estimate_attachment_kernel(&a.reps, &s) {
                    Ok(est) => {
                        let max = est.max_probability();
                        Row::new("kernel", label)
                            .estimate(max)
                            .oracle(0.0)
                            .samples(est.bins.len())
                            .pass(max <= 1e-3)
                            .note("max link probability over degrees")
                    }
                    Err(e) => failed("kernel", label, e),
                });
            }
        }
    }
    Ok(rows)
}

fn excess(a: &Run) -> CliResult<Vec<Row>> {
    let params = &a.config.params;
    let homophily = params.homophily_indices()?;
    let mut rows = Vec::new();
    for k in params.types() {
        for m in params.types() {
            let label = format!("seeker {k}, friend {m}");
            let r = match excess_representation(&a.reps, k, m, a.config.warmup) {
                Ok(r) => r,
                Err(e) => {
                    rows.push(failed("excess", label, e));
                    continue;
                }
            };
            let expected = match homophily[k.index()] {
                1.0 => Some(if k == m { 1.0 } else { 0.0 }),
                0.0 => Some(1.0),
                _ => None,
            };
            let row = Row::new("excess", label).estimate(r);
            rows.push(match expected {
                Some(x) => row.oracle(x).pass(r == x),
                None => row.note("interior homophily: reported only"),
            });
        }
    }
    Ok(rows)
}

fn crossover(a: &Run, b: Option<&Run>) -> CliResult<Vec<Row>> {
    let births = a.tracked_births();
    if births.len() < 2 && b.is_none() {
        return Ok(vec![failed("crossover", "all", "need at least two tracked births")]);
    }
    let window = default_window(a.config.horizon);
    let params = &a.config.params;
    let mut rows = Vec::new();
    let regime = a.regime()?;
    let pairs: Vec<(u64, u64)> =
        births.iter().enumerate().flat_map(|(n, &i)| births[n + 1..].iter().map(move |&j| (i, j))).collect();
    for &(older, younger) in &pairs {
        let combos: Vec<(Option<TypeId>, Option<TypeId>)> = match regime {
            Some(Regime::H1) => {
                params.types().flat_map(|s| params.types().map(move |t| (Some(s), Some(t)))).collect()
            }
            _ => vec![(None, None)],
        };
        for (ts, tt) in combos {
            let mut label = format!("born {older} vs {younger}");
            if let (Some(s), Some(t)) = (ts, tt) {
                label = format!("type {s} born {older} vs type {t} born {younger}");
            }
            let reps = a.conditioned(&[(older, ts), (younger, tt)]);
            let (mo, my) =
                match (mean_of(reps.iter().copied(), older), mean_of(reps.iter().copied(), younger)) {
                    (Ok(x), Ok(y)) => (x, y),
                    (Err(e), _) | (_, Err(e)) => {
                        rows.push(failed("crossover", label, e));
                        continue;
                    }
                };
            let t = crossover_time(&mo, &my, window);
            let row = Row::new("crossover", label)
                .samples(reps.len())
                .note(format!("crossover {t:?}, window {window}"));
            let row = match t {
                Some(t) => row.estimate(t as f64),
                None => row,
            };
            rows.push(match (regime, ts, tt) {
                (Some(Regime::H0), _, _) => row.pass(t.is_none()),
                (Some(Regime::H1), Some(s), Some(u)) => {
                    let overtakes = params.own_gregariousness(u)? > params.own_gregariousness(s)?;
                    row.pass(t.is_some() == overtakes)
                }
                _ => row,
            });
        }
    }
    if let Some(b) = b {
        rows.extend(gamma_crossover(a, b, window)?);
    }
    Ok(rows)
}

fn gamma_crossover(a: &Run, b: &Run, window: usize) -> CliResult<Vec<Row>> {
    let label = format!("γ={} vs γ={}", a.gamma(), b.gamma());
    let (one, zero) = match (a.gamma(), b.gamma()) {
        (g, h) if g == 1.0 && h == 0.0 => (a, b),
        (g, h) if g == 0.0 && h == 1.0 => (b, a),
        _ => return Ok(vec![Row::new("crossover", label).note("needs one γ=1 and one γ=0 run")]),
    };
    if a.regime()? != Some(Regime::H0) {
        return Ok(vec![Row::new("crossover", label).note("closed form needs h=0")]);
    }
    let lbar = a.config.params.mean_gregariousness()?;
    let births: BTreeSet<u64> = one.tracked_births().into_iter().collect();
    let shared: Vec<u64> = zero.tracked_births().into_iter().filter(|b| births.contains(b)).collect();
    let mut rows = Vec::new();
    for birth in shared {
        let stratum = format!("born {birth}, γ=1 vs γ=0");
        let (m1, m0) = match (mean_of(&one.reps, birth), mean_of(&zero.reps, birth)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(e), _) | (_, Err(e)) => {
                rows.push(failed("crossover", stratum, e));
                continue;
            }
        };
        let oracle = oracle_crossover(birth, lbar)?;
        let t = crossover_time(&m1, &m0, window);
        let row = Row::new("crossover", stratum).oracle(oracle).samples(m1.count.min(m0.count));
        rows.push(match t {
            Some(t) => {
                let ratio = t as f64 / oracle;
                row.estimate(t as f64)
                    .pass((1.0 / 1.5..=1.5).contains(&ratio))
                    .note(format!("ratio to oracle {ratio:.3}, window {window}"))
            }
            None => row.pass(false).note(format!("no crossover within horizon, window {window}")),
        });
    }
    Ok(rows)
}

fn invariants(a: &Run) -> CliResult<Vec<Row>> {
    let c = &a.config;
    let mut violations: Vec<(&'static str, String)> = Vec::new();
    let mut flag = |name: &'static str, msg: String| {
        if !violations.iter().any(|(n, _)| *n == name) {
            violations.push((name, msg));
        }
    };
    if a.reps.len() != c.replications as usize {
        flag("replication count", format!("{} logs for {} replications", a.reps.len(), c.replications));
    }
    if a.manifest.config_hash != c.hash() {
        flag("config hash", "manifest hash does not match its config echo".into());
    }
    for rep in &a.reps {
        let r = rep.replication;
        if rep.agents.len() as u64 != c.horizon {
            flag(
                "population",
                format!("replication {r}: {} agents, horizon {}", rep.agents.len(), c.horizon),
            );
        }
        let mut seen = BTreeSet::new();
        let mut out = vec![0u32; rep.agents.len()];
        let mut inn = vec![0u32; rep.agents.len()];
        for e in &rep.edges {
            let (s, t) = (e.source.0 as usize, e.target.0 as usize);
            if s == t || s == 0 || t == 0 || s > out.len() || t > out.len() {
                flag("edges", format!("replication {r}: bad edge {}->{}", e.source, e.target));
                continue;
            }
            if !seen.insert((s, t)) {
                flag("edges", format!("replication {r}: duplicate edge {s}->{t}"));
            }
            if e.step < e.source.birth() || e.step < e.target.birth() {
                flag("edges", format!("replication {r}: edge {s}->{t} predates an endpoint"));
            }
            out[s - 1] += 1;
            inn[t - 1] += 1;
        }
        for (n, ag) in rep.agents.iter().enumerate() {
            if c.record.edges && (ag.final_outdegree != out[n] || ag.final_indegree != inn[n]) {
                flag("degree sums", format!("replication {r}: agent {} degrees disagree with edges", ag.id));
            }
            if let (Some(lft), false) = (ag.lft, ag.censored) {
                if lft < u64::from(ag.final_outdegree) {
                    flag(
                        "lft",
                        format!(
                            "replication {r}: agent {} formed {} links in {lft} steps",
                            ag.id, ag.final_outdegree
                        ),
                    );
                }
            }
        }
        let total_out: u64 = rep.agents.iter().map(|x| u64::from(x.final_outdegree)).sum();
        let total_in: u64 = rep.agents.iter().map(|x| u64::from(x.final_indegree)).sum();
        if total_out != total_in {
            flag("degree sums", format!("replication {r}: sum deg+ {total_out} != sum deg- {total_in}"));
        }
        if c.record.meetings {
            let linked = rep.meetings.iter().filter(|m| m.linked).count();
            if c.record.edges && linked != rep.edges.len() {
                flag(
                    "meetings",
                    format!("replication {r}: {linked} linked meetings, {} edges", rep.edges.len()),
                );
            }
            if let Some(m) = rep
                .meetings
                .iter()
                .find(|m| m.event.seeker == m.event.met || m.event.seeker.birth() > m.event.step)
            {
                flag("meetings", format!("replication {r}: invalid meeting at step {}", m.event.step));
            }
        }
        for t in &rep.trajectories {
            if t.indegree.windows(2).any(|w| w[1] < w[0]) {
                flag("trajectories", format!("replication {r}: trajectory of {} decreases", t.agent));
            }
        }
    }
    let names = [
        "replication count",
        "config hash",
        "population",
        "edges",
        "degree sums",
        "lft",
        "meetings",
        "trajectories",
    ];
    Ok(names
        .iter()
        .map(|&name| {
            let hit = violations.iter().find(|(n, _)| *n == name);
            Row::new("invariants", name)
                .samples(a.reps.len())
                .pass(hit.is_none())
                .note(hit.map(|(_, m)| m.clone()).unwrap_or_default())
        })
        .collect())
}

pub fn run(
    results: &Path,
    checks: &[CheckName],
    compare: Option<&Path>,
    report_path: Option<&Path>,
) -> CliResult<ExitCode> {
    let a = Run::load(results)?;
    let b = compare.map(Run::load).transpose()?;
    let checks: BTreeSet<CheckName> = checks.iter().copied().collect();
    let mut rows = Vec::new();
    for check in checks {
        rows.extend(match check {
            CheckName::Elft => elft(&a)?,
            CheckName::Fosd => fosd(&a, b.as_ref())?,
            CheckName::Growth => growth(&a)?,
            CheckName::Kernel => kernel(&a)?,
            CheckName::Excess => excess(&a)?,
            CheckName::Crossover => crossover(&a, b.as_ref())?,
            CheckName::Invariants => invariants(&a)?,
        });
    }
    let path = report_path.map(Path::to_path_buf).unwrap_or_else(|| a.dir.join("report.csv"));
    report::write(&path, &rows)?;
    report::print(&rows);
    let failures = rows.iter().filter(|r| r.status == Status::Fail).count();
    crate::emit(&format!("{} rows, {failures} failed; report at {}\n", rows.len(), path.display()));
    Ok(if failures == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
