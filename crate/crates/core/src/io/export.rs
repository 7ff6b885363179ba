//! CSV export and import of replication logs. Every file carries a leading
//! `replication` column so an ensemble fits in one table.

use std::fs::File;
use std::path::{Path, PathBuf};

use csv::{ReaderBuilder, StringRecord, Writer};

use crate::decision::AgentRecord;
use crate::error::{Error, Result};
use crate::graph::AgentId;
use crate::meeting::{MeetingEvent, Pool};
use crate::model::TypeId;
use crate::sim::{EdgeRecord, Grid, MeetingRecord, ReplicationResult, Trajectory};

pub const AGENTS_CSV: &str = "agents.csv";
pub const EDGES_CSV: &str = "edges.csv";
pub const MEETINGS_CSV: &str = "meetings.csv";
pub const TRAJECTORIES_CSV: &str = "trajectories.csv";
pub const LOG_FILES: [&str; 4] = [AGENTS_CSV, EDGES_CSV, MEETINGS_CSV, TRAJECTORIES_CSV];

const AGENT_HEADER: [&str; 9] = [
    "replication",
    "id",
    "type",
    "birth",
    "lft",
    "final_indegree",
    "final_outdegree",
    "censored",
    "saturated_at",
];
const EDGE_HEADER: [&str; 4] = ["replication", "source", "target", "step_formed"];
const MEETING_HEADER: [&str; 8] =
    ["replication", "step", "seeker", "met", "pool", "met_indegree", "met_type", "linked"];
const TRAJECTORY_HEADER: [&str; 4] = ["replication", "agent", "step", "indegree"];

/// Shortest decimal that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

struct Table {
    path: PathBuf,
    writer: Writer<File>,
}

impl Table {
    fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self> {
        let path = dir.join(name);
        let writer = Writer::from_path(&path).map_err(|e| Error::csv(&path, e))?;
        let mut t = Table { path, writer };
        t.row(header)?;
        Ok(t)
    }

    fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(|e| Error::csv(&self.path, e))
    }

    fn finish(mut self) -> Result<PathBuf> {
        self.writer.flush().map_err(|e| Error::io(&self.path, e))?;
        Ok(self.path)
    }
}

/// Writes the four log tables into `dir` and returns their paths.
pub fn write_logs(dir: &Path, replications: &[ReplicationResult]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut agents = Table::create(dir, AGENTS_CSV, &AGENT_HEADER)?;
    let mut edges = Table::create(dir, EDGES_CSV, &EDGE_HEADER)?;
    let mut meetings = Table::create(dir, MEETINGS_CSV, &MEETING_HEADER)?;
    let mut trajs = Table::create(dir, TRAJECTORIES_CSV, &TRAJECTORY_HEADER)?;
    for rep in replications {
        let r = rep.replication.to_string();
        for a in &rep.agents {
            agents.row([
                r.clone(),
                a.id.to_string(),
                a.ty.to_string(),
                a.birth.to_string(),
                opt(a.lft),
                a.final_indegree.to_string(),
                a.final_outdegree.to_string(),
                a.censored.to_string(),
                opt(a.deactivated_at),
            ])?;
        }
        for e in &rep.edges {
            edges.row([r.clone(), e.source.to_string(), e.target.to_string(), e.step.to_string()])?;
        }
        for m in &rep.meetings {
            let ev = &m.event;
            meetings.row([
                r.clone(),
                ev.step.to_string(),
                ev.seeker.to_string(),
                ev.met.to_string(),
                ev.pool.as_str().to_string(),
                ev.met_indegree.to_string(),
                ev.met_type.to_string(),
                m.linked.to_string(),
            ])?;
        }
        for t in &rep.trajectories {
            for (step, d) in t.iter() {
                trajs.row([r.clone(), t.agent.to_string(), step.to_string(), d.to_string()])?;
            }
        }
    }
    [agents, edges, meetings, trajs].into_iter().map(Table::finish).collect()
}

struct Rows {
    path: PathBuf,
    reader: csv::Reader<File>,
    line: u64,
}

impl Rows {
    fn open(dir: &Path, name: &str, header: &[&str]) -> Result<Self> {
        let path = dir.join(name);
        if !path.exists() {
            return Err(Error::MissingInput(path));
        }
        let mut reader = ReaderBuilder::new().from_path(&path).map_err(|e| Error::csv(&path, e))?;
        let found = reader.headers().map_err(|e| Error::csv(&path, e))?;
        if found.iter().ne(header.iter().copied()) {
            return Err(Error::Domain(format!(
                "{}: expected header {}, found {}",
                path.display(),
                header.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            )));
        }
        Ok(Rows { path, reader, line: 1 })
    }

    fn next(&mut self) -> Result<Option<StringRecord>> {
        let mut rec = StringRecord::new();
        let more = self.reader.read_record(&mut rec).map_err(|e| Error::csv(&self.path, e))?;
        self.line += 1;
        Ok(more.then_some(rec))
    }

    fn bad(&self, col: &str, raw: &str) -> Error {
        Error::Domain(format!("{} line {}: bad {col} value {raw:?}", self.path.display(), self.line))
    }

    fn field<T: std::str::FromStr>(&self, rec: &StringRecord, n: usize, col: &str) -> Result<T> {
        let raw = rec.get(n).unwrap_or("");
        raw.parse().map_err(|_| self.bad(col, raw))
    }

    fn optional<T: std::str::FromStr>(&self, rec: &StringRecord, n: usize, col: &str) -> Result<Option<T>> {
        match rec.get(n).unwrap_or("") {
            "" => Ok(None),
            raw => raw.parse().map(Some).map_err(|_| self.bad(col, raw)),
        }
    }

    fn ty(&self, rec: &StringRecord, n: usize) -> Result<TypeId> {
        let v: u16 = self.field(rec, n, "type")?;
        if v == 0 {
            return Err(self.bad("type", "0"));
        }
        Ok(TypeId::from_index(usize::from(v - 1)))
    }
}

fn slot(reps: &mut Vec<ReplicationResult>, r: u32) -> &mut ReplicationResult {
    let n = r as usize;
    while reps.len() <= n {
        let replication = reps.len() as u32;
        reps.push(ReplicationResult {
            replication,
            agents: Vec::new(),
            edges: Vec::new(),
            meetings: Vec::new(),
            trajectories: Vec::new(),
        });
    }
    &mut reps[n]
}

/// Reads logs written by [`write_logs`]. A missing file is
/// [`Error::MissingInput`].
pub fn read_logs(dir: &Path) -> Result<Vec<ReplicationResult>> {
    let mut reps: Vec<ReplicationResult> = Vec::new();

    let mut rows = Rows::open(dir, AGENTS_CSV, &AGENT_HEADER)?;
    while let Some(rec) = rows.next()? {
        let r: u32 = rows.field(&rec, 0, "replication")?;
        let id = AgentId(rows.field(&rec, 1, "id")?);
        let mut a = AgentRecord::new(id, rows.ty(&rec, 2)?);
        let birth: u64 = rows.field(&rec, 3, "birth")?;
        if birth != a.birth {
            return Err(rows.bad("birth", &birth.to_string()));
        }
        a.lft = rows.optional(&rec, 4, "lft")?;
        a.last_link_step = a.lft.map(|t| t + birth - 1);
        a.final_indegree = rows.field(&rec, 5, "final_indegree")?;
        a.final_outdegree = rows.field(&rec, 6, "final_outdegree")?;
        a.links_formed = a.final_outdegree;
        a.censored = rows.field(&rec, 7, "censored")?;
        a.deactivated_at = rows.optional(&rec, 8, "saturated_at")?;
        let agents = &mut slot(&mut reps, r).agents;
        if agents.len() as u64 + 1 != birth {
            return Err(rows.bad("id", &id.to_string()));
        }
        agents.push(a);
    }

    let mut rows = Rows::open(dir, EDGES_CSV, &EDGE_HEADER)?;
    while let Some(rec) = rows.next()? {
        let r: u32 = rows.field(&rec, 0, "replication")?;
        let e = EdgeRecord {
            source: AgentId(rows.field(&rec, 1, "source")?),
            target: AgentId(rows.field(&rec, 2, "target")?),
            step: rows.field(&rec, 3, "step_formed")?,
        };
        slot(&mut reps, r).edges.push(e);
    }

    let mut rows = Rows::open(dir, MEETINGS_CSV, &MEETING_HEADER)?;
    while let Some(rec) = rows.next()? {
        let r: u32 = rows.field(&rec, 0, "replication")?;
        let raw_pool = rec.get(4).unwrap_or("");
        let pool = Pool::parse(raw_pool).ok_or_else(|| rows.bad("pool", raw_pool))?;
        let m = MeetingRecord {
            event: MeetingEvent {
                step: rows.field(&rec, 1, "step")?,
                seeker: AgentId(rows.field(&rec, 2, "seeker")?),
                met: AgentId(rows.field(&rec, 3, "met")?),
                pool,
                met_indegree: rows.field(&rec, 5, "met_indegree")?,
                met_type: rows.ty(&rec, 6)?,
            },
            linked: rows.field(&rec, 7, "linked")?,
        };
        slot(&mut reps, r).meetings.push(m);
    }

    let mut rows = Rows::open(dir, TRAJECTORIES_CSV, &TRAJECTORY_HEADER)?;
    let mut samples: Vec<(u32, u32, u64, u32)> = Vec::new();
    while let Some(rec) = rows.next()? {
        samples.push((
            rows.field(&rec, 0, "replication")?,
            rows.field(&rec, 1, "agent")?,
            rows.field(&rec, 2, "step")?,
            rows.field(&rec, 3, "indegree")?,
        ));
    }
    for group in samples.chunk_by(|a, b| a.0 == b.0 && a.1 == b.1) {
        let (r, agent) = (group[0].0, AgentId(group[0].1));
        let rep = slot(&mut reps, r);
        let ty = rep.agent(agent).map(|a| a.ty).ok_or(Error::UnknownAgent(agent))?;
        let steps: Vec<u64> = group.iter().map(|s| s.2).collect();
        let dense = steps.windows(2).all(|w| w[1] == w[0] + 1) && steps[0] == agent.birth();
        let grid = if dense { Grid::Dense { start: steps[0] } } else { Grid::Sparse(steps) };
        rep.trajectories.push(Trajectory { agent, ty, grid, indegree: group.iter().map(|s| s.3).collect() });
    }
    Ok(reps)
}
