//! Arrival process, per-step orchestration and replication management.
//!
//! Each step one agent is born with a type drawn from `p`, then every active
//! agent meets exactly one other agent and decides whether to link. Within a
//! step seekers are processed in ascending birth order (the newborn last) and
//! every accepted link is visible to the seekers after it.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::decision::{decide_link, finalize_lft, is_saturated, AgentRecord};
use crate::error::{Error, Result};
use crate::graph::{AgentId, NetworkState};
use crate::meeting::{draw_meeting, MeetingEvent};
use crate::model::{ModelParams, TypeId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum TrajectorySample {
    /// Every agent, at the geometric checkpoints `b, 2b, 4b, ..` and the horizon.
    #[default]
    All,
    /// Agents with these birth dates, at every step.
    Tracked(Vec<u64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ProcessingOrder {
    #[default]
    Ascending,
    /// Seekers shuffled afresh each step; used to measure order sensitivity.
    Shuffled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordOptions {
    pub meetings: bool,
    pub edges: bool,
}

impl Default for RecordOptions {
    fn default() -> Self {
        RecordOptions { meetings: true, edges: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ModelParams,
    pub horizon: u64,
    /// Births before this date are excluded from agent-level statistics.
    pub warmup: u64,
    pub trajectory_sample: TrajectorySample,
    pub seed: u64,
    pub replications: u32,
    #[serde(default)]
    pub order: ProcessingOrder,
    #[serde(default)]
    pub record: RecordOptions,
}

impl SimConfig {
    pub fn new(params: ModelParams, horizon: u64) -> Self {
        SimConfig {
            params,
            horizon,
            warmup: 0,
            trajectory_sample: TrajectorySample::All,
            seed: 0,
            replications: 1,
            order: ProcessingOrder::Ascending,
            record: RecordOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.horizon > u64::from(u32::MAX) {
            return Err(Error::Config(format!("horizon {} too large", self.horizon)));
        }
        if self.horizon > 0 && self.warmup >= self.horizon {
            return Err(Error::Config(format!(
                "warmup {} must be below horizon {}",
                self.warmup, self.horizon
            )));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical (key-sorted) JSON form.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        hex::encode(Sha256::digest(value.to_string().as_bytes()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub source: AgentId,
    pub target: AgentId,
    pub step: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeetingRecord {
    pub event: MeetingEvent,
    pub linked: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Grid {
    /// One sample per step starting at `start`.
    Dense {
        start: u64,
    },
    Sparse(Vec<u64>),
}

/// End-of-step indegree of one agent over time. Never decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub agent: AgentId,
    pub ty: TypeId,
    pub grid: Grid,
    pub indegree: Vec<u32>,
}

impl Trajectory {
    pub fn step_at(&self, n: usize) -> u64 {
        match &self.grid {
            Grid::Dense { start } => start + n as u64,
            Grid::Sparse(steps) => steps[n],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.indegree.iter().enumerate().map(|(n, &d)| (self.step_at(n), d))
    }

    pub fn value_at(&self, step: u64) -> Option<u32> {
        match &self.grid {
            Grid::Dense { start } => {
                let n = step.checked_sub(*start)?;
                self.indegree.get(n as usize).copied()
            }
            Grid::Sparse(steps) => steps.binary_search(&step).ok().map(|n| self.indegree[n]),
        }
    }

    fn push(&mut self, step: u64, value: u32) {
        if let Grid::Sparse(steps) = &mut self.grid {
            steps.push(step);
        }
        self.indegree.push(value);
    }

    fn last_step(&self) -> Option<u64> {
        self.indegree.len().checked_sub(1).map(|n| self.step_at(n))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationResult {
    pub replication: u32,
    pub agents: Vec<AgentRecord>,
    pub edges: Vec<EdgeRecord>,
    pub meetings: Vec<MeetingRecord>,
    pub trajectories: Vec<Trajectory>,
}

impl ReplicationResult {
    pub fn trajectory(&self, agent: AgentId) -> Option<&Trajectory> {
        self.trajectories.iter().find(|t| t.agent == agent)
    }

    pub fn agent(&self, agent: AgentId) -> Option<&AgentRecord> {
        self.agents.get((agent.0 as usize).checked_sub(1)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub replications: Vec<ReplicationResult>,
    /// `(master seed, stream)` per replication.
    pub seeds: Vec<(u64, u64)>,
    pub config_hash: String,
}

/// Random stream of replication `r`: the master seed with ChaCha stream `r`.
pub fn replication_rng(seed: u64, replication: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(replication));
    rng
}

/// A single replication in progress.
pub struct Simulation {
    params: ModelParams,
    horizon: u64,
    order: ProcessingOrder,
    record: RecordOptions,
    replication: u32,
    rng: ChaCha8Rng,
    types: WeightedIndex<f64>,
    state: NetworkState,
    records: Vec<AgentRecord>,
    active: Vec<AgentId>,
    edges: Vec<EdgeRecord>,
    meetings: Vec<MeetingRecord>,
    sample: TrajectorySample,
    trajectories: Vec<Trajectory>,
    /// Index into `trajectories` by slot, for sampled agents.
    trajectory_slot: Vec<Option<usize>>,
}

impl Simulation {
    pub fn new(config: &SimConfig, replication: u32) -> Result<Self> {
        config.validate()?;
        let types =
            WeightedIndex::new(&config.params.type_probs).map_err(|e| Error::InvalidParams(e.to_string()))?;
        let mut sample = config.trajectory_sample.clone();
        if let TrajectorySample::Tracked(births) = &mut sample {
            births.sort_unstable();
            births.dedup();
        }
        Ok(Simulation {
            params: config.params.clone(),
            horizon: config.horizon,
            order: config.order,
            record: config.record,
            replication,
            rng: replication_rng(config.seed, replication),
            types,
            state: NetworkState::new(),
            records: Vec::with_capacity(config.horizon as usize),
            active: Vec::new(),
            edges: Vec::new(),
            meetings: Vec::new(),
            sample,
            trajectories: Vec::new(),
            trajectory_slot: Vec::with_capacity(config.horizon as usize),
        })
    }

    pub fn state(&self) -> &NetworkState {
        &self.state
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn records(&self) -> &[AgentRecord] {
        &self.records
    }

    pub fn active(&self) -> &[AgentId] {
        &self.active
    }

    pub fn meetings(&self) -> &[MeetingRecord] {
        &self.meetings
    }

    pub fn is_finished(&self) -> bool {
        self.state.clock() >= self.horizon
    }

    /// Advances one date: an arrival, then one meeting and decision per
    /// active agent.
    pub fn step(&mut self) -> Result<()> {
        if self.is_finished() {
            return Err(Error::Domain(format!("horizon {} already reached", self.horizon)));
        }
        let ty = TypeId::from_index(self.types.sample(&mut self.rng));
        let born = self.state.add_agent(ty);
        let now = self.state.clock();
        self.records.push(AgentRecord::new(born, ty));
        self.register_trajectory(born, ty);
        if is_saturated(born, &self.state, &self.params) {
            self.state.deactivate(born);
            self.records[born.0 as usize - 1].deactivated_at = Some(now);
        } else {
            self.active.push(born);
        }

        let mut seekers = std::mem::take(&mut self.active);
        let shuffled = self.order == ProcessingOrder::Shuffled;
        if shuffled {
            seekers.shuffle(&mut self.rng);
        }
        for &seeker in &seekers {
            self.meet_and_decide(seeker, now)?;
        }
        seekers.retain(|&a| self.state.is_active(a));
        if shuffled {
            seekers.sort_unstable();
        }
        self.active = seekers;
        self.sample_trajectories(now);
        Ok(())
    }

    fn meet_and_decide(&mut self, seeker: AgentId, now: u64) -> Result<()> {
        let Some(event) = draw_meeting(seeker, &self.state, self.params.gamma, &mut self.rng) else {
            return Ok(());
        };
        let linked = decide_link(seeker, event.met, &mut self.state, &self.params)?;
        if linked {
            self.records[seeker.0 as usize - 1].record_link(now);
            if self.record.edges {
                self.edges.push(EdgeRecord { source: seeker, target: event.met, step: now });
            }
            if is_saturated(seeker, &self.state, &self.params) {
                self.state.deactivate(seeker);
                self.records[seeker.0 as usize - 1].deactivated_at = Some(now);
            }
        }
        if self.record.meetings {
            self.meetings.push(MeetingRecord { event, linked });
        }
        Ok(())
    }

    fn register_trajectory(&mut self, agent: AgentId, ty: TypeId) {
        let (tracked, grid) = match &self.sample {
            TrajectorySample::All => (true, Grid::Sparse(Vec::new())),
            TrajectorySample::Tracked(births) => {
                (births.binary_search(&agent.birth()).is_ok(), Grid::Dense { start: agent.birth() })
            }
        };
        if tracked {
            self.trajectory_slot.push(Some(self.trajectories.len()));
            self.trajectories.push(Trajectory { agent, ty, grid, indegree: Vec::new() });
        } else {
            self.trajectory_slot.push(None);
        }
    }

    fn sample_trajectories(&mut self, now: u64) {
        match &self.sample {
            TrajectorySample::Tracked(_) => {
                for traj in &mut self.trajectories {
                    let d = self.state.indegree(traj.agent) as u32;
                    traj.push(now, d);
                }
            }
            TrajectorySample::All => {
                // Agents whose checkpoint b·2^k equals `now`.
                let mut k = 0;
                while k < 64 && now.is_multiple_of(1u64 << k) {
                    let birth = now >> k;
                    if let Some(n) = self.trajectory_slot[birth as usize - 1] {
                        let agent = AgentId(birth as u32);
                        let d = self.state.indegree(agent) as u32;
                        self.trajectories[n].push(now, d);
                    }
                    k += 1;
                }
            }
        }
    }

    pub fn run_to_horizon(&mut self) -> Result<()> {
        while !self.is_finished() {
            self.step()?;
        }
        Ok(())
    }

    /// Finalizes agent records and trajectories.
    pub fn finish(mut self) -> ReplicationResult {
        let now = self.state.clock();
        for record in &mut self.records {
            record.lft = finalize_lft(record);
            record.censored = self.state.is_active(record.id);
            record.final_indegree = self.state.indegree(record.id) as u32;
            record.final_outdegree = self.state.outdegree(record.id) as u32;
        }
        if now > 0 && self.sample == TrajectorySample::All {
            for traj in &mut self.trajectories {
                if traj.last_step() != Some(now) {
                    let d = self.state.indegree(traj.agent) as u32;
                    traj.push(now, d);
                }
            }
        }
        ReplicationResult {
            replication: self.replication,
            agents: self.records,
            edges: self.edges,
            meetings: self.meetings,
            trajectories: self.trajectories,
        }
    }
}

/// Runs replication 0 of `config`.
pub fn run(config: &SimConfig) -> Result<ReplicationResult> {
    run_replication(config, 0)
}

pub fn run_replication(config: &SimConfig, replication: u32) -> Result<ReplicationResult> {
    let mut sim = Simulation::new(config, replication)?;
    sim.run_to_horizon()?;
    Ok(sim.finish())
}

/// Runs every replication and reduces each with `f` as soon as it
/// completes, so callers that only need summaries never hold full logs.
/// Output order is replication order regardless of scheduling.
pub fn run_ensemble_map<T, F>(config: &SimConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(ReplicationResult) -> T + Sync,
{
    config.validate()?;
    (0..config.replications).into_par_iter().map(|r| run_replication(config, r).map(&f)).collect()
}

pub fn run_ensemble(config: &SimConfig) -> Result<EnsembleResult> {
    let replications = run_ensemble_map(config, |r| r)?;
    Ok(EnsembleResult {
        seeds: (0..config.replications).map(|r| (config.seed, u64::from(r))).collect(),
        config_hash: config.hash(),
        replications,
    })
}
