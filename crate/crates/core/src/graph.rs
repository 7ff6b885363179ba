//! Growing directed network with per-agent type, activity and benefit.
//!
//! Agents are identified by birth date, so agent `t` lives at slot `t - 1`
//! and the population at date `t` is exactly `{1, .., t}`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, TypeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AgentId(pub u32);

impl AgentId {
    pub fn birth(self) -> u64 {
        u64::from(self.0)
    }

    fn slot(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone)]
struct Agent {
    ty: TypeId,
    active: bool,
    benefit_sum: f64,
    friends: Vec<AgentId>,
    followers: Vec<AgentId>,
    /// Indegree at the start of `stamp`, the last step the agent gained a follower.
    indegree_at_stamp: u32,
    stamp: u64,
}

#[derive(Debug, Clone, Default)]
pub struct NetworkState {
    agents: Vec<Agent>,
    clock: u64,
    edge_count: usize,
}

impl NetworkState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = AgentId> {
        (1..=self.agents.len() as u32).map(AgentId)
    }

    /// Advances the clock and appends the agent born on the new date.
    pub fn add_agent(&mut self, ty: TypeId) -> AgentId {
        self.clock += 1;
        debug_assert_eq!(self.agents.len() as u64 + 1, self.clock);
        self.agents.push(Agent {
            ty,
            active: true,
            benefit_sum: 0.0,
            friends: Vec::new(),
            followers: Vec::new(),
            indegree_at_stamp: 0,
            stamp: 0,
        });
        AgentId(self.agents.len() as u32)
    }

    fn agent(&self, id: AgentId) -> Result<&Agent> {
        if id.0 == 0 {
            return Err(Error::UnknownAgent(id));
        }
        self.agents.get(id.slot()).ok_or(Error::UnknownAgent(id))
    }

    pub fn contains(&self, id: AgentId) -> bool {
        id.0 >= 1 && id.slot() < self.agents.len()
    }

    pub fn agent_type(&self, id: AgentId) -> TypeId {
        self.agents[id.slot()].ty
    }

    pub fn is_active(&self, id: AgentId) -> bool {
        self.agents[id.slot()].active
    }

    pub fn deactivate(&mut self, id: AgentId) {
        self.agents[id.slot()].active = false;
    }

    pub fn benefit_sum(&self, id: AgentId) -> f64 {
        self.agents[id.slot()].benefit_sum
    }

    /// `N⁺(i)`, in the order the links were formed.
    pub fn friends(&self, id: AgentId) -> &[AgentId] {
        &self.agents[id.slot()].friends
    }

    /// `N⁻(i)`, in the order the links were formed.
    pub fn followers(&self, id: AgentId) -> &[AgentId] {
        &self.agents[id.slot()].followers
    }

    pub fn outdegree(&self, id: AgentId) -> usize {
        self.friends(id).len()
    }

    pub fn indegree(&self, id: AgentId) -> usize {
        self.followers(id).len()
    }

    /// Indegree before any link formed during the current clock step.
    pub fn indegree_at_step_start(&self, id: AgentId) -> usize {
        let agent = &self.agents[id.slot()];
        if agent.stamp == self.clock {
            agent.indegree_at_stamp as usize
        } else {
            agent.followers.len()
        }
    }

    pub fn has_edge(&self, from: AgentId, to: AgentId) -> bool {
        self.friends(from).contains(&to)
    }

    /// Adds the directed link `from -> to` and credits `from` with the
    /// affinity it bestows.
    pub fn add_edge(&mut self, from: AgentId, to: AgentId, params: &ModelParams) -> Result<()> {
        if from == to {
            return Err(Error::SelfEdge(from));
        }
        let from_ty = self.agent(from)?.ty;
        let to_ty = self.agent(to)?.ty;
        if self.has_edge(from, to) {
            return Err(Error::DuplicateEdge(from, to));
        }
        let clock = self.clock;
        let target = &mut self.agents[to.slot()];
        if target.stamp != clock {
            target.indegree_at_stamp = target.followers.len() as u32;
            target.stamp = clock;
        }
        target.followers.push(from);
        let source = &mut self.agents[from.slot()];
        source.friends.push(to);
        source.benefit_sum += params.affinity(from_ty, to_ty);
        self.edge_count += 1;
        Ok(())
    }

    /// Friends of friends `K(i)`, minus `i` itself and minus agents `i`
    /// already links to. Sorted and deduplicated.
    pub fn friends_of_friends(&self, id: AgentId) -> Vec<AgentId> {
        let friends = self.friends(id);
        let mut pool: Vec<AgentId> = friends
            .iter()
            .flat_map(|&f| self.friends(f).iter().copied())
            .filter(|&k| k != id && !friends.contains(&k))
            .collect();
        pool.sort_unstable();
        pool.dedup();
        pool
    }

    /// Explicit stranger set: everybody outside `K(i) ∪ N⁺(i) ∪ {i}`.
    pub fn strangers(&self, id: AgentId) -> Vec<AgentId> {
        let fof = self.friends_of_friends(id);
        let excluded = Excluded::new(self, id, &fof);
        self.agent_ids().filter(|&j| !excluded.contains(j)).collect()
    }

    /// `|K̄(i)|` given a precomputed friends-of-friends pool.
    pub fn stranger_count(&self, id: AgentId, fof: &[AgentId]) -> usize {
        self.len() - fof.len() - self.outdegree(id) - 1
    }

    /// Uniform draw from the stranger set. Rejection sampling against the
    /// population while the excluded set is at most half of it, otherwise
    /// explicit enumeration. Returns `None` if there are no strangers.
    pub fn sample_stranger<R: Rng + ?Sized>(
        &self,
        id: AgentId,
        fof: &[AgentId],
        rng: &mut R,
    ) -> Option<AgentId> {
        let count = self.stranger_count(id, fof);
        if count == 0 {
            return None;
        }
        let excluded = Excluded::new(self, id, fof);
        let population = self.len();
        if 2 * (population - count) <= population {
            loop {
                let j = AgentId(rng.random_range(1..=population as u32));
                if !excluded.contains(j) {
                    return Some(j);
                }
            }
        }
        let nth = rng.random_range(0..count);
        self.agent_ids().filter(|&j| !excluded.contains(j)).nth(nth)
    }

    /// Recomputes `Σ_{j∈N⁺(i)} α(θ_i, θ_j)` from scratch.
    pub fn recompute_benefit(&self, id: AgentId, params: &ModelParams) -> f64 {
        let own = self.agent_type(id);
        self.friends(id).iter().map(|&j| params.affinity(own, self.agent_type(j))).sum()
    }

    /// Checks the structural invariants: degree sums, no self or duplicate
    /// edges, friend/follower symmetry and the incremental benefit sums.
    pub fn audit(&self, params: &ModelParams) -> std::result::Result<(), String> {
        let out: usize = self.agents.iter().map(|a| a.friends.len()).sum();
        let inn: usize = self.agents.iter().map(|a| a.followers.len()).sum();
        if out != inn || out != self.edge_count {
            return Err(format!("degree sums out={out} in={inn} edges={}", self.edge_count));
        }
        for id in self.agent_ids() {
            let friends = self.friends(id);
            for (n, &j) in friends.iter().enumerate() {
                if j == id {
                    return Err(format!("self-edge on {id}"));
                }
                if friends[..n].contains(&j) {
                    return Err(format!("duplicate edge {id} -> {j}"));
                }
                if !self.followers(j).contains(&id) {
                    return Err(format!("edge {id} -> {j} missing from follower list"));
                }
            }
            let fresh = self.recompute_benefit(id, params);
            if (fresh - self.benefit_sum(id)).abs() > 1e-9 {
                return Err(format!("benefit sum of {id} is {}, recomputed {fresh}", self.benefit_sum(id)));
            }
        }
        Ok(())
    }
}

struct Excluded<'a> {
    seeker: AgentId,
    friends: &'a [AgentId],
    fof: &'a [AgentId],
}

impl<'a> Excluded<'a> {
    fn new(state: &'a NetworkState, seeker: AgentId, fof: &'a [AgentId]) -> Self {
        Excluded { seeker, friends: state.friends(seeker), fof }
    }

    fn contains(&self, j: AgentId) -> bool {
        j == self.seeker || self.friends.contains(&j) || self.fof.binary_search(&j).is_ok()
    }
}
