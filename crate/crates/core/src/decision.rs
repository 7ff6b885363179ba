//! Myopic link decisions, saturation and link-formation-time bookkeeping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AgentId, NetworkState};
use crate::model::{ModelParams, TypeId};

/// `v(S + α_ij) - v(S) - c` for the prospective link `i -> j`.
pub fn marginal_utility(i: AgentId, j: AgentId, state: &NetworkState, params: &ModelParams) -> Result<f64> {
    if i == j {
        return Err(Error::SelfEdge(i));
    }
    if state.has_edge(i, j) {
        return Err(Error::DuplicateEdge(i, j));
    }
    let own = state.agent_type(i);
    let alpha = params.affinity(own, state.agent_type(j));
    Ok(params.marginal_gain(own, state.benefit_sum(i), alpha) - params.link_cost)
}

/// Links `i -> j` iff the marginal utility is strictly positive; a zero
/// marginal is a rejection.
pub fn decide_link(i: AgentId, j: AgentId, state: &mut NetworkState, params: &ModelParams) -> Result<bool> {
    if marginal_utility(i, j, state, params)? > 0.0 {
        state.add_edge(i, j, params)?;
        Ok(true)
    } else {
        Ok(false)
    }
}

/// True once no type offers a profitable link. Benefit sums only grow, so
/// this never flips back.
pub fn is_saturated(i: AgentId, state: &NetworkState, params: &ModelParams) -> bool {
    let own = state.agent_type(i);
    let capital = state.benefit_sum(i);
    params.types().all(|k| params.marginal_gain(own, capital, params.affinity(own, k)) <= params.link_cost)
}

/// Utility `v(S) - c·links` of agent `i` in its current state.
pub fn utility(i: AgentId, state: &NetworkState, params: &ModelParams) -> f64 {
    let own = state.agent_type(i);
    params.benefit_scale(own) * state.benefit_sum(i).ln_1p() - params.link_cost * state.outdegree(i) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentRecord {
    pub id: AgentId,
    pub ty: TypeId,
    pub birth: u64,
    pub last_link_step: Option<u64>,
    pub links_formed: u32,
    /// Step at which saturation was detected and the agent stopped meeting.
    pub deactivated_at: Option<u64>,
    /// Still active when the horizon was reached.
    pub censored: bool,
    pub lft: Option<u64>,
    pub final_indegree: u32,
    pub final_outdegree: u32,
}

impl AgentRecord {
    pub fn new(id: AgentId, ty: TypeId) -> Self {
        AgentRecord {
            id,
            ty,
            birth: id.birth(),
            last_link_step: None,
            links_formed: 0,
            deactivated_at: None,
            censored: false,
            lft: None,
            final_indegree: 0,
            final_outdegree: 0,
        }
    }

    pub fn record_link(&mut self, step: u64) {
        self.links_formed += 1;
        self.last_link_step = Some(step);
    }

    /// LFT usable for statistics: finalized and not horizon-censored.
    pub fn uncensored_lft(&self) -> Option<u64> {
        if self.censored {
            None
        } else {
            self.lft
        }
    }
}

/// `T_i = last_link_step - birth + 1`, absent when no link was ever formed.
pub fn finalize_lft(record: &AgentRecord) -> Option<u64> {
    record.last_link_step.map(|last| last - record.birth + 1)
}
