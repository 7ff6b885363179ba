//! Attachment kernel measurement with risk-set normalization: events at
//! indegree `d` divided by the agent-steps spent at indegree `d`.

use serde::{Deserialize, Serialize};

use super::regression::LinearFit;
use crate::error::{Error, Result};
use crate::model::TypeId;
use crate::sim::ReplicationResult;

pub const DEFAULT_MIN_EVENTS: u64 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    /// Probability of being met.
    Met,
    /// Probability of being linked to.
    Linked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelStratum {
    pub seeker_type: Option<TypeId>,
    pub target_type: Option<TypeId>,
    /// Inclusive range of steps over which events and risk are counted.
    pub first_step: u64,
    pub last_step: u64,
    pub kind: KernelKind,
    /// Bins with fewer events are reported but left out of the fit.
    pub min_events: u64,
}

impl KernelStratum {
    pub fn new(kind: KernelKind, first_step: u64, last_step: u64) -> Self {
        KernelStratum {
            seeker_type: None,
            target_type: None,
            first_step,
            last_step,
            kind,
            min_events: DEFAULT_MIN_EVENTS,
        }
    }

    pub fn between(mut self, seeker: TypeId, target: TypeId) -> Self {
        self.seeker_type = Some(seeker);
        self.target_type = Some(target);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelBin {
    pub degree: u32,
    pub events: u64,
    /// Agent-steps at this degree inside the window.
    pub risk: u64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelEstimate {
    pub stratum: KernelStratum,
    pub bins: Vec<KernelBin>,
    /// Fit of probability on degree over the qualifying bins.
    pub fit: LinearFit,
    pub qualifying_bins: usize,
}

impl KernelEstimate {
    pub fn max_probability(&self) -> f64 {
        self.bins.iter().map(|b| b.probability).fold(0.0, f64::max)
    }
}

#[derive(Default)]
struct Tally {
    events: Vec<u64>,
    risk: Vec<u64>,
}

impl Tally {
    fn bump(v: &mut Vec<u64>, d: usize, by: u64) {
        if v.len() <= d {
            v.resize(d + 1, 0);
        }
        v[d] += by;
    }
}

/// Replays the meeting log of each replication to recover the start-of-step
/// indegree histogram, then bins events by the met agent's indegree.
pub fn estimate_attachment_kernel<'a>(
    replications: impl IntoIterator<Item = &'a ReplicationResult>,
    stratum: &KernelStratum,
) -> Result<KernelEstimate> {
    let mut tally = Tally::default();
    let window = stratum.first_step..=stratum.last_step;
    let targets = |ty: TypeId| stratum.target_type.is_none_or(|t| t == ty);
    for rep in replications {
        let mut indegree = vec![0u32; rep.agents.len()];
        let mut histogram: Vec<u64> = Vec::new();
        let mut next = 0;
        for (slot, agent) in rep.agents.iter().enumerate() {
            let step = slot as u64 + 1;
            if targets(agent.ty) {
                Tally::bump(&mut histogram, 0, 1);
            }
            let counting = window.contains(&step);
            if counting {
                for (d, &n) in histogram.iter().enumerate() {
                    if n > 0 {
                        Tally::bump(&mut tally.risk, d, n);
                    }
                }
            }
            let begin = next;
            while next < rep.meetings.len() && rep.meetings[next].event.step == step {
                next += 1;
            }
            let todays = &rep.meetings[begin..next];
            if counting {
                for m in todays {
                    let seeker_ty = rep.agents[m.event.seeker.0 as usize - 1].ty;
                    if stratum.seeker_type.is_some_and(|t| t != seeker_ty) || !targets(m.event.met_type) {
                        continue;
                    }
                    let hit = match stratum.kind {
                        KernelKind::Met => true,
                        KernelKind::Linked => m.linked,
                    };
                    if hit {
                        Tally::bump(&mut tally.events, m.event.met_indegree as usize, 1);
                    }
                }
            }
            for m in todays.iter().filter(|m| m.linked) {
                let j = m.event.met.0 as usize - 1;
                let d = indegree[j] as usize;
                indegree[j] += 1;
                if targets(m.event.met_type) {
                    histogram[d] -= 1;
                    Tally::bump(&mut histogram, d + 1, 1);
                }
            }
        }
        if next != rep.meetings.len() {
            return Err(Error::Domain("meeting log not ordered by step".into()));
        }
    }
    let bins: Vec<KernelBin> = tally
        .risk
        .iter()
        .enumerate()
        .filter(|(_, &r)| r > 0)
        .map(|(d, &risk)| {
            let events = tally.events.get(d).copied().unwrap_or(0);
            KernelBin { degree: d as u32, events, risk, probability: events as f64 / risk as f64 }
        })
        .collect();
    let qualifying: Vec<(f64, f64)> = bins
        .iter()
        .filter(|b| b.events >= stratum.min_events)
        .map(|b| (f64::from(b.degree), b.probability))
        .collect();
    let fit = LinearFit::ols(&qualifying).ok_or(Error::Insufficient {
        what: "attachment kernel bins",
        needed: 2,
        have: qualifying.len(),
    })?;
    Ok(KernelEstimate { stratum: stratum.clone(), qualifying_bins: qualifying.len(), bins, fit })
}
