//! One meeting per active agent per step: a friend of a friend with
//! probability `1 - γ`, a stranger with probability `γ`, falling back to
//! whichever pool is non-empty.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{AgentId, NetworkState};
use crate::model::TypeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pool {
    FriendsOfFriends,
    Strangers,
}

impl Pool {
    pub fn as_str(self) -> &'static str {
        match self {
            Pool::FriendsOfFriends => "fof",
            Pool::Strangers => "stranger",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fof" => Some(Pool::FriendsOfFriends),
            "stranger" => Some(Pool::Strangers),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeetingEvent {
    pub step: u64,
    pub seeker: AgentId,
    pub met: AgentId,
    pub pool: Pool,
    /// Indegree of `met` before any link formed in this step.
    pub met_indegree: u32,
    pub met_type: TypeId,
}

/// Draws `m_i(t)` for `seeker` against the current state, or `None` when
/// both pools are empty.
pub fn draw_meeting<R: Rng + ?Sized>(
    seeker: AgentId,
    state: &NetworkState,
    gamma: f64,
    rng: &mut R,
) -> Option<MeetingEvent> {
    let fof = state.friends_of_friends(seeker);
    let strangers = state.stranger_count(seeker, &fof);
    let pool = match (fof.is_empty(), strangers == 0) {
        (true, true) => return None,
        (true, false) => Pool::Strangers,
        (false, true) => Pool::FriendsOfFriends,
        (false, false) => {
            if rng.random_bool(gamma) {
                Pool::Strangers
            } else {
                Pool::FriendsOfFriends
            }
        }
    };
    let met = match pool {
        Pool::FriendsOfFriends => fof[rng.random_range(0..fof.len())],
        Pool::Strangers => state.sample_stranger(seeker, &fof, rng)?,
    };
    Some(MeetingEvent {
        step: state.clock(),
        seeker,
        met,
        pool,
        met_indegree: state.indegree_at_step_start(met) as u32,
        met_type: state.agent_type(met),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn params() -> ModelParams {
        ModelParams::new(vec![1.0], 1.0, 1.0, 1.0, 0.2, 0.3).unwrap()
    }

    /// 1 -> 2 -> {3, 4, 5}; agents 6..=10 are strangers to 1.
    fn frozen_state() -> NetworkState {
        let p = params();
        let mut s = NetworkState::new();
        for _ in 0..10 {
            s.add_agent(p.type_id(1).unwrap());
        }
        s.add_edge(AgentId(1), AgentId(2), &p).unwrap();
        for j in 3..=5 {
            s.add_edge(AgentId(2), AgentId(j), &p).unwrap();
        }
        s
    }

    #[test]
    fn sole_agent_meets_nobody() {
        let mut s = NetworkState::new();
        s.add_agent(params().type_id(1).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(draw_meeting(AgentId(1), &s, 0.5, &mut rng).is_none());
    }

    #[test]
    fn gamma_zero_uses_fof() {
        let s = frozen_state();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let e = draw_meeting(AgentId(1), &s, 0.0, &mut rng).unwrap();
            assert_eq!(e.pool, Pool::FriendsOfFriends);
        }
    }

    #[test]
    fn empty_fof_forces_strangers() {
        let s = frozen_state();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // Agent 7 has no friends at all.
        for _ in 0..200 {
            let e = draw_meeting(AgentId(7), &s, 0.0, &mut rng).unwrap();
            assert_eq!(e.pool, Pool::Strangers);
            assert_ne!(e.met, AgentId(7));
        }
    }

    #[test]
    fn empty_strangers_forces_fof() {
        let p = params();
        let mut s = NetworkState::new();
        for _ in 0..3 {
            s.add_agent(p.type_id(1).unwrap());
        }
        s.add_edge(AgentId(1), AgentId(2), &p).unwrap();
        s.add_edge(AgentId(2), AgentId(3), &p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let e = draw_meeting(AgentId(1), &s, 1.0, &mut rng).unwrap();
            assert_eq!((e.pool, e.met), (Pool::FriendsOfFriends, AgentId(3)));
        }
    }

    #[test]
    fn stranger_fraction_matches_gamma() {
        let s = frozen_state();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let gamma = 0.3;
        let strangers = (0..n)
            .filter(|_| draw_meeting(AgentId(1), &s, gamma, &mut rng).unwrap().pool == Pool::Strangers)
            .count();
        let sigma = (n as f64 * gamma * (1.0 - gamma)).sqrt();
        assert!((strangers as f64 - n as f64 * gamma).abs() <= 3.0 * sigma);
    }

    #[test]
    fn uniform_within_each_pool() {
        let s = frozen_state();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 60_000;
        let mut hits: BTreeMap<(Pool, AgentId), usize> = BTreeMap::new();
        let mut per_pool: BTreeMap<Pool, usize> = BTreeMap::new();
        for _ in 0..n {
            let e = draw_meeting(AgentId(1), &s, 0.5, &mut rng).unwrap();
            *hits.entry((e.pool, e.met)).or_default() += 1;
            *per_pool.entry(e.pool).or_default() += 1;
        }
        let sizes = [(Pool::FriendsOfFriends, 3usize), (Pool::Strangers, 5)];
        for (pool, size) in sizes {
            let total = per_pool[&pool] as f64;
            let q = 1.0 / size as f64;
            let members: Vec<_> = hits.iter().filter(|((p, _), _)| *p == pool).collect();
            assert_eq!(members.len(), size);
            for (_, &count) in members {
                let sigma = (total * q * (1.0 - q)).sqrt();
                assert!((count as f64 - total * q).abs() <= 3.0 * sigma);
            }
        }
    }

    #[test]
    fn records_step_start_indegree() {
        let s = frozen_state();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let e = draw_meeting(AgentId(1), &s, 0.0, &mut rng).unwrap();
        // All three links into 3..=5 were made during step 10.
        assert_eq!(e.met_indegree, 0);
        assert_eq!(e.step, 10);
    }

    #[test]
    fn deterministic_given_seed() {
        let s = frozen_state();
        let a: Vec<_> = {
            let mut rng = ChaCha8Rng::seed_from_u64(8);
            (0..50).map(|_| draw_meeting(AgentId(1), &s, 0.4, &mut rng)).collect()
        };
        let b: Vec<_> = {
            let mut rng = ChaCha8Rng::seed_from_u64(8);
            (0..50).map(|_| draw_meeting(AgentId(1), &s, 0.4, &mut rng)).collect()
        };
        assert_eq!(a, b);
    }
}
