use std::collections::HashSet;

use netform::analytics::{default_window, mean_trajectory};
use netform::sim::{
    run_ensemble, run_ensemble_map, run_replication, ProcessingOrder, Simulation, TrajectorySample,
};
use netform::{run, AgentId, ModelParams, ReplicationResult, SimConfig};
use proptest::prelude::*;

fn params(probs: Vec<f64>, decay: f64, gamma: f64) -> ModelParams {
    ModelParams::new(probs, 1.0, decay, 1.0, 0.2, gamma).unwrap()
}

fn config(p: ModelParams, horizon: u64, reps: u32) -> SimConfig {
    let mut c = SimConfig::new(p, horizon);
    c.seed = 2024;
    c.replications = reps;
    c
}

#[test]
fn ensemble_replications_match_standalone_runs() {
    let c = config(params(vec![0.5, 0.5], 0.5, 0.5), 200, 4);
    let ensemble = run_ensemble(&c).unwrap();
    assert_eq!(ensemble, run_ensemble(&c).unwrap());
    for (r, rep) in ensemble.replications.iter().enumerate() {
        assert_eq!(rep, &run_replication(&c, r as u32).unwrap());
    }
    let mut single = c.clone();
    single.replications = 1;
    assert_eq!(run_ensemble(&single).unwrap().replications, vec![run(&c).unwrap()]);
    let counts = run_ensemble_map(&c, |r| r.edges.len()).unwrap();
    assert_eq!(counts, ensemble.replications.iter().map(|r| r.edges.len()).collect::<Vec<_>>());
}

#[test]
fn stepping_by_hand_matches_run_to_horizon() {
    let c = config(params(vec![0.3, 0.7], 0.0, 0.3), 120, 1);
    let mut sim = Simulation::new(&c, 0).unwrap();
    while !sim.is_finished() {
        sim.step().unwrap();
        assert!(sim.state().audit(sim.params()).is_ok());
    }
    assert_eq!(sim.finish(), run(&c).unwrap());
}

#[test]
fn seeds_and_streams_separate_replications() {
    let c = config(params(vec![0.5, 0.5], 1.0, 0.5), 150, 2);
    let e = run_ensemble(&c).unwrap();
    assert_ne!(e.replications[0].edges, e.replications[1].edges);
    let mut other = c.clone();
    other.seed += 1;
    assert_ne!(run(&other).unwrap().edges, e.replications[0].edges);
}

#[test]
fn zero_horizon_is_an_empty_run() {
    let r = run(&config(params(vec![1.0], 1.0, 0.0), 0, 1)).unwrap();
    assert!(r.agents.is_empty() && r.edges.is_empty() && r.meetings.is_empty());
}

#[test]
fn shuffled_order_keeps_the_invariants() {
    let mut c = config(params(vec![0.5, 0.5], 1.0, 0.5), 300, 1);
    c.order = ProcessingOrder::Shuffled;
    let r = run(&c).unwrap();
    check(&c, &r);
    assert_ne!(r.edges, run(&config(c.params.clone(), 300, 1)).unwrap().edges);
}

#[test]
fn mean_field_growth_at_gamma_one() {
    // Uniform stranger meetings: E[deg(t)] of the agent born at i is close
    // to L̄·ln(t/i) once t ≫ i.
    let mut c = config(params(vec![0.5, 0.5], 1.0, 1.0), 1000, 200);
    c.record.meetings = false;
    c.trajectory_sample = TrajectorySample::Tracked(vec![20]);
    let e = run_ensemble(&c).unwrap();
    let mean = mean_trajectory(e.replications.iter().filter_map(|r| r.trajectories.first())).unwrap();
    for t in [200u64, 500, 1000] {
        let expected = 4.0 * (t as f64 / 20.0).ln();
        let got = mean.value_at(t).unwrap();
        assert!((got - expected).abs() / expected < 0.1, "t={t}: {got} vs {expected}");
    }
    assert_eq!(default_window(1000), 50);
}

fn check(c: &SimConfig, r: &ReplicationResult) {
    let n = r.agents.len() as u64;
    assert_eq!(n, c.horizon, "one birth per step");
    let mut seen = HashSet::new();
    for e in &r.edges {
        assert_ne!(e.source, e.target, "self edge");
        assert!(seen.insert((e.source, e.target)), "duplicate edge");
        assert!(e.step >= e.source.birth() && e.step >= e.target.birth());
    }

    // Replaying the links in order, each one was profitable when formed and
    // saturated agents have nothing profitable left.
    let p = &c.params;
    let ty = |id: AgentId| r.agent(id).unwrap().ty;
    let mut capital = vec![0.0f64; r.agents.len() + 1];
    for e in &r.edges {
        let (own, alpha) = (ty(e.source), p.affinity(ty(e.source), ty(e.target)));
        let x = &mut capital[e.source.0 as usize];
        assert!(p.marginal_gain(own, *x, alpha) > p.link_cost, "unprofitable link");
        *x += alpha;
    }
    let indeg: u64 = r.agents.iter().map(|a| u64::from(a.final_indegree)).sum();
    let outdeg: u64 = r.agents.iter().map(|a| u64::from(a.final_outdegree)).sum();
    assert_eq!(indeg, r.edges.len() as u64);
    assert_eq!(outdeg, r.edges.len() as u64);

    let mut per_step: Vec<HashSet<u32>> = vec![HashSet::new(); c.horizon as usize + 1];
    for m in &r.meetings {
        let ev = &m.event;
        assert_ne!(ev.seeker, ev.met);
        assert!(per_step[ev.step as usize].insert(ev.seeker.0), "two meetings in one step");
        assert!(ev.met.birth() <= ev.step);
    }
    let linked = r.meetings.iter().filter(|m| m.linked).count();
    assert_eq!(linked, r.edges.len(), "every link comes from a meeting");

    for a in &r.agents {
        if a.deactivated_at.is_some() {
            let x = capital[a.id.0 as usize];
            assert!(p.types().all(|k| p.marginal_gain(a.ty, x, p.affinity(a.ty, k)) <= p.link_cost));
        }
        assert!(a.final_outdegree > 0 || a.lft.is_none());
        if let Some(lft) = a.lft {
            assert!(lft >= 1 && a.birth + lft - 1 <= c.horizon);
        }
        if let Some(at) = a.deactivated_at {
            assert!(!a.censored && at >= a.birth);
        }
    }
    for t in &r.trajectories {
        let values: Vec<u32> = t.iter().map(|(_, d)| d).collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]), "indegree decreased");
        assert_eq!(*values.last().unwrap(), r.agent(t.agent).unwrap().final_indegree);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invariants_hold_for_random_configs(
        weights in proptest::collection::vec(0.05f64..1.0, 1..4),
        decay in 0.0f64..=1.0,
        gamma in prop_oneof![Just(0.0), Just(1.0), 0.0f64..1.0],
        cost in 0.05f64..0.6,
        horizon in 1u64..160,
        seed in any::<u64>(),
    ) {
        let total: f64 = weights.iter().sum();
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let p = ModelParams::new(probs, 1.0, decay, 1.0, cost, gamma).unwrap();
        let mut c = SimConfig::new(p, horizon);
        c.seed = seed;
        let r = run(&c).unwrap();
        check(&c, &r);
    }
}
