use netform::analytics::{
    acquisition_time, crossover_time, default_window, estimate_epat, excess_representation, mean_trajectory,
    LinearFit, Stratum,
};
use netform::sim::{run_ensemble, TrajectorySample};
use netform::{ModelParams, SimConfig, TypeId};

const T1: TypeId = TypeId::from_index(0);
const T2: TypeId = TypeId::from_index(1);

fn ensemble(
    decay: f64,
    gamma: f64,
    horizon: u64,
    reps: u32,
    tracked: Option<Vec<u64>>,
) -> netform::EnsembleResult {
    let params = ModelParams::new(vec![0.5, 0.5], 1.0, decay, 1.0, 0.2, gamma).unwrap();
    let mut c = SimConfig::new(params, horizon);
    c.seed = 77;
    c.replications = reps;
    c.record.meetings = false;
    if let Some(births) = tracked {
        c.trajectory_sample = TrajectorySample::Tracked(births);
    }
    run_ensemble(&c).unwrap()
}

#[test]
fn epat_is_one_at_zero_and_monotone_in_d() {
    let e = ensemble(1.0, 0.0, 3000, 40, Some((20..=30).collect()));
    let trajs: Vec<_> = e.replications.iter().flat_map(|r| &r.trajectories).collect();
    assert!(trajs.iter().all(|t| acquisition_time(t, 0) == Some(1)));
    let zero = estimate_epat(trajs.iter().copied(), 0, &Stratum::default()).unwrap();
    assert_eq!((zero.estimate.mean, zero.estimate.std_dev, zero.censored), (1.0, 0.0, 0));
    // Per trajectory the hitting time is monotone; over the agents that
    // reach both levels so is the mean.
    for t in &trajs {
        let hits: Vec<_> = (0..12).map_while(|d| acquisition_time(t, d)).collect();
        assert!(hits.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn epat_grows_no_faster_than_the_mean_field_power() {
    // The popularity acquisition time is at most of order d^{L̄/(L̄-1)} with
    // L̄ = 4. Over levels that almost every tracked agent reaches, the
    // log-log slope stays below 4/3.
    let e = ensemble(1.0, 0.0, 20000, 40, Some((20..=30).collect()));
    let trajs: Vec<_> = e.replications.iter().flat_map(|r| &r.trajectories).collect();
    let mut points = Vec::new();
    for d in [5u32, 8, 12, 18] {
        let est = estimate_epat(trajs.iter().copied(), d, &Stratum::default()).unwrap();
        assert!(est.censored * 10 < trajs.len(), "d={d}: {} censored", est.censored);
        points.push((f64::from(d).ln(), est.estimate.mean.ln()));
    }
    let slope = LinearFit::ols(&points).unwrap().slope;
    assert!(slope > 0.5 && slope < 4.0 / 3.0, "slope {slope}");
}

#[test]
fn excess_representation_by_regime() {
    let exclusive = ensemble(0.0, 0.5, 600, 4, None);
    let reps = &exclusive.replications;
    assert_eq!(excess_representation(reps, T1, T1, 50).unwrap(), 1.0);
    assert_eq!(excess_representation(reps, T2, T2, 50).unwrap(), 1.0);
    assert_eq!(excess_representation(reps, T1, T2, 50).unwrap(), 0.0);
    assert_eq!(excess_representation(reps, T2, T1, 50).unwrap(), 0.0);

    let indifferent = ensemble(1.0, 0.5, 600, 4, None);
    for (s, t) in [(T1, T1), (T1, T2), (T2, T1), (T2, T2)] {
        assert_eq!(excess_representation(&indifferent.replications, s, t, 50).unwrap(), 1.0);
    }
    assert!(excess_representation(&indifferent.replications, T1, T2, 599).is_err());
}

#[test]
fn no_crossover_between_ages_without_homophily() {
    // Everyone aims for the same L*, so an older agent stays ahead on average.
    for gamma in [0.0, 1.0] {
        let e = ensemble(1.0, gamma, 1000, 300, Some(vec![10, 30]));
        let mean_of = |birth: u64| {
            mean_trajectory(
                e.replications.iter().flat_map(|r| &r.trajectories).filter(|t| t.agent.birth() == birth),
            )
            .unwrap()
        };
        let (old, young) = (mean_of(10), mean_of(30));
        assert_eq!(crossover_time(&old, &young, default_window(1000)), None, "γ={gamma}");
    }
}
