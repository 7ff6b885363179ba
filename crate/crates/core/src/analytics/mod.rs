//! Estimators over simulation logs, dominance and growth tests, and the
//! closed-form oracles they are checked against.

pub mod excess;
pub mod fosd;
pub mod growth;
pub mod kernel;
pub mod lambert;
pub mod lft;
pub mod oracle;
pub mod popularity;
pub mod regression;

pub use excess::excess_representation;
pub use fosd::{dkw_epsilon, fosd_test, FosdResult, Verdict};
pub use growth::{fit_growth, fit_tail, log_spaced_points, GrowthFit, GrowthModel};
pub use kernel::{estimate_attachment_kernel, KernelEstimate, KernelKind, KernelStratum};
pub use lambert::lambert_w_minus1;
pub use lft::{estimate_elft, lft_pmf, Estimate, LftDistribution, Stratum};
pub use oracle::{
    crossover_multiplier, h1_elft, oracle_crossover, oracle_elft, oracle_growth, GrowthLaw, OracleReport,
    Regime,
};
pub use popularity::{
    acquisition_time, crossover_time, default_window, estimate_epat, mean_trajectory, MeanTrajectory,
};
pub use regression::LinearFit;
