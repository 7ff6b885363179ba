//! Discrete-time simulator of microfounded social network formation.
//!
//! Typed agents arrive one per step, meet either friends of friends or
//! strangers, and link myopically while the marginal benefit of a link beats
//! its cost. The [`analytics`] module turns simulation logs into the
//! statistics the closed forms in [`analytics::oracle`] predict.

// `!(x > 0.0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod decision;
pub mod error;
pub mod graph;
pub mod io;
pub mod meeting;
pub mod model;
pub mod sim;

pub use error::{Error, Result};
pub use graph::{AgentId, NetworkState};
pub use model::{ModelParams, TypeId};
pub use sim::{run, run_ensemble, EnsembleResult, ReplicationResult, SimConfig};
