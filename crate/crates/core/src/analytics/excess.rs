use crate::error::{Error, Result};
use crate::model::TypeId;
use crate::sim::ReplicationResult;

use super::lft::MIN_SAMPLES;

/// Empirical maximum excess representation of type `target` among the
/// friends of saturated type-`seeker` agents born at or after `warmup`: the
/// largest observed share `|N⁺ᵐ| / deg⁺`.
pub fn excess_representation<'a>(
    replications: impl IntoIterator<Item = &'a ReplicationResult>,
    seeker: TypeId,
    target: TypeId,
    warmup: u64,
) -> Result<f64> {
    let mut sampled = 0;
    let mut best = 0.0f64;
    for rep in replications {
        let mut of_target = vec![0u32; rep.agents.len()];
        for e in &rep.edges {
            if rep.agents[e.target.0 as usize - 1].ty == target {
                of_target[e.source.0 as usize - 1] += 1;
            }
        }
        for a in &rep.agents {
            let saturated = a.deactivated_at.is_some() && a.links_formed > 0;
            if a.ty != seeker || !saturated || a.birth < warmup {
                continue;
            }
            sampled += 1;
            best = best.max(f64::from(of_target[a.id.0 as usize - 1]) / f64::from(a.links_formed));
        }
    }
    if sampled < MIN_SAMPLES {
        return Err(Error::Insufficient {
            what: "saturated agents for excess representation",
            needed: MIN_SAMPLES,
            have: sampled,
        });
    }
    Ok(best)
}
