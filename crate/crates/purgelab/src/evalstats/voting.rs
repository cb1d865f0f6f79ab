//! Equally weighted majority voting over heterogeneous learners.

use std::sync::Arc;

use crate::datakit::{Dataset, Instance};
use crate::learners::{self, LearnerSpec, ModelKernel, TrainedModel};
use crate::{Error, Result};

struct VotingKernel {
    members: Vec<TrainedModel>,
    class_count: usize,
}

impl ModelKernel for VotingKernel {
    fn class_distribution(&self, instance: &Instance) -> Vec<f64> {
        let mut votes = vec![0.0; self.class_count];
        for member in &self.members {
            // Members trained on the same schema; the wrapper validated it.
            if let Ok(p) = member.predict(instance) {
                votes[p] += 1.0;
            }
        }
        let total: f64 = votes.iter().sum();
        if total > 0.0 {
            for v in &mut votes {
                *v /= total;
            }
        }
        votes
    }
}

/// Fit every member and vote with equal weight; prediction ties resolve to
/// the lowest class index.
pub fn voting_fit(specs: &[LearnerSpec], train: &Dataset) -> Result<TrainedModel> {
    if specs.is_empty() {
        return Err(Error::InvalidArg("voting ensemble needs at least one member".into()));
    }
    let members: Result<Vec<TrainedModel>> =
        specs.iter().map(|spec| learners::fit(spec, train)).collect();
    let kernel = VotingKernel { members: members?, class_count: train.class_count() };
    learners::wrap_kernel(Arc::new(kernel), voting_spec(), train)
}

/// The pseudo-spec that labels voting-ensemble models and result rows.
pub fn voting_spec() -> LearnerSpec {
    LearnerSpec::unchecked("voting-ensemble")
}
