//! k-nearest neighbors with HEOM distance.
//!
//! Missing values contribute unit distance per attribute (see
//! [`crate::distance`]). Neighbor selection sorts by (distance, training
//! index); vote ties resolve to the lowest class index via the shared
//! distribution argmax.

use crate::datakit::{Dataset, Instance};
use crate::distance::Heom;
use crate::{Error, Result};

use super::{LearnerFactory, LearnerSpec, ModelKernel};

pub struct KnnFactory;

impl LearnerFactory for KnnFactory {
    fn allowed_keys(&self) -> &'static [&'static str] {
        &["k"]
    }

    fn validate(&self, spec: &LearnerSpec) -> Result<()> {
        let k = spec.param_usize("k", 5)?;
        if k == 0 {
            return Err(Error::InvalidArg("knn: k must be >= 1".into()));
        }
        Ok(())
    }

    fn fit(&self, spec: &LearnerSpec, train: &Dataset) -> Result<Box<dyn ModelKernel>> {
        let k = spec.param_usize("k", 5)?;
        Ok(Box::new(KnnModel {
            heom: Heom::fit(train),
            instances: train.instances.clone(),
            k,
            class_count: train.class_count(),
        }))
    }
}

pub struct KnnModel {
    heom: Heom,
    instances: Vec<Instance>,
    k: usize,
    class_count: usize,
}

impl ModelKernel for KnnModel {
    fn class_distribution(&self, instance: &Instance) -> Vec<f64> {
        let mut scored: Vec<(f64, usize)> = self
            .instances
            .iter()
            .enumerate()
            .map(|(i, t)| (self.heom.distance(instance, t), i))
            .collect();
        scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let k = self.k.min(scored.len());
        let mut votes = vec![0.0; self.class_count];
        for (_, i) in scored.into_iter().take(k) {
            votes[self.instances[i].label] += 1.0;
        }
        for v in &mut votes {
            *v /= k as f64;
        }
        votes
    }
}
