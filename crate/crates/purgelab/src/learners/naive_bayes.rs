//! Naive Bayes.
//!
//! Class priors are unsmoothed counts `n_c / n`. Numeric attributes get a
//! per-class Gaussian with the variance floored at 1e-9; categorical
//! attributes get Laplace-1 counts, `(count(v,c) + 1) / (observed_c + |V|)`
//! where `observed_c` counts the class's non-missing cells for the attribute.
//! Missing cells are skipped per attribute, both in training and prediction.
//! Scores are accumulated in log space and normalized into a distribution.

use crate::datakit::{AttrKind, Cell, Dataset, Instance};
use crate::Result;

use super::{LearnerFactory, LearnerSpec, ModelKernel};

const VAR_FLOOR: f64 = 1e-9;

pub struct NaiveBayesFactory;

impl LearnerFactory for NaiveBayesFactory {
    fn allowed_keys(&self) -> &'static [&'static str] {
        &[]
    }

    fn fit(&self, _spec: &LearnerSpec, train: &Dataset) -> Result<Box<dyn ModelKernel>> {
        let k = train.class_count();
        let n = train.len();
        let class_counts = train.class_histogram();
        let priors: Vec<f64> = class_counts.iter().map(|&c| c as f64 / n as f64).collect();

        let mut attrs = Vec::with_capacity(train.attributes.len());
        for (j, attr) in train.attributes.iter().enumerate() {
            match &attr.kind {
                AttrKind::Numeric => {
                    let mut per_class = Vec::with_capacity(k);
                    for c in 0..k {
                        let values: Vec<f64> = train
                            .instances
                            .iter()
                            .filter(|i| i.label == c)
                            .filter_map(|i| i.values[j].as_num())
                            .collect();
                        if values.is_empty() {
                            per_class.push(None);
                        } else {
                            let m = values.len() as f64;
                            let mean = values.iter().sum::<f64>() / m;
                            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m;
                            per_class.push(Some((mean, var.max(VAR_FLOOR))));
                        }
                    }
                    attrs.push(AttrModel::Gaussian(per_class));
                }
                AttrKind::Categorical(values) => {
                    let v = values.len();
                    let mut table = vec![vec![0usize; v]; k];
                    let mut observed = vec![0usize; k];
                    for inst in &train.instances {
                        if let Cell::Cat(idx) = inst.values[j] {
                            table[inst.label][idx] += 1;
                            observed[inst.label] += 1;
                        }
                    }
                    let log_lik: Vec<Vec<f64>> = (0..k)
                        .map(|c| {
                            (0..v)
                                .map(|val| {
                                    ((table[c][val] + 1) as f64 / (observed[c] + v) as f64).ln()
                                })
                                .collect()
                        })
                        .collect();
                    attrs.push(AttrModel::Categorical(log_lik));
                }
            }
        }

        Ok(Box::new(NaiveBayesModel {
            log_priors: priors.iter().map(|&p| p.ln()).collect(),
            attrs,
            class_count: k,
        }))
    }
}

enum AttrModel {
    /// Per-class (mean, variance); None when the class never observed the
    /// attribute, in which case that attribute is skipped for the class.
    Gaussian(Vec<Option<(f64, f64)>>),
    /// Per-class log likelihood per value, Laplace-smoothed.
    Categorical(Vec<Vec<f64>>),
}

pub struct NaiveBayesModel {
    log_priors: Vec<f64>,
    attrs: Vec<AttrModel>,
    class_count: usize,
}

fn log_gaussian(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * (2.0 * std::f64::consts::PI * var).ln() - (x - mean) * (x - mean) / (2.0 * var)
}

impl ModelKernel for NaiveBayesModel {
    fn class_distribution(&self, instance: &Instance) -> Vec<f64> {
        let mut scores = self.log_priors.clone();
        for (j, cell) in instance.values.iter().enumerate() {
            if cell.is_missing() {
                continue;
            }
            for c in 0..self.class_count {
                if scores[c] == f64::NEG_INFINITY {
                    continue;
                }
                match (&self.attrs[j], cell) {
                    (AttrModel::Gaussian(per_class), Cell::Num(x)) => {
                        if let Some((mean, var)) = per_class[c] {
                            scores[c] += log_gaussian(*x, mean, var);
                        }
                    }
                    (AttrModel::Categorical(log_lik), Cell::Cat(v)) => {
                        scores[c] += log_lik[c][*v];
                    }
                    _ => {}
                }
            }
        }
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            // No class has positive prior mass; cannot happen on valid input.
            return vec![1.0 / self.class_count as f64; self.class_count];
        }
        let mut dist: Vec<f64> = scores.iter().map(|&s| (s - max).exp()).collect();
        let total: f64 = dist.iter().sum();
        for d in &mut dist {
            *d /= total;
        }
        dist
    }
}
