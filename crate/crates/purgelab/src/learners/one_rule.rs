//! 1R: the single best attribute by training error.
//!
//! Numeric attributes are bucketed greedily in value order — a bucket closes
//! once it holds at least `min_bucket` (default 6) instances and the next
//! value differs — then adjacent buckets with the same majority class merge.
//! Categorical attributes get one bucket per value. Instances with a missing
//! value form their own bucket. Values unseen in training fall back to the
//! overall training distribution.

use crate::datakit::{AttrKind, Cell, Dataset, Instance};
use crate::{Error, Result};

use super::{argmax_first, LearnerFactory, LearnerSpec, ModelKernel};

pub struct OneRuleFactory;

impl LearnerFactory for OneRuleFactory {
    fn allowed_keys(&self) -> &'static [&'static str] {
        &["min_bucket"]
    }

    fn validate(&self, spec: &LearnerSpec) -> Result<()> {
        if spec.param_usize("min_bucket", 6)? == 0 {
            return Err(Error::InvalidArg("one-rule: min_bucket must be >= 1".into()));
        }
        Ok(())
    }

    fn fit(&self, spec: &LearnerSpec, train: &Dataset) -> Result<Box<dyn ModelKernel>> {
        let min_bucket = spec.param_usize("min_bucket", 6)?;
        let k = train.class_count();
        let fallback = train.class_histogram();

        let mut best: Option<(usize, Rule)> = None; // (error, rule)
        for (attr, meta) in train.attributes.iter().enumerate() {
            let rule = match &meta.kind {
                AttrKind::Numeric => numeric_rule(train, attr, min_bucket, k),
                AttrKind::Categorical(values) => categorical_rule(train, attr, values.len(), k),
            };
            let err = rule.training_error();
            let better = match &best {
                None => true,
                Some((best_err, _)) => err < *best_err,
            };
            if better {
                best = Some((err, rule));
            }
        }
        let (_, rule) = best.expect("validated dataset has at least one attribute");
        Ok(Box::new(OneRuleModel { rule, fallback, class_count: k }))
    }
}

#[derive(Debug)]
enum Rule {
    Numeric {
        attr: usize,
        /// Bucket `i` covers values `<= uppers[i]`; the final bucket is
        /// unbounded, so `uppers.len() == buckets.len() - 1`.
        uppers: Vec<f64>,
        buckets: Vec<Vec<usize>>,
        missing: Option<Vec<usize>>,
    },
    Categorical {
        attr: usize,
        per_value: Vec<Vec<usize>>,
        missing: Option<Vec<usize>>,
    },
}

fn bucket_error(counts: &[usize]) -> usize {
    let total: usize = counts.iter().sum();
    total - counts.iter().max().copied().unwrap_or(0)
}

impl Rule {
    fn training_error(&self) -> usize {
        match self {
            Rule::Numeric { buckets, missing, .. } => {
                buckets.iter().map(|b| bucket_error(b)).sum::<usize>()
                    + missing.as_ref().map_or(0, |m| bucket_error(m))
            }
            Rule::Categorical { per_value, missing, .. } => {
                per_value.iter().map(|b| bucket_error(b)).sum::<usize>()
                    + missing.as_ref().map_or(0, |m| bucket_error(m))
            }
        }
    }
}

fn numeric_rule(train: &Dataset, attr: usize, min_bucket: usize, k: usize) -> Rule {
    let mut present: Vec<(f64, usize)> = train
        .instances
        .iter()
        .filter_map(|inst| inst.values[attr].as_num().map(|v| (v, inst.label)))
        .collect();
    present.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut missing_counts = vec![0usize; k];
    let mut any_missing = false;
    for inst in &train.instances {
        if inst.values[attr].is_missing() {
            missing_counts[inst.label] += 1;
            any_missing = true;
        }
    }

    let mut buckets: Vec<Vec<usize>> = Vec::new();
    let mut uppers: Vec<f64> = Vec::new();
    let mut current = vec![0usize; k];
    let mut size = 0usize;
    for i in 0..present.len() {
        current[present[i].1] += 1;
        size += 1;
        let at_value_boundary = i + 1 == present.len() || present[i].0 != present[i + 1].0;
        if size >= min_bucket && at_value_boundary && i + 1 < present.len() {
            uppers.push((present[i].0 + present[i + 1].0) / 2.0);
            buckets.push(std::mem::replace(&mut current, vec![0usize; k]));
            size = 0;
        }
    }
    if size > 0 || buckets.is_empty() {
        buckets.push(current);
    }
    // A trailing undersized bucket merges into its predecessor.
    if buckets.len() >= 2 && buckets.last().unwrap().iter().sum::<usize>() < min_bucket {
        let tail = buckets.pop().unwrap();
        uppers.pop();
        let last = buckets.last_mut().unwrap();
        for (a, b) in last.iter_mut().zip(&tail) {
            *a += b;
        }
    }
    // Merge adjacent buckets sharing a majority class.
    let mut merged: Vec<Vec<usize>> = Vec::new();
    let mut merged_uppers: Vec<f64> = Vec::new();
    for (i, bucket) in buckets.into_iter().enumerate() {
        let majority = |counts: &[usize]| {
            argmax_first(&counts.iter().map(|&c| c as f64).collect::<Vec<_>>())
        };
        if let Some(prev) = merged.last_mut() {
            if majority(prev) == majority(&bucket) {
                for (a, b) in prev.iter_mut().zip(&bucket) {
                    *a += b;
                }
                if i <= uppers.len() {
                    merged_uppers.pop();
                    if i < uppers.len() {
                        merged_uppers.push(uppers[i]);
                    }
                }
                continue;
            }
        }
        merged.push(bucket);
        if i < uppers.len() {
            merged_uppers.push(uppers[i]);
        }
    }
    Rule::Numeric {
        attr,
        uppers: merged_uppers,
        buckets: merged,
        missing: any_missing.then_some(missing_counts),
    }
}

fn categorical_rule(train: &Dataset, attr: usize, value_count: usize, k: usize) -> Rule {
    let mut per_value = vec![vec![0usize; k]; value_count];
    let mut missing_counts = vec![0usize; k];
    let mut any_missing = false;
    for inst in &train.instances {
        match inst.values[attr] {
            Cell::Cat(v) => per_value[v][inst.label] += 1,
            Cell::Missing => {
                missing_counts[inst.label] += 1;
                any_missing = true;
            }
            Cell::Num(_) => {}
        }
    }
    Rule::Categorical { attr, per_value, missing: any_missing.then_some(missing_counts) }
}

struct OneRuleModel {
    rule: Rule,
    fallback: Vec<usize>,
    class_count: usize,
}

impl OneRuleModel {
    fn bucket_for(&self, instance: &Instance) -> &[usize] {
        match &self.rule {
            Rule::Numeric { attr, uppers, buckets, missing } => {
                match instance.values[*attr] {
                    Cell::Num(v) => {
                        let mut idx = uppers.len();
                        for (i, u) in uppers.iter().enumerate() {
                            if v <= *u {
                                idx = i;
                                break;
                            }
                        }
                        let counts = &buckets[idx];
                        if counts.iter().sum::<usize>() == 0 {
                            &self.fallback
                        } else {
                            counts
                        }
                    }
                    _ => missing.as_deref().unwrap_or(&self.fallback),
                }
            }
            Rule::Categorical { attr, per_value, missing } => match instance.values[*attr] {
                Cell::Cat(v) => {
                    let counts = &per_value[v];
                    if counts.iter().sum::<usize>() == 0 {
                        &self.fallback
                    } else {
                        counts
                    }
                }
                _ => missing.as_deref().unwrap_or(&self.fallback),
            },
        }
    }
}

impl ModelKernel for OneRuleModel {
    fn class_distribution(&self, instance: &Instance) -> Vec<f64> {
        let counts = self.bucket_for(instance);
        let total: usize = counts.iter().sum();
        if total == 0 {
            return vec![1.0 / self.class_count as f64; self.class_count];
        }
        counts.iter().map(|&c| c as f64 / total as f64).collect()
    }
}
