//! Stratified k-fold assignment.

use rand::seq::SliceRandom;

use super::Dataset;
use crate::rng;
use crate::{Error, Result};

/// A per-instance fold assignment. Regenerating with the same
/// (dataset order, fold_count, seed) yields an identical plan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldPlan {
    pub fold_count: usize,
    pub seed: u64,
    pub assignment: Vec<usize>,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &f)| f != fold)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Shuffle each class with the seeded generator, then deal its instances to
/// consecutive folds starting at `class_index % fold_count`. Per class, fold
/// sizes differ by at most one; classes with fewer instances than folds are
/// spread round-robin.
pub fn stratified_folds(ds: &Dataset, fold_count: usize, seed: u64) -> Result<FoldPlan> {
    if fold_count < 2 {
        return Err(Error::InvalidArg(format!("fold count {fold_count} < 2")));
    }
    if fold_count > ds.len() {
        return Err(Error::InvalidArg(format!(
            "fold count {fold_count} exceeds instance count {}",
            ds.len()
        )));
    }
    let mut rng = rng::rng(seed);
    let mut assignment = vec![0usize; ds.len()];
    for class in 0..ds.class_count() {
        let mut idx: Vec<usize> = ds
            .instances
            .iter()
            .enumerate()
            .filter(|(_, inst)| inst.label == class)
            .map(|(i, _)| i)
            .collect();
        idx.shuffle(&mut rng);
        for (pos, &i) in idx.iter().enumerate() {
            assignment[i] = (class + pos) % fold_count;
        }
    }
    Ok(FoldPlan { fold_count, seed, assignment })
}
