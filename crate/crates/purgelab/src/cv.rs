//! Repeated cross-validation protocol description.

use crate::rng::mix_seed;
use crate::{Error, Result};

/// A repeated stratified k-fold protocol. The fold plan for repeat `r` is
/// seeded with `mix_seed([seed, r])`, so two components given the same
/// protocol partition the data identically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CvProtocol {
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
}

impl CvProtocol {
    pub fn new(folds: usize, repeats: usize, seed: u64) -> Result<Self> {
        if folds < 2 {
            return Err(Error::InvalidArg(format!("fold count {folds} < 2")));
        }
        if repeats < 1 {
            return Err(Error::InvalidArg("repeats must be >= 1".into()));
        }
        Ok(CvProtocol { folds, repeats, seed })
    }

    /// The paper-style default: 10-fold cross-validation repeated 5 times.
    pub fn five_by_ten(seed: u64) -> Self {
        CvProtocol { folds: 10, repeats: 5, seed }
    }

    pub fn fold_seed(&self, repeat: usize) -> u64 {
        mix_seed(&[self.seed, repeat as u64])
    }
}
