//! purgelab — a label-noise filtering laboratory.
//!
//! Training sets collected in the wild carry mislabeled instances. This crate
//! identifies and removes them with misclassification filters built on a
//! pluggable set of classifiers, and provides the instrumentation needed to
//! study when filtering actually helps:
//!
//! * [`datakit`] — dataset schema, CSV/ARFF loading, stratified folds,
//!   synthetic blob generation and seeded label-noise injection.
//! * [`learners`] — five built-in classifiers (decision tree, k-NN, naive
//!   Bayes, MLP, one-rule) behind a registry addressable by textual id.
//! * [`filters`] — biased (single-learner), ensemble-threshold, and adaptive
//!   greedy filters over a shared misclassification-flagging step.
//! * [`diversity`] — classifier output difference (COD) matrices and
//!   average-linkage clustering of learners, with dendrogram cuts and
//!   per-cluster medoid representatives.
//! * [`measures`] — per-instance hardness (IH, kDN, DS, DCP, TD, CL, CLD,
//!   MV, CB) and per-dataset complexity (F2–F4, N1–N3, T1–T2) measures.
//! * [`evalstats`] — the experiment engine: voting ensembles, repeated
//!   stratified cross-validation grids, Wilcoxon signed-ranks tests, and
//!   summary tables.
//! * [`cli`] — the `purgelab` command-line driver (`filter`, `run`,
//!   `measures`, `cod`, `noise`).
//!
//! Every randomized component is seeded and bit-reproducible; see [`rng`] for
//! the generator and seed-derivation scheme. The `examples/` directory holds
//! one runnable example per capability.

pub mod cli;
pub mod cv;
pub mod datakit;
pub mod distance;
pub mod diversity;
pub mod error;
pub mod evalstats;
pub mod filters;
pub mod learners;
pub mod measures;
pub mod rng;

pub use error::{Error, Result};
