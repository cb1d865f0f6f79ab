//! Decision tree with gain-ratio splits.
//!
//! Numeric attributes split on a binary threshold (midpoints between
//! consecutive distinct values, chosen by a single sorted sweep); categorical
//! attributes split multiway on their value list. Two modes: unpruned, and
//! reduced-error pruning against a seeded 20% holdout of the training set
//! (`prune=none` / `prune=reduced-error`, the default).
//!
//! Missing values are excluded from a split's gain computation and routed to
//! the child with the larger training coverage, both while partitioning the
//! training data and at prediction time.
//!
//! The model exposes per-leaf depth and coverage, which the hardness measures
//! (disjunct size, disjunct class percentage, tree depth) consume directly.

use rand::seq::SliceRandom;

use crate::datakit::{AttrKind, Cell, Dataset, Instance};
use crate::rng;
use crate::{Error, Result};

use super::{argmax_first, LearnerFactory, LearnerSpec, ModelKernel};

const MIN_SPLIT: usize = 2;
const PRUNE_FRACTION: f64 = 0.2;
const GAIN_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prune {
    None,
    ReducedError,
}

#[derive(Clone, Copy, Debug)]
pub struct TreeParams {
    pub prune: Prune,
    pub seed: u64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { prune: Prune::ReducedError, seed: 0 }
    }
}

pub struct TreeFactory;

impl LearnerFactory for TreeFactory {
    fn allowed_keys(&self) -> &'static [&'static str] {
        &["prune"]
    }

    fn validate(&self, spec: &LearnerSpec) -> Result<()> {
        parse_prune(&spec.param_str("prune", "reduced-error")).map(|_| ())
    }

    fn fit(&self, spec: &LearnerSpec, train: &Dataset) -> Result<Box<dyn ModelKernel>> {
        let prune = parse_prune(&spec.param_str("prune", "reduced-error"))?;
        Ok(Box::new(fit_tree(train, &TreeParams { prune, seed: spec.seed() })))
    }
}

fn parse_prune(text: &str) -> Result<Prune> {
    match text {
        "none" => Ok(Prune::None),
        "reduced-error" => Ok(Prune::ReducedError),
        other => Err(Error::InvalidArg(format!(
            "decision-tree: prune must be `none` or `reduced-error`, got `{other}`"
        ))),
    }
}

#[derive(Clone, Debug)]
enum NodeKind {
    Leaf,
    NumericSplit { attr: usize, threshold: f64, left: usize, right: usize, majority_left: bool },
    CategoricalSplit { attr: usize, children: Vec<usize>, majority_child: usize },
}

#[derive(Clone, Debug)]
struct Node {
    depth: usize,
    class_counts: Vec<usize>,
    kind: NodeKind,
}

pub struct DecisionTreeModel {
    nodes: Vec<Node>,
    class_count: usize,
}

/// Grow (and optionally prune) a tree. Deterministic in (data order, params).
pub fn fit_tree(train: &Dataset, params: &TreeParams) -> DecisionTreeModel {
    let all: Vec<usize> = (0..train.len()).collect();
    match params.prune {
        Prune::None => Builder::new(train).build_from(&all),
        Prune::ReducedError => {
            let (grow, prune) = prune_holdout(train, params.seed);
            if prune.is_empty() {
                return Builder::new(train).build_from(&all);
            }
            let mut model = Builder::new(train).build_from(&grow);
            model.reduced_error_prune(train, &prune);
            model
        }
    }
}

/// Seeded stratified 20% holdout; classes too small to contribute simply
/// stay in the grow set.
fn prune_holdout(train: &Dataset, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = rng::rng(rng::mix_seed(&[seed, 0x7052_554E]));
    let mut grow = Vec::new();
    let mut prune = Vec::new();
    for class in 0..train.class_count() {
        let mut idx: Vec<usize> = train
            .instances
            .iter()
            .enumerate()
            .filter(|(_, inst)| inst.label == class)
            .map(|(i, _)| i)
            .collect();
        idx.shuffle(&mut rng);
        let take = ((idx.len() as f64) * PRUNE_FRACTION).round() as usize;
        let take = take.min(idx.len().saturating_sub(1));
        prune.extend(idx.drain(..take));
        grow.extend(idx);
    }
    grow.sort_unstable();
    prune.sort_unstable();
    (grow, prune)
}

struct Builder<'a> {
    train: &'a Dataset,
    nodes: Vec<Node>,
}

struct Split {
    attr: usize,
    gain_ratio: f64,
    kind: SplitKind,
}

enum SplitKind {
    Numeric { threshold: f64 },
    Categorical,
}

impl<'a> Builder<'a> {
    fn new(train: &'a Dataset) -> Self {
        Builder { train, nodes: Vec::new() }
    }

    fn build_from(mut self, indices: &[usize]) -> DecisionTreeModel {
        self.build(indices, 0);
        DecisionTreeModel { nodes: self.nodes, class_count: self.train.class_count() }
    }

    fn histogram(&self, indices: &[usize]) -> Vec<usize> {
        let mut h = vec![0usize; self.train.class_count()];
        for &i in indices {
            h[self.train.instances[i].label] += 1;
        }
        h
    }

    fn build(&mut self, indices: &[usize], depth: usize) -> usize {
        let counts = self.histogram(indices);
        let id = self.nodes.len();
        self.nodes.push(Node { depth, class_counts: counts.clone(), kind: NodeKind::Leaf });

        let classes_present = counts.iter().filter(|&&c| c > 0).count();
        if indices.len() < MIN_SPLIT || classes_present <= 1 {
            return id;
        }
        let Some(split) = self.best_split(indices) else {
            return id;
        };

        match split.kind {
            SplitKind::Numeric { threshold } => {
                let attr = split.attr;
                let mut left = Vec::new();
                let mut right = Vec::new();
                let mut missing = Vec::new();
                for &i in indices {
                    match self.train.instances[i].values[attr] {
                        Cell::Num(v) if v <= threshold => left.push(i),
                        Cell::Num(_) => right.push(i),
                        _ => missing.push(i),
                    }
                }
                let majority_left = left.len() >= right.len();
                if majority_left {
                    left.extend(missing);
                } else {
                    right.extend(missing);
                }
                let left_id = self.build(&left, depth + 1);
                let right_id = self.build(&right, depth + 1);
                self.nodes[id].kind = NodeKind::NumericSplit {
                    attr,
                    threshold,
                    left: left_id,
                    right: right_id,
                    majority_left,
                };
            }
            SplitKind::Categorical => {
                let attr = split.attr;
                let value_count = match &self.train.attributes[attr].kind {
                    AttrKind::Categorical(values) => values.len(),
                    AttrKind::Numeric => unreachable!("categorical split on numeric attribute"),
                };
                let mut groups: Vec<Vec<usize>> = vec![Vec::new(); value_count];
                let mut missing = Vec::new();
                for &i in indices {
                    match self.train.instances[i].values[attr] {
                        Cell::Cat(v) => groups[v].push(i),
                        _ => missing.push(i),
                    }
                }
                let majority_child =
                    (0..value_count).max_by_key(|&v| (groups[v].len(), usize::MAX - v)).unwrap_or(0);
                groups[majority_child].extend(missing);
                let parent_counts = self.nodes[id].class_counts.clone();
                let children: Vec<usize> = groups
                    .iter()
                    .enumerate()
                    .map(|(_, g)| {
                        if g.is_empty() {
                            // Unseen value: a leaf echoing the parent's stats.
                            let cid = self.nodes.len();
                            self.nodes.push(Node {
                                depth: depth + 1,
                                class_counts: parent_counts.clone(),
                                kind: NodeKind::Leaf,
                            });
                            cid
                        } else {
                            self.build(g, depth + 1)
                        }
                    })
                    .collect();
                self.nodes[id].kind = NodeKind::CategoricalSplit { attr, children, majority_child };
            }
        }
        id
    }

    /// Highest gain-ratio split; ties break toward the lowest attribute index
    /// and the lowest threshold.
    fn best_split(&self, indices: &[usize]) -> Option<Split> {
        let mut best: Option<Split> = None;
        for (attr, meta) in self.train.attributes.iter().enumerate() {
            let candidate = match &meta.kind {
                AttrKind::Numeric => self.best_numeric_split(indices, attr),
                AttrKind::Categorical(values) => self.categorical_split(indices, attr, values.len()),
            };
            if let Some(c) = candidate {
                let better = match &best {
                    None => true,
                    Some(b) => c.gain_ratio > b.gain_ratio + GAIN_EPS,
                };
                if better {
                    best = Some(c);
                }
            }
        }
        best
    }

    fn best_numeric_split(&self, indices: &[usize], attr: usize) -> Option<Split> {
        let k = self.train.class_count();
        let mut present: Vec<(f64, usize)> = indices
            .iter()
            .filter_map(|&i| {
                self.train.instances[i].values[attr]
                    .as_num()
                    .map(|v| (v, self.train.instances[i].label))
            })
            .collect();
        if present.len() < 2 {
            return None;
        }
        present.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let total: Vec<usize> = {
            let mut h = vec![0usize; k];
            for &(_, label) in &present {
                h[label] += 1;
            }
            h
        };
        let n = present.len() as f64;
        let parent_entropy = entropy(&total, n);

        let mut left = vec![0usize; k];
        let mut best: Option<(f64, f64)> = None; // (gain_ratio, threshold)
        for i in 0..present.len() - 1 {
            left[present[i].1] += 1;
            if present[i].0 == present[i + 1].0 {
                continue;
            }
            let nl = (i + 1) as f64;
            let nr = n - nl;
            let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
            let gain = parent_entropy - (nl / n) * entropy(&left, nl) - (nr / n) * entropy(&right, nr);
            if gain <= GAIN_EPS {
                continue;
            }
            let split_info = binary_entropy(nl / n);
            if split_info <= GAIN_EPS {
                continue;
            }
            let ratio = gain / split_info;
            let threshold = (present[i].0 + present[i + 1].0) / 2.0;
            let better = match best {
                None => true,
                Some((r, t)) => ratio > r + GAIN_EPS || (ratio > r - GAIN_EPS && threshold < t),
            };
            if better {
                best = Some((ratio, threshold));
            }
        }
        best.map(|(gain_ratio, threshold)| Split {
            attr,
            gain_ratio,
            kind: SplitKind::Numeric { threshold },
        })
    }

    fn categorical_split(&self, indices: &[usize], attr: usize, value_count: usize) -> Option<Split> {
        let k = self.train.class_count();
        let mut groups = vec![vec![0usize; k]; value_count];
        let mut total = vec![0usize; k];
        let mut n = 0.0;
        for &i in indices {
            if let Cell::Cat(v) = self.train.instances[i].values[attr] {
                let label = self.train.instances[i].label;
                groups[v][label] += 1;
                total[label] += 1;
                n += 1.0;
            }
        }
        let non_empty = groups.iter().filter(|g| g.iter().sum::<usize>() > 0).count();
        if non_empty < 2 {
            return None;
        }
        let parent_entropy = entropy(&total, n);
        let mut gain = parent_entropy;
        let mut split_info = 0.0;
        for g in &groups {
            let size: usize = g.iter().sum();
            if size == 0 {
                continue;
            }
            let frac = size as f64 / n;
            gain -= frac * entropy(g, size as f64);
            split_info -= frac * frac.log2();
        }
        if gain <= GAIN_EPS || split_info <= GAIN_EPS {
            return None;
        }
        Some(Split { attr, gain_ratio: gain / split_info, kind: SplitKind::Categorical })
    }
}

fn entropy(counts: &[usize], n: f64) -> f64 {
    if n <= 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / n;
            h -= p * p.log2();
        }
    }
    h
}

fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

impl DecisionTreeModel {
    fn route(&self, instance: &Instance) -> usize {
        let mut id = 0;
        loop {
            match &self.nodes[id].kind {
                NodeKind::Leaf => return id,
                NodeKind::NumericSplit { attr, threshold, left, right, majority_left } => {
                    id = match instance.values[*attr] {
                        Cell::Num(v) => {
                            if v <= *threshold {
                                *left
                            } else {
                                *right
                            }
                        }
                        _ => {
                            if *majority_left {
                                *left
                            } else {
                                *right
                            }
                        }
                    };
                }
                NodeKind::CategoricalSplit { attr, children, majority_child } => {
                    id = match instance.values[*attr] {
                        Cell::Cat(v) => children[v],
                        _ => children[*majority_child],
                    };
                }
            }
        }
    }

    /// Leaf node the instance routes to.
    pub fn leaf_of(&self, instance: &Instance) -> usize {
        self.route(instance)
    }

    /// Depth of a node; the root has depth 0.
    pub fn node_depth(&self, id: usize) -> usize {
        self.nodes[id].depth
    }

    /// Reachable leaf ids in routing order.
    pub fn leaf_ids(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            match &self.nodes[id].kind {
                NodeKind::Leaf => out.push(id),
                NodeKind::NumericSplit { left, right, .. } => {
                    stack.push(*right);
                    stack.push(*left);
                }
                NodeKind::CategoricalSplit { children, .. } => {
                    stack.extend(children.iter().rev());
                }
            }
        }
        out
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_ids().len()
    }

    /// Reduced-error pruning: collapse any subtree whose majority-leaf error
    /// on the prune set does not exceed the subtree's error.
    fn reduced_error_prune(&mut self, train: &Dataset, prune: &[usize]) {
        let mut reach: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for &i in prune {
            let mut id = 0;
            loop {
                reach[id].push(i);
                match &self.nodes[id].kind {
                    NodeKind::Leaf => break,
                    NodeKind::NumericSplit { attr, threshold, left, right, majority_left } => {
                        id = match train.instances[i].values[*attr] {
                            Cell::Num(v) => {
                                if v <= *threshold {
                                    *left
                                } else {
                                    *right
                                }
                            }
                            _ => {
                                if *majority_left {
                                    *left
                                } else {
                                    *right
                                }
                            }
                        };
                    }
                    NodeKind::CategoricalSplit { attr, children, majority_child } => {
                        id = match train.instances[i].values[*attr] {
                            Cell::Cat(v) => children[v],
                            _ => children[*majority_child],
                        };
                    }
                }
            }
        }
        // Children always carry larger ids than their parent, so a reverse
        // scan visits every subtree bottom-up.
        let mut subtree_error = vec![0usize; self.nodes.len()];
        for id in (0..self.nodes.len()).rev() {
            let majority = argmax_first(
                &self.nodes[id].class_counts.iter().map(|&c| c as f64).collect::<Vec<_>>(),
            );
            let leaf_error =
                reach[id].iter().filter(|&&i| train.instances[i].label != majority).count();
            let children: Vec<usize> = match &self.nodes[id].kind {
                NodeKind::Leaf => Vec::new(),
                NodeKind::NumericSplit { left, right, .. } => vec![*left, *right],
                NodeKind::CategoricalSplit { children, .. } => children.clone(),
            };
            if children.is_empty() {
                subtree_error[id] = leaf_error;
                continue;
            }
            let child_error: usize = children.iter().map(|&c| subtree_error[c]).sum();
            if leaf_error <= child_error {
                self.nodes[id].kind = NodeKind::Leaf;
                subtree_error[id] = leaf_error;
            } else {
                subtree_error[id] = child_error;
            }
        }
    }
}

impl ModelKernel for DecisionTreeModel {
    fn class_distribution(&self, instance: &Instance) -> Vec<f64> {
        let counts = &self.nodes[self.route(instance)].class_counts;
        let total: usize = counts.iter().sum();
        if total == 0 {
            return vec![1.0 / self.class_count as f64; self.class_count];
        }
        counts.iter().map(|&c| c as f64 / total as f64).collect()
    }
}
