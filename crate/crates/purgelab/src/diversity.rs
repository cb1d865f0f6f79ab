//! Classifier Output Difference and learner clustering.
//!
//! COD measures the distance between two learners as the probability that
//! they make different predictions. Predictions come from out-of-fold
//! cross-validation (resubstitution would make memorizing learners look
//! identical), every learner sharing the same fold plan per dataset. Learners
//! are then clustered with average-linkage (UPGMA) agglomeration; cutting the
//! dendrogram and picking each cluster's medoid yields a diverse
//! representative subset.

use rayon::prelude::*;

use crate::cv::CvProtocol;
use crate::datakit::{stratified_folds, Dataset};
use crate::learners::{self, LearnerSpec};
use crate::{Error, Result};

/// Symmetric pairwise COD distances in [0,1] with a zero diagonal.
#[derive(Clone, Debug)]
pub struct CodMatrix {
    pub learner_ids: Vec<String>,
    distances: Vec<Vec<f64>>,
}

impl CodMatrix {
    pub fn new(learner_ids: Vec<String>, distances: Vec<Vec<f64>>) -> Result<Self> {
        let n = learner_ids.len();
        if distances.len() != n || distances.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidArg("COD matrix must be square".into()));
        }
        for i in 0..n {
            if distances[i][i] != 0.0 {
                return Err(Error::InvalidArg("COD diagonal must be zero".into()));
            }
            for j in 0..n {
                let d = distances[i][j];
                if !d.is_finite() || !(0.0..=1.0).contains(&d) {
                    return Err(Error::InvalidArg(format!("COD entry ({i},{j}) = {d} out of [0,1]")));
                }
                if (d - distances[j][i]).abs() > 1e-12 {
                    return Err(Error::InvalidArg(format!("COD entry ({i},{j}) is not symmetric")));
                }
            }
        }
        Ok(CodMatrix { learner_ids, distances })
    }

    pub fn len(&self) -> usize {
        self.learner_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.learner_ids.is_empty()
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.distances[a][b]
    }
}

/// Fraction of positions where two prediction sequences differ.
pub fn cod_pair(preds_a: &[usize], preds_b: &[usize]) -> Result<f64> {
    if preds_a.len() != preds_b.len() {
        return Err(Error::InvalidArg(format!(
            "prediction length mismatch: {} vs {}",
            preds_a.len(),
            preds_b.len()
        )));
    }
    if preds_a.is_empty() {
        return Err(Error::InvalidArg("empty prediction sequences".into()));
    }
    let differ = preds_a.iter().zip(preds_b).filter(|(a, b)| a != b).count();
    Ok(differ as f64 / preds_a.len() as f64)
}

/// Pairwise COD over a dataset collection: per (dataset, repeat), gather each
/// learner's out-of-fold predictions under a shared fold plan, then average
/// `cod_pair` across all (dataset, repeat) combinations.
pub fn cod_matrix(
    specs: &[LearnerSpec],
    datasets: &[Dataset],
    protocol: &CvProtocol,
) -> Result<CodMatrix> {
    if specs.len() < 2 {
        return Err(Error::InvalidArg("COD needs at least two learners".into()));
    }
    if datasets.is_empty() {
        return Err(Error::InvalidArg("COD needs at least one dataset".into()));
    }

    // Out-of-fold predictions, cell = (dataset, repeat, learner).
    let mut cells: Vec<(usize, usize, usize)> = Vec::new();
    for d in 0..datasets.len() {
        for r in 0..protocol.repeats {
            for l in 0..specs.len() {
                cells.push((d, r, l));
            }
        }
    }
    let predictions: Result<Vec<Vec<usize>>> = cells
        .par_iter()
        .map(|&(d, r, l)| {
            let ds = &datasets[d];
            let plan = stratified_folds(ds, protocol.folds, protocol.fold_seed(r))?;
            let spec = &specs[l];
            let mut preds = vec![0usize; ds.len()];
            for fold in 0..plan.fold_count {
                let test_idx = plan.test_indices(fold);
                if test_idx.is_empty() {
                    continue;
                }
                let train_idx = plan.train_indices(fold);
                let model = learners::fit(spec, &ds.subset(&train_idx)).map_err(|e| {
                    Error::LearnerFailed {
                        id: spec.label(),
                        message: format!("on dataset `{}`: {e}", ds.name),
                    }
                })?;
                for &i in &test_idx {
                    preds[i] = model.predict(&ds.instances[i])?;
                }
            }
            Ok(preds)
        })
        .collect();
    let predictions = predictions?;

    let n = specs.len();
    let combos = datasets.len() * protocol.repeats;
    let mut distances = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in (a + 1)..n {
            let mut total = 0.0;
            for (cell, preds_a) in cells.iter().zip(&predictions) {
                let (d, r, l) = *cell;
                if l != a {
                    continue;
                }
                let idx_b = cells
                    .iter()
                    .position(|&(d2, r2, l2)| d2 == d && r2 == r && l2 == b)
                    .expect("complete cell grid");
                total += cod_pair(preds_a, &predictions[idx_b])?;
            }
            let mean = total / combos as f64;
            distances[a][b] = mean;
            distances[b][a] = mean;
        }
    }
    CodMatrix::new(specs.iter().map(LearnerSpec::label).collect(), distances)
}

/// One agglomeration step. Cluster labels follow the usual stepwise
/// convention: leaves are `0..n`, the cluster created by merge `i` is `n+i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
}

#[derive(Clone, Debug)]
pub struct Dendrogram {
    pub leaf_ids: Vec<String>,
    pub merges: Vec<Merge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Linkage {
    Average,
}

/// Average-linkage (unweighted pair-group mean) agglomeration. The closest
/// active pair merges first; ties break toward the pair containing the
/// lowest leaf id. Heights are non-decreasing.
pub fn agglomerate(matrix: &CodMatrix, _linkage: Linkage) -> Result<Dendrogram> {
    let n = matrix.len();
    if n < 2 {
        return Err(Error::InvalidArg("agglomeration needs at least two leaves".into()));
    }

    struct Cluster {
        label: usize,
        min_leaf: usize,
        size: usize,
    }
    let mut active: Vec<Cluster> =
        (0..n).map(|i| Cluster { label: i, min_leaf: i, size: 1 }).collect();
    // dist[i][j] between active clusters, kept in sync with `active`.
    let mut dist: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| matrix.distance(i, j)).collect()).collect();

    let mut merges = Vec::with_capacity(n - 1);
    while active.len() > 1 {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..active.len() {
            for j in (i + 1)..active.len() {
                let candidate_key = {
                    let (lo, hi) = ordered(active[i].min_leaf, active[j].min_leaf);
                    (dist[i][j], lo, hi)
                };
                let better = match best {
                    None => true,
                    Some((bi, bj)) => {
                        let (blo, bhi) = ordered(active[bi].min_leaf, active[bj].min_leaf);
                        let best_key = (dist[bi][bj], blo, bhi);
                        candidate_key < best_key
                    }
                };
                if better {
                    best = Some((i, j));
                }
            }
        }
        let (i, j) = best.expect("at least one pair");
        let height = dist[i][j];
        let (size_i, size_j) = (active[i].size as f64, active[j].size as f64);
        let (label_a, label_b) = ordered(active[i].label, active[j].label);
        merges.push(Merge { a: label_a, b: label_b, height });

        // Replace cluster i with the merge, drop cluster j.
        let merged_size = size_i + size_j;
        for k in 0..active.len() {
            if k == i || k == j {
                continue;
            }
            let d = (size_i * dist[i][k] + size_j * dist[j][k]) / merged_size;
            dist[i][k] = d;
            dist[k][i] = d;
        }
        active[i].label = n + merges.len() - 1;
        active[i].min_leaf = active[i].min_leaf.min(active[j].min_leaf);
        active[i].size += active[j].size;
        active.remove(j);
        dist.remove(j);
        for row in &mut dist {
            row.remove(j);
        }
    }

    Ok(Dendrogram { leaf_ids: matrix.learner_ids.clone(), merges })
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Dendrogram {
    pub fn leaf_count(&self) -> usize {
        self.leaf_ids.len()
    }

    /// Leaf partition from applying every merge with height strictly below
    /// the cut. Clusters are ordered by their smallest leaf, leaves sorted.
    pub fn cut(&self, height: f64) -> Vec<Vec<usize>> {
        let n = self.leaf_count();
        let mut parent: Vec<usize> = (0..n + self.merges.len()).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let root = find(parent, parent[x]);
                parent[x] = root;
            }
            parent[x]
        }
        for (m, merge) in self.merges.iter().enumerate() {
            if merge.height < height {
                let cluster = n + m;
                let ra = find(&mut parent, merge.a);
                let rb = find(&mut parent, merge.b);
                parent[ra] = cluster;
                parent[rb] = cluster;
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for leaf in 0..n {
            let root = find(&mut parent, leaf);
            groups.entry(root).or_default().push(leaf);
        }
        let mut clusters: Vec<Vec<usize>> = groups.into_values().collect();
        clusters.sort_by_key(|c| c[0]);
        clusters
    }

    /// Plain-text indented rendering, children below their merge height.
    pub fn to_text(&self) -> String {
        let n = self.leaf_count();
        let mut out = String::new();
        let root = n + self.merges.len() - 1;
        self.render(root, 0, &mut out);
        out
    }

    fn render(&self, node: usize, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        let n = self.leaf_count();
        if node < n {
            out.push_str(&format!("{pad}{}\n", self.leaf_ids[node]));
        } else {
            let merge = self.merges[node - n];
            out.push_str(&format!("{pad}[h={:.6}]\n", merge.height));
            self.render(merge.a, indent + 1, out);
            self.render(merge.b, indent + 1, out);
        }
    }

    /// Merge list as CSV: `leaf_a,leaf_b,height`, cluster nodes labeled
    /// `cluster-<k>`.
    pub fn to_merge_csv(&self) -> String {
        let n = self.leaf_count();
        let name = |node: usize| {
            if node < n {
                self.leaf_ids[node].clone()
            } else {
                format!("cluster-{}", node - n)
            }
        };
        let mut out = String::from("leaf_a,leaf_b,height\n");
        for merge in &self.merges {
            out.push_str(&format!("{},{},{}\n", name(merge.a), name(merge.b), merge.height));
        }
        out
    }
}

/// Per cluster, the medoid: the member minimizing summed intra-cluster COD;
/// ties break to the lowest leaf index.
pub fn representatives(partition: &[Vec<usize>], matrix: &CodMatrix) -> Result<Vec<String>> {
    if partition.is_empty() {
        return Err(Error::InvalidArg("empty partition".into()));
    }
    let mut out = Vec::with_capacity(partition.len());
    for cluster in partition {
        if cluster.is_empty() {
            return Err(Error::InvalidArg("empty cluster in partition".into()));
        }
        let mut best = cluster[0];
        let mut best_sum = f64::INFINITY;
        for &candidate in cluster {
            let sum: f64 = cluster.iter().map(|&other| matrix.distance(candidate, other)).sum();
            if sum < best_sum || (sum == best_sum && candidate < best) {
                best = candidate;
                best_sum = sum;
            }
        }
        out.push(matrix.learner_ids[best].clone());
    }
    Ok(out)
}
