//! Instance hardness and dataset complexity measures.
//!
//! Instance hardness (IH) is the fraction of learners whose out-of-fold
//! prediction disagrees with the observed label, averaged over protocol
//! repeats — one minus the ensemble estimate of the label's probability.
//! Instances with IH strictly above 0.9 are reported as noisy.
//!
//! The eight per-instance hardness measures (kDN, DS, DCP, TD, CL, CLD, MV,
//! CB) and the eight per-dataset complexity measures (F2, F3, F4, N1, N2,
//! N3, T1, T2) follow their catalog definitions; binary-only overlap
//! measures (F2–F4) extend to multi-class by unweighted one-vs-one
//! averaging. Neighborhood measures use HEOM distance so categorical and
//! missing cells are handled uniformly.

use rayon::prelude::*;

use crate::cv::CvProtocol;
use crate::datakit::{stratified_folds, AttrKind, AttrRange, Cell, Dataset};
use crate::distance::Heom;
use crate::learners::{self, tree, LearnerSpec};
use crate::{Error, Result};

/// The eight per-instance hardness measures (IH is computed separately by
/// [`instance_hardness`], which needs a learner set).
#[derive(Clone, Debug)]
pub struct HardnessProfile {
    pub kdn: Vec<f64>,
    pub ds: Vec<f64>,
    pub dcp: Vec<f64>,
    pub td: Vec<f64>,
    pub cl: Vec<f64>,
    pub cld: Vec<f64>,
    pub mv: Vec<f64>,
    pub cb: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexityProfile {
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
    pub t1: f64,
    pub t2: f64,
}

/// IH per instance: the fraction of (repeat, learner) out-of-fold
/// predictions that miss the observed label.
pub fn instance_hardness(
    dataset: &Dataset,
    specs: &[LearnerSpec],
    protocol: &CvProtocol,
) -> Result<Vec<f64>> {
    if specs.is_empty() {
        return Err(Error::InvalidArg("instance hardness needs at least one learner".into()));
    }
    let mut cells = Vec::new();
    for r in 0..protocol.repeats {
        for spec in specs {
            cells.push((r, spec.clone()));
        }
    }
    let miss_rows: Result<Vec<Vec<bool>>> = cells
        .par_iter()
        .map(|(r, spec)| {
            let plan = stratified_folds(dataset, protocol.folds, protocol.fold_seed(*r))?;
            let mut row = vec![false; dataset.len()];
            for fold in 0..plan.fold_count {
                let test_idx = plan.test_indices(fold);
                if test_idx.is_empty() {
                    continue;
                }
                let model = learners::fit(spec, &dataset.subset(&plan.train_indices(fold)))?;
                for &i in &test_idx {
                    row[i] = model.predict(&dataset.instances[i])? != dataset.instances[i].label;
                }
            }
            Ok(row)
        })
        .collect();
    let miss_rows = miss_rows?;
    let total = cells.len() as f64;
    Ok((0..dataset.len())
        .map(|i| miss_rows.iter().filter(|row| row[i]).count() as f64 / total)
        .collect())
}

/// Indices with IH strictly above the cutoff, plus the dataset-level noisy
/// percentage (0-100).
pub fn noisy_instances(ih: &[f64], cutoff: f64) -> Result<(Vec<usize>, f64)> {
    if !(0.0..=1.0).contains(&cutoff) {
        return Err(Error::InvalidArg(format!("cutoff must be in [0,1], got {cutoff}")));
    }
    let noisy: Vec<usize> =
        ih.iter().enumerate().filter(|(_, &v)| v > cutoff).map(|(i, _)| i).collect();
    let pct = if ih.is_empty() { 0.0 } else { 100.0 * noisy.len() as f64 / ih.len() as f64 };
    Ok((noisy, pct))
}

/// The eight catalog hardness measures. `k` bounds kDN (default 5); `seed`
/// drives the pruned tree's holdout draw.
pub fn hardness_measures(dataset: &Dataset, k: usize, seed: u64) -> Result<HardnessProfile> {
    let n = dataset.len();
    if k == 0 {
        return Err(Error::InvalidArg("kDN needs k >= 1".into()));
    }
    if n <= k {
        return Err(Error::InvalidArg(format!("kDN needs more than k={k} instances, got {n}")));
    }

    // kDN: fraction of the k nearest neighbors with a different label.
    let heom = Heom::fit(dataset);
    let kdn: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut scored: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (heom.distance(&dataset.instances[i], &dataset.instances[j]), j))
                .collect();
            scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            let disagree = scored
                .iter()
                .take(k)
                .filter(|(_, j)| dataset.instances[*j].label != dataset.instances[i].label)
                .count();
            disagree as f64 / k as f64
        })
        .collect();

    // DS from the unpruned tree, DCP and TD from the pruned tree. Leaf
    // populations are recounted by routing the full dataset.
    let unpruned = tree::fit_tree(dataset, &tree::TreeParams { prune: tree::Prune::None, seed });
    let pruned =
        tree::fit_tree(dataset, &tree::TreeParams { prune: tree::Prune::ReducedError, seed });

    let leaf_stats = |model: &tree::DecisionTreeModel| {
        let mut assignment = Vec::with_capacity(n);
        let mut counts: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for inst in &dataset.instances {
            let leaf = model.leaf_of(inst);
            counts.entry(leaf).or_insert_with(|| vec![0; dataset.class_count()])[inst.label] += 1;
            assignment.push(leaf);
        }
        (assignment, counts)
    };
    let (unpruned_leaf, unpruned_counts) = leaf_stats(&unpruned);
    let largest_leaf = unpruned_counts
        .values()
        .map(|c| c.iter().sum::<usize>())
        .max()
        .expect("non-empty dataset") as f64;
    let ds_measure: Vec<f64> = (0..n)
        .map(|i| {
            let size: usize = unpruned_counts[&unpruned_leaf[i]].iter().sum();
            size as f64 / largest_leaf
        })
        .collect();

    let (pruned_leaf, pruned_counts) = leaf_stats(&pruned);
    let dcp: Vec<f64> = (0..n)
        .map(|i| {
            let counts = &pruned_counts[&pruned_leaf[i]];
            let size: usize = counts.iter().sum();
            counts[dataset.instances[i].label] as f64 / size as f64
        })
        .collect();
    let td: Vec<f64> = (0..n).map(|i| pruned.node_depth(pruned_leaf[i]) as f64).collect();

    // CL/CLD from the naive Bayes posterior on the full dataset.
    let nb = learners::fit(&LearnerSpec::parse("naive-bayes")?, dataset)?;
    let mut cl = Vec::with_capacity(n);
    let mut cld = Vec::with_capacity(n);
    for inst in &dataset.instances {
        let dist = nb.class_distribution(inst)?;
        let own = dist[inst.label];
        let best_other = dist
            .iter()
            .enumerate()
            .filter(|(c, _)| *c != inst.label)
            .map(|(_, &p)| p)
            .fold(f64::NEG_INFINITY, f64::max);
        cl.push(own);
        cld.push(own - best_other);
    }

    // MV and CB from class frequencies.
    let histogram = dataset.class_histogram();
    let majority = *histogram.iter().max().expect("classes present") as f64;
    let even = 1.0 / dataset.class_count() as f64;
    let mv: Vec<f64> = dataset
        .instances
        .iter()
        .map(|inst| histogram[inst.label] as f64 / majority)
        .collect();
    let cb: Vec<f64> = dataset
        .instances
        .iter()
        .map(|inst| histogram[inst.label] as f64 / n as f64 - even)
        .collect();

    Ok(HardnessProfile { kdn, ds: ds_measure, dcp, td, cl, cld, mv, cb })
}

/// The eight catalog complexity measures.
pub fn complexity_measures(dataset: &Dataset) -> Result<ComplexityProfile> {
    let present_classes: Vec<usize> = dataset
        .class_histogram()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(c, _)| c)
        .collect();
    if present_classes.len() < 2 {
        return Err(Error::InvalidDataset("complexity measures need at least two present classes".into()));
    }
    let n = dataset.len();

    let (f2, f3, f4) = overlap_measures(dataset, &present_classes);

    let heom = Heom::fit(dataset);
    let dist: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| heom.distance(&dataset.instances[i], &dataset.instances[j]))
                .collect()
        })
        .collect();

    let n1 = boundary_fraction(dataset, &dist);
    let n2 = intra_inter_ratio(dataset, &dist);
    let n3 = loo_one_nn_error(dataset);
    let t1 = covering_spheres(dataset, &dist);
    let t2 = n as f64 / dataset.attributes.len() as f64;

    Ok(ComplexityProfile { f2, f3, f4, n1, n2, n3, t1, t2 })
}

/// Per-class (min, max) of a numeric attribute over non-missing cells.
fn class_range(dataset: &Dataset, indices: &[usize], attr: usize) -> Option<(f64, f64)> {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut seen = false;
    for &i in indices {
        if let Cell::Num(v) = dataset.instances[i].values[attr] {
            min = min.min(v);
            max = max.max(v);
            seen = true;
        }
    }
    seen.then_some((min, max))
}

/// Is the instance's value outside the two-class overlap region of the
/// attribute? Missing cells count as inside.
fn outside_overlap(
    dataset: &Dataset,
    attr: usize,
    i: usize,
    numeric_overlap: Option<(f64, f64)>,
    shared_values: &std::collections::BTreeSet<usize>,
) -> bool {
    match dataset.instances[i].values[attr] {
        Cell::Num(v) => match numeric_overlap {
            Some((lo, hi)) => v < lo || v > hi,
            None => true, // disjoint ranges: everything is outside
        },
        Cell::Cat(v) => !shared_values.contains(&v),
        Cell::Missing => false,
    }
}

fn overlap_measures(dataset: &Dataset, classes: &[usize]) -> (f64, f64, f64) {
    let mut f2_sum = 0.0;
    let mut f3_sum = 0.0;
    let mut f4_sum = 0.0;
    let mut pairs = 0.0;

    for (pa, &a) in classes.iter().enumerate() {
        for &b in &classes[pa + 1..] {
            let idx_a: Vec<usize> =
                (0..dataset.len()).filter(|&i| dataset.instances[i].label == a).collect();
            let idx_b: Vec<usize> =
                (0..dataset.len()).filter(|&i| dataset.instances[i].label == b).collect();
            let mut pair: Vec<usize> = idx_a.iter().chain(&idx_b).copied().collect();
            pair.sort_unstable();

            // F2: product of per-attribute overlap fractions, numeric only.
            let mut f2 = f64::NAN;
            for (attr, meta) in dataset.attributes.iter().enumerate() {
                if !matches!(meta.kind, AttrKind::Numeric) {
                    continue;
                }
                let (Some((min_a, max_a)), Some((min_b, max_b))) =
                    (class_range(dataset, &idx_a, attr), class_range(dataset, &idx_b, attr))
                else {
                    continue; // a side never observes the attribute
                };
                let lo = min_a.max(min_b);
                let hi = max_a.min(max_b);
                let joint = max_a.max(max_b) - min_a.min(min_b);
                let ratio = if joint == 0.0 {
                    1.0 // both classes constant at the same point
                } else {
                    ((hi - lo).max(0.0)) / joint
                };
                f2 = if f2.is_nan() { ratio } else { f2 * ratio };
            }
            f2_sum += if f2.is_nan() { 0.0 } else { f2 };

            // F3: best single attribute's separated fraction.
            let outside_count = |attr: usize, remaining: &[usize]| -> usize {
                let ra = class_range(dataset, &remaining_of(remaining, dataset, a), attr);
                let rb = class_range(dataset, &remaining_of(remaining, dataset, b), attr);
                let numeric_overlap = match (&dataset.attributes[attr].kind, ra, rb) {
                    (AttrKind::Numeric, Some((min_a, max_a)), Some((min_b, max_b))) => {
                        let lo = min_a.max(min_b);
                        let hi = max_a.min(max_b);
                        if lo > hi {
                            None
                        } else {
                            Some((lo, hi))
                        }
                    }
                    (AttrKind::Numeric, _, _) => return 0, // unobserved side: no evidence
                    _ => Some((f64::NEG_INFINITY, f64::INFINITY)), // categorical path below
                };
                let shared: std::collections::BTreeSet<usize> = match &dataset.attributes[attr].kind
                {
                    AttrKind::Categorical(_) => {
                        let vals = |class: usize| -> std::collections::BTreeSet<usize> {
                            remaining
                                .iter()
                                .filter(|&&i| dataset.instances[i].label == class)
                                .filter_map(|&i| match dataset.instances[i].values[attr] {
                                    Cell::Cat(v) => Some(v),
                                    _ => None,
                                })
                                .collect()
                        };
                        vals(a).intersection(&vals(b)).copied().collect()
                    }
                    AttrKind::Numeric => Default::default(),
                };
                remaining
                    .iter()
                    .filter(|&&i| outside_overlap(dataset, attr, i, numeric_overlap, &shared))
                    .count()
            };

            let total = pair.len() as f64;
            let best_f3 = (0..dataset.attributes.len())
                .map(|attr| outside_count(attr, &pair) as f64 / total)
                .fold(0.0, f64::max);
            f3_sum += best_f3;

            // F4: greedily separate with the best attribute, discard, repeat.
            let mut remaining = pair.clone();
            let mut separated = 0usize;
            while !remaining.is_empty() {
                let mut best_attr = None;
                let mut best_count = 0usize;
                for attr in 0..dataset.attributes.len() {
                    let count = outside_count(attr, &remaining);
                    if count > best_count {
                        best_count = count;
                        best_attr = Some(attr);
                    }
                }
                let Some(attr) = best_attr else { break };
                let ra = class_range(dataset, &remaining_of(&remaining, dataset, a), attr);
                let rb = class_range(dataset, &remaining_of(&remaining, dataset, b), attr);
                let numeric_overlap = match (&dataset.attributes[attr].kind, ra, rb) {
                    (AttrKind::Numeric, Some((min_a, max_a)), Some((min_b, max_b))) => {
                        let lo = min_a.max(min_b);
                        let hi = max_a.min(max_b);
                        if lo > hi {
                            None
                        } else {
                            Some((lo, hi))
                        }
                    }
                    (AttrKind::Numeric, _, _) => Some((f64::NEG_INFINITY, f64::INFINITY)),
                    _ => Some((f64::NEG_INFINITY, f64::INFINITY)),
                };
                let shared: std::collections::BTreeSet<usize> = match &dataset.attributes[attr].kind
                {
                    AttrKind::Categorical(_) => {
                        let vals = |class: usize| -> std::collections::BTreeSet<usize> {
                            remaining
                                .iter()
                                .filter(|&&i| dataset.instances[i].label == class)
                                .filter_map(|&i| match dataset.instances[i].values[attr] {
                                    Cell::Cat(v) => Some(v),
                                    _ => None,
                                })
                                .collect()
                        };
                        vals(a).intersection(&vals(b)).copied().collect()
                    }
                    AttrKind::Numeric => Default::default(),
                };
                remaining.retain(|&i| !outside_overlap(dataset, attr, i, numeric_overlap, &shared));
                separated += best_count;
            }
            f4_sum += separated as f64 / total;

            pairs += 1.0;
        }
    }
    (f2_sum / pairs, f3_sum / pairs, f4_sum / pairs)
}

fn remaining_of(remaining: &[usize], dataset: &Dataset, class: usize) -> Vec<usize> {
    remaining.iter().copied().filter(|&i| dataset.instances[i].label == class).collect()
}

/// N1: fraction of instances touching a cross-class edge of the minimum
/// spanning tree over HEOM distances. Kruskal with edges ordered by
/// (distance, i, j) keeps ties deterministic.
fn boundary_fraction(dataset: &Dataset, dist: &[Vec<f64>]) -> f64 {
    let n = dataset.len();
    let mut edges: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((dist[i][j], i, j));
        }
    }
    edges.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    let mut boundary = vec![false; n];
    let mut used = 0;
    for (_, i, j) in edges {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            if dataset.instances[i].label != dataset.instances[j].label {
                boundary[i] = true;
                boundary[j] = true;
            }
            used += 1;
            if used == n - 1 {
                break;
            }
        }
    }
    boundary.iter().filter(|&&b| b).count() as f64 / n as f64
}

/// N2: mean nearest same-class distance over mean nearest other-class
/// distance. Distances floor at 1e-12 so duplicate points across classes
/// cannot zero the denominator; singleton classes skip the intra term.
fn intra_inter_ratio(dataset: &Dataset, dist: &[Vec<f64>]) -> f64 {
    const FLOOR: f64 = 1e-12;
    let n = dataset.len();
    let mut intra_sum = 0.0;
    let mut intra_count = 0usize;
    let mut inter_sum = 0.0;
    for i in 0..n {
        let mut best_intra = f64::INFINITY;
        let mut best_inter = f64::INFINITY;
        for j in 0..n {
            if i == j {
                continue;
            }
            if dataset.instances[j].label == dataset.instances[i].label {
                best_intra = best_intra.min(dist[i][j]);
            } else {
                best_inter = best_inter.min(dist[i][j]);
            }
        }
        if best_intra.is_finite() {
            intra_sum += best_intra.max(FLOOR);
            intra_count += 1;
        }
        inter_sum += best_inter.max(FLOOR);
    }
    let mean_intra = if intra_count == 0 { 0.0 } else { intra_sum / intra_count as f64 };
    let mean_inter = inter_sum / n as f64;
    mean_intra / mean_inter
}

/// N3: leave-one-out 1-NN error. Normalization ranges are recomputed without
/// the held-out instance, exactly as a 1-NN learner fit on the remainder
/// would see them.
fn loo_one_nn_error(dataset: &Dataset) -> f64 {
    let n = dataset.len();
    // Two smallest / two largest per numeric attribute, to drop one instance
    // from a range in O(1).
    struct Extremes {
        min1: f64,
        min_count: usize,
        min2: f64,
        max1: f64,
        max_count: usize,
        max2: f64,
        seen: usize,
    }
    let mut extremes: Vec<Option<Extremes>> = dataset
        .attributes
        .iter()
        .map(|a| {
            matches!(a.kind, AttrKind::Numeric).then_some(Extremes {
                min1: f64::INFINITY,
                min_count: 0,
                min2: f64::INFINITY,
                max1: f64::NEG_INFINITY,
                max_count: 0,
                max2: f64::NEG_INFINITY,
                seen: 0,
            })
        })
        .collect();
    for inst in &dataset.instances {
        for (j, cell) in inst.values.iter().enumerate() {
            let Some(e) = extremes[j].as_mut() else { continue };
            if let Cell::Num(v) = cell {
                e.seen += 1;
                if *v < e.min1 {
                    e.min2 = e.min1;
                    e.min1 = *v;
                    e.min_count = 1;
                } else if *v == e.min1 {
                    e.min_count += 1;
                } else if *v < e.min2 {
                    e.min2 = *v;
                }
                if *v > e.max1 {
                    e.max2 = e.max1;
                    e.max1 = *v;
                    e.max_count = 1;
                } else if *v == e.max1 {
                    e.max_count += 1;
                } else if *v > e.max2 {
                    e.max2 = *v;
                }
            }
        }
    }

    let errors: usize = (0..n)
        .into_par_iter()
        .map(|i| {
            let ranges: Vec<AttrRange> = dataset
                .attributes
                .iter()
                .enumerate()
                .map(|(j, attr)| match (&attr.kind, &extremes[j]) {
                    (AttrKind::Categorical(_), _) => AttrRange::Categorical,
                    (AttrKind::Numeric, Some(e)) => {
                        let held = dataset.instances[i].values[j].as_num();
                        let remaining = e.seen - usize::from(held.is_some());
                        if remaining == 0 {
                            return AttrRange::AllMissing;
                        }
                        let min = match held {
                            Some(v) if v == e.min1 && e.min_count == 1 => e.min2,
                            _ => e.min1,
                        };
                        let max = match held {
                            Some(v) if v == e.max1 && e.max_count == 1 => e.max2,
                            _ => e.max1,
                        };
                        AttrRange::Numeric { min, max }
                    }
                    (AttrKind::Numeric, None) => AttrRange::AllMissing,
                })
                .collect();
            let heom = Heom::from_ranges(ranges);
            let mut best = (f64::INFINITY, usize::MAX);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let d = heom.distance(&dataset.instances[i], &dataset.instances[j]);
                if d < best.0 || (d == best.0 && j < best.1) {
                    best = (d, j);
                }
            }
            usize::from(dataset.instances[best.1].label != dataset.instances[i].label)
        })
        .sum();
    errors as f64 / n as f64
}

/// T1: grow a hypersphere on each instance out to its nearest other-class
/// instance, absorb spheres contained in larger ones, and count what
/// remains. Identical spheres absorb toward the lower index.
fn covering_spheres(dataset: &Dataset, dist: &[Vec<f64>]) -> f64 {
    let n = dataset.len();
    let radius: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| dataset.instances[j].label != dataset.instances[i].label)
                .map(|j| dist[i][j])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mut retained = 0usize;
    for i in 0..n {
        let mut absorbed = false;
        for j in 0..n {
            if i == j {
                continue;
            }
            let reach = dist[i][j] + radius[i];
            if reach < radius[j] || (reach == radius[j] && (radius[i] < radius[j] || (radius[i] == radius[j] && i > j))) {
                absorbed = true;
                break;
            }
        }
        if !absorbed {
            retained += 1;
        }
    }
    retained as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datakit::{inject_label_noise, make_blobs, AttributeMeta, Instance};
    use crate::filters::{flag_misclassified, FlagMode};

    fn xor() -> Dataset {
        let mk = |x: f64, y: f64, label: usize| Instance {
            values: vec![Cell::Num(x), Cell::Num(y)],
            label,
        };
        Dataset::new(
            "xor",
            vec![AttributeMeta::numeric("x"), AttributeMeta::numeric("y")],
            vec!["0".into(), "1".into()],
            vec![mk(0.0, 0.0, 0), mk(1.0, 1.0, 0), mk(0.0, 1.0, 1), mk(1.0, 0.0, 1)],
        )
        .unwrap()
    }

    #[test]
    fn noisy_instance_cutoff_is_strict() {
        let ih = [1.0, 0.95, 0.9, 0.2];
        let (noisy, pct) = noisy_instances(&ih, 0.9).unwrap();
        assert_eq!(noisy, vec![0, 1]);
        assert!((pct - 50.0).abs() < 1e-12);
        let (none, pct) = noisy_instances(&[0.0, 0.0], 0.9).unwrap();
        assert!(none.is_empty());
        assert_eq!(pct, 0.0);
    }

    #[test]
    fn hardness_on_balanced_separated_clusters() {
        // A at {0,1,2}, B at {10,11,12}: kDN(k=2) is zero everywhere, and a
        // balanced set pins MV = 1, CB = 0.
        let mk = |x: f64, label: usize| Instance { values: vec![Cell::Num(x)], label };
        let ds = Dataset::new(
            "sep",
            vec![AttributeMeta::numeric("x")],
            vec!["A".into(), "B".into()],
            vec![mk(0.0, 0), mk(1.0, 0), mk(2.0, 0), mk(10.0, 1), mk(11.0, 1), mk(12.0, 1)],
        )
        .unwrap();
        let profile = hardness_measures(&ds, 2, 0).unwrap();
        assert!(profile.kdn.iter().all(|&v| v == 0.0));
        assert!(profile.mv.iter().all(|&v| v == 1.0));
        assert!(profile.cb.iter().all(|&v| v.abs() < 1e-12));
        assert!(profile.cl.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn xor_is_maximally_hard_for_neighbors() {
        let ds = xor();
        let profile = hardness_measures(&ds, 1, 0).unwrap();
        assert!(profile.kdn.iter().all(|&v| v == 1.0), "kDN {:?}", profile.kdn);
        let complexity = complexity_measures(&ds).unwrap();
        assert_eq!(complexity.n3, 1.0);
        assert_eq!(complexity.t2, 2.0);
    }

    #[test]
    fn disjoint_ranges_have_no_overlap() {
        let mk = |x: f64, label: usize| Instance { values: vec![Cell::Num(x)], label };
        let ds = Dataset::new(
            "disjoint",
            vec![AttributeMeta::numeric("x")],
            vec!["A".into(), "B".into()],
            vec![mk(0.0, 0), mk(1.0, 0), mk(5.0, 1), mk(6.0, 1)],
        )
        .unwrap();
        let c = complexity_measures(&ds).unwrap();
        assert_eq!(c.f2, 0.0);
        assert_eq!(c.f3, 1.0);
        assert_eq!(c.f4, 1.0);
        assert_eq!(c.n3, 0.0);
        assert!(c.n2 < 1.0);
    }

    #[test]
    fn n3_matches_knn_loo_exactly() {
        let ds = make_blobs(3, 25, 2, 0.5, 13).unwrap();
        let (noisy, _) = inject_label_noise(&ds, 0.15, 3).unwrap();
        let c = complexity_measures(&noisy).unwrap();
        let spec = LearnerSpec::parse("knn:k=1").unwrap();
        let mut errors = 0usize;
        for i in 0..noisy.len() {
            let rest: Vec<usize> = (0..noisy.len()).filter(|&j| j != i).collect();
            let model = learners::fit(&spec, &noisy.subset(&rest)).unwrap();
            if model.predict(&noisy.instances[i]).unwrap() != noisy.instances[i].label {
                errors += 1;
            }
        }
        let expected = errors as f64 / noisy.len() as f64;
        assert_eq!(c.n3, expected);
    }

    #[test]
    fn ih_matches_flag_matrix_column_sums() {
        let ds = make_blobs(2, 30, 2, 0.5, 21).unwrap();
        let specs = vec![
            LearnerSpec::parse("knn:k=3").unwrap(),
            LearnerSpec::parse("naive-bayes").unwrap(),
            LearnerSpec::parse("one-rule").unwrap(),
        ];
        let protocol = CvProtocol::new(3, 1, 55).unwrap();
        let ih = instance_hardness(&ds, &specs, &protocol).unwrap();
        let matrix =
            flag_misclassified(&specs, &ds, &FlagMode::cross_validated(3, 55).unwrap()).unwrap();
        for i in 0..ds.len() {
            let expected = matrix.flag_count(i) as f64 / specs.len() as f64;
            assert_eq!(ih[i], expected, "instance {i}");
        }
    }

    #[test]
    fn hardness_separates_injected_noise() {
        let ds = make_blobs(2, 60, 2, 0.2, 31).unwrap();
        let (noisy, corrupted) = inject_label_noise(&ds, 0.25, 7).unwrap();
        let specs = crate::learners::builtin_specs(1);
        let protocol = CvProtocol::new(5, 1, 3).unwrap();
        let ih = instance_hardness(&noisy, &specs, &protocol).unwrap();
        let is_corrupt: Vec<bool> =
            (0..noisy.len()).map(|i| corrupted.binary_search(&i).is_ok()).collect();
        let mean = |pick: bool| {
            let vals: Vec<f64> = ih
                .iter()
                .zip(&is_corrupt)
                .filter(|(_, &c)| c == pick)
                .map(|(&v, _)| v)
                .collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        };
        assert!(mean(true) - mean(false) > 0.3, "corrupt {} clean {}", mean(true), mean(false));
    }

    #[test]
    fn bounded_measures_stay_in_range() {
        for seed in 0..5 {
            let ds = make_blobs(3, 20, 2, 0.8, seed).unwrap();
            let (noisy, _) = inject_label_noise(&ds, 0.2, seed).unwrap();
            let c = complexity_measures(&noisy).unwrap();
            for (name, v) in
                [("f3", c.f3), ("f4", c.f4), ("n1", c.n1), ("n3", c.n3), ("t1", c.t1)]
            {
                assert!((0.0..=1.0).contains(&v), "{name} = {v} out of range (seed {seed})");
            }
            assert!(c.f2 >= 0.0 && c.n2 >= 0.0 && c.t2 > 0.0);
            let profile = hardness_measures(&noisy, 5, seed).unwrap();
            for v in profile.kdn.iter().chain(&profile.dcp).chain(&profile.cl).chain(&profile.mv) {
                assert!((0.0..=1.0).contains(v));
            }
            for v in &profile.ds {
                assert!((0.0..=1.0).contains(v));
            }
            for v in &profile.cld {
                assert!((-1.0..=1.0).contains(v));
            }
            for v in &profile.td {
                assert!(*v >= 0.0);
            }
        }
    }
}
