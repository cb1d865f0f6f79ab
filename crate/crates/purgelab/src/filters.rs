//! Misclassification filters.
//!
//! All three strategies share one flagging step: train learners, mark every
//! instance whose prediction disagrees with its observed label. Flags come
//! either from resubstitution (`FlagMode::TrainOnAll`, the default for the
//! biased and ensemble filters) or from out-of-fold predictions under
//! stratified cross-validation (`FlagMode::CrossValidated`, the default for
//! the adaptive filter).

use rayon::prelude::*;

use crate::cv::CvProtocol;
use crate::datakit::{stratified_folds, Dataset};
use crate::learners::{self, LearnerSpec};
use crate::rng::mix_seed;
use crate::{Error, Result};

/// Where misclassification flags come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlagMode {
    /// Fit on the whole dataset, flag resubstitution errors.
    TrainOnAll,
    /// Stratified `folds`-fold split; each instance is flagged from its
    /// out-of-fold prediction. The paper's grid uses 2-5 folds.
    CrossValidated { folds: usize, seed: u64 },
}

impl FlagMode {
    pub fn cross_validated(folds: usize, seed: u64) -> Result<Self> {
        if folds < 2 {
            return Err(Error::InvalidArg(format!("flagging folds {folds} < 2")));
        }
        Ok(FlagMode::CrossValidated { folds, seed })
    }

    fn describe(&self) -> String {
        match self {
            FlagMode::TrainOnAll => "train-on-all".into(),
            FlagMode::CrossValidated { folds, .. } => format!("cv{folds}"),
        }
    }
}

/// Boolean grid, learners x instances; `true` marks a misclassification.
#[derive(Clone, Debug, PartialEq)]
pub struct MisclassificationMatrix {
    learner_ids: Vec<String>,
    flags: Vec<Vec<bool>>,
}

impl MisclassificationMatrix {
    pub fn new(learner_ids: Vec<String>, flags: Vec<Vec<bool>>) -> Result<Self> {
        if learner_ids.len() != flags.len() {
            return Err(Error::InvalidArg("one flag row per learner required".into()));
        }
        if let Some(first) = flags.first() {
            if flags.iter().any(|row| row.len() != first.len()) {
                return Err(Error::InvalidArg("flag rows differ in length".into()));
            }
        }
        Ok(MisclassificationMatrix { learner_ids, flags })
    }

    pub fn learner_ids(&self) -> &[String] {
        &self.learner_ids
    }

    pub fn learner_count(&self) -> usize {
        self.flags.len()
    }

    pub fn instance_count(&self) -> usize {
        self.flags.first().map_or(0, Vec::len)
    }

    pub fn flag(&self, learner: usize, instance: usize) -> bool {
        self.flags[learner][instance]
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.flags
    }

    /// How many learners misclassify the instance.
    pub fn flag_count(&self, instance: usize) -> usize {
        self.flags.iter().filter(|row| row[instance]).count()
    }
}

/// The kept/removed index partition produced by a filter.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterOutcome {
    pub kept: Vec<usize>,
    pub removed: Vec<usize>,
    /// Echo of the configuration that produced the partition.
    pub config: String,
}

impl FilterOutcome {
    fn from_removed(n: usize, removed: Vec<usize>, config: String) -> Self {
        let mut is_removed = vec![false; n];
        for &i in &removed {
            is_removed[i] = true;
        }
        let kept = (0..n).filter(|&i| !is_removed[i]).collect();
        FilterOutcome { kept, removed, config }
    }
}

/// Trace of the adaptive greedy search: the accepted filter set, the
/// validation accuracy after each accepted step (entry 0 is the empty-filter
/// baseline), and the seed of the holdout split actually used.
#[derive(Clone, Debug)]
pub struct AdaptiveSearchTrace {
    pub filter_set: Vec<LearnerSpec>,
    pub accuracies: Vec<f64>,
    pub split_seed: u64,
}

/// Flag misclassified instances with every learner in `specs`.
pub fn flag_misclassified(
    specs: &[LearnerSpec],
    dataset: &Dataset,
    mode: &FlagMode,
) -> Result<MisclassificationMatrix> {
    if specs.is_empty() {
        return Err(Error::InvalidArg("at least one learner spec required".into()));
    }
    if dataset.is_empty() {
        return Err(Error::InvalidArg("empty dataset".into()));
    }
    let annotate = |spec: &LearnerSpec, e: Error| match e {
        e @ Error::LearnerFailed { .. } => e,
        other => Error::LearnerFailed { id: spec.label(), message: other.to_string() },
    };

    let flags: Result<Vec<Vec<bool>>> = match mode {
        FlagMode::TrainOnAll => specs
            .par_iter()
            .map(|spec| {
                let model = learners::fit(spec, dataset).map_err(|e| annotate(spec, e))?;
                dataset
                    .instances
                    .iter()
                    .map(|inst| Ok(model.predict(inst)? != inst.label))
                    .collect::<Result<Vec<bool>>>()
                    .map_err(|e| annotate(spec, e))
            })
            .collect(),
        FlagMode::CrossValidated { folds, seed } => {
            let plan = stratified_folds(dataset, *folds, mix_seed(&[*seed, 0]))?;
            specs
                .par_iter()
                .map(|spec| {
                    let mut row = vec![false; dataset.len()];
                    for fold in 0..plan.fold_count {
                        let test_idx = plan.test_indices(fold);
                        if test_idx.is_empty() {
                            continue;
                        }
                        let train_idx = plan.train_indices(fold);
                        let model = learners::fit(spec, &dataset.subset(&train_idx))
                            .map_err(|e| annotate(spec, e))?;
                        for &i in &test_idx {
                            let pred = model
                                .predict(&dataset.instances[i])
                                .map_err(|e| annotate(spec, e))?;
                            row[i] = pred != dataset.instances[i].label;
                        }
                    }
                    Ok(row)
                })
                .collect()
        }
    };
    MisclassificationMatrix::new(specs.iter().map(LearnerSpec::label).collect(), flags?)
}

/// Remove exactly the instances the one learner misclassifies.
pub fn biased_filter(
    spec: &LearnerSpec,
    dataset: &Dataset,
    mode: &FlagMode,
) -> Result<FilterOutcome> {
    let matrix = flag_misclassified(std::slice::from_ref(spec), dataset, mode)?;
    let removed = (0..matrix.instance_count()).filter(|&i| matrix.flag(0, i)).collect();
    Ok(FilterOutcome::from_removed(
        matrix.instance_count(),
        removed,
        format!("biased({}, {})", spec.label(), mode.describe()),
    ))
}

/// Remove instances misclassified by at least `threshold` of the learners.
pub fn ensemble_filter(matrix: &MisclassificationMatrix, threshold: f64) -> Result<FilterOutcome> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidArg(format!("threshold must be in (0,1], got {threshold}")));
    }
    if matrix.learner_count() == 0 || matrix.instance_count() == 0 {
        return Err(Error::InvalidArg("degenerate misclassification matrix".into()));
    }
    let learners = matrix.learner_count() as f64;
    let removed = (0..matrix.instance_count())
        .filter(|&i| matrix.flag_count(i) as f64 / learners >= threshold)
        .collect();
    Ok(FilterOutcome::from_removed(
        matrix.instance_count(),
        removed,
        format!("ensemble(threshold={threshold}, learners={})", matrix.learner_count()),
    ))
}

/// Flag with a filter set and apply the ensemble threshold in one step.
/// An empty filter set removes nothing.
pub fn apply_filter_set(
    specs: &[LearnerSpec],
    dataset: &Dataset,
    threshold: f64,
    mode: &FlagMode,
) -> Result<FilterOutcome> {
    if specs.is_empty() {
        return Ok(FilterOutcome::from_removed(
            dataset.len(),
            Vec::new(),
            "ensemble(empty filter set)".into(),
        ));
    }
    let matrix = flag_misclassified(specs, dataset, mode)?;
    ensemble_filter(&matrix, threshold)
}

/// Reject filter results that drop an entire (present) class or leave fewer
/// than two instances; the caller falls back to the unfiltered data. Returns
/// the usable kept set and whether a fallback happened.
pub fn guarded_kept(dataset: &Dataset, outcome: &FilterOutcome) -> (Vec<usize>, bool) {
    let all: Vec<usize> = (0..dataset.len()).collect();
    if outcome.kept.len() < 2 {
        return (all, true);
    }
    let before = dataset.class_histogram();
    let mut after = vec![0usize; dataset.class_count()];
    for &i in &outcome.kept {
        after[dataset.instances[i].label] += 1;
    }
    for (b, a) in before.iter().zip(&after) {
        if *b > 0 && *a == 0 {
            return (all, true);
        }
    }
    (outcome.kept.clone(), false)
}

/// Seeded stratified holdout: every class keeps at least one instance on
/// each side. A class with a single instance cannot satisfy that, which is
/// the degenerate case the adaptive filter retries over.
pub fn holdout_split(
    dataset: &Dataset,
    validation_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(validation_fraction > 0.0 && validation_fraction < 1.0) {
        return Err(Error::InvalidArg(format!(
            "validation fraction must be in (0,1), got {validation_fraction}"
        )));
    }
    use rand::seq::SliceRandom;
    let mut rng = crate::rng::rng(seed);
    let mut train = Vec::new();
    let mut validation = Vec::new();
    for class in 0..dataset.class_count() {
        let mut idx: Vec<usize> = dataset
            .instances
            .iter()
            .enumerate()
            .filter(|(_, inst)| inst.label == class)
            .map(|(i, _)| i)
            .collect();
        if idx.is_empty() {
            continue;
        }
        if idx.len() == 1 {
            return Err(Error::DegenerateSplit(format!(
                "class `{}` has a single instance",
                dataset.class_names[class]
            )));
        }
        idx.shuffle(&mut rng);
        let want = (validation_fraction * idx.len() as f64).round() as usize;
        let take = want.clamp(1, idx.len() - 1);
        validation.extend(idx.drain(..take));
        train.extend(idx);
    }
    train.sort_unstable();
    validation.sort_unstable();
    Ok((train, validation))
}

/// Greedy forward selection of a filter set.
///
/// Starting from the empty set, each pass evaluates adding every remaining
/// candidate, accepts the best strictly-improving one, and stops otherwise.
/// One evaluation (`runLA`) flags the training side of an internal stratified
/// holdout with the tentative set, filters it at `threshold`, fits `target`
/// on what is kept, and scores on the held-out validation side. The empty
/// set removes nothing, so the first trace entry is the unfiltered baseline.
#[allow(clippy::too_many_arguments)]
pub fn adaptive_filter(
    candidates: &[LearnerSpec],
    target: &LearnerSpec,
    dataset: &Dataset,
    threshold: f64,
    mode: &FlagMode,
    validation_fraction: f64,
    seed: u64,
) -> Result<AdaptiveSearchTrace> {
    if candidates.is_empty() {
        return Err(Error::InvalidArg("adaptive filter needs at least one candidate".into()));
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidArg(format!("threshold must be in (0,1], got {threshold}")));
    }

    let mut split = None;
    let mut split_seed = seed;
    for attempt in 0..10u64 {
        split_seed = seed.wrapping_add(attempt);
        match holdout_split(dataset, validation_fraction, split_seed) {
            Ok(s) => {
                split = Some(s);
                break;
            }
            Err(Error::DegenerateSplit(_)) if attempt < 9 => continue,
            Err(e) => return Err(e),
        }
    }
    let (train_idx, val_idx) = split.ok_or_else(|| {
        Error::DegenerateSplit("no usable validation split after 10 attempts".into())
    })?;
    let train = dataset.subset(&train_idx);
    let validation = dataset.subset(&val_idx);

    let run_la = |filter_set: &[LearnerSpec]| -> Result<f64> {
        let outcome = apply_filter_set(filter_set, &train, threshold, mode)?;
        let (kept, _fell_back) = guarded_kept(&train, &outcome);
        let model = learners::fit(target, &train.subset(&kept))?;
        learners::accuracy(&model, &validation)
    };

    let mut remaining: Vec<LearnerSpec> = candidates.to_vec();
    let mut filter_set: Vec<LearnerSpec> = Vec::new();
    let mut current = run_la(&[])?;
    let mut accuracies = vec![current];

    while !remaining.is_empty() {
        // Candidate evaluations are independent; acceptance stays sequential
        // and ties resolve to the earliest candidate via strict comparison.
        let scores: Result<Vec<f64>> = remaining
            .par_iter()
            .map(|candidate| {
                let mut tentative = filter_set.clone();
                tentative.push(candidate.clone());
                run_la(&tentative)
            })
            .collect();
        let scores = scores?;
        let mut best_acc = current;
        let mut best_idx = None;
        for (i, &acc) in scores.iter().enumerate() {
            if acc > best_acc {
                best_acc = acc;
                best_idx = Some(i);
            }
        }
        match best_idx {
            Some(i) => {
                filter_set.push(remaining.remove(i));
                current = best_acc;
                accuracies.push(current);
            }
            None => break,
        }
    }

    Ok(AdaptiveSearchTrace { filter_set, accuracies, split_seed })
}

/// Evaluate each threshold by the mean cross-validated accuracy of `target`
/// trained on the filtered data, and return the best. Ties go to the larger
/// threshold (fewer removals). The matrix is computed once on the full
/// dataset, so this mirrors the optimistic protocol used for the reported
/// percentages; reports label it as such.
pub fn select_best_threshold(
    matrix: &MisclassificationMatrix,
    thresholds: &[f64],
    target: &LearnerSpec,
    dataset: &Dataset,
    protocol: &CvProtocol,
) -> Result<(f64, f64)> {
    if thresholds.is_empty() {
        return Err(Error::InvalidArg("empty threshold set".into()));
    }
    if matrix.instance_count() != dataset.len() {
        return Err(Error::InvalidArg("matrix does not match the dataset".into()));
    }
    let mut sorted = thresholds.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut best: Option<(f64, f64)> = None;
    for &threshold in &sorted {
        let outcome = ensemble_filter(matrix, threshold)?;
        let mut total = 0.0;
        let mut cells = 0usize;
        for repeat in 0..protocol.repeats {
            let plan = stratified_folds(dataset, protocol.folds, protocol.fold_seed(repeat))?;
            for fold in 0..plan.fold_count {
                let test_idx = plan.test_indices(fold);
                if test_idx.is_empty() {
                    continue;
                }
                let train_idx = plan.train_indices(fold);
                let keep: Vec<usize> = {
                    let mut removed = vec![false; dataset.len()];
                    for &i in &outcome.removed {
                        removed[i] = true;
                    }
                    let filtered: Vec<usize> =
                        train_idx.iter().copied().filter(|&i| !removed[i]).collect();
                    let tentative = FilterOutcome {
                        kept: filtered,
                        removed: Vec::new(),
                        config: String::new(),
                    };
                    let train_ds = dataset.subset(&train_idx);
                    // guarded_kept works in subset-local indices; map through.
                    let local_kept: Vec<usize> = (0..train_idx.len())
                        .filter(|&j| tentative.kept.contains(&train_idx[j]))
                        .collect();
                    let local = FilterOutcome {
                        kept: local_kept,
                        removed: Vec::new(),
                        config: String::new(),
                    };
                    let (kept_local, _) = guarded_kept(&train_ds, &local);
                    kept_local.iter().map(|&j| train_idx[j]).collect()
                };
                let model = learners::fit(target, &dataset.subset(&keep))?;
                total += learners::accuracy(&model, &dataset.subset(&test_idx))?;
                cells += 1;
            }
        }
        let mean = total / cells as f64;
        let better = match best {
            None => true,
            Some((_, best_mean)) => mean >= best_mean,
        };
        if better {
            best = Some((threshold, mean));
        }
    }
    Ok(best.expect("non-empty threshold set"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datakit::{inject_label_noise, make_blobs, AttributeMeta, Cell, Instance};

    fn matrix(rows: &[&[bool]]) -> MisclassificationMatrix {
        MisclassificationMatrix::new(
            (0..rows.len()).map(|i| format!("l{i}")).collect(),
            rows.iter().map(|r| r.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn memorizing_learner_flags_nothing() {
        let ds = make_blobs(2, 20, 2, 0.3, 1).unwrap();
        let spec = LearnerSpec::parse("knn:k=1").unwrap();
        let m = flag_misclassified(&[spec.clone()], &ds, &FlagMode::TrainOnAll).unwrap();
        assert_eq!(m.rows()[0], vec![false; ds.len()]);
        let outcome = biased_filter(&spec, &ds, &FlagMode::TrainOnAll).unwrap();
        assert!(outcome.removed.is_empty());
        assert_eq!(outcome.kept.len(), ds.len());
    }

    #[test]
    fn constant_learner_flags_the_minority() {
        // 60/40 single-valued attribute: every learner predicts the majority.
        let mk = |label: usize| Instance { values: vec![Cell::Num(1.0)], label };
        let mut instances: Vec<Instance> = (0..60).map(|_| mk(0)).collect();
        instances.extend((0..40).map(|_| mk(1)));
        let ds = crate::datakit::Dataset::new(
            "const",
            vec![AttributeMeta::numeric("x")],
            vec!["maj".into(), "min".into()],
            instances,
        )
        .unwrap();
        let spec = LearnerSpec::parse("decision-tree:prune=none").unwrap();
        let outcome = biased_filter(&spec, &ds, &FlagMode::TrainOnAll).unwrap();
        assert_eq!(outcome.removed.len(), 40);
        assert!(outcome.removed.iter().all(|&i| ds.instances[i].label == 1));
    }

    #[test]
    fn naive_bayes_flags_match_hand_predictions() {
        // Toy set from the naive-bayes oracle: posterior favors the majority
        // value class, so the two cross-labeled instances are flagged.
        let mk = |v: usize, label: usize| Instance { values: vec![Cell::Cat(v)], label };
        let ds = crate::datakit::Dataset::new(
            "toy",
            vec![AttributeMeta::categorical("color", vec!["r".into(), "g".into()])],
            vec!["P".into(), "N".into()],
            vec![mk(0, 0), mk(0, 0), mk(1, 0), mk(1, 1), mk(1, 1), mk(0, 1)],
        )
        .unwrap();
        let spec = LearnerSpec::parse("naive-bayes").unwrap();
        let m = flag_misclassified(&[spec], &ds, &FlagMode::TrainOnAll).unwrap();
        assert_eq!(m.rows()[0], vec![false, false, true, false, false, true]);
    }

    #[test]
    fn ensemble_threshold_arithmetic() {
        // 3 learners; per-instance flag counts 0, 2, 3, 1.
        let m = matrix(&[
            &[false, true, true, true],
            &[false, true, true, false],
            &[false, false, true, false],
        ]);
        let at_half = ensemble_filter(&m, 0.5).unwrap();
        assert_eq!(at_half.removed, vec![1, 2]);
        let at_seventy = ensemble_filter(&m, 0.7).unwrap();
        assert_eq!(at_seventy.removed, vec![2]); // 2/3 < 0.7
        let all_false = matrix(&[&[false; 4], &[false; 4]]);
        assert!(ensemble_filter(&all_false, 0.5).unwrap().removed.is_empty());
        assert!(ensemble_filter(&m, 0.0).is_err());
        assert!(ensemble_filter(&m, 1.5).is_err());
    }

    #[test]
    fn single_learner_matrix_reduces_to_biased() {
        let ds = make_blobs(2, 30, 2, 0.6, 5).unwrap();
        let (noisy, _) = inject_label_noise(&ds, 0.2, 2).unwrap();
        let spec = LearnerSpec::parse("naive-bayes").unwrap();
        let biased = biased_filter(&spec, &noisy, &FlagMode::TrainOnAll).unwrap();
        let m = flag_misclassified(&[spec], &noisy, &FlagMode::TrainOnAll).unwrap();
        for t in [0.1, 0.5, 1.0] {
            let ens = ensemble_filter(&m, t).unwrap();
            assert_eq!(ens.removed, biased.removed);
        }
    }

    #[test]
    fn cross_validated_flags_are_reproducible() {
        let ds = make_blobs(2, 40, 2, 0.4, 9).unwrap();
        let specs = vec![LearnerSpec::parse("knn:k=3").unwrap()];
        let mode = FlagMode::cross_validated(3, 77).unwrap();
        let a = flag_misclassified(&specs, &ds, &mode).unwrap();
        let b = flag_misclassified(&specs, &ds, &mode).unwrap();
        assert_eq!(a, b);
        // CV flags differ from resubstitution for a memorizing learner.
        let resub = flag_misclassified(&specs, &ds, &FlagMode::TrainOnAll).unwrap();
        assert_ne!(a.rows()[0], resub.rows()[0]);
    }

    #[test]
    fn biased_filter_recovers_injected_noise() {
        let ds = make_blobs(2, 100, 2, 0.2, 3).unwrap();
        let (noisy, corrupted) = inject_label_noise(&ds, 0.25, 17).unwrap();
        let spec = LearnerSpec::parse("decision-tree").unwrap();
        let outcome = biased_filter(&spec, &noisy, &FlagMode::TrainOnAll).unwrap();
        let removed: std::collections::BTreeSet<_> = outcome.removed.iter().copied().collect();
        let truth: std::collections::BTreeSet<_> = corrupted.iter().copied().collect();
        let inter = removed.intersection(&truth).count() as f64;
        let union = removed.union(&truth).count() as f64;
        let jaccard = inter / union;
        assert!(jaccard > 0.3, "Jaccard {jaccard}");
    }

    #[test]
    fn partition_invariant_holds() {
        let m = matrix(&[&[true, false, true, false, true]]);
        let outcome = ensemble_filter(&m, 0.5).unwrap();
        let mut all: Vec<usize> = outcome.kept.clone();
        all.extend(&outcome.removed);
        all.sort_unstable();
        assert_eq!(all, (0..5).collect::<Vec<_>>());
    }

    #[test]
    fn guard_rejects_class_wipeout() {
        let ds = make_blobs(2, 10, 2, 0.2, 1).unwrap();
        let removed: Vec<usize> = (0..10).collect(); // all of class 0
        let outcome = FilterOutcome::from_removed(ds.len(), removed, "t".into());
        let (kept, fell_back) = guarded_kept(&ds, &outcome);
        assert!(fell_back);
        assert_eq!(kept.len(), ds.len());
        let fine = FilterOutcome::from_removed(ds.len(), vec![0, 11], "t".into());
        let (kept, fell_back) = guarded_kept(&ds, &fine);
        assert!(!fell_back);
        assert_eq!(kept.len(), ds.len() - 2);
    }

    #[test]
    fn holdout_split_is_stratified_and_seeded() {
        let ds = make_blobs(3, 20, 2, 0.3, 4).unwrap();
        let (train, val) = holdout_split(&ds, 0.2, 5).unwrap();
        assert_eq!(train.len() + val.len(), ds.len());
        let val_ds = ds.subset(&val);
        assert_eq!(val_ds.class_histogram(), vec![4, 4, 4]);
        let again = holdout_split(&ds, 0.2, 5).unwrap();
        assert_eq!((train, val), again);
    }

    #[test]
    fn adaptive_filter_stops_when_nothing_helps() {
        // Perfectly separable data: the baseline is already 1.0, no candidate
        // can strictly improve, so the search accepts nothing.
        let ds = make_blobs(2, 40, 2, 0.08, 6).unwrap();
        let target = LearnerSpec::parse("knn:k=1").unwrap();
        let candidates = vec![
            LearnerSpec::parse("naive-bayes").unwrap(),
            LearnerSpec::parse("one-rule").unwrap(),
        ];
        let trace = adaptive_filter(
            &candidates,
            &target,
            &ds,
            0.5,
            &FlagMode::TrainOnAll,
            0.2,
            11,
        )
        .unwrap();
        assert!(trace.filter_set.is_empty());
        assert_eq!(trace.accuracies.len(), 1);
        assert_eq!(trace.accuracies[0], 1.0);
    }

    #[test]
    fn adaptive_filter_accepts_helpful_candidates() {
        let ds = make_blobs(2, 80, 2, 0.2, 6).unwrap();
        let (noisy, _) = inject_label_noise(&ds, 0.3, 8).unwrap();
        let target = LearnerSpec::parse("knn:k=1").unwrap();
        let candidates = vec![
            LearnerSpec::parse("knn:k=5").unwrap(),
            LearnerSpec::parse("naive-bayes").unwrap(),
            LearnerSpec::parse("decision-tree").unwrap(),
        ];
        let mode = FlagMode::cross_validated(3, 21).unwrap();
        let trace =
            adaptive_filter(&candidates, &target, &noisy, 0.5, &mode, 0.2, 11).unwrap();
        assert!(trace.filter_set.len() <= candidates.len());
        assert_eq!(trace.accuracies.len(), trace.filter_set.len() + 1);
        for w in trace.accuracies.windows(2) {
            assert!(w[1] > w[0], "accepted accuracies must strictly increase: {:?}", trace.accuracies);
        }
    }

    #[test]
    fn threshold_selection_prefers_larger_on_ties() {
        let ds = make_blobs(2, 30, 2, 0.3, 2).unwrap();
        let all_false = MisclassificationMatrix::new(
            vec!["a".into(), "b".into()],
            vec![vec![false; ds.len()], vec![false; ds.len()]],
        )
        .unwrap();
        let target = LearnerSpec::parse("knn:k=3").unwrap();
        let protocol = CvProtocol::new(3, 1, 5).unwrap();
        let (t, _) =
            select_best_threshold(&all_false, &[0.5, 0.7, 0.9], &target, &ds, &protocol).unwrap();
        assert_eq!(t, 0.9);

        let (t, acc) =
            select_best_threshold(&all_false, &[0.7], &target, &ds, &protocol).unwrap();
        assert_eq!(t, 0.7);
        assert!(acc > 0.0);
    }
}
