//! The experiment engine.
//!
//! A plan crosses datasets, evaluated learners, and filter conditions over a
//! repeated stratified cross-validation grid. Filters are applied to the
//! training partition of each fold only; test partitions stay untouched.
//! Cells are pure functions of the plan and a derived seed, so a run is
//! bit-identical whether executed serially or in parallel.
//!
//! Seed derivation: the fold plan for (dataset, repeat) is seeded with
//! `mix_seed([master, hash(dataset), repeat])`; any per-cell randomness
//! (cross-validated flagging, adaptive search) derives from
//! `mix_seed([master, hash(dataset), repeat, fold, hash(condition),
//! hash(learner)])`.

mod voting;
mod wilcoxon;

pub use voting::{voting_fit, voting_spec};
pub use wilcoxon::{wilcoxon_signed_ranks, WilcoxonMethod, WilcoxonResult};

use rayon::prelude::*;
use serde::Serialize;

use crate::datakit::{stratified_folds, Dataset, FoldPlan};
use crate::filters::{
    adaptive_filter, apply_filter_set, biased_filter, ensemble_filter, flag_misclassified,
    guarded_kept, FilterOutcome, FlagMode,
};
use crate::learners::{self, LearnerSpec};
use crate::rng::{hash_str, mix_seed};
use crate::{Error, Result};

pub const RESULTS_SCHEMA: &str = "purgelab-results/1";
pub const SUMMARY_SCHEMA: &str = "purgelab-summary/1";

/// What happens to each fold's training partition before fitting.
#[derive(Clone, Debug, PartialEq)]
pub enum Condition {
    /// No filtering.
    Unfiltered,
    /// The evaluated learner filters its own training data.
    Biased,
    /// The filter learner set votes; remove at the threshold.
    EnsembleFilter { threshold: f64 },
    /// Greedy forward selection of the filter set per fold.
    Adaptive,
    /// Majority voting ensemble over the filter learner set, unfiltered.
    VotingEnsemble,
    /// Voting ensemble trained on ensemble-filtered data (FEns).
    FilteredVotingEnsemble { threshold: f64 },
}

impl Condition {
    pub fn id(&self) -> String {
        match self {
            Condition::Unfiltered => "none".into(),
            Condition::Biased => "biased".into(),
            Condition::EnsembleFilter { threshold } => format!("ensemble@{threshold}"),
            Condition::Adaptive => "adaptive".into(),
            Condition::VotingEnsemble => "vote".into(),
            Condition::FilteredVotingEnsemble { threshold } => format!("fens@{threshold}"),
        }
    }

    pub fn parse(text: &str) -> Result<Condition> {
        let parse_threshold = |t: &str| -> Result<f64> {
            let v: f64 = t
                .parse()
                .map_err(|_| Error::InvalidArg(format!("bad threshold `{t}` in condition")))?;
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidArg(format!("threshold {v} outside (0,1]")));
            }
            Ok(v)
        };
        match text {
            "none" => Ok(Condition::Unfiltered),
            "biased" => Ok(Condition::Biased),
            "adaptive" => Ok(Condition::Adaptive),
            "vote" => Ok(Condition::VotingEnsemble),
            other => {
                if let Some(t) = other.strip_prefix("ensemble@") {
                    Ok(Condition::EnsembleFilter { threshold: parse_threshold(t)? })
                } else if let Some(t) = other.strip_prefix("fens@") {
                    Ok(Condition::FilteredVotingEnsemble { threshold: parse_threshold(t)? })
                } else {
                    Err(Error::InvalidArg(format!("unknown condition `{other}`")))
                }
            }
        }
    }

    /// Voting conditions produce one cell per fold; the rest cross the
    /// evaluated learners.
    fn is_per_learner(&self) -> bool {
        !matches!(self, Condition::VotingEnsemble | Condition::FilteredVotingEnsemble { .. })
    }
}

/// Flag source for the biased/ensemble/FEns conditions. Cross-validated
/// flagging seeds derive per cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlagModeCfg {
    TrainOnAll,
    CrossValidated { folds: usize },
}

impl FlagModeCfg {
    fn materialize(&self, seed: u64) -> FlagMode {
        match self {
            FlagModeCfg::TrainOnAll => FlagMode::TrainOnAll,
            FlagModeCfg::CrossValidated { folds } => {
                FlagMode::CrossValidated { folds: *folds, seed }
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AdaptiveConfig {
    pub threshold: f64,
    pub validation_fraction: f64,
    /// Folds for the cross-validated flagging inside the search.
    pub flag_folds: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        AdaptiveConfig { threshold: 0.5, validation_fraction: 0.2, flag_folds: 3 }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentPlan {
    pub datasets: Vec<Dataset>,
    /// Learners evaluated under per-learner conditions.
    pub learners: Vec<LearnerSpec>,
    /// Members of the ensemble filter and the voting ensemble.
    pub filter_learners: Vec<LearnerSpec>,
    pub conditions: Vec<Condition>,
    pub repeats: usize,
    pub folds: usize,
    pub master_seed: u64,
    pub flag_mode: FlagModeCfg,
    pub adaptive: AdaptiveConfig,
}

impl ExperimentPlan {
    /// A plan with the paper-style defaults: 5x10-fold, train-on-all
    /// flagging, and the evaluated learners doubling as the filter set.
    pub fn new(
        datasets: Vec<Dataset>,
        learners: Vec<LearnerSpec>,
        conditions: Vec<Condition>,
        master_seed: u64,
    ) -> Result<Self> {
        let plan = ExperimentPlan {
            filter_learners: learners.clone(),
            datasets,
            learners,
            conditions,
            repeats: 5,
            folds: 10,
            master_seed,
            flag_mode: FlagModeCfg::TrainOnAll,
            adaptive: AdaptiveConfig::default(),
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::InvalidArg("plan has no datasets".into()));
        }
        if self.learners.is_empty() {
            return Err(Error::InvalidArg("plan has no learners".into()));
        }
        if self.conditions.is_empty() {
            return Err(Error::InvalidArg("plan has no conditions".into()));
        }
        if self.filter_learners.is_empty() {
            return Err(Error::InvalidArg("plan has no filter learners".into()));
        }
        if self.repeats < 1 {
            return Err(Error::InvalidArg("repeats must be >= 1".into()));
        }
        if self.folds < 2 {
            return Err(Error::InvalidArg("folds must be >= 2".into()));
        }
        let mut names = std::collections::BTreeSet::new();
        for ds in &self.datasets {
            if !names.insert(&ds.name) {
                return Err(Error::InvalidArg(format!(
                    "duplicate dataset name `{}` in plan",
                    ds.name
                )));
            }
        }
        if !(self.adaptive.threshold > 0.0 && self.adaptive.threshold <= 1.0) {
            return Err(Error::InvalidArg("adaptive threshold outside (0,1]".into()));
        }
        Ok(())
    }
}

/// One accuracy cell; `error` is set instead of `accuracy` when the cell
/// failed (the run continues).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellRecord {
    pub dataset: String,
    pub learner: String,
    pub condition: String,
    pub repeat: usize,
    pub fold: usize,
    pub accuracy: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub master_seed: u64,
    pub cells: Vec<CellRecord>,
    /// Degenerate-filter fallbacks and similar non-fatal events.
    pub warnings: Vec<String>,
}

impl ExperimentResult {
    /// Mean accuracy per dataset for a (learner, condition) pair, over the
    /// successful cells.
    pub fn per_dataset_means(
        &self,
        learner: &str,
        condition: &str,
    ) -> std::collections::BTreeMap<String, f64> {
        let mut sums: std::collections::BTreeMap<String, (f64, usize)> = Default::default();
        for cell in &self.cells {
            if cell.learner == learner && cell.condition == condition {
                if let Some(acc) = cell.accuracy {
                    let entry = sums.entry(cell.dataset.clone()).or_insert((0.0, 0));
                    entry.0 += acc;
                    entry.1 += 1;
                }
            }
        }
        sums.into_iter().map(|(k, (s, c))| (k, s / c as f64)).collect()
    }

    pub fn learner_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.cells.iter().map(|c| c.learner.clone()).collect();
        ids.sort();
        ids.dedup();
        ids
    }

    /// Results CSV, one row per cell, schema-versioned.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("schema,dataset,learner,condition,repeat,fold,accuracy,error\n");
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .has_headers(false)
            .from_writer(Vec::new());
        for cell in &self.cells {
            w.write_record([
                RESULTS_SCHEMA,
                &cell.dataset,
                &cell.learner,
                &cell.condition,
                &cell.repeat.to_string(),
                &cell.fold.to_string(),
                &cell.accuracy.map(|a| a.to_string()).unwrap_or_default(),
                cell.error.as_deref().unwrap_or(""),
            ])
            .expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("flushed")).expect("utf8"));
        out
    }
}

struct Task {
    dataset: usize,
    repeat: usize,
    fold: usize,
    condition: usize,
}

struct TaskOutput {
    records: Vec<CellRecord>,
    warnings: Vec<String>,
}

/// Run the full grid. Per-cell failures are recorded in the result; only
/// plan-level problems (invalid plan, an unsplittable dataset) abort.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    plan.validate()?;

    let mut fold_plans: Vec<Vec<FoldPlan>> = Vec::with_capacity(plan.datasets.len());
    for ds in &plan.datasets {
        let mut per_repeat = Vec::with_capacity(plan.repeats);
        for repeat in 0..plan.repeats {
            let seed = mix_seed(&[plan.master_seed, hash_str(&ds.name), repeat as u64]);
            per_repeat.push(stratified_folds(ds, plan.folds, seed)?);
        }
        fold_plans.push(per_repeat);
    }

    let mut tasks = Vec::new();
    for dataset in 0..plan.datasets.len() {
        for repeat in 0..plan.repeats {
            for fold in 0..plan.folds {
                for condition in 0..plan.conditions.len() {
                    tasks.push(Task { dataset, repeat, fold, condition });
                }
            }
        }
    }

    let outputs: Vec<TaskOutput> = tasks
        .par_iter()
        .map(|task| run_task(plan, &fold_plans[task.dataset][task.repeat], task))
        .collect();

    let mut cells = Vec::new();
    let mut warnings = Vec::new();
    for output in outputs {
        cells.extend(output.records);
        warnings.extend(output.warnings);
    }
    cells.sort_by(|a, b| {
        (&a.dataset, &a.learner, &a.condition, a.repeat, a.fold)
            .cmp(&(&b.dataset, &b.learner, &b.condition, b.repeat, b.fold))
    });
    warnings.sort();
    Ok(ExperimentResult { master_seed: plan.master_seed, cells, warnings })
}

fn run_task(plan: &ExperimentPlan, fold_plan: &FoldPlan, task: &Task) -> TaskOutput {
    let ds = &plan.datasets[task.dataset];
    let condition = &plan.conditions[task.condition];
    let condition_id = condition.id();
    let mut records = Vec::new();
    let mut warnings = Vec::new();

    let cell = |learner: &str, accuracy: Option<f64>, error: Option<String>| CellRecord {
        dataset: ds.name.clone(),
        learner: learner.to_string(),
        condition: condition_id.clone(),
        repeat: task.repeat,
        fold: task.fold,
        accuracy,
        error,
    };

    let test_idx = fold_plan.test_indices(task.fold);
    let train_idx = fold_plan.train_indices(task.fold);
    let learner_labels: Vec<String> = if condition.is_per_learner() {
        plan.learners.iter().map(LearnerSpec::label).collect()
    } else {
        vec![voting_spec().label()]
    };
    if test_idx.is_empty() || train_idx.is_empty() {
        for label in &learner_labels {
            records.push(cell(label, None, Some("empty fold partition".into())));
        }
        return TaskOutput { records, warnings };
    }

    let train = ds.subset(&train_idx);
    let test = ds.subset(&test_idx);
    let cell_seed = |learner_label: &str| {
        mix_seed(&[
            plan.master_seed,
            hash_str(&ds.name),
            task.repeat as u64,
            task.fold as u64,
            hash_str(&condition_id),
            hash_str(learner_label),
        ])
    };

    // The filtered training set for a given outcome, with the degenerate
    // guard applied; warnings are recorded against this cell.
    let guard = |outcome: &FilterOutcome, label: &str, warnings: &mut Vec<String>| {
        let (kept, fell_back) = guarded_kept(&train, outcome);
        if fell_back {
            warnings.push(format!(
                "dataset={} condition={} learner={} repeat={} fold={}: degenerate filter result, trained unfiltered",
                ds.name, condition_id, label, task.repeat, task.fold
            ));
        }
        train.subset(&kept)
    };

    match condition {
        Condition::Unfiltered => {
            for spec in &plan.learners {
                let outcome = learners::fit(spec, &train)
                    .and_then(|model| learners::accuracy(&model, &test));
                records.push(to_cell(&cell, &spec.label(), outcome));
            }
        }
        Condition::Biased => {
            for spec in &plan.learners {
                let label = spec.label();
                let mode = plan.flag_mode.materialize(cell_seed(&label));
                let outcome = biased_filter(spec, &train, &mode).and_then(|out| {
                    let filtered = guard(&out, &label, &mut warnings);
                    let model = learners::fit(spec, &filtered)?;
                    learners::accuracy(&model, &test)
                });
                records.push(to_cell(&cell, &label, outcome));
            }
        }
        Condition::EnsembleFilter { threshold } => {
            let mode = plan.flag_mode.materialize(cell_seed("filter-set"));
            match flag_misclassified(&plan.filter_learners, &train, &mode)
                .and_then(|matrix| ensemble_filter(&matrix, *threshold))
            {
                Ok(out) => {
                    for spec in &plan.learners {
                        let label = spec.label();
                        let filtered = guard(&out, &label, &mut warnings);
                        let outcome = learners::fit(spec, &filtered)
                            .and_then(|model| learners::accuracy(&model, &test));
                        records.push(to_cell(&cell, &label, outcome));
                    }
                }
                Err(e) => {
                    for spec in &plan.learners {
                        records.push(cell(&spec.label(), None, Some(e.to_string())));
                    }
                }
            }
        }
        Condition::Adaptive => {
            for spec in &plan.learners {
                let label = spec.label();
                let seed = cell_seed(&label);
                let mode = FlagMode::CrossValidated {
                    folds: plan.adaptive.flag_folds,
                    seed: mix_seed(&[seed, 1]),
                };
                let outcome = adaptive_filter(
                    &plan.filter_learners,
                    spec,
                    &train,
                    plan.adaptive.threshold,
                    &mode,
                    plan.adaptive.validation_fraction,
                    mix_seed(&[seed, 2]),
                )
                .and_then(|trace| {
                    let out = apply_filter_set(
                        &trace.filter_set,
                        &train,
                        plan.adaptive.threshold,
                        &mode,
                    )?;
                    let filtered = guard(&out, &label, &mut warnings);
                    let model = learners::fit(spec, &filtered)?;
                    learners::accuracy(&model, &test)
                });
                records.push(to_cell(&cell, &label, outcome));
            }
        }
        Condition::VotingEnsemble => {
            let label = voting_spec().label();
            let outcome = voting_fit(&plan.filter_learners, &train)
                .and_then(|model| learners::accuracy(&model, &test));
            records.push(to_cell(&cell, &label, outcome));
        }
        Condition::FilteredVotingEnsemble { threshold } => {
            let label = voting_spec().label();
            let mode = plan.flag_mode.materialize(cell_seed(&label));
            let outcome = flag_misclassified(&plan.filter_learners, &train, &mode)
                .and_then(|matrix| ensemble_filter(&matrix, *threshold))
                .and_then(|out| {
                    let filtered = guard(&out, &label, &mut warnings);
                    let model = voting_fit(&plan.filter_learners, &filtered)?;
                    learners::accuracy(&model, &test)
                });
            records.push(to_cell(&cell, &label, outcome));
        }
    }

    TaskOutput { records, warnings }
}

fn to_cell(
    cell: &impl Fn(&str, Option<f64>, Option<String>) -> CellRecord,
    label: &str,
    outcome: Result<f64>,
) -> CellRecord {
    match outcome {
        Ok(acc) => cell(label, Some(acc), None),
        Err(e) => cell(label, None, Some(e.to_string())),
    }
}

/// One learner's row in a condition comparison.
#[derive(Clone, Debug, Serialize)]
pub struct SummaryRow {
    pub learner: String,
    pub n_datasets: usize,
    pub baseline_mean: f64,
    pub comparison_mean: f64,
    pub p_two_sided: f64,
    pub greater: usize,
    pub equal: usize,
    pub less: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SummaryTable {
    pub baseline: String,
    pub comparison: String,
    pub rows: Vec<SummaryRow>,
}

const EQUALITY_TOLERANCE: f64 = 1e-9;

/// Compare two conditions per learner: per-dataset means, a Wilcoxon
/// signed-ranks test over them, and greater/equal/less counts (comparison vs
/// baseline, equality within 1e-9).
pub fn summarize(
    result: &ExperimentResult,
    baseline: &str,
    comparison: &str,
) -> Result<SummaryTable> {
    for condition in [baseline, comparison] {
        if !result.cells.iter().any(|c| c.condition == condition) {
            return Err(Error::InvalidArg(format!("condition `{condition}` not in results")));
        }
    }
    let mut rows = Vec::new();
    for learner in result.learner_ids() {
        let base = result.per_dataset_means(&learner, baseline);
        let comp = result.per_dataset_means(&learner, comparison);
        let datasets: Vec<&String> = base.keys().filter(|d| comp.contains_key(*d)).collect();
        if datasets.is_empty() {
            continue;
        }
        let a: Vec<f64> = datasets.iter().map(|d| comp[*d]).collect();
        let b: Vec<f64> = datasets.iter().map(|d| base[*d]).collect();
        let test = wilcoxon_signed_ranks(&a, &b)?;
        let mut greater = 0;
        let mut equal = 0;
        let mut less = 0;
        for (x, y) in a.iter().zip(&b) {
            if (x - y).abs() <= EQUALITY_TOLERANCE {
                equal += 1;
            } else if x > y {
                greater += 1;
            } else {
                less += 1;
            }
        }
        rows.push(SummaryRow {
            learner,
            n_datasets: datasets.len(),
            baseline_mean: b.iter().sum::<f64>() / b.len() as f64,
            comparison_mean: a.iter().sum::<f64>() / a.len() as f64,
            p_two_sided: test.p_two_sided,
            greater,
            equal,
            less,
        });
    }
    Ok(SummaryTable {
        baseline: baseline.to_string(),
        comparison: comparison.to_string(),
        rows,
    })
}

impl SummaryTable {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "comparison `{}` vs baseline `{}` (counts are comparison >,=,< baseline per dataset)\n",
            self.comparison, self.baseline
        );
        out.push_str(&format!(
            "{:<40} {:>4} {:>10} {:>10} {:>9} {:>9}\n",
            "learner", "n", "baseline", "compared", "p-value", ">,=,<"
        ));
        for row in &self.rows {
            out.push_str(&format!(
                "{:<40} {:>4} {:>10.4} {:>10.4} {:>9.4} {:>3},{},{}\n",
                row.learner,
                row.n_datasets,
                row.baseline_mean,
                row.comparison_mean,
                row.p_two_sided,
                row.greater,
                row.equal,
                row.less
            ));
        }
        out
    }
}

#[derive(Serialize)]
struct SummaryDoc<'a> {
    schema: &'static str,
    master_seed: u64,
    cells: usize,
    failed_cells: Vec<&'a CellRecord>,
    warnings: &'a [String],
    tables: &'a [SummaryTable],
}

/// The versioned JSON summary document.
pub fn summary_json(result: &ExperimentResult, tables: &[SummaryTable]) -> String {
    let failed: Vec<&CellRecord> = result.cells.iter().filter(|c| c.error.is_some()).collect();
    let doc = SummaryDoc {
        schema: SUMMARY_SCHEMA,
        master_seed: result.master_seed,
        cells: result.cells.len(),
        failed_cells: failed,
        warnings: &result.warnings,
        tables,
    };
    serde_json::to_string_pretty(&doc).expect("serializable summary")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datakit::{inject_label_noise, make_blobs};

    fn quick_plan(conditions: Vec<Condition>) -> ExperimentPlan {
        let ds = make_blobs(2, 30, 2, 0.25, 11).unwrap();
        let mut plan = ExperimentPlan::new(
            vec![ds],
            vec![
                LearnerSpec::parse("knn:k=3").unwrap(),
                LearnerSpec::parse("naive-bayes").unwrap(),
            ],
            conditions,
            99,
        )
        .unwrap();
        plan.repeats = 1;
        plan.folds = 2;
        plan
    }

    #[test]
    fn grid_arithmetic() {
        let plan = quick_plan(vec![
            Condition::Unfiltered,
            Condition::EnsembleFilter { threshold: 0.5 },
        ]);
        let result = run_experiment(&plan).unwrap();
        // 1 dataset x 2 learners x 2 conditions x 1 repeat x 2 folds
        assert_eq!(result.cells.len(), 8);
        assert!(result.cells.iter().all(|c| c.accuracy.is_some()));
    }

    #[test]
    fn filter_that_removes_nothing_changes_nothing() {
        // Tight blobs: every learner classifies everything correctly, so the
        // ensemble filter removes nothing and accuracies match exactly.
        let ds = make_blobs(2, 30, 2, 0.05, 4).unwrap();
        let mut plan = ExperimentPlan::new(
            vec![ds],
            vec![LearnerSpec::parse("knn:k=1").unwrap()],
            vec![Condition::Unfiltered, Condition::EnsembleFilter { threshold: 0.5 }],
            7,
        )
        .unwrap();
        plan.repeats = 1;
        plan.folds = 3;
        let result = run_experiment(&plan).unwrap();
        let none: Vec<f64> = result
            .cells
            .iter()
            .filter(|c| c.condition == "none")
            .map(|c| c.accuracy.unwrap())
            .collect();
        let filtered: Vec<f64> = result
            .cells
            .iter()
            .filter(|c| c.condition == "ensemble@0.5")
            .map(|c| c.accuracy.unwrap())
            .collect();
        assert_eq!(none, filtered);
    }

    #[test]
    fn runs_are_bit_identical() {
        let plan = quick_plan(vec![
            Condition::Unfiltered,
            Condition::Biased,
            Condition::VotingEnsemble,
        ]);
        let a = run_experiment(&plan).unwrap();
        let b = run_experiment(&plan).unwrap();
        assert_eq!(a.to_csv_string(), b.to_csv_string());
    }

    #[test]
    fn voting_conditions_use_the_pseudo_learner() {
        let plan = quick_plan(vec![Condition::VotingEnsemble]);
        let result = run_experiment(&plan).unwrap();
        assert_eq!(result.cells.len(), 2); // one per fold
        assert!(result.cells.iter().all(|c| c.learner == "voting-ensemble"));
    }

    #[test]
    fn filters_never_see_test_data() {
        // Corrupting the labels of a fold's test partition must not change
        // which training instances the filter removes.
        let ds = make_blobs(2, 40, 2, 0.4, 9).unwrap();
        let (noisy, _) = inject_label_noise(&ds, 0.2, 3).unwrap();
        let plan = stratified_folds(&noisy, 4, 5).unwrap();
        let train_idx = plan.train_indices(0);
        let train = noisy.subset(&train_idx);
        let specs = crate::learners::builtin_specs(1);
        let matrix = flag_misclassified(&specs, &train, &FlagMode::TrainOnAll).unwrap();
        let before = ensemble_filter(&matrix, 0.5).unwrap();

        let mut corrupted = noisy.clone();
        for &i in &plan.test_indices(0) {
            corrupted.instances[i].label = 1 - corrupted.instances[i].label;
        }
        let train_again = corrupted.subset(&train_idx);
        let matrix = flag_misclassified(&specs, &train_again, &FlagMode::TrainOnAll).unwrap();
        let after = ensemble_filter(&matrix, 0.5).unwrap();
        assert_eq!(before.removed, after.removed);
    }

    #[test]
    fn summarize_identical_conditions() {
        let plan = quick_plan(vec![
            Condition::Unfiltered,
            Condition::EnsembleFilter { threshold: 0.9 },
        ]);
        let result = run_experiment(&plan).unwrap();
        let table = summarize(&result, "none", "none").unwrap();
        for row in &table.rows {
            assert_eq!(row.greater, 0);
            assert_eq!(row.less, 0);
            assert_eq!(row.equal, row.n_datasets);
            assert_eq!(row.p_two_sided, 1.0);
        }
        assert!(summarize(&result, "none", "missing").is_err());
    }

    #[test]
    fn summarize_uniform_improvement_over_six_datasets() {
        // Hand-built result: comparison is +0.01 on every dataset.
        let mut cells = Vec::new();
        for d in 0..6 {
            for (condition, acc) in [("none", 0.80), ("ensemble@0.5", 0.81)] {
                cells.push(CellRecord {
                    dataset: format!("d{d}"),
                    learner: "knn".into(),
                    condition: condition.into(),
                    repeat: 0,
                    fold: 0,
                    accuracy: Some(acc + d as f64 * 0.001),
                    error: None,
                });
            }
        }
        let result = ExperimentResult { master_seed: 0, cells, warnings: vec![] };
        let table = summarize(&result, "none", "ensemble@0.5").unwrap();
        assert_eq!(table.rows.len(), 1);
        let row = &table.rows[0];
        assert_eq!((row.greater, row.equal, row.less), (6, 0, 0));
        assert_eq!(row.p_two_sided, 2.0 / 64.0);
    }

    #[test]
    fn csv_and_json_are_schema_versioned() {
        let plan = quick_plan(vec![Condition::Unfiltered]);
        let result = run_experiment(&plan).unwrap();
        let csv = result.to_csv_string();
        assert!(csv.starts_with("schema,dataset,learner,condition,repeat,fold,accuracy,error\n"));
        assert!(csv.contains(RESULTS_SCHEMA));
        let json = summary_json(&result, &[]);
        assert!(json.contains(SUMMARY_SCHEMA));
    }

    #[test]
    fn condition_parsing_round_trips() {
        for text in ["none", "biased", "ensemble@0.5", "adaptive", "vote", "fens@0.7"] {
            let condition = Condition::parse(text).unwrap();
            assert_eq!(condition.id(), text);
        }
        assert!(Condition::parse("ensemble@1.5").is_err());
        assert!(Condition::parse("nonsense").is_err());
    }
}
