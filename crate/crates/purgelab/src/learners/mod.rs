//! Pluggable classifiers.
//!
//! Five built-in learners implemented from first principles — `decision-tree`,
//! `knn`, `naive-bayes`, `mlp`, `one-rule` — chosen to span the instance-based
//! / tree / probabilistic / neural / rule diversity axes, plus a registry for
//! extension learners. Specs are addressable by textual id with `key=value`
//! hyperparameters (e.g. `knn:k=5`).
//!
//! Determinism contract: fitting the same spec on the same data yields
//! prediction-identical models. All prediction ties break toward the lowest
//! class index, which every kernel realizes by arg-maxing its class
//! distribution with a first-wins scan.

pub mod knn;
pub mod mlp;
pub mod naive_bayes;
pub mod one_rule;
pub mod tree;

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use once_cell::sync::Lazy;

use crate::datakit::{AttrKind, Cell, Dataset, Instance};
use crate::{Error, Result};

/// A learner configuration: registered id, hyperparameters, and a seed for
/// any internal randomness (MLP init, tree prune-set draw).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LearnerSpec {
    id: String,
    params: BTreeMap<String, String>,
    seed: u64,
}

impl LearnerSpec {
    /// Validates the id against the registry and rejects unknown
    /// hyperparameter keys or unparseable values.
    pub fn new(id: &str, params: BTreeMap<String, String>, seed: u64) -> Result<Self> {
        let factory = lookup(id)?;
        for key in params.keys() {
            if !factory.allowed_keys().contains(&key.as_str()) {
                return Err(Error::UnknownHyperparameter { id: id.to_string(), key: key.clone() });
            }
        }
        let spec = LearnerSpec { id: id.to_string(), params, seed };
        factory.validate(&spec)?;
        Ok(spec)
    }

    /// Parse `id` or `id:key=value,key=value`. The pseudo-key `seed` sets the
    /// spec seed.
    pub fn parse(text: &str) -> Result<Self> {
        let (id, rest) = match text.split_once(':') {
            Some((id, rest)) => (id.trim(), rest.trim()),
            None => (text.trim(), ""),
        };
        if id.is_empty() {
            return Err(Error::InvalidArg("empty learner spec".into()));
        }
        let mut params = BTreeMap::new();
        let mut seed = 0u64;
        if !rest.is_empty() {
            for part in rest.split(',') {
                let (key, value) = part
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidArg(format!("expected key=value in `{part}`")))?;
                let (key, value) = (key.trim(), value.trim());
                if key == "seed" {
                    seed = value
                        .parse()
                        .map_err(|_| Error::InvalidArg(format!("bad seed `{value}`")))?;
                } else {
                    params.insert(key.to_string(), value.to_string());
                }
            }
        }
        LearnerSpec::new(id, params, seed)
    }

    /// A spec that bypasses registry validation, for pseudo-learners such as
    /// the voting ensemble that are fit through their own entry points.
    pub(crate) fn unchecked(id: &str) -> Self {
        LearnerSpec { id: id.to_string(), params: BTreeMap::new(), seed: 0 }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn params(&self) -> &BTreeMap<String, String> {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Canonical text form: id, sorted params, then the seed when non-zero.
    pub fn label(&self) -> String {
        let mut parts: Vec<String> =
            self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        if self.seed != 0 {
            parts.push(format!("seed={}", self.seed));
        }
        if parts.is_empty() {
            self.id.clone()
        } else {
            format!("{}:{}", self.id, parts.join(","))
        }
    }

    pub(crate) fn param_usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidArg(format!("{}: `{key}` must be an integer, got `{v}`", self.id))),
        }
    }

    pub(crate) fn param_f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidArg(format!("{}: `{key}` must be a number, got `{v}`", self.id))),
        }
    }

    pub(crate) fn param_str(&self, key: &str, default: &str) -> String {
        self.params.get(key).cloned().unwrap_or_else(|| default.to_string())
    }
}

/// First maximum wins, so equal scores resolve to the lowest class index.
pub(crate) fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// The trained prediction machinery behind a [`TrainedModel`].
///
/// Implementations provide the class distribution; `predict` is derived from
/// it so that `argmax(class_distribution) == predict` holds by construction.
pub trait ModelKernel: Send + Sync {
    fn class_distribution(&self, instance: &Instance) -> Vec<f64>;

    fn predict(&self, instance: &Instance) -> usize {
        argmax_first(&self.class_distribution(instance))
    }
}

/// An immutable trained model: opaque learner state plus the source spec and
/// the training schema used to validate prediction inputs.
pub struct TrainedModel {
    kernel: Arc<dyn ModelKernel>,
    spec: LearnerSpec,
    schema: Arc<Vec<AttrKind>>,
    class_count: usize,
}

impl TrainedModel {
    pub fn spec(&self) -> &LearnerSpec {
        &self.spec
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    fn check_schema(&self, instance: &Instance) -> Result<()> {
        if instance.values.len() != self.schema.len() {
            return Err(Error::SchemaMismatch(format!(
                "instance has {} cells, model was trained on {} attributes",
                instance.values.len(),
                self.schema.len()
            )));
        }
        for (j, (cell, kind)) in instance.values.iter().zip(self.schema.iter()).enumerate() {
            match (kind, cell) {
                (_, Cell::Missing) | (AttrKind::Numeric, Cell::Num(_)) => {}
                (AttrKind::Categorical(values), Cell::Cat(i)) if *i < values.len() => {}
                _ => {
                    return Err(Error::SchemaMismatch(format!(
                        "attribute {j}: cell does not match the training schema"
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn predict(&self, instance: &Instance) -> Result<usize> {
        self.check_schema(instance)?;
        Ok(self.kernel.predict(instance))
    }

    /// Per-class probabilities; sums to 1 and arg-maxes to `predict`.
    /// Learners without a natural distribution return normalized vote or
    /// leaf frequencies.
    pub fn class_distribution(&self, instance: &Instance) -> Result<Vec<f64>> {
        self.check_schema(instance)?;
        Ok(self.kernel.class_distribution(instance))
    }
}

/// Trains a single distinct label's constant predictor; the degenerate case
/// every learner shares.
struct ConstantModel {
    class: usize,
    class_count: usize,
}

impl ModelKernel for ConstantModel {
    fn class_distribution(&self, _instance: &Instance) -> Vec<f64> {
        let mut dist = vec![0.0; self.class_count];
        dist[self.class] = 1.0;
        dist
    }
}

pub trait LearnerFactory: Send + Sync {
    fn allowed_keys(&self) -> &'static [&'static str];

    /// Early validation of hyperparameter values; the default accepts all.
    fn validate(&self, _spec: &LearnerSpec) -> Result<()> {
        Ok(())
    }

    fn fit(&self, spec: &LearnerSpec, train: &Dataset) -> Result<Box<dyn ModelKernel>>;
}

type Registry = BTreeMap<String, Arc<dyn LearnerFactory>>;

static REGISTRY: Lazy<RwLock<Registry>> = Lazy::new(|| {
    let mut map: Registry = BTreeMap::new();
    map.insert("decision-tree".into(), Arc::new(tree::TreeFactory));
    map.insert("knn".into(), Arc::new(knn::KnnFactory));
    map.insert("naive-bayes".into(), Arc::new(naive_bayes::NaiveBayesFactory));
    map.insert("mlp".into(), Arc::new(mlp::MlpFactory));
    map.insert("one-rule".into(), Arc::new(one_rule::OneRuleFactory));
    RwLock::new(map)
});

pub const BUILTIN_IDS: [&str; 5] = ["decision-tree", "knn", "naive-bayes", "mlp", "one-rule"];

/// Default specs for the five built-ins, all with the given seed.
pub fn builtin_specs(seed: u64) -> Vec<LearnerSpec> {
    BUILTIN_IDS
        .iter()
        .map(|id| LearnerSpec::new(id, BTreeMap::new(), seed).expect("built-in ids are registered"))
        .collect()
}

/// Register an extension learner under a new id.
pub fn register_learner(id: &str, factory: Arc<dyn LearnerFactory>) -> Result<()> {
    let mut reg = REGISTRY.write().expect("registry lock");
    if reg.contains_key(id) {
        return Err(Error::InvalidArg(format!("learner id `{id}` already registered")));
    }
    reg.insert(id.to_string(), factory);
    Ok(())
}

fn lookup(id: &str) -> Result<Arc<dyn LearnerFactory>> {
    REGISTRY
        .read()
        .expect("registry lock")
        .get(id)
        .cloned()
        .ok_or_else(|| Error::UnknownLearner(id.to_string()))
}

/// Train a model. Deterministic given (spec, train). A training set with a
/// single distinct label yields a constant predictor for that label.
pub fn fit(spec: &LearnerSpec, train: &Dataset) -> Result<TrainedModel> {
    if train.is_empty() {
        return Err(Error::InvalidArg("empty training set".into()));
    }
    let first = train.instances[0].label;
    let kernel: Arc<dyn ModelKernel> = if train.instances.iter().all(|i| i.label == first) {
        Arc::new(ConstantModel { class: first, class_count: train.class_count() })
    } else {
        let factory = lookup(spec.id())?;
        Arc::from(factory.fit(spec, train).map_err(|e| match e {
            e @ Error::LearnerFailed { .. } => e,
            other => Error::LearnerFailed { id: spec.label(), message: other.to_string() },
        })?)
    };
    Ok(TrainedModel {
        kernel,
        spec: spec.clone(),
        schema: Arc::new(train.attributes.iter().map(|a| a.kind.clone()).collect()),
        class_count: train.class_count(),
    })
}

/// Wrap an already-built kernel with schema validation, for composite models
/// (the voting ensemble) built outside the registry.
pub(crate) fn wrap_kernel(
    kernel: Arc<dyn ModelKernel>,
    spec: LearnerSpec,
    train: &Dataset,
) -> Result<TrainedModel> {
    Ok(TrainedModel {
        kernel,
        spec,
        schema: Arc::new(train.attributes.iter().map(|a| a.kind.clone()).collect()),
        class_count: train.class_count(),
    })
}

/// Fraction of test instances whose prediction matches the observed label.
pub fn accuracy(model: &TrainedModel, test: &Dataset) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::InvalidArg("empty test set".into()));
    }
    let mut correct = 0usize;
    for inst in &test.instances {
        if model.predict(inst)? == inst.label {
            correct += 1;
        }
    }
    Ok(correct as f64 / test.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datakit::{make_blobs, AttributeMeta};

    #[test]
    fn parse_round_trips_through_label() {
        let spec = LearnerSpec::parse("knn:k=3,seed=7").unwrap();
        assert_eq!(spec.id(), "knn");
        assert_eq!(spec.seed(), 7);
        assert_eq!(spec.label(), "knn:k=3,seed=7");
        let again = LearnerSpec::parse(&spec.label()).unwrap();
        assert_eq!(spec, again);
    }

    #[test]
    fn unknown_id_and_keys_are_rejected() {
        assert!(matches!(LearnerSpec::parse("quantum-forest"), Err(Error::UnknownLearner(_))));
        assert!(matches!(
            LearnerSpec::parse("knn:neighbours=3"),
            Err(Error::UnknownHyperparameter { .. })
        ));
    }

    #[test]
    fn single_class_training_set_predicts_that_class() {
        let mut ds = make_blobs(2, 10, 2, 0.3, 1).unwrap();
        for inst in &mut ds.instances {
            inst.label = 1;
        }
        for spec in builtin_specs(0) {
            let model = fit(&spec, &ds).unwrap();
            for inst in &ds.instances {
                assert_eq!(model.predict(inst).unwrap(), 1, "{}", spec.id());
                assert_eq!(model.class_distribution(inst).unwrap(), vec![0.0, 1.0]);
            }
        }
    }

    #[test]
    fn schema_mismatch_is_reported() {
        let ds = make_blobs(2, 10, 2, 0.3, 1).unwrap();
        let model = fit(&LearnerSpec::parse("knn").unwrap(), &ds).unwrap();
        let bad = Instance { values: vec![Cell::Num(0.0)], label: 0 };
        assert!(matches!(model.predict(&bad), Err(Error::SchemaMismatch(_))));
    }

    #[test]
    fn distribution_argmax_matches_predict_on_random_probes() {
        let ds = make_blobs(3, 40, 2, 0.5, 11).unwrap();
        let (noisy, _) = crate::datakit::inject_label_noise(&ds, 0.2, 5).unwrap();
        for spec in builtin_specs(3) {
            let model = fit(&spec, &noisy).unwrap();
            for inst in &noisy.instances {
                let dist = model.class_distribution(inst).unwrap();
                assert_eq!(argmax_first(&dist), model.predict(inst).unwrap(), "{}", spec.id());
                let total: f64 = dist.iter().sum();
                assert!((total - 1.0).abs() < 1e-9, "{} sums to {total}", spec.id());
            }
        }
    }

    #[test]
    fn fit_is_deterministic_per_spec() {
        let ds = make_blobs(3, 30, 3, 0.4, 2).unwrap();
        let probe = make_blobs(3, 10, 3, 0.6, 9).unwrap();
        for spec in builtin_specs(5) {
            let a = fit(&spec, &ds).unwrap();
            let b = fit(&spec, &ds).unwrap();
            for inst in &probe.instances {
                assert_eq!(a.predict(inst).unwrap(), b.predict(inst).unwrap(), "{}", spec.id());
            }
        }
    }

    #[test]
    fn order_invariance_where_guaranteed() {
        let ds = make_blobs(3, 30, 2, 0.5, 21).unwrap();
        let mut reversed = ds.clone();
        reversed.instances.reverse();
        let probe = make_blobs(3, 15, 2, 0.7, 8).unwrap();
        for id in ["knn", "naive-bayes"] {
            let spec = LearnerSpec::parse(id).unwrap();
            let a = fit(&spec, &ds).unwrap();
            let b = fit(&spec, &reversed).unwrap();
            for inst in &probe.instances {
                assert_eq!(a.predict(inst).unwrap(), b.predict(inst).unwrap(), "{id}");
            }
        }
    }

    #[test]
    fn empty_training_set_is_an_error() {
        let ds = make_blobs(2, 5, 2, 0.2, 1).unwrap();
        let empty = Dataset {
            name: "e".into(),
            attributes: vec![AttributeMeta::numeric("x0"), AttributeMeta::numeric("x1")],
            class_names: ds.class_names.clone(),
            instances: vec![],
        };
        assert!(fit(&LearnerSpec::parse("knn").unwrap(), &empty).is_err());
    }

    #[test]
    fn accuracy_counts_matches() {
        let ds = make_blobs(2, 6, 2, 0.05, 4).unwrap();
        let model = fit(&LearnerSpec::parse("knn:k=1").unwrap(), &ds).unwrap();
        assert_eq!(accuracy(&model, &ds).unwrap(), 1.0);
    }
}
