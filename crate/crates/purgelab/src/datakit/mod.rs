//! Dataset schema, ingestion, resampling, and synthetic data.
//!
//! A [`Dataset`] is an attribute schema (numeric / categorical) plus labeled
//! instances. Missing values are preserved in storage as [`Cell::Missing`];
//! each consumer (learner, measure) documents its own missing-value handling.

mod arff_io;
mod csv_io;
mod folds;
mod synth;

pub use arff_io::{load_arff, save_arff};
pub use csv_io::{load_csv, save_csv, LabelColumn, TypeHint};
pub use folds::{stratified_folds, FoldPlan};
pub use synth::{inject_label_noise, make_blobs};

use crate::{Error, Result};

/// Attribute kind: numeric, or categorical over a fixed value list.
#[derive(Clone, Debug, PartialEq)]
pub enum AttrKind {
    Numeric,
    Categorical(Vec<String>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttributeMeta {
    pub name: String,
    pub kind: AttrKind,
}

impl AttributeMeta {
    pub fn numeric(name: impl Into<String>) -> Self {
        AttributeMeta { name: name.into(), kind: AttrKind::Numeric }
    }

    pub fn categorical(name: impl Into<String>, values: Vec<String>) -> Self {
        AttributeMeta { name: name.into(), kind: AttrKind::Categorical(values) }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, AttrKind::Numeric)
    }
}

/// One cell of an instance: a finite real, an index into the attribute's
/// value list, or missing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Cat(usize),
    Missing,
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }
}

/// A labeled instance. The label is the observed (possibly noisy) class; the
/// latent true class is not representable — it only exists as ground truth
/// returned by [`inject_label_noise`].
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub values: Vec<Cell>,
    pub label: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub attributes: Vec<AttributeMeta>,
    pub class_names: Vec<String>,
    pub instances: Vec<Instance>,
}

/// Per-attribute range information from [`min_max_ranges`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AttrRange {
    Numeric { min: f64, max: f64 },
    /// Numeric attribute whose cells are all missing: range undefined.
    AllMissing,
    Categorical,
}

impl Dataset {
    /// Build a dataset, validating every schema invariant.
    pub fn new(
        name: impl Into<String>,
        attributes: Vec<AttributeMeta>,
        class_names: Vec<String>,
        instances: Vec<Instance>,
    ) -> Result<Self> {
        let ds = Dataset { name: name.into(), attributes, class_names, instances };
        ds.validate()?;
        Ok(ds)
    }

    fn validate(&self) -> Result<()> {
        if self.attributes.is_empty() {
            return Err(Error::InvalidDataset("no attributes".into()));
        }
        if self.class_names.len() < 2 {
            return Err(Error::InvalidDataset("fewer than 2 classes".into()));
        }
        if self.instances.is_empty() {
            return Err(Error::InvalidDataset("no instances".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for a in &self.attributes {
            if !seen.insert(&a.name) {
                return Err(Error::InvalidDataset(format!("duplicate attribute name `{}`", a.name)));
            }
            if let AttrKind::Categorical(values) = &a.kind {
                if values.is_empty() {
                    return Err(Error::InvalidDataset(format!(
                        "categorical attribute `{}` has no values",
                        a.name
                    )));
                }
                let mut vs = std::collections::BTreeSet::new();
                for v in values {
                    if v.is_empty() || v == "?" {
                        return Err(Error::InvalidDataset(format!(
                            "categorical attribute `{}` has a reserved value `{}`",
                            a.name, v
                        )));
                    }
                    if !vs.insert(v) {
                        return Err(Error::InvalidDataset(format!(
                            "categorical attribute `{}` repeats value `{}`",
                            a.name, v
                        )));
                    }
                }
            }
        }
        let mut cls = std::collections::BTreeSet::new();
        for c in &self.class_names {
            if c.is_empty() || c == "?" || !cls.insert(c) {
                return Err(Error::InvalidDataset(format!("bad class name `{c}`")));
            }
        }
        for (i, inst) in self.instances.iter().enumerate() {
            if inst.values.len() != self.attributes.len() {
                return Err(Error::InvalidDataset(format!(
                    "instance {i} has {} cells, expected {}",
                    inst.values.len(),
                    self.attributes.len()
                )));
            }
            if inst.label >= self.class_names.len() {
                return Err(Error::InvalidDataset(format!("instance {i} label out of range")));
            }
            for (j, cell) in inst.values.iter().enumerate() {
                match (&self.attributes[j].kind, cell) {
                    (AttrKind::Numeric, Cell::Num(v)) => {
                        if !v.is_finite() {
                            return Err(Error::InvalidDataset(format!(
                                "instance {i} attribute {j}: non-finite numeric value"
                            )));
                        }
                    }
                    (AttrKind::Categorical(values), Cell::Cat(k)) => {
                        if *k >= values.len() {
                            return Err(Error::InvalidDataset(format!(
                                "instance {i} attribute {j}: categorical index {k} out of range"
                            )));
                        }
                    }
                    (_, Cell::Missing) => {}
                    _ => {
                        return Err(Error::InvalidDataset(format!(
                            "instance {i} attribute {j}: cell kind does not match attribute kind"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    /// Instance counts per class.
    pub fn class_histogram(&self) -> Vec<usize> {
        let mut h = vec![0usize; self.class_count()];
        for inst in &self.instances {
            h[inst.label] += 1;
        }
        h
    }

    /// A new dataset holding only the given instances (indices must be in
    /// range and non-empty). Schema and class list are preserved.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        debug_assert!(!indices.is_empty(), "subset of zero instances");
        Dataset {
            name: self.name.clone(),
            attributes: self.attributes.clone(),
            class_names: self.class_names.clone(),
            instances: indices.iter().map(|&i| self.instances[i].clone()).collect(),
        }
    }
}

/// Per-attribute (min, max) over non-missing cells. Constant attributes yield
/// min = max; all-missing numeric attributes are flagged undefined.
pub fn min_max_ranges(ds: &Dataset) -> Vec<AttrRange> {
    ds.attributes
        .iter()
        .enumerate()
        .map(|(j, attr)| match attr.kind {
            AttrKind::Categorical(_) => AttrRange::Categorical,
            AttrKind::Numeric => {
                let mut min = f64::INFINITY;
                let mut max = f64::NEG_INFINITY;
                let mut seen = false;
                for inst in &ds.instances {
                    if let Cell::Num(v) = inst.values[j] {
                        seen = true;
                        min = min.min(v);
                        max = max.max(v);
                    }
                }
                if seen {
                    AttrRange::Numeric { min, max }
                } else {
                    AttrRange::AllMissing
                }
            }
        })
        .collect()
}
