//! Single-hidden-layer perceptron trained with backpropagation.
//!
//! Logistic hidden activations, softmax output, cross-entropy loss. Plain
//! gradient descent: one update per training instance, in instance order,
//! with a fixed learning rate and epoch count — no momentum, no batching,
//! and no early stopping (so no hidden validation split interacts with
//! filtering experiments). Weights initialize uniformly in [-0.5, 0.5] from
//! the spec seed. Predictions are deterministic given (spec, training data)
//! but not invariant to training-instance order.
//!
//! Input encoding: numeric attributes are min-max normalized with training
//! ranges (constant attributes map to 0.5); categorical attributes are
//! one-hot. Missing numerics encode as 0.5, missing categoricals as an
//! all-zero block.

use rand::Rng;

use crate::datakit::{AttrKind, AttrRange, Cell, Dataset, Instance};
use crate::datakit::min_max_ranges;
use crate::rng;
use crate::{Error, Result};

use super::{LearnerFactory, LearnerSpec, ModelKernel};

pub struct MlpFactory;

impl LearnerFactory for MlpFactory {
    fn allowed_keys(&self) -> &'static [&'static str] {
        &["hidden", "epochs", "rate"]
    }

    fn validate(&self, spec: &LearnerSpec) -> Result<()> {
        if spec.param_usize("hidden", 16)? == 0 {
            return Err(Error::InvalidArg("mlp: hidden must be >= 1".into()));
        }
        let rate = spec.param_f64("rate", 0.1)?;
        if !(rate > 0.0) {
            return Err(Error::InvalidArg("mlp: rate must be positive".into()));
        }
        spec.param_usize("epochs", 200)?;
        Ok(())
    }

    fn fit(&self, spec: &LearnerSpec, train: &Dataset) -> Result<Box<dyn ModelKernel>> {
        let hidden = spec.param_usize("hidden", 16)?;
        let epochs = spec.param_usize("epochs", 200)?;
        let rate = spec.param_f64("rate", 0.1)?;

        let encoder = Encoder::fit(train);
        let inputs: Vec<Vec<f64>> = train.instances.iter().map(|i| encoder.encode(i)).collect();
        let labels: Vec<usize> = train.instances.iter().map(|i| i.label).collect();
        let k = train.class_count();
        let d = encoder.width;

        let mut rng = rng::rng(spec.seed());
        let mut uniform = || rng.gen_range(-0.5..=0.5);
        let mut w1 = vec![vec![0.0; d]; hidden];
        let mut b1 = vec![0.0; hidden];
        let mut w2 = vec![vec![0.0; hidden]; k];
        let mut b2 = vec![0.0; k];
        for row in &mut w1 {
            for w in row.iter_mut() {
                *w = uniform();
            }
        }
        for b in &mut b1 {
            *b = uniform();
        }
        for row in &mut w2 {
            for w in row.iter_mut() {
                *w = uniform();
            }
        }
        for b in &mut b2 {
            *b = uniform();
        }

        let mut hidden_out = vec![0.0; hidden];
        for _ in 0..epochs {
            for (x, &label) in inputs.iter().zip(&labels) {
                forward_hidden(&w1, &b1, x, &mut hidden_out);
                let mut delta = forward_output(&w2, &b2, &hidden_out);
                // d(cross-entropy)/d(logits) = softmax - one_hot
                delta[label] -= 1.0;
                let mut back = vec![0.0; hidden];
                for (c, &dc) in delta.iter().enumerate() {
                    for h in 0..hidden {
                        back[h] += dc * w2[c][h];
                        w2[c][h] -= rate * dc * hidden_out[h];
                    }
                    b2[c] -= rate * dc;
                }
                for h in 0..hidden {
                    let grad = back[h] * hidden_out[h] * (1.0 - hidden_out[h]);
                    for (j, &xj) in x.iter().enumerate() {
                        w1[h][j] -= rate * grad * xj;
                    }
                    b1[h] -= rate * grad;
                }
            }
        }

        Ok(Box::new(MlpModel { encoder, w1, b1, w2, b2 }))
    }
}

struct Encoder {
    kinds: Vec<EncKind>,
    width: usize,
}

enum EncKind {
    Numeric { min: f64, span: f64 },
    NumericDegenerate,
    OneHot { offset: usize, len: usize },
}

impl Encoder {
    fn fit(train: &Dataset) -> Self {
        let ranges = min_max_ranges(train);
        let mut kinds = Vec::with_capacity(train.attributes.len());
        let mut width = 0;
        for (attr, range) in train.attributes.iter().zip(&ranges) {
            match (&attr.kind, range) {
                (AttrKind::Numeric, AttrRange::Numeric { min, max }) if max > min => {
                    kinds.push(EncKind::Numeric { min: *min, span: max - min });
                    width += 1;
                }
                (AttrKind::Numeric, _) => {
                    kinds.push(EncKind::NumericDegenerate);
                    width += 1;
                }
                (AttrKind::Categorical(values), _) => {
                    kinds.push(EncKind::OneHot { offset: width, len: values.len() });
                    width += values.len();
                }
            }
        }
        Encoder { kinds, width }
    }

    fn encode(&self, instance: &Instance) -> Vec<f64> {
        let mut x = vec![0.0; self.width];
        let mut nidx = 0;
        for (cell, kind) in instance.values.iter().zip(&self.kinds) {
            match kind {
                EncKind::Numeric { min, span } => {
                    x[nidx] = match cell {
                        Cell::Num(v) => (v - min) / span,
                        _ => 0.5,
                    };
                    nidx += 1;
                }
                EncKind::NumericDegenerate => {
                    x[nidx] = 0.5;
                    nidx += 1;
                }
                EncKind::OneHot { offset, len } => {
                    if let Cell::Cat(v) = cell {
                        x[offset + v] = 1.0;
                    }
                    nidx = nidx.max(offset + len);
                }
            }
        }
        x
    }
}

fn forward_hidden(w1: &[Vec<f64>], b1: &[f64], x: &[f64], out: &mut [f64]) {
    for (h, row) in w1.iter().enumerate() {
        let z: f64 = row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + b1[h];
        out[h] = 1.0 / (1.0 + (-z).exp());
    }
}

fn forward_output(w2: &[Vec<f64>], b2: &[f64], hidden: &[f64]) -> Vec<f64> {
    let mut z: Vec<f64> = w2
        .iter()
        .enumerate()
        .map(|(c, row)| row.iter().zip(hidden).map(|(w, h)| w * h).sum::<f64>() + b2[c])
        .collect();
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for v in &mut z {
        *v = (*v - max).exp();
        total += *v;
    }
    for v in &mut z {
        *v /= total;
    }
    z
}

struct MlpModel {
    encoder: Encoder,
    w1: Vec<Vec<f64>>,
    b1: Vec<f64>,
    w2: Vec<Vec<f64>>,
    b2: Vec<f64>,
}

impl ModelKernel for MlpModel {
    fn class_distribution(&self, instance: &Instance) -> Vec<f64> {
        let x = self.encoder.encode(instance);
        let mut hidden = vec![0.0; self.b1.len()];
        forward_hidden(&self.w1, &self.b1, &x, &mut hidden);
        forward_output(&self.w2, &self.b2, &hidden)
    }
}
