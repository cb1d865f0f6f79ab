//! Synthetic datasets and seeded label-noise injection.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{AttributeMeta, Cell, Dataset, Instance};
use crate::rng;
use crate::{Error, Result};

/// Gaussian clusters along the unit diagonal: class `c` is centered at
/// `c / sqrt(dimension)` in every coordinate, so consecutive class means are
/// exactly one unit apart, with per-coordinate standard deviation `spread`.
pub fn make_blobs(
    class_count: usize,
    per_class: usize,
    dimension: usize,
    spread: f64,
    seed: u64,
) -> Result<Dataset> {
    if class_count < 2 {
        return Err(Error::InvalidArg("class_count must be >= 2".into()));
    }
    if per_class < 1 {
        return Err(Error::InvalidArg("per_class must be >= 1".into()));
    }
    if dimension < 1 {
        return Err(Error::InvalidArg("dimension must be >= 1".into()));
    }
    if !(spread > 0.0) || !spread.is_finite() {
        return Err(Error::InvalidArg(format!("spread must be positive, got {spread}")));
    }

    let mut rng = rng::rng(seed);
    let step = 1.0 / (dimension as f64).sqrt();
    let noise = Normal::new(0.0, spread).expect("validated spread");

    let attributes = (0..dimension).map(|j| AttributeMeta::numeric(format!("x{j}"))).collect();
    let class_names = (0..class_count).map(|c| format!("c{c}")).collect();
    let mut instances = Vec::with_capacity(class_count * per_class);
    for c in 0..class_count {
        let center = c as f64 * step;
        for _ in 0..per_class {
            let values = (0..dimension).map(|_| Cell::Num(center + noise.sample(&mut rng))).collect();
            instances.push(Instance { values, label: c });
        }
    }
    Dataset::new(format!("blobs-s{seed}"), attributes, class_names, instances)
}

/// Flip the labels of exactly `round(rate * n)` distinct instances, chosen
/// uniformly by seed; each corrupted label is redrawn uniformly from the
/// other classes. Returns the corrupted index set (sorted) for ground-truth
/// scoring.
pub fn inject_label_noise(ds: &Dataset, rate: f64, seed: u64) -> Result<(Dataset, Vec<usize>)> {
    if !(0.0..=1.0).contains(&rate) || !rate.is_finite() {
        return Err(Error::InvalidArg(format!("noise rate must be in [0,1], got {rate}")));
    }
    let n = ds.len();
    let count = (rate * n as f64).round() as usize;
    let mut rng = rng::rng(seed);

    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut rng);
    let mut corrupted: Vec<usize> = indices.into_iter().take(count).collect();
    corrupted.sort_unstable();

    let k = ds.class_count();
    let mut noisy = ds.clone();
    noisy.name = format!("{}+noise", ds.name);
    for &i in &corrupted {
        let old = noisy.instances[i].label;
        let draw = rng.gen_range(0..k - 1);
        noisy.instances[i].label = if draw >= old { draw + 1 } else { draw };
    }
    Ok((noisy, corrupted))
}
