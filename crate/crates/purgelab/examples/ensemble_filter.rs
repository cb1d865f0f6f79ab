//! Flag misclassified instances with the five built-in learners and apply
//! the ensemble filter at the paper's threshold grid, scoring the removals
//! against the injected-noise ground truth.
//!
//! ```text
//! cargo run --example ensemble_filter
//! ```

use std::collections::BTreeSet;

use purgelab::datakit::{inject_label_noise, make_blobs};
use purgelab::filters::{ensemble_filter, flag_misclassified, FlagMode};
use purgelab::learners::builtin_specs;

fn main() -> purgelab::Result<()> {
    let clean = make_blobs(3, 150, 2, 0.2, 11)?;
    let (noisy, corrupted) = inject_label_noise(&clean, 0.25, 3)?;
    let truth: BTreeSet<usize> = corrupted.iter().copied().collect();

    let specs = builtin_specs(1);
    let matrix = flag_misclassified(&specs, &noisy, &FlagMode::TrainOnAll)?;
    println!("flag matrix: {} learners x {} instances", matrix.learner_count(), matrix.instance_count());

    for threshold in [0.5, 0.7, 0.9] {
        let outcome = ensemble_filter(&matrix, threshold)?;
        let removed: BTreeSet<usize> = outcome.removed.iter().copied().collect();
        let hit = removed.intersection(&truth).count();
        let precision = if removed.is_empty() { 1.0 } else { hit as f64 / removed.len() as f64 };
        let recall = hit as f64 / truth.len() as f64;
        println!(
            "threshold {threshold}: removed {:4} | precision {precision:.3} recall {recall:.3}",
            removed.len()
        );
    }
    Ok(())
}
