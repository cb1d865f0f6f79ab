//! Greedy forward selection of a filter set: watch the search accept
//! candidates while the internal validation accuracy strictly improves.
//!
//! ```text
//! cargo run --example adaptive_filter
//! ```

use purgelab::datakit::{inject_label_noise, make_blobs};
use purgelab::filters::{adaptive_filter, apply_filter_set, FlagMode};
use purgelab::learners::{builtin_specs, LearnerSpec};

fn main() -> purgelab::Result<()> {
    let clean = make_blobs(2, 150, 2, 0.25, 5)?;
    let (noisy, _) = inject_label_noise(&clean, 0.3, 9)?;

    let target = LearnerSpec::parse("knn:k=1")?;
    let candidates = builtin_specs(2);
    let mode = FlagMode::cross_validated(3, 17)?;
    let trace = adaptive_filter(&candidates, &target, &noisy, 0.5, &mode, 0.2, 99)?;

    println!("baseline validation accuracy: {:.4}", trace.accuracies[0]);
    for (step, (spec, acc)) in trace.filter_set.iter().zip(&trace.accuracies[1..]).enumerate() {
        println!("step {}: accepted `{}` -> validation accuracy {:.4}", step + 1, spec.label(), acc);
    }
    if trace.filter_set.is_empty() {
        println!("no candidate improved on the unfiltered baseline");
        return Ok(());
    }

    let outcome = apply_filter_set(&trace.filter_set, &noisy, 0.5, &mode)?;
    println!(
        "final filter set of {} learners removes {} of {} instances",
        trace.filter_set.len(),
        outcome.removed.len(),
        noisy.len()
    );
    Ok(())
}
