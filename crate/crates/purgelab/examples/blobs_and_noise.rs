//! Generate a synthetic dataset, inject label noise, and write both to CSV.
//!
//! ```text
//! cargo run --example blobs_and_noise
//! ```

use purgelab::datakit::{inject_label_noise, make_blobs, save_csv};

fn main() -> purgelab::Result<()> {
    let clean = make_blobs(3, 100, 2, 0.25, 42)?;
    println!(
        "generated `{}`: {} instances, {} classes, {} attributes",
        clean.name,
        clean.len(),
        clean.class_count(),
        clean.attributes.len()
    );

    let (noisy, corrupted) = inject_label_noise(&clean, 0.25, 7)?;
    println!(
        "injected noise into {} of {} labels (first few corrupted indices: {:?})",
        corrupted.len(),
        noisy.len(),
        &corrupted[..corrupted.len().min(8)]
    );

    let out = std::env::temp_dir().join("purgelab-example");
    std::fs::create_dir_all(&out).expect("temp dir");
    let clean_path = out.join("blobs.csv");
    let noisy_path = out.join("blobs-noisy.csv");
    save_csv(&clean, &clean_path)?;
    save_csv(&noisy, &noisy_path)?;
    println!("wrote {} and {}", clean_path.display(), noisy_path.display());
    Ok(())
}
