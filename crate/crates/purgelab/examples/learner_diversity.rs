//! Cluster learners by classifier output difference: build the COD matrix
//! from out-of-fold predictions, agglomerate with average linkage, cut the
//! dendrogram, and pick a representative per cluster.
//!
//! ```text
//! cargo run --example learner_diversity
//! ```

use purgelab::cv::CvProtocol;
use purgelab::datakit::make_blobs;
use purgelab::diversity::{agglomerate, cod_matrix, representatives, Linkage};
use purgelab::learners::LearnerSpec;

fn main() -> purgelab::Result<()> {
    let datasets = vec![
        make_blobs(2, 60, 2, 0.4, 1)?,
        make_blobs(3, 40, 3, 0.5, 2)?,
        make_blobs(2, 70, 2, 0.3, 3)?,
    ];
    // Include near-duplicates so a cluster actually forms.
    let specs = vec![
        LearnerSpec::parse("knn:k=3")?,
        LearnerSpec::parse("knn:k=5")?,
        LearnerSpec::parse("naive-bayes")?,
        LearnerSpec::parse("decision-tree")?,
        LearnerSpec::parse("mlp:epochs=80")?,
        LearnerSpec::parse("one-rule")?,
    ];

    let protocol = CvProtocol::new(5, 1, 99)?;
    let matrix = cod_matrix(&specs, &datasets, &protocol)?;

    println!("pairwise COD:");
    for i in 0..matrix.len() {
        for j in (i + 1)..matrix.len() {
            println!(
                "  {:<14} vs {:<14} {:.4}",
                matrix.learner_ids[i],
                matrix.learner_ids[j],
                matrix.distance(i, j)
            );
        }
    }

    let dendrogram = agglomerate(&matrix, Linkage::Average)?;
    println!("\ndendrogram:\n{}", dendrogram.to_text());

    let cut = 0.18;
    let partition = dendrogram.cut(cut);
    let reps = representatives(&partition, &matrix)?;
    println!("clusters at cut {cut}:");
    for (cluster, rep) in partition.iter().zip(&reps) {
        let members: Vec<&str> =
            cluster.iter().map(|&i| matrix.learner_ids[i].as_str()).collect();
        println!("  {{{}}} -> representative {rep}", members.join(", "));
    }
    Ok(())
}
