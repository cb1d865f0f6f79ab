//! Profile instance hardness: IH from out-of-fold predictions of the five
//! built-ins, the eight per-instance hardness measures, and the noisy
//! instances IH > 0.9 identifies.
//!
//! ```text
//! cargo run --example instance_hardness
//! ```

use purgelab::cv::CvProtocol;
use purgelab::datakit::{inject_label_noise, make_blobs};
use purgelab::learners::builtin_specs;
use purgelab::measures::{hardness_measures, instance_hardness, noisy_instances};

fn main() -> purgelab::Result<()> {
    let clean = make_blobs(3, 120, 2, 0.25, 21)?;
    let (noisy, corrupted) = inject_label_noise(&clean, 0.2, 4)?;

    let specs = builtin_specs(1);
    let protocol = CvProtocol::new(10, 2, 33)?;
    let ih = instance_hardness(&noisy, &specs, &protocol)?;
    let profile = hardness_measures(&noisy, 5, 33)?;

    let mean = |pick: &dyn Fn(usize) -> bool| {
        let vals: Vec<f64> =
            (0..noisy.len()).filter(|&i| pick(i)).map(|i| ih[i]).collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    };
    let corrupt = |i: usize| corrupted.binary_search(&i).is_ok();
    println!("mean IH over corrupted instances: {:.3}", mean(&corrupt));
    println!("mean IH over clean instances:     {:.3}", mean(&|i| !corrupt(i)));

    let (flagged, pct) = noisy_instances(&ih, 0.9)?;
    let hits = flagged.iter().filter(|&&i| corrupt(i)).count();
    println!(
        "IH > 0.9 flags {} instances ({pct:.1}% of the dataset), {hits} of them truly corrupted",
        flagged.len()
    );

    println!("\n     IH   kDN    DS   DCP   TD    CL    CLD    MV    CB   corrupted");
    for i in (0..noisy.len()).step_by(36) {
        println!(
            "{i:3} {:.2}  {:.2}  {:.2}  {:.2}  {:>2}  {:.2}  {:+.2}  {:.2}  {:+.2}   {}",
            ih[i],
            profile.kdn[i],
            profile.ds[i],
            profile.dcp[i],
            profile.td[i],
            profile.cl[i],
            profile.cld[i],
            profile.mv[i],
            profile.cb[i],
            corrupt(i)
        );
    }
    Ok(())
}
