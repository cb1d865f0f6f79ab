//! Dataset complexity measures across increasing class overlap: watch the
//! geometric indicators (F2, N1, N3, ...) respond to harder data.
//!
//! ```text
//! cargo run --example dataset_complexity
//! ```

use purgelab::datakit::make_blobs;
use purgelab::measures::complexity_measures;

fn main() -> purgelab::Result<()> {
    println!("spread     F2     F3     F4     N1     N2     N3     T1     T2");
    for spread in [0.1, 0.2, 0.35, 0.5, 0.8] {
        let ds = make_blobs(2, 100, 2, spread, 77)?;
        let c = complexity_measures(&ds)?;
        println!(
            "{spread:>6} {:>6.3} {:>6.3} {:>6.3} {:>6.3} {:>6.3} {:>6.3} {:>6.3} {:>6.1}",
            c.f2, c.f3, c.f4, c.n1, c.n2, c.n3, c.t1, c.t2
        );
    }
    Ok(())
}
