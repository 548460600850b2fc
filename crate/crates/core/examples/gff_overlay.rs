//! Discrete GFF on a box, its exp(gamma h) vertex-weight metric, and the
//! overlay of frame-to-frame geodesics.

use std::fs::File;

use bml_core::gff::*;
use bml_core::RngStream;

fn main() -> bml_core::Result<()> {
    for n in [64, 128, 256] {
        let field = sample_dgff(n, RngStream::new(10, n as u64))?;
        let metric = WeightedMetric::new(&field, DEFAULT_GAMMA)?;
        let pairs = random_boundary_pairs(&field, 20, RngStream::new(10, 1000 + n as u64));
        let overlay = geodesic_overlay(&metric, &pairs)?;
        let busiest = overlay.values().max().copied().unwrap_or(0);
        println!("n = {n:>3}: geodesics cover {:.4} of the box, busiest vertex on {busiest}", frame_fraction(&metric, &overlay));
        if n == 64 {
            let dir = std::env::temp_dir();
            write_overlay_svg(&field, &overlay, File::create(dir.join("gff_overlay.svg"))?)?;
            println!("       picture in {}", dir.join("gff_overlay.svg").display());
        }
    }
    let field = sample_dgff(16, RngStream::new(10, 0))?;
    let path = [17, 18, 34, 50];
    println!("length of {path:?}: {:.4}", path_length(&field, DEFAULT_GAMMA, &path)?);
    Ok(())
}
