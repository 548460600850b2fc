//! How many geodesics leave a point pairwise disjointly: an exact
//! max-flow count at random centers.

use bml_core::geodesic::star_census;
use bml_core::planar_map::sample_quadrangulation;
use bml_core::RngStream;

fn main() -> bml_core::Result<()> {
    let (_, q) = sample_quadrangulation(20_000, RngStream::new(4, 0))?;
    for radius in [2.0, 4.0, 8.0] {
        let reports = star_census(&q, 5, radius, 200, RngStream::new(4, 1))?;
        let mut hist = [0usize; 6];
        for r in reports.iter().filter(|r| !r.skipped) {
            hist[r.k] += 1;
        }
        println!("radius {radius}: centers with k disjoint geodesics, k = 0..5: {hist:?}");
    }
    Ok(())
}
