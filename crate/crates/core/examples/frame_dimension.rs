//! Box-counting dimension of a geodesic frame against the whole map.

use bml_core::geodesic::{box_dimension, frame_box_dimension, Space};
use bml_core::planar_map::sample_quadrangulation;
use bml_core::RngStream;

fn main() -> bml_core::Result<()> {
    let (_, q) = sample_quadrangulation(20_000, RngStream::new(6, 0))?;
    let scales = [2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 20.0];
    let frame = frame_box_dimension(&q, 30, &scales, RngStream::new(6, 1))?;
    let all: Vec<usize> = (0..q.len()).collect();
    let whole = box_dimension(&q, &all, &scales)?;
    println!("scale  N(frame)  N(map)");
    for ((s, f), w) in scales.iter().zip(&frame.counts).zip(&whole.counts) {
        println!("{s:>5}  {f:>8}  {w:>6}");
    }
    println!("slopes: frame {:.3} +- {:.3}, map {:.3} +- {:.3}", frame.slope, frame.stderr, whole.slope, whole.stderr);
    Ok(())
}
