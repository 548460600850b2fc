//! A Brownian snake and the discretized map it encodes.

use bml_core::snake_map::{d_circ_matrix, quotient_metric, read_dmat, write_dmat};
use bml_core::stochastic::sample_snake;
use bml_core::RngStream;

fn main() -> bml_core::Result<()> {
    let snake = sample_snake(256, 1.0, RngStream::new(1, 0))?;
    let map = quotient_metric(&snake)?;
    let n = map.len();
    println!("{n} points, root at grid index {} (label {:.4})", map.root_index, snake.min_label());

    // distance to the root is the label gap; d never exceeds the seed d°
    let y = &map.labels;
    let dc = d_circ_matrix(y);
    let worst_root = (0..n)
        .map(|i| (map.dist(map.root_index, i) - (y[i] - snake.min_label())).abs())
        .fold(0.0, f64::max);
    let dominated = (0..n * n).all(|k| map.dmat()[k] <= dc[k] + 1e-12);
    println!("root formula error {worst_root:.1e}; d <= d° everywhere: {dominated}");

    let diameter = map.dmat().iter().copied().fold(0.0, f64::max);
    let identified = (0..n).filter(|&i| map.identified_with[i] != i).count();
    println!("diameter {diameter:.4}, {identified} grid points identified with an earlier one");

    let mut buf = Vec::new();
    write_dmat(&map, 1, &mut buf)?;
    let (header, values) = read_dmat(buf.as_slice())?;
    println!("binary dump: {} bytes, header {header:?}, {} values", buf.len(), values.len());
    Ok(())
}
