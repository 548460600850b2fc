//! Uniform labeled trees, the Cori–Vauquelin–Schaeffer construction and
//! graph-metric tools on quadrangulations.

mod balls;
mod quad;
mod scaling;
mod tree;

pub use balls::*;
pub use quad::*;
pub use scaling::*;
pub use tree::*;

use crate::error::Result;
use crate::rng::RngStream;

/// Uniform rooted pointed quadrangulation with `n_faces` faces, together
/// with the tree it was built from.
pub fn sample_quadrangulation(n_faces: usize, stream: RngStream) -> Result<(LabeledPlaneTree, Quadrangulation)> {
    let tree = sample_labeled_tree(n_faces, stream.split(0))?;
    let sign = if rand::Rng::random::<bool>(&mut stream.split(1).rng()) { 1 } else { -1 };
    let quad = cvs_construct(&tree, sign)?;
    Ok((tree, quad))
}
