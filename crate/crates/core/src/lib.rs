//! Discretized Brownian maps and the machinery around them.
//!
//! Two independent routes to a random planar geometry:
//!
//! * [`snake_map`] builds a finite pseudometric space from a Brownian snake
//!   (excursion plus Gaussian labels) sampled in [`stochastic`];
//! * [`planar_map`] builds uniform random quadrangulations through the
//!   Cori–Vauquelin–Schaeffer construction.
//!
//! [`csbp`] simulates stable branching processes and their Lévy duals,
//! [`gff`] produces the Gaussian-free-field path metric, and [`geodesic`]
//! measures geodesic structure on any of the resulting spaces.

// `!(x > 0.0)` is how argument checks reject NaN along with the rest.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod cli;
pub mod csbp;
pub mod error;
pub mod geodesic;
pub mod gff;
pub mod manifest;
pub mod planar_map;
pub mod rng;
pub mod snake_map;
pub mod stats;
pub mod stochastic;

pub use error::{Error, Result};
pub use rng::RngStream;
