//! Geodesics and geometric statistics on finite metric spaces.
//!
//! Every space is presented as a weighted graph whose shortest-path metric
//! is the space's metric ([`Space`]). Quadrangulations use their edges,
//! dense metrics (snake maps) use their metric-irreducible pairs and the
//! field metric uses the grid.

mod bundle;
mod confluence;
mod flow;
mod frame;
mod space;
mod star;

pub use bundle::*;
pub use confluence::*;
pub use frame::*;
pub use space::*;
pub use star::*;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Vertex sequence with cumulative lengths; `cumlen[0] = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub vertices: Vec<usize>,
    pub cumlen: Vec<f64>,
}

impl GeodesicPath {
    /// Builds the path from its vertices, taking each step's length from
    /// the space's edge between them.
    pub fn from_vertices<S: Space>(space: &S, vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return invalid("a path needs at least one vertex");
        }
        let mut cumlen = Vec::with_capacity(vertices.len());
        cumlen.push(0.0);
        for w in vertices.windows(2) {
            let step = space
                .edge_weight(w[0], w[1])
                .ok_or_else(|| crate::Error::InvalidArgument(format!("{} and {} are not adjacent", w[0], w[1])))?;
            cumlen.push(cumlen.last().unwrap() + step);
        }
        Ok(Self { vertices, cumlen })
    }

    pub fn length(&self) -> f64 {
        *self.cumlen.last().unwrap()
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().unwrap()
    }

    pub fn reversed(&self) -> Self {
        let total = self.length();
        Self {
            vertices: self.vertices.iter().rev().copied().collect(),
            cumlen: self.cumlen.iter().rev().map(|c| total - c).collect(),
        }
    }
}
