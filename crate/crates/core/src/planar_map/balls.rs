use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::planar_map::Quadrangulation;

/// Hull of the ball `B(center, radius)` seen from `basepoint`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilledBall {
    pub center: usize,
    pub basepoint: usize,
    pub radius: u32,
    /// Sorted vertex indices.
    pub vertex_set: Vec<u32>,
    /// Edges joining the hull to the basepoint's component.
    pub boundary_length: usize,
}

impl FilledBall {
    pub fn contains(&self, v: usize) -> bool {
        self.vertex_set.binary_search(&(v as u32)).is_ok()
    }
}

/// Complement of the basepoint-containing component of `{d(center, .) > r}`.
pub fn filled_ball(quad: &Quadrangulation, center: usize, basepoint: usize, radius: u32) -> Result<FilledBall> {
    check_vertex(quad, center)?;
    check_vertex(quad, basepoint)?;
    let dist = quad.bfs_metric(center);
    hull_from_distances(quad, &dist, center, basepoint, radius)
}

fn check_vertex(quad: &Quadrangulation, v: usize) -> Result<()> {
    if v >= quad.n_vertices {
        return invalid(format!("vertex {v} out of range"));
    }
    Ok(())
}

fn hull_from_distances(
    quad: &Quadrangulation,
    dist: &[u32],
    center: usize,
    basepoint: usize,
    radius: u32,
) -> Result<FilledBall> {
    if radius < 1 || radius >= dist[basepoint] {
        return invalid(format!(
            "radius {radius} must lie in [1, {}) for this basepoint",
            dist[basepoint]
        ));
    }
    let mut outside = vec![false; quad.n_vertices];
    outside[basepoint] = true;
    let mut queue = VecDeque::from([basepoint]);
    let mut boundary_length = 0;
    while let Some(u) = queue.pop_front() {
        for &w in quad.neighbors(u) {
            let w = w as usize;
            if dist[w] <= radius {
                boundary_length += 1;
            } else if !outside[w] {
                outside[w] = true;
                queue.push_back(w);
            }
        }
    }
    let vertex_set = (0..quad.n_vertices).filter(|&v| !outside[v]).map(|v| v as u32).collect();
    Ok(FilledBall { center, basepoint, radius, vertex_set, boundary_length })
}

/// Boundary lengths `L_r` of the filled balls for `r = 1 .. d - 1`, where
/// `d = d(center, basepoint)`.
pub fn boundary_length_process(quad: &Quadrangulation, center: usize, basepoint: usize) -> Result<Vec<usize>> {
    check_vertex(quad, center)?;
    check_vertex(quad, basepoint)?;
    let dist = quad.bfs_metric(center);
    let d = dist[basepoint];
    if d < 2 {
        return invalid(format!("d(center, basepoint) = {d}, need at least 2"));
    }
    (1..d)
        .map(|r| hull_from_distances(quad, &dist, center, basepoint, r).map(|b| b.boundary_length))
        .collect()
}

/// `|B(center, r)|` for each radius, from a single breadth-first search.
pub fn ball_volumes(quad: &Quadrangulation, center: usize, radii: &[u32]) -> Result<Vec<usize>> {
    check_vertex(quad, center)?;
    let dist = quad.bfs_metric(center);
    let max = radii.iter().copied().max().unwrap_or(0) as usize;
    let mut hist = vec![0usize; max + 1];
    for &d in &dist {
        if (d as usize) <= max {
            hist[d as usize] += 1;
        }
    }
    for r in 1..hist.len() {
        hist[r] += hist[r - 1];
    }
    Ok(radii.iter().map(|&r| hist[r as usize]).collect())
}
