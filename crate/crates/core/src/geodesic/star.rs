use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geodesic::flow::FlowNet;
use crate::geodesic::{GeodesicPath, Space};
use crate::rng::RngStream;

/// Largest set of geodesics leaving `center` that are disjoint inside the
/// ball of radius `disjoint_radius`, up to `k` of them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StarReport {
    pub center: usize,
    pub k: usize,
    /// Geodesic segments from the center out to distance `disjoint_radius`.
    pub witnesses: Vec<GeodesicPath>,
    pub disjoint_radius: f64,
    /// The center's eccentricity is below the radius; nothing was computed.
    pub skipped: bool,
}

/// Star census at one center.
///
/// Geodesics from the center are the paths along edges `u -> v` with
/// `d(c, v) = d(c, u) + w(u, v)`; each is cut at its first vertex with
/// `d(c, .) >= radius`, which any geodesic to a target beyond the ball must
/// cross. The maximum number of such segments that share only the center
/// is a unit-capacity vertex-disjoint path problem, solved exactly by
/// max-flow with split vertices.
pub fn star_at<S: Space>(space: &S, center: usize, k: usize, radius: f64) -> Result<StarReport> {
    if k < 2 {
        return invalid(format!("k must be at least 2, got {k}"));
    }
    if !(radius > 0.0) {
        return invalid(format!("radius must be positive, got {radius}"));
    }
    if center >= space.len() {
        return invalid(format!("center {center} out of range"));
    }
    let dc = space.distances_from(center);
    let slack = space.slack(radius);
    let ecc = dc.iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::max);
    if ecc + slack < radius {
        return Ok(StarReport { center, k: 0, witnesses: Vec::new(), disjoint_radius: radius, skipped: true });
    }
    let inner = |u: usize| dc[u] + slack < radius;
    let n = space.len();
    // node 2u = in(u), 2u + 1 = out(u), 2n = sink
    let sink = 2 * n;
    let mut net = FlowNet::new(2 * n + 1);
    let mut step = vec![Vec::new(); n];
    for u in 0..n {
        if !inner(u) {
            continue;
        }
        space.for_each_neighbor(u, |v, w| {
            let tol = space.slack(dc[v]);
            if dc[v] > dc[u] && (dc[u] + w - dc[v]).abs() <= tol && !step[u].iter().any(|&(x, _)| x == v) {
                step[u].push((v, w));
            }
        });
    }
    let mut exit = vec![false; n];
    for u in 0..n {
        if inner(u) {
            net.add_edge(2 * u, 2 * u + 1, if u == center { k as i32 } else { 1 });
        }
        for &(v, _) in &step[u] {
            net.add_edge(2 * u + 1, 2 * v, 1);
            // first vertex at or beyond the radius
            exit[v] |= !inner(v);
        }
    }
    for v in (0..n).filter(|&v| exit[v]) {
        net.add_edge(2 * v, sink, 1);
    }
    let m = net.max_flow(2 * center, sink, k as i32) as usize;
    let mut witnesses = Vec::with_capacity(m);
    for first in net.saturated_out(2 * center + 1).collect::<Vec<_>>() {
        let mut vertices = vec![center];
        let mut cumlen = vec![0.0];
        let mut node = first;
        loop {
            let v = node / 2;
            let w = step[*vertices.last().unwrap()].iter().find(|s| s.0 == v).unwrap().1;
            cumlen.push(cumlen.last().unwrap() + w);
            vertices.push(v);
            if !inner(v) {
                break;
            }
            node = net.saturated_out(2 * v + 1).next().expect("flow is conserved");
        }
        witnesses.push(GeodesicPath { vertices, cumlen });
    }
    Ok(StarReport { center, k: m, witnesses, disjoint_radius: radius, skipped: false })
}

/// [`star_at`] for `n_centers` uniformly sampled centers.
pub fn star_census<S: Space>(
    space: &S,
    k: usize,
    radius: f64,
    n_centers: usize,
    stream: RngStream,
) -> Result<Vec<StarReport>> {
    use rayon::prelude::*;
    if space.is_empty() {
        return invalid("empty space");
    }
    let mut rng = stream.rng();
    let centers: Vec<usize> = (0..n_centers).map(|_| rng.random_range(0..space.len())).collect();
    centers.par_iter().map(|&c| star_at(space, c, k, radius)).collect()
}
