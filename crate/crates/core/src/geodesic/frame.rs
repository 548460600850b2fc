use std::collections::{BTreeSet, BinaryHeap};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geodesic::{geodesic_dag, Space};
use crate::rng::RngStream;
use crate::stats::linear_fit;

/// Box-counting fit: `log N(eps)` against `log(1/eps)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDimension {
    pub slope: f64,
    pub stderr: f64,
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq)]
struct Far(f64, usize);

impl Eq for Far {}

impl Ord for Far {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Far {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy covering numbers of `points` by closed balls of each radius.
///
/// One farthest-point traversal serves every scale: after `m` centers the
/// largest distance from a point to its nearest center is `r_m`, and
/// `N(eps)` is the first `m` with `r_m <= eps`.
pub fn covering_counts<S: Space>(space: &S, points: &[usize], scales: &[f64]) -> Result<Vec<usize>> {
    if points.is_empty() {
        return invalid("nothing to cover");
    }
    let floor = scales.iter().copied().fold(f64::INFINITY, f64::min);
    if !(floor >= 0.0) {
        return invalid("scales must be nonnegative");
    }
    let mut cover = vec![f64::INFINITY; space.len()];
    let mut heap: BinaryHeap<Far> = points.iter().map(|&p| Far(f64::INFINITY, p)).collect();
    // radii[m - 1] = covering radius with m centers
    let mut radii = Vec::new();
    let mut center = points[0];
    loop {
        relax_from(space, center, &mut cover);
        let far = loop {
            match heap.peek().copied() {
                None => break None,
                Some(Far(d, p)) if d == cover[p] => break Some(Far(d, p)),
                Some(Far(_, p)) => {
                    heap.pop();
                    if cover[p] > 0.0 {
                        heap.push(Far(cover[p], p));
                    }
                }
            }
        };
        let r = far.map_or(0.0, |f| f.0);
        radii.push(r);
        match far {
            Some(Far(_, p)) if r > floor => center = p,
            _ => break,
        }
    }
    Ok(scales
        .iter()
        .map(|&eps| radii.iter().position(|&r| r <= eps).unwrap() + 1)
        .collect())
}

/// Dijkstra from `c` that only enters vertices it brings closer.
fn relax_from<S: Space>(space: &S, c: usize, cover: &mut [f64]) {
    #[derive(PartialEq)]
    struct Near(f64, usize);
    impl Eq for Near {}
    impl Ord for Near {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            other.0.total_cmp(&self.0)
        }
    }
    impl PartialOrd for Near {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    cover[c] = 0.0;
    let mut heap = BinaryHeap::from([Near(0.0, c)]);
    while let Some(Near(d, u)) = heap.pop() {
        if d > cover[u] {
            continue;
        }
        space.for_each_neighbor(u, |v, w| {
            if d + w < cover[v] {
                cover[v] = d + w;
                heap.push(Near(d + w, v));
            }
        });
    }
}

fn check_scales(scales: &[f64]) -> Result<()> {
    if scales.len() < 3 {
        return invalid("need at least 3 scales");
    }
    if scales.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return invalid("scales must be positive and finite");
    }
    let (lo, hi) = scales.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &s| (a.min(s), b.max(s)));
    if hi < 10.0 * lo {
        return invalid("scales must span at least one decade");
    }
    Ok(())
}

/// Box-counting dimension of a point set.
pub fn box_dimension<S: Space>(space: &S, points: &[usize], scales: &[f64]) -> Result<BoxDimension> {
    check_scales(scales)?;
    let counts = covering_counts(space, points, scales)?;
    let xs: Vec<f64> = scales.iter().map(|s| -s.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let fit = linear_fit(&xs, &ys);
    Ok(BoxDimension { slope: fit.slope, stderr: fit.slope_se, scales: scales.to_vec(), counts })
}

/// Union of one geodesic per pair (lowest-index tie-breaking), each without
/// its two endpoints. Sorted.
pub fn geodesic_frame<S: Space>(space: &S, pairs: &[(usize, usize)]) -> Result<Vec<usize>> {
    let parts: Vec<Vec<usize>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let dag = geodesic_dag(space, b)?;
            let path = dag.canonical_path(space, a)?;
            let v = path.vertices;
            Ok(if v.len() > 2 { v[1..v.len() - 1].to_vec() } else { Vec::new() })
        })
        .collect::<Result<_>>()?;
    let set: BTreeSet<usize> = parts.into_iter().flatten().collect();
    Ok(set.into_iter().collect())
}

/// `pair_count` uniformly random pairs of distinct points.
pub fn sample_pairs<S: Space>(space: &S, pair_count: usize, stream: RngStream) -> Result<Vec<(usize, usize)>> {
    if space.len() < 2 {
        return invalid("need at least two points");
    }
    let mut rng = stream.rng();
    Ok((0..pair_count)
        .map(|_| loop {
            let a = rng.random_range(0..space.len());
            let b = rng.random_range(0..space.len());
            if a != b {
                break (a, b);
            }
        })
        .collect())
}

/// Box-counting dimension of the geodesic frame of `pair_count` random pairs.
pub fn frame_box_dimension<S: Space>(
    space: &S,
    pair_count: usize,
    scales: &[f64],
    stream: RngStream,
) -> Result<BoxDimension> {
    check_scales(scales)?;
    let pairs = sample_pairs(space, pair_count, stream)?;
    let frame = geodesic_frame(space, &pairs)?;
    if frame.is_empty() {
        return invalid("the sampled geodesics have no interior points");
    }
    box_dimension(space, &frame, scales)
}
