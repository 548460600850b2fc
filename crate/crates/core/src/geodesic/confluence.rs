use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geodesic::{geodesic_dag, hausdorff_distance, GeodesicPath, Space};
use crate::rng::RngStream;
use crate::stats::{mean_se, monotone_violation_mass};

/// Largest end segment of either geodesic that the other one misses.
///
/// For each path the initial segment before its first vertex on the other
/// path and the final segment after its last such vertex are measured;
/// the result is the largest of the four lengths (a full length when the
/// paths are disjoint).
pub fn overlap_deficit(g1: &GeodesicPath, g2: &GeodesicPath) -> f64 {
    fn ends(g: &GeodesicPath, other: &GeodesicPath) -> f64 {
        let on: std::collections::HashSet<usize> = other.vertices.iter().copied().collect();
        let shared: Vec<usize> = (0..g.vertices.len()).filter(|&i| on.contains(&g.vertices[i])).collect();
        match (shared.first(), shared.last()) {
            (Some(&f), Some(&l)) => g.cumlen[f].max(g.length() - g.cumlen[l]),
            _ => g.length(),
        }
    }
    ends(g1, g2).max(ends(g2, g1))
}

/// One sampled pair of nearby geodesics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfluenceSample {
    pub hausdorff: f64,
    pub deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfluenceRow {
    pub epsilon: f64,
    pub pairs: usize,
    pub mean_deficit: f64,
    pub se: f64,
    /// No sampled pair had Hausdorff distance at most `epsilon`.
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfluenceReport {
    pub rows: Vec<ConfluenceRow>,
    pub samples: Vec<ConfluenceSample>,
    /// Least-squares `c` in `mean_deficit ~ c * e log(1/e)`, with
    /// `e = epsilon / diameter_estimate`.
    pub fitted_c: f64,
    pub diameter_estimate: f64,
    /// Largest deficit among pairs at Hausdorff distance 0.
    pub max_deficit_at_zero: f64,
    /// Isotonic violation mass of the nonempty rows' means.
    pub violation_mass: f64,
}

/// Strong-confluence table.
///
/// Each sample draws a pair `(a, b)`, a perturbation radius uniformly from
/// `epsilons`, and points `a'`, `b'` uniformly within that radius of `a`
/// and `b`; geodesics `a -> b` and `a' -> b'` are drawn with random
/// tie-breaking. Row `eps` pools the samples whose geodesics lie within
/// Hausdorff distance `eps`.
pub fn strong_confluence_statistic<S: Space>(
    space: &S,
    epsilons: &[f64],
    samples: usize,
    stream: RngStream,
) -> Result<ConfluenceReport> {
    if space.len() < 1000 {
        return invalid(format!("need at least 1000 points, got {}", space.len()));
    }
    if epsilons.is_empty() || epsilons.iter().any(|&e| !(e >= 0.0)) {
        return invalid("epsilons must be nonempty and nonnegative");
    }
    let mut eps = epsilons.to_vec();
    eps.sort_by(f64::total_cmp);
    let n = space.len();
    let draws: Vec<(ConfluenceSample, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream.split(r).rng();
            let a = rng.random_range(0..n);
            let b = loop {
                let b = rng.random_range(0..n);
                if b != a {
                    break b;
                }
            };
            let rho = eps[rng.random_range(0..eps.len())];
            let da = space.distances_from(a);
            let near = |d: &[f64], rng: &mut rand_chacha::ChaCha8Rng| {
                let ball: Vec<usize> = (0..n).filter(|&v| d[v] <= rho).collect();
                ball[rng.random_range(0..ball.len())]
            };
            let a2 = near(&da, &mut rng);
            let dag_b = geodesic_dag(space, b)?;
            let b2 = near(&dag_b.dist, &mut rng);
            let g1 = dag_b.random_path(space, a, &mut rng)?;
            let g2 = if a2 == b2 {
                GeodesicPath { vertices: vec![a2], cumlen: vec![0.0] }
            } else {
                geodesic_dag(space, b2)?.random_path(space, a2, &mut rng)?
            };
            let h = hausdorff_distance(space, &g1.vertices, &g2.vertices)?;
            Ok((ConfluenceSample { hausdorff: h, deficit: overlap_deficit(&g1, &g2) }, g1.length()))
        })
        .collect::<Result<_>>()?;
    let diameter_estimate = draws.iter().map(|d| d.1).fold(0.0, f64::max);
    let samples: Vec<ConfluenceSample> = draws.into_iter().map(|d| d.0).collect();
    let rows: Vec<ConfluenceRow> = eps
        .iter()
        .map(|&e| {
            let pool: Vec<f64> = samples.iter().filter(|s| s.hausdorff <= e).map(|s| s.deficit).collect();
            if pool.is_empty() {
                return ConfluenceRow { epsilon: e, pairs: 0, mean_deficit: f64::NAN, se: f64::NAN, empty: true };
            }
            let m = mean_se(&pool);
            ConfluenceRow { epsilon: e, pairs: pool.len(), mean_deficit: m.mean, se: m.se, empty: false }
        })
        .collect();
    let full: Vec<&ConfluenceRow> = rows.iter().filter(|r| !r.empty).collect();
    let means: Vec<f64> = full.iter().map(|r| r.mean_deficit).collect();
    let weights: Vec<f64> = full.iter().map(|r| r.pairs as f64).collect();
    let violation_mass = monotone_violation_mass(&means, &weights);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for r in &full {
        let e = r.epsilon / diameter_estimate;
        if e > 0.0 && e < 1.0 {
            let x = e * (1.0 / e).ln();
            sxy += x * r.mean_deficit / diameter_estimate;
            sxx += x * x;
        }
    }
    let fitted_c = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    let max_deficit_at_zero =
        samples.iter().filter(|s| s.hausdorff == 0.0).map(|s| s.deficit).fold(0.0, f64::max);
    Ok(ConfluenceReport { rows, samples, fitted_c, diameter_estimate, max_deficit_at_zero, violation_mass })
}
