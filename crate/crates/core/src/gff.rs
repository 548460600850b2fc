//! Discrete Gaussian free field on a box and its vertex-weighted metric.
//!
//! The field has zero boundary values and covariance equal to the inverse
//! of the interior Dirichlet Laplacian `4 - (sum of the 4 neighbors)` (unit
//! conductances). Path lengths are `sum over vertices of exp(gamma h(x))`,
//! both endpoints included.

use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geodesic::{enumerate_geodesics, geodesic_dag, GeodesicBundle, Space, WeightedGraph};
use crate::rng::RngStream;

/// Default weight exponent `1/sqrt(6)`.
pub const DEFAULT_GAMMA: f64 = 0.408_248_290_463_863;

/// Field on the `n x n` box, row-major; vertex `(r, c)` is `r * n + c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GffField {
    pub n: usize,
    pub values: Vec<f64>,
}

impl GffField {
    pub fn zero(n: usize) -> Result<Self> {
        check_side(n)?;
        Ok(Self { n, values: vec![0.0; n * n] })
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.n + c]
    }

    pub fn is_frame(&self, v: usize) -> bool {
        let (r, c) = (v / self.n, v % self.n);
        r == 0 || c == 0 || r == self.n - 1 || c == self.n - 1
    }

    /// Vertices of the outer frame, clockwise from `(0, 0)`.
    pub fn frame_vertices(&self) -> Vec<usize> {
        let n = self.n;
        let mut out: Vec<usize> = (0..n).collect();
        out.extend((1..n).map(|r| r * n + n - 1));
        out.extend((0..n - 1).rev().map(|c| (n - 1) * n + c));
        out.extend((1..n - 1).rev().map(|r| r * n));
        out
    }

    /// One CSV row per grid row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for row in self.values.chunks(self.n) {
            let line: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

fn check_side(n: usize) -> Result<()> {
    if n < 3 {
        return invalid(format!("box side must be at least 3, got {n}"));
    }
    Ok(())
}

/// Dirichlet free field via the sine eigenbasis: with `m = n - 2` interior
/// sites per side, `h = S (Z / sqrt(lambda)) S^T` where
/// `S[x][j] = sqrt(2/(m+1)) sin(pi (x+1) (j+1) / (m+1))` and
/// `lambda_jk = 4 - 2 cos(pi (j+1)/(m+1)) - 2 cos(pi (k+1)/(m+1))`.
pub fn sample_dgff(n: usize, stream: RngStream) -> Result<GffField> {
    check_side(n)?;
    let m = n - 2;
    let mut rng = stream.rng();
    let theta = std::f64::consts::PI / (m + 1) as f64;
    let norm = (2.0 / (m + 1) as f64).sqrt();
    let s: Vec<f64> = (0..m * m)
        .map(|i| norm * (theta * ((i / m + 1) * (i % m + 1)) as f64).sin())
        .collect();
    let cos: Vec<f64> = (0..m).map(|j| 2.0 * (theta * (j + 1) as f64).cos()).collect();
    let mut coef = vec![0.0; m * m];
    for j in 0..m {
        for k in 0..m {
            let z: f64 = rng.sample(StandardNormal);
            coef[j * m + k] = z / (4.0 - cos[j] - cos[k]).sqrt();
        }
    }
    // t = S coef, then h = t S^T (S is symmetric)
    let t = matmul(&s, &coef, m);
    let h = matmul(&t, &s, m);
    let mut values = vec![0.0; n * n];
    for r in 0..m {
        values[(r + 1) * n + 1..(r + 1) * n + 1 + m].copy_from_slice(&h[r * m..(r + 1) * m]);
    }
    Ok(GffField { n, values })
}

fn matmul(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m * m];
    out.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
        for k in 0..m {
            let aik = a[i * m + k];
            for (o, &bkj) in row.iter_mut().zip(&b[k * m..(k + 1) * m]) {
                *o += aik * bkj;
            }
        }
    });
    out
}

fn adjacent(n: usize, u: usize, v: usize) -> bool {
    let (ur, uc, vr, vc) = (u / n, u % n, v / n, v % n);
    ur.abs_diff(vr) + uc.abs_diff(vc) == 1
}

/// `sum exp(gamma h(x))` over the path's vertices.
pub fn path_length(field: &GffField, gamma: f64, path: &[usize]) -> Result<f64> {
    if path.is_empty() {
        return invalid("empty path");
    }
    let nn = field.n * field.n;
    if let Some(&v) = path.iter().find(|&&v| v >= nn) {
        return invalid(format!("vertex {v} outside the box"));
    }
    if let Some(w) = path.windows(2).find(|w| !adjacent(field.n, w[0], w[1])) {
        return invalid(format!("{} and {} are not neighbors", w[0], w[1]));
    }
    Ok(path.iter().map(|&v| (gamma * field.values[v]).exp()).sum())
}

/// The vertex-weighted metric as a graph metric: edge `u - v` weighs
/// `(W(u) + W(v)) / 2`, so a path's vertex-weight length is its edge length
/// plus half the weights of its two endpoints.
#[derive(Debug, Clone)]
pub struct WeightedMetric {
    pub n: usize,
    pub gamma: f64,
    pub weights: Vec<f64>,
    graph: WeightedGraph,
}

impl WeightedMetric {
    pub fn new(field: &GffField, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return invalid("gamma must be finite");
        }
        let n = field.n;
        let weights: Vec<f64> = field.values.iter().map(|&h| (gamma * h).exp()).collect();
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return invalid("vertex weights must be positive and finite");
        }
        let mut edges = Vec::with_capacity(2 * n * n);
        for r in 0..n {
            for c in 0..n {
                let v = r * n + c;
                for u in [(c + 1 < n).then(|| v + 1), (r + 1 < n).then(|| v + n)].into_iter().flatten() {
                    edges.push((v, u, 0.5 * (weights[v] + weights[u])));
                }
            }
        }
        Ok(Self { n, gamma, weights, graph: WeightedGraph::new(n * n, &edges)? })
    }

    /// Vertex-weight length of a path from its edge length.
    pub fn vertex_length(&self, a: usize, b: usize, edge_length: f64) -> f64 {
        if a == b {
            return self.weights[a];
        }
        edge_length + 0.5 * (self.weights[a] + self.weights[b])
    }
}

impl Space for WeightedMetric {
    fn len(&self) -> usize {
        self.n * self.n
    }

    fn for_each_neighbor<F: FnMut(usize, f64)>(&self, u: usize, f: F) {
        self.graph.for_each_neighbor(u, f)
    }

    fn is_integral(&self) -> bool {
        self.graph.is_integral()
    }
}

/// Geodesic bundles of the vertex-weight metric for the given pairs.
pub fn gff_geodesic_bundle(
    metric: &WeightedMetric,
    pairs: &[(usize, usize)],
    slack: Option<f64>,
    cap: usize,
) -> Result<Vec<GeodesicBundle>> {
    pairs.par_iter().map(|&(a, b)| enumerate_geodesics(metric, a, b, slack, cap)).collect()
}

/// `count` random pairs of distinct frame vertices.
pub fn random_boundary_pairs(field: &GffField, count: usize, stream: RngStream) -> Vec<(usize, usize)> {
    let frame = field.frame_vertices();
    let mut rng = stream.rng();
    (0..count)
        .map(|_| loop {
            let a = frame[rng.random_range(0..frame.len())];
            let b = frame[rng.random_range(0..frame.len())];
            if a != b {
                break (a, b);
            }
        })
        .collect()
}

/// Number of geodesics through each vertex, one lowest-index geodesic per
/// pair.
pub fn geodesic_overlay(metric: &WeightedMetric, pairs: &[(usize, usize)]) -> Result<BTreeMap<usize, usize>> {
    let paths: Vec<Vec<usize>> = pairs
        .par_iter()
        .map(|&(a, b)| Ok(geodesic_dag(metric, b)?.canonical_path(metric, a)?.vertices))
        .collect::<Result<_>>()?;
    let mut mult = BTreeMap::new();
    for p in paths {
        for v in p {
            *mult.entry(v).or_insert(0) += 1;
        }
    }
    Ok(mult)
}

/// Fraction of the box's vertices on the overlay.
pub fn frame_fraction(metric: &WeightedMetric, overlay: &BTreeMap<usize, usize>) -> f64 {
    overlay.len() as f64 / (metric.n * metric.n) as f64
}

/// `x,y,multiplicity` rows (`x` is the column).
pub fn write_overlay_csv<W: Write>(n: usize, overlay: &BTreeMap<usize, usize>, mut out: W) -> std::io::Result<()> {
    writeln!(out, "x,y,multiplicity")?;
    for (&v, &m) in overlay {
        writeln!(out, "{},{},{}", v % n, v / n, m)?;
    }
    Ok(())
}

/// Field as a grayscale raster with the overlay drawn in red.
pub fn write_overlay_svg<W: Write>(field: &GffField, overlay: &BTreeMap<usize, usize>, mut out: W) -> std::io::Result<()> {
    let n = field.n;
    let (lo, hi) = field.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {n} {n}" shape-rendering="crispEdges">"#)?;
    for r in 0..n {
        for c in 0..n {
            let g = (255.0 * (field.get(r, c) - lo) / span).round() as u8;
            writeln!(out, r#"<rect x="{c}" y="{r}" width="1" height="1" fill="rgb({g},{g},{g})"/>"#)?;
        }
    }
    let top = overlay.values().copied().max().unwrap_or(1) as f64;
    for (&v, &m) in overlay {
        let alpha = 0.3 + 0.7 * m as f64 / top;
        writeln!(
            out,
            r#"<rect x="{}" y="{}" width="1" height="1" fill="red" fill-opacity="{alpha:.3}"/>"#,
            v % n,
            v / n
        )?;
    }
    writeln!(out, "</svg>")
}
