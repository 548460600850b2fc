use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::planar_map::Quadrangulation;
use crate::snake_map::{DiscreteBrownianMap, IDENTIFICATION_TOL};

/// Relative tolerance for ties on real-valued metrics.
pub const DEFAULT_RELATIVE_SLACK: f64 = 1e-9;

/// A finite metric space given as a weighted graph whose shortest-path
/// distance is the metric.
pub trait Space: Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Calls `f(v, w)` for every edge `u - v` of weight `w`.
    fn for_each_neighbor<F: FnMut(usize, f64)>(&self, u: usize, f: F);

    /// Distance from the nearest of `sources` to every point.
    fn distances_from_set(&self, sources: &[usize]) -> Vec<f64> {
        dijkstra(self, sources)
    }

    fn distances_from(&self, source: usize) -> Vec<f64> {
        self.distances_from_set(&[source])
    }

    /// Integer-valued metrics compare ties exactly.
    fn is_integral(&self) -> bool {
        false
    }

    /// Tie tolerance used when comparing lengths around `scale`.
    fn slack(&self, scale: f64) -> f64 {
        if self.is_integral() {
            0.0
        } else {
            DEFAULT_RELATIVE_SLACK * scale.abs().max(f64::MIN_POSITIVE)
        }
    }

    /// Smallest weight of an edge `u - v`, if any.
    fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        let mut best: Option<f64> = None;
        self.for_each_neighbor(u, |x, w| {
            if x == v && best.is_none_or(|b| w < b) {
                best = Some(w);
            }
        });
        best
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multi-source Dijkstra over [`Space::for_each_neighbor`].
pub fn dijkstra<S: Space + ?Sized>(space: &S, sources: &[usize]) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; space.len()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(Entry(0.0, s));
    }
    while let Some(Entry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        space.for_each_neighbor(u, |v, w| {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Entry(nd, v));
            }
        });
    }
    dist
}

impl Space for Quadrangulation {
    fn len(&self) -> usize {
        self.n_vertices
    }

    fn for_each_neighbor<F: FnMut(usize, f64)>(&self, u: usize, mut f: F) {
        for &v in self.neighbors(u) {
            f(v as usize, 1.0);
        }
    }

    fn distances_from_set(&self, sources: &[usize]) -> Vec<f64> {
        let mut dist = vec![u32::MAX; self.n_vertices];
        let mut queue = VecDeque::new();
        for &s in sources {
            dist[s] = 0;
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbors(u) {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = dist[u] + 1;
                    queue.push_back(v as usize);
                }
            }
        }
        dist.into_iter().map(|d| if d == u32::MAX { f64::INFINITY } else { f64::from(d) }).collect()
    }

    fn is_integral(&self) -> bool {
        true
    }
}

/// Weighted graph in compressed adjacency form.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    integral: bool,
}

impl WeightedGraph {
    /// Undirected graph on `n` vertices; weights must be positive.
    pub fn new(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut degree = vec![0usize; n + 1];
        for &(u, v, w) in edges {
            if u >= n || v >= n || u == v {
                return invalid(format!("bad edge ({u}, {v})"));
            }
            if !(w > 0.0) || !w.is_finite() {
                return invalid(format!("edge weight must be positive, got {w}"));
            }
            degree[u + 1] += 1;
            degree[v + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let mut targets = vec![0; 2 * edges.len()];
        let mut weights = vec![0.0; 2 * edges.len()];
        for &(u, v, w) in edges {
            for (a, b) in [(u, v), (v, u)] {
                targets[fill[a]] = b;
                weights[fill[a]] = w;
                fill[a] += 1;
            }
        }
        let integral = weights.iter().all(|w| w.fract() == 0.0);
        Ok(Self { offsets, targets, weights, integral })
    }

    /// Unit-weight graph.
    pub fn unit(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let e: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        Self::new(n, &e)
    }

    pub fn path(n: usize) -> Self {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::unit(n, &e).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::unit(n, &e).unwrap()
    }

    /// `rows x cols` grid, vertex `(r, c)` at index `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut e = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    e.push((v, v + 1));
                }
                if r + 1 < rows {
                    e.push((v, v + cols));
                }
            }
        }
        Self::unit(rows * cols, &e).unwrap()
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }
}

impl Space for WeightedGraph {
    fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    fn for_each_neighbor<F: FnMut(usize, f64)>(&self, u: usize, mut f: F) {
        for i in self.offsets[u]..self.offsets[u + 1] {
            f(self.targets[i], self.weights[i]);
        }
    }

    fn is_integral(&self) -> bool {
        self.integral
    }
}

/// Finite metric given by a full distance matrix. Its graph consists of the
/// metric-irreducible pairs: `(i, j)` is an edge unless some third point
/// `k` has `d(i,k) + d(k,j) <= d(i,j)` up to the relative slack.
#[derive(Debug, Clone)]
pub struct DenseMetric {
    n: usize,
    d: Vec<f64>,
    graph: WeightedGraph,
}

impl DenseMetric {
    /// `d` is row-major `n x n`; distinct points must be at positive distance.
    pub fn new(n: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n * n {
            return invalid(format!("matrix has {} entries, expected {}", d.len(), n * n));
        }
        for i in 0..n {
            for j in 0..n {
                let x = d[i * n + j];
                if (i == j && x != 0.0) || (i != j && !(x > 0.0)) || x != d[j * n + i] {
                    return invalid(format!("not a metric with separated points at ({i}, {j})"));
                }
            }
        }
        let integral = d.iter().all(|x| x.fract() == 0.0);
        let edges: Vec<(usize, usize, f64)> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let d = &d;
                (i + 1..n).filter_map(move |j| {
                    let dij = d[i * n + j];
                    let tol = if integral { 0.0 } else { DEFAULT_RELATIVE_SLACK * dij };
                    let reducible = (0..n).any(|k| k != i && k != j && d[i * n + k] + d[k * n + j] <= dij + tol);
                    (!reducible).then_some((i, j, dij))
                })
            })
            .collect();
        let graph = WeightedGraph::new(n, &edges)?;
        Ok(Self { n, d, graph })
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    /// Irreducible pairs as a graph.
    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }
}

impl Space for DenseMetric {
    fn len(&self) -> usize {
        self.n
    }

    fn for_each_neighbor<F: FnMut(usize, f64)>(&self, u: usize, f: F) {
        self.graph.for_each_neighbor(u, f)
    }

    fn distances_from_set(&self, sources: &[usize]) -> Vec<f64> {
        let mut out = vec![f64::INFINITY; self.n];
        for &s in sources {
            for (o, &x) in out.iter_mut().zip(&self.d[s * self.n..(s + 1) * self.n]) {
                *o = o.min(x);
            }
        }
        out
    }

    fn is_integral(&self) -> bool {
        self.graph.is_integral()
    }

    fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        (u != v).then(|| self.dist(u, v))
    }
}

/// A snake map with identified points merged: point `k` of the space is
/// grid index `representatives[k]`.
#[derive(Debug, Clone)]
pub struct SnakeMapSpace {
    pub metric: DenseMetric,
    pub representatives: Vec<usize>,
    /// Space point of every grid index.
    pub point_of: Vec<usize>,
}

impl SnakeMapSpace {
    pub fn new(map: &DiscreteBrownianMap) -> Result<Self> {
        Self::from_matrix(map.len(), map.dmat())
    }

    /// From a row-major distance matrix, such as a loaded dump; points
    /// within the identification tolerance of a lower index are merged.
    pub fn from_matrix(n: usize, dmat: &[f64]) -> Result<Self> {
        if dmat.len() != n * n {
            return invalid(format!("matrix has {} entries, expected {}", dmat.len(), n * n));
        }
        let dist = |i: usize, j: usize| dmat[i * n + j].max(dmat[j * n + i]);
        let identified_with: Vec<usize> =
            (0..n).map(|i| (0..=i).find(|&j| dist(i, j) <= IDENTIFICATION_TOL).unwrap_or(i)).collect();
        let representatives: Vec<usize> = (0..n).filter(|&i| identified_with[i] == i).collect();
        let mut slot = vec![usize::MAX; n];
        for (k, &i) in representatives.iter().enumerate() {
            slot[i] = k;
        }
        let point_of = (0..n).map(|i| slot[identified_with[i]]).collect();
        let m = representatives.len();
        let mut d = vec![0.0; m * m];
        for (a, &i) in representatives.iter().enumerate() {
            for (b, &j) in representatives.iter().enumerate() {
                d[a * m + b] = if a == b { 0.0 } else { dist(i, j) };
            }
        }
        Ok(Self { metric: DenseMetric::new(m, d)?, representatives, point_of })
    }
}

impl Space for SnakeMapSpace {
    fn len(&self) -> usize {
        self.metric.len()
    }

    fn for_each_neighbor<F: FnMut(usize, f64)>(&self, u: usize, f: F) {
        self.metric.for_each_neighbor(u, f)
    }

    fn distances_from_set(&self, sources: &[usize]) -> Vec<f64> {
        self.metric.distances_from_set(sources)
    }

    fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        self.metric.edge_weight(u, v)
    }
}
