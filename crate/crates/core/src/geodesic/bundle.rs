use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geodesic::{GeodesicPath, Space};

/// Distances to `target` plus the tight-edge structure pointing at it.
#[derive(Debug, Clone)]
pub struct GeodesicDag {
    pub target: usize,
    pub dist: Vec<f64>,
}

/// Shortest-path structure towards `target`.
pub fn geodesic_dag<S: Space>(space: &S, target: usize) -> Result<GeodesicDag> {
    if target >= space.len() {
        return invalid(format!("point {target} out of range"));
    }
    Ok(GeodesicDag { target, dist: space.distances_from(target) })
}

impl GeodesicDag {
    /// Neighbors `v` of `u` that lie on a geodesic from `u` to the target:
    /// `w(u, v) + d(v) <= d(u) + slack` and `d(v) < d(u)`.
    pub fn successors<S: Space>(&self, space: &S, u: usize) -> Vec<(usize, f64)> {
        let du = self.dist[u];
        let slack = space.slack(du);
        let mut out = Vec::new();
        space.for_each_neighbor(u, |v, w| {
            if self.dist[v] < du && w + self.dist[v] <= du + slack && !out.iter().any(|&(x, _)| x == v) {
                out.push((v, w));
            }
        });
        out.sort_unstable_by_key(|&(v, _)| v);
        out
    }

    /// Geodesic from `from` to the target taking the lowest-index successor
    /// at each step.
    pub fn canonical_path<S: Space>(&self, space: &S, from: usize) -> Result<GeodesicPath> {
        self.walk(space, from, |succ| succ[0])
    }

    /// Geodesic from `from` to the target with uniformly random tie-breaking.
    pub fn random_path<S: Space, R: Rng + ?Sized>(&self, space: &S, from: usize, rng: &mut R) -> Result<GeodesicPath> {
        self.walk(space, from, |succ| succ[rng.random_range(0..succ.len())])
    }

    fn walk<S: Space>(
        &self,
        space: &S,
        from: usize,
        mut pick: impl FnMut(&[(usize, f64)]) -> (usize, f64),
    ) -> Result<GeodesicPath> {
        if !self.dist[from].is_finite() {
            return invalid(format!("{from} cannot reach {}", self.target));
        }
        let mut vertices = vec![from];
        let mut cumlen = vec![0.0];
        let mut u = from;
        while u != self.target {
            let succ = self.successors(space, u);
            if succ.is_empty() {
                return Err(Error::Malformed(format!("no tight edge out of {u}")));
            }
            let (v, w) = pick(&succ);
            vertices.push(v);
            cumlen.push(cumlen.last().unwrap() + w);
            u = v;
        }
        Ok(GeodesicPath { vertices, cumlen })
    }
}

/// `(I, J, K)`: distinct first steps at the start, distinct last steps at
/// the end, and total splitting multiplicity from the end towards the start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NetworkSignature {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

/// All geodesics between two points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeodesicBundle {
    pub endpoints: (usize, usize),
    pub length: f64,
    pub paths: Vec<GeodesicPath>,
    /// More than `cap` geodesics exist; `paths` holds the first `cap`.
    pub truncated: bool,
    pub signature: Option<NetworkSignature>,
    /// `(vertex, multiplicity)` of each splitting point from the end
    /// towards the start.
    pub splitting_points: Vec<(usize, usize)>,
}

/// Every path from `a` to `b` in the tight-edge graph
/// `{(u, v) : d(a,u) + w(u,v) + d(v,b) <= d(a,b) + slack}`.
///
/// `slack = None` uses the space default (0 on integer metrics). At most
/// `cap` paths are listed; beyond that the bundle is flagged truncated.
pub fn enumerate_geodesics<S: Space>(
    space: &S,
    a: usize,
    b: usize,
    slack: Option<f64>,
    cap: usize,
) -> Result<GeodesicBundle> {
    if a == b {
        return invalid("endpoints must differ");
    }
    if a >= space.len() || b >= space.len() {
        return invalid("endpoint out of range");
    }
    let da = space.distances_from(a);
    let db = space.distances_from(b);
    let total = da[b];
    if !total.is_finite() {
        return invalid(format!("{a} and {b} are not connected"));
    }
    let slack = slack.unwrap_or_else(|| space.slack(total));
    if !(slack >= 0.0) {
        return invalid("slack must be nonnegative");
    }
    let n = space.len();
    // tight successors, restricted to points on some geodesic
    let on = |u: usize| da[u] + db[u] <= total + slack;
    let mut succ: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut order: Vec<usize> = (0..n).filter(|&u| on(u)).collect();
    for &u in &order {
        space.for_each_neighbor(u, |v, w| {
            if on(v) && db[v] < db[u] && da[u] + w + db[v] <= total + slack && !succ[u].iter().any(|&(x, _)| x == v) {
                succ[u].push((v, w));
            }
        });
        succ[u].sort_unstable_by_key(|&(v, _)| v);
    }
    // number of paths to b, saturating, in order of increasing d(., b)
    order.sort_by(|&x, &y| db[x].total_cmp(&db[y]));
    let mut count = vec![0u64; n];
    count[b] = 1;
    for &u in &order {
        if u != b {
            count[u] = succ[u].iter().fold(0u64, |acc, &(v, _)| acc.saturating_add(count[v]));
        }
    }
    let truncated = count[a] > cap as u64;
    let mut paths = Vec::new();
    let mut stack = vec![(a, 0.0)];
    collect_paths(&succ, &count, b, cap, &mut stack, &mut paths);
    let mut bundle = GeodesicBundle {
        endpoints: (a, b),
        length: total,
        paths,
        truncated,
        signature: None,
        splitting_points: Vec::new(),
    };
    if !truncated {
        let (sig, split) = signature_of(&bundle)?;
        bundle.signature = Some(sig);
        bundle.splitting_points = split;
    }
    Ok(bundle)
}

fn collect_paths(
    succ: &[Vec<(usize, f64)>],
    count: &[u64],
    b: usize,
    cap: usize,
    stack: &mut Vec<(usize, f64)>,
    out: &mut Vec<GeodesicPath>,
) {
    let (u, len) = *stack.last().unwrap();
    if u == b {
        out.push(GeodesicPath {
            vertices: stack.iter().map(|s| s.0).collect(),
            cumlen: stack.iter().map(|s| s.1).collect(),
        });
        return;
    }
    for &(v, w) in &succ[u] {
        if out.len() >= cap {
            return;
        }
        if count[v] == 0 {
            continue;
        }
        stack.push((v, len + w));
        collect_paths(succ, count, b, cap, stack, out);
        stack.pop();
    }
}

/// `(I, J, K)` of a complete bundle; see [`NetworkSignature`].
///
/// A vertex `z` other than the end is a splitting point from the end
/// towards the start when the geodesics through `z` continue towards the
/// start along more than one vertex; its multiplicity is that number minus 1.
pub fn classify_network(bundle: &GeodesicBundle) -> Result<NetworkSignature> {
    signature_of(bundle).map(|(s, _)| s)
}

fn signature_of(bundle: &GeodesicBundle) -> Result<(NetworkSignature, Vec<(usize, usize)>)> {
    if bundle.truncated {
        return Err(Error::Unclassifiable("bundle was truncated".into()));
    }
    if bundle.paths.is_empty() {
        return Err(Error::Unclassifiable("bundle has no paths".into()));
    }
    let (a, b) = bundle.endpoints;
    let mut first = BTreeSet::new();
    let mut last = BTreeSet::new();
    // vertex -> distinct neighbors on the start side
    let mut back: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for p in &bundle.paths {
        let v = &p.vertices;
        if v.len() < 2 || v[0] != a || v[v.len() - 1] != b {
            return invalid("path does not join the bundle endpoints");
        }
        first.insert(v[1]);
        last.insert(v[v.len() - 2]);
        for w in v.windows(2) {
            if w[1] != b {
                back.entry(w[1]).or_default().insert(w[0]);
            }
        }
    }
    let split: Vec<(usize, usize)> = back
        .into_iter()
        .filter(|(_, s)| s.len() > 1)
        .map(|(z, s)| (z, s.len() - 1))
        .collect();
    let k = split.iter().map(|s| s.1).sum();
    Ok((NetworkSignature { i: first.len(), j: last.len(), k }, split))
}

/// Symmetric Hausdorff distance between two nonempty point sets.
pub fn hausdorff_distance<S: Space>(space: &S, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return invalid("Hausdorff distance needs nonempty sets");
    }
    let to_b = space.distances_from_set(b);
    let to_a = space.distances_from_set(a);
    let ab = a.iter().map(|&x| to_b[x]).fold(0.0, f64::max);
    let ba = b.iter().map(|&x| to_a[x]).fold(0.0, f64::max);
    Ok(ab.max(ba))
}

/// Where two geodesics ending at `root` merge: the far end of their common
/// final segment and its distance to `root` along the paths.
pub fn coalescence_point(root: usize, g1: &GeodesicPath, g2: &GeodesicPath) -> Result<(usize, f64)> {
    if g1.end() != root || g2.end() != root {
        return invalid("both geodesics must end at the root");
    }
    let (v1, v2) = (&g1.vertices, &g2.vertices);
    let mut shared = 1;
    while shared < v1.len().min(v2.len()) && v1[v1.len() - 1 - shared] == v2[v2.len() - 1 - shared] {
        shared += 1;
    }
    let idx = v1.len() - shared;
    Ok((v1[idx], g1.length() - g1.cumlen[idx]))
}
