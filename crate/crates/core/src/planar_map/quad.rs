use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::planar_map::tree::LabeledPlaneTree;

/// Rooted, pointed planar quadrangulation stored as a half-edge map.
///
/// Half-edge `h` leaves `vertex[h]`; `twin[h]` is the same edge in the other
/// direction and `next[h]` is the following half-edge along the face to the
/// left of `h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadrangulation {
    pub next: Vec<u32>,
    pub twin: Vec<u32>,
    pub vertex: Vec<u32>,
    pub root_half_edge: u32,
    pub pointed_vertex: u32,
    pub n_faces: usize,
    pub n_vertices: usize,
    #[serde(skip)]
    adjacency: Adjacency,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Adjacency {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Quadrangulation {
    pub fn from_tables(
        next: Vec<u32>,
        twin: Vec<u32>,
        vertex: Vec<u32>,
        root_half_edge: u32,
        pointed_vertex: u32,
    ) -> Result<Self> {
        let n_vertices = vertex.iter().map(|&v| v as usize + 1).max().unwrap_or(0);
        let mut q = Self {
            n_faces: next.len() / 4,
            next,
            twin,
            vertex,
            root_half_edge,
            pointed_vertex,
            n_vertices,
            adjacency: Adjacency::default(),
        };
        q.validate()?;
        q.adjacency = build_adjacency(&q.vertex, &q.twin, n_vertices);
        Ok(q)
    }

    pub fn n_half_edges(&self) -> usize {
        self.next.len()
    }

    pub fn n_edges(&self) -> usize {
        self.next.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        let a = &self.adjacency;
        &a.targets[a.offsets[v] as usize..a.offsets[v + 1] as usize]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    /// Checks the involution, the face permutation, face degrees, vertex
    /// consistency, Euler's formula and connectivity.
    pub fn validate(&self) -> Result<()> {
        let m = self.next.len();
        let bad = |msg: &str| Err(Error::Malformed(msg.to_string()));
        if m == 0 || m % 4 != 0 || self.twin.len() != m || self.vertex.len() != m {
            return bad("half-edge tables must be nonempty, equal length, multiple of 4");
        }
        if self.root_half_edge as usize >= m || self.pointed_vertex as usize >= self.n_vertices {
            return bad("root or pointed vertex out of range");
        }
        for h in 0..m {
            let t = self.twin[h] as usize;
            if t >= m || t == h || self.twin[t] as usize != h {
                return bad("twin is not a fixed-point-free involution");
            }
        }
        let mut hit = vec![false; m];
        for &n in &self.next {
            let n = n as usize;
            if n >= m || hit[n] {
                return bad("next is not a permutation");
            }
            hit[n] = true;
        }
        let mut seen = vec![false; m];
        let mut faces = 0;
        for h in 0..m {
            if seen[h] {
                continue;
            }
            let mut len = 0;
            let mut g = h;
            while !seen[g] {
                seen[g] = true;
                // next half-edge starts where this one ends
                if self.vertex[self.next[g] as usize] != self.vertex[self.twin[g] as usize] {
                    return bad("next does not continue from the end of the half-edge");
                }
                g = self.next[g] as usize;
                len += 1;
            }
            if len != 4 {
                return bad("face of degree other than 4");
            }
            faces += 1;
        }
        let v = self.n_vertices as i64;
        if v - (m as i64 / 2) + faces as i64 != 2 {
            return bad("Euler characteristic is not 2");
        }
        let adj = build_adjacency(&self.vertex, &self.twin, self.n_vertices);
        let mut dist = vec![u32::MAX; self.n_vertices];
        bfs_into(&adj, 0, &mut dist);
        if dist.contains(&u32::MAX) {
            return bad("map is not connected");
        }
        Ok(())
    }

    /// Canonical code of the rooted, pointed map: half-edges renumbered in
    /// breadth-first order from the root. Equal codes mean isomorphic maps.
    pub fn canonical_code(&self) -> Vec<u32> {
        let m = self.next.len();
        let mut order = vec![u32::MAX; m];
        let mut queue = VecDeque::new();
        let mut count = 0u32;
        let root = self.root_half_edge as usize;
        order[root] = 0;
        count += 1;
        queue.push_back(root);
        let mut seq = Vec::with_capacity(m);
        while let Some(h) = queue.pop_front() {
            seq.push(h);
            for g in [self.next[h] as usize, self.twin[h] as usize] {
                if order[g] == u32::MAX {
                    order[g] = count;
                    count += 1;
                    queue.push_back(g);
                }
            }
        }
        let pointed = (0..m)
            .filter(|&h| self.vertex[h] == self.pointed_vertex)
            .map(|h| order[h])
            .min()
            .unwrap();
        let mut code = Vec::with_capacity(2 * m + 1);
        for h in seq {
            code.push(order[self.next[h] as usize]);
            code.push(order[self.twin[h] as usize]);
        }
        code.push(pointed);
        code
    }

    /// Same map, forgetting which vertex is pointed.
    pub fn rooted_code(&self) -> Vec<u32> {
        let mut c = self.canonical_code();
        c.pop();
        c
    }

    /// Breadth-first distances from `source`.
    pub fn bfs_metric(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n_vertices];
        bfs_into(&self.adjacency, source, &mut dist);
        dist
    }
}

fn build_adjacency(vertex: &[u32], twin: &[u32], n_vertices: usize) -> Adjacency {
    let mut offsets = vec![0u32; n_vertices + 1];
    for &v in vertex {
        offsets[v as usize + 1] += 1;
    }
    for i in 0..n_vertices {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut targets = vec![0u32; vertex.len()];
    for h in 0..vertex.len() {
        let v = vertex[h] as usize;
        targets[fill[v] as usize] = vertex[twin[h] as usize];
        fill[v] += 1;
    }
    Adjacency { offsets, targets }
}

fn bfs_into(adj: &Adjacency, source: usize, dist: &mut [u32]) {
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source as u32);
    while let Some(u) = queue.pop_front() {
        let u = u as usize;
        let du = dist[u];
        for &w in &adj.targets[adj.offsets[u] as usize..adj.offsets[u + 1] as usize] {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = du + 1;
                queue.push_back(w);
            }
        }
    }
}

/// Breadth-first distances from `source`.
pub fn bfs_metric(quad: &Quadrangulation, source: usize) -> Result<Vec<u32>> {
    if source >= quad.n_vertices {
        return invalid(format!("vertex {source} out of range"));
    }
    Ok(quad.bfs_metric(source))
}

/// Cori–Vauquelin–Schaeffer construction.
///
/// Corner `k` of the contour (vertex `v_k`, label `l_k`) is joined to its
/// successor: the first corner after `k`, cyclically, with label `l_k - 1`,
/// or the extra vertex `v*` when `l_k` is the minimum. The tree edges are
/// then erased. The root is the arc from corner 0, pointing away from the
/// tree for `sign = +1` and towards it for `sign = -1`. Vertex `i < n + 1`
/// is tree vertex `i`; vertex `n + 1` is `v*`.
pub fn cvs_construct(tree: &LabeledPlaneTree, sign: i8) -> Result<Quadrangulation> {
    tree.validate()?;
    if sign != 1 && sign != -1 {
        return invalid("sign must be +1 or -1");
    }
    let n = tree.n_edges;
    let corners = tree.corner_vertices();
    let len = corners.len();
    let label: Vec<i32> = corners.iter().map(|&v| tree.labels[v]).collect();
    let pointed = (n + 1) as u32;

    // successor corner of each corner, or None for v*
    let mut succ: Vec<Option<usize>> = vec![None; len];
    let mut next_with: HashMap<i32, usize> = HashMap::new();
    for j in (0..2 * len).rev() {
        let k = j % len;
        if j < len {
            succ[k] = next_with.get(&(label[k] - 1)).copied().filter(|&q| q < j + len).map(|q| q % len);
        }
        next_with.insert(label[k], j);
    }

    // Arc k joins corner k to succ(k). Half-edge 2k leaves corner k,
    // half-edge 2k + 1 arrives at succ(k) (or v*).
    let m = 2 * len;
    let mut vertex = vec![0u32; m];
    let mut twin = vec![0u32; m];
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); len];
    let mut to_pointed = Vec::new();
    for k in 0..len {
        vertex[2 * k] = corners[k] as u32;
        twin[2 * k] = (2 * k + 1) as u32;
        twin[2 * k + 1] = (2 * k) as u32;
        match succ[k] {
            Some(q) => {
                vertex[2 * k + 1] = corners[q] as u32;
                incoming[q].push(k);
            }
            None => {
                vertex[2 * k + 1] = pointed;
                to_pointed.push(k);
            }
        }
    }

    // Rotation around each vertex. Around a tree vertex the corners come in
    // contour order; inside a corner the arcs fan out by decreasing contour
    // distance to their other end, the arc to v* coming last. Around v* the
    // arcs come in reverse contour order.
    let mut rotation: Vec<Vec<u32>> = vec![Vec::new(); n + 2];
    for k in 0..len {
        let mut fan: Vec<(usize, u32)> = Vec::with_capacity(1 + incoming[k].len());
        let out_offset = succ[k].map_or(0, |q| (q + len - k) % len);
        fan.push((out_offset, (2 * k) as u32));
        for &src in &incoming[k] {
            fan.push(((src + len - k) % len, (2 * src + 1) as u32));
        }
        fan.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        rotation[corners[k]].extend(fan.into_iter().map(|(_, h)| h));
    }
    rotation[n + 1] = to_pointed.iter().rev().map(|&k| (2 * k + 1) as u32).collect();

    let mut rot_next = vec![0u32; m];
    for ring in &rotation {
        for (i, &h) in ring.iter().enumerate() {
            rot_next[h as usize] = ring[(i + 1) % ring.len()];
        }
    }
    let next: Vec<u32> = (0..m).map(|h| rot_next[twin[h] as usize]).collect();
    let root = if sign == 1 { 0 } else { 1 };
    Quadrangulation::from_tables(next, twin, vertex, root, pointed)
}

/// Label-derived distance to `v*`: `l(u) - l_min + 1` for tree vertices.
pub fn label_distances(tree: &LabeledPlaneTree) -> Vec<u32> {
    let min = *tree.labels.iter().min().unwrap();
    let mut d: Vec<u32> = tree.labels.iter().map(|&l| (l - min + 1) as u32).collect();
    d.push(0);
    d
}

/// Serialized form: a header plus the flat half-edge tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadFile {
    pub header: QuadHeader,
    pub next: Vec<u32>,
    pub twin: Vec<u32>,
    pub vertex: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadHeader {
    pub format: String,
    pub n_faces: usize,
    pub n_vertices: usize,
    pub root_half_edge: u32,
    pub pointed_vertex: u32,
    pub seed: Option<u64>,
}

impl QuadFile {
    pub fn from_quad(q: &Quadrangulation, seed: Option<u64>) -> Self {
        Self {
            header: QuadHeader {
                format: "bml-quadrangulation-v1".into(),
                n_faces: q.n_faces,
                n_vertices: q.n_vertices,
                root_half_edge: q.root_half_edge,
                pointed_vertex: q.pointed_vertex,
                seed,
            },
            next: q.next.clone(),
            twin: q.twin.clone(),
            vertex: q.vertex.clone(),
        }
    }

    pub fn into_quad(self) -> Result<Quadrangulation> {
        let q = Quadrangulation::from_tables(
            self.next,
            self.twin,
            self.vertex,
            self.header.root_half_edge,
            self.header.pointed_vertex,
        )?;
        if q.n_faces != self.header.n_faces || q.n_vertices != self.header.n_vertices {
            return Err(Error::Malformed("header counts disagree with tables".into()));
        }
        Ok(q)
    }
}
