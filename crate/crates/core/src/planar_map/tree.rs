use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::RngStream;

/// Rooted plane tree with integer vertex labels.
///
/// Vertices are numbered in order of first visit by the contour walk; the
/// root is vertex 0 and has label 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPlaneTree {
    pub n_edges: usize,
    /// Dyck path of `+1` (away from the root) and `-1` steps, length `2 n_edges`.
    pub contour: Vec<i8>,
    pub labels: Vec<i32>,
}

impl LabeledPlaneTree {
    pub fn new(contour: Vec<i8>, labels: Vec<i32>) -> Result<Self> {
        let tree = Self { n_edges: contour.len() / 2, contour, labels };
        tree.validate()?;
        Ok(tree)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_edges + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_edges == 0 || self.contour.len() != 2 * self.n_edges {
            return invalid("contour must have positive even length");
        }
        let mut h: i64 = 0;
        for &s in &self.contour {
            if s != 1 && s != -1 {
                return invalid("contour steps must be +1 or -1");
            }
            h += i64::from(s);
            if h < 0 {
                return invalid("contour goes below zero");
            }
        }
        if h != 0 {
            return invalid("contour does not return to zero");
        }
        if self.labels.len() != self.n_vertices() {
            return invalid("one label per vertex required");
        }
        if self.labels[0] != 0 {
            return invalid("root label must be 0");
        }
        for (parent, child) in self.edges() {
            if (self.labels[parent] - self.labels[child]).abs() > 1 {
                return invalid("labels must change by at most 1 along an edge");
            }
        }
        Ok(())
    }

    /// `(parent, child)` pairs in order of the child's index.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut stack = vec![0usize];
        let mut next = 1;
        let mut edges = Vec::with_capacity(self.n_edges);
        for &s in &self.contour {
            if s == 1 {
                edges.push((*stack.last().unwrap(), next));
                stack.push(next);
                next += 1;
            } else {
                stack.pop();
            }
        }
        edges
    }

    /// Vertex at each of the `2 n` corners, in contour order.
    pub fn corner_vertices(&self) -> Vec<usize> {
        let mut stack = vec![0usize];
        let mut next = 1;
        let mut corners = Vec::with_capacity(self.contour.len());
        for &s in &self.contour {
            corners.push(*stack.last().unwrap());
            if s == 1 {
                stack.push(next);
                next += 1;
            } else {
                stack.pop();
            }
        }
        corners
    }
}

/// Uniform Dyck path of semilength `n` by the cycle lemma: a uniform
/// arrangement of `n` up-steps and `n + 1` down-steps has exactly one cyclic
/// rotation whose proper prefixes stay nonnegative; dropping its final
/// down-step leaves the Dyck path.
pub fn uniform_dyck_path<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<i8> {
    let mut steps: Vec<i8> = std::iter::repeat_n(1i8, n)
        .chain(std::iter::repeat_n(-1i8, n + 1))
        .collect();
    steps.shuffle(rng);
    let mut h = 0i64;
    let mut min_h = 0i64;
    let mut start = 0;
    for (i, &s) in steps.iter().enumerate() {
        h += i64::from(s);
        if h < min_h {
            min_h = h;
            start = i + 1;
        }
    }
    let len = steps.len();
    let rotated: Vec<i8> = (0..len).map(|i| steps[(start + i) % len]).collect();
    rotated[..len - 1].to_vec()
}

/// Uniform plane tree with `n_edges` edges and i.i.d. uniform `{-1, 0, +1}`
/// label increments along edges.
pub fn sample_labeled_tree(n_edges: usize, stream: RngStream) -> Result<LabeledPlaneTree> {
    if n_edges == 0 {
        return invalid("a tree needs at least one edge");
    }
    let mut rng = stream.rng();
    let contour = uniform_dyck_path(n_edges, &mut rng);
    let mut labels = vec![0i32; n_edges + 1];
    let mut stack = vec![0usize];
    let mut next = 1;
    for &s in &contour {
        if s == 1 {
            let parent = *stack.last().unwrap();
            labels[next] = labels[parent] + rng.random_range(-1..=1);
            stack.push(next);
            next += 1;
        } else {
            stack.pop();
        }
    }
    Ok(LabeledPlaneTree { n_edges, contour, labels })
}

/// Every plane tree with `n` edges, as Dyck paths.
pub fn all_dyck_paths(n: usize) -> Vec<Vec<i8>> {
    fn rec(up: usize, down: usize, cur: &mut Vec<i8>, out: &mut Vec<Vec<i8>>) {
        if up == 0 && down == 0 {
            out.push(cur.clone());
            return;
        }
        if up > 0 {
            cur.push(1);
            rec(up - 1, down + 1, cur, out);
            cur.pop();
        }
        if down > 0 {
            cur.push(-1);
            rec(up, down - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, 0, &mut Vec::new(), &mut out);
    out
}

/// Every labeled tree with `n` edges (`3^n` labelings per shape).
pub fn all_labeled_trees(n: usize) -> Vec<LabeledPlaneTree> {
    let mut out = Vec::new();
    for contour in all_dyck_paths(n) {
        let shape = LabeledPlaneTree { n_edges: n, contour, labels: vec![0; n + 1] };
        let edges = shape.edges();
        for code in 0..3usize.pow(n as u32) {
            let mut labels = vec![0i32; n + 1];
            let mut c = code;
            for &(parent, child) in &edges {
                labels[child] = labels[parent] + (c % 3) as i32 - 1;
                c /= 3;
            }
            out.push(LabeledPlaneTree { n_edges: n, contour: shape.contour.clone(), labels });
        }
    }
    out
}
