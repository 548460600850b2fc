//! Finite approximation of the Brownian map encoded by a snake sample.
//!
//! Grid points `0..n` carry the seed pseudometric
//! `d°(i, j) = Y_i + Y_j - 2 max(min_{[i,j]} Y, min_{[j,i]} Y)`, where
//! `[j,i]` is the complementary arc through both ends of the grid. The map
//! metric is the largest pseudometric below `d°`, i.e. the shortest-path
//! closure of the complete graph weighted by `d°`.

use std::io::{Read, Write};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;
use crate::stochastic::BrownianSnakeSample;

/// Default largest grid accepted by [`quotient_metric`].
pub const DEFAULT_POINT_CAP: usize = 4096;
/// Grids up to this size use Floyd–Warshall; larger ones use Dijkstra.
pub const FLOYD_WARSHALL_LIMIT: usize = 1024;
/// Pseudodistance below which two grid points are tagged as identified.
pub const IDENTIFICATION_TOL: f64 = 1e-12;

/// Seed pseudometric between grid points `i` and `j`.
pub fn d_circ(snake: &BrownianSnakeSample, i: usize, j: usize) -> Result<f64> {
    let y = &snake.y_values;
    let n = y.len();
    if i >= n || j >= n {
        return invalid(format!("index out of range: ({i}, {j}) with n = {n}"));
    }
    if i == j {
        return Ok(0.0);
    }
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    let inner = min_of(&y[a..=b]);
    let outer = min_of(&y[..=a]).min(min_of(&y[b..]));
    Ok(y[a] + y[b] - 2.0 * inner.max(outer))
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Full `n x n` seed pseudometric in row-major order, `O(n^2)`.
pub fn d_circ_matrix(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut prefix = vec![0.0; n];
    let mut suffix = vec![0.0; n];
    let mut m = f64::INFINITY;
    for i in 0..n {
        m = m.min(y[i]);
        prefix[i] = m;
    }
    m = f64::INFINITY;
    for i in (0..n).rev() {
        m = m.min(y[i]);
        suffix[i] = m;
    }
    let mut d = vec![0.0; n * n];
    d.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let mut inner = y[i];
        for j in i + 1..n {
            inner = inner.min(y[j]);
            let outer = prefix[i].min(suffix[j]);
            row[j] = y[i] + y[j] - 2.0 * inner.max(outer);
        }
    });
    for i in 0..n {
        for j in 0..i {
            d[i * n + j] = d[j * n + i];
        }
    }
    d
}

/// The discretized map: grid points with the quotient metric and uniform mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteBrownianMap {
    n: usize,
    dmat: Vec<f64>,
    /// Minimizer of the labels (the root `x`).
    pub root_index: usize,
    /// Grid index 0 (the dual root `y`).
    pub dual_root_index: usize,
    pub grid_times: Vec<f64>,
    pub lifetimes: Vec<f64>,
    pub labels: Vec<f64>,
    /// Smallest index at pseudodistance zero from each point.
    pub identified_with: Vec<usize>,
    /// The label minimum was attained more than once.
    pub non_generic: bool,
}

impl DiscreteBrownianMap {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dmat[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.dmat[i * self.n..(i + 1) * self.n]
    }

    pub fn dmat(&self) -> &[f64] {
        &self.dmat
    }

    /// Mass of each grid point.
    pub fn mass(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// CSV with columns `index,time,X,Y,dist_to_root`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "index,time,X,Y,dist_to_root")?;
        for i in 0..self.n {
            writeln!(
                out,
                "{i},{},{},{},{}",
                self.grid_times[i],
                self.lifetimes[i],
                self.labels[i],
                self.dist(self.root_index, i)
            )?;
        }
        Ok(())
    }
}

/// Shortest-path closure of the seed pseudometric.
pub fn quotient_metric(snake: &BrownianSnakeSample) -> Result<DiscreteBrownianMap> {
    quotient_metric_with_cap(snake, DEFAULT_POINT_CAP)
}

pub fn quotient_metric_with_cap(snake: &BrownianSnakeSample, cap: usize) -> Result<DiscreteBrownianMap> {
    let n = snake.len();
    if n == 0 {
        return invalid("empty snake");
    }
    if n > cap {
        return Err(Error::ResourceLimit(format!(
            "{n} grid points exceeds the cap of {cap} (closure is cubic)"
        )));
    }
    let mut dmat = d_circ_matrix(&snake.y_values);
    if n <= FLOYD_WARSHALL_LIMIT {
        floyd_warshall(&mut dmat, n);
    } else {
        dmat = dense_dijkstra_all(&dmat, n);
    }
    let identified_with = identification_classes(&dmat, n);
    Ok(DiscreteBrownianMap {
        n,
        dmat,
        root_index: snake.s_star_index,
        dual_root_index: 0,
        grid_times: snake.x_path.times().to_vec(),
        lifetimes: snake.x_path.values().to_vec(),
        labels: snake.y_values.clone(),
        identified_with,
        non_generic: snake.tied_minimum,
    })
}

fn floyd_warshall(d: &mut [f64], n: usize) {
    let mut pivot = vec![0.0; n];
    for k in 0..n {
        pivot.copy_from_slice(&d[k * n..(k + 1) * n]);
        d.par_chunks_mut(n).for_each(|row| {
            let dik = row[k];
            for (dij, dkj) in row.iter_mut().zip(&pivot) {
                let via = dik + dkj;
                if via < *dij {
                    *dij = via;
                }
            }
        });
    }
}

/// All-pairs shortest paths on a complete graph by one `O(n^2)` Dijkstra per source.
pub(crate) fn dense_dijkstra_all(w: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(src, dist)| {
        dist.fill(f64::INFINITY);
        dist[src] = 0.0;
        let mut done = vec![false; n];
        for _ in 0..n {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..n {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            let row = &w[u * n..(u + 1) * n];
            for v in 0..n {
                let via = best + row[v];
                if !done[v] && via < dist[v] {
                    dist[v] = via;
                }
            }
        }
    });
    out
}

/// Row `i` of the seed pseudometric in `O(n)`.
fn d_circ_row(y: &[f64], prefix: &[f64], suffix: &[f64], i: usize, row: &mut [f64]) {
    let n = y.len();
    let mut inner = y[i];
    for j in i..n {
        inner = inner.min(y[j]);
        let outer = prefix[i].min(suffix[j]);
        row[j] = y[i] + y[j] - 2.0 * inner.max(outer);
    }
    inner = y[i];
    for j in (0..i).rev() {
        inner = inner.min(y[j]);
        let outer = prefix[j].min(suffix[i]);
        row[j] = y[i] + y[j] - 2.0 * inner.max(outer);
    }
    row[i] = 0.0;
}

/// Quotient-metric distances from one grid point, without the full matrix:
/// dense Dijkstra over the seed pseudometric, `O(n^2)` time and `O(n)` memory.
pub fn distances_from_point(snake: &BrownianSnakeSample, source: usize) -> Result<Vec<f64>> {
    let y = &snake.y_values;
    let n = y.len();
    if source >= n {
        return invalid(format!("point {source} out of range for {n} points"));
    }
    let mut prefix = vec![0.0; n];
    let mut suffix = vec![0.0; n];
    let mut m = f64::INFINITY;
    for i in 0..n {
        m = m.min(y[i]);
        prefix[i] = m;
    }
    m = f64::INFINITY;
    for i in (0..n).rev() {
        m = m.min(y[i]);
        suffix[i] = m;
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut row = vec![0.0; n];
    dist[source] = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for v in 0..n {
            if !done[v] && dist[v] < best {
                best = dist[v];
                u = v;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        d_circ_row(y, &prefix, &suffix, u, &mut row);
        for v in 0..n {
            if !done[v] && best + row[v] < dist[v] {
                dist[v] = best + row[v];
            }
        }
    }
    Ok(dist)
}

fn identification_classes(d: &[f64], n: usize) -> Vec<usize> {
    (0..n)
        .map(|i| {
            (0..=i)
                .find(|&j| d[i * n + j] <= IDENTIFICATION_TOL)
                .unwrap_or(i)
        })
        .collect()
}

/// Two independent uniform grid points, used to re-root experiments.
pub fn resample_marked_points(map: &DiscreteBrownianMap, stream: RngStream) -> (usize, usize) {
    let mut rng = stream.rng();
    (rng.random_range(0..map.n), rng.random_range(0..map.n))
}

/// Header of the binary distance-matrix dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmatHeader {
    pub n: usize,
    pub seed: u64,
    pub grid_size: usize,
    pub root_index: usize,
    pub dual_root_index: usize,
}

/// Binary dump: little-endian `u32` header length, the JSON header, then
/// `n * n` little-endian `f64` values in row-major order.
pub fn write_dmat<W: Write>(map: &DiscreteBrownianMap, seed: u64, mut out: W) -> Result<()> {
    let header = DmatHeader {
        n: map.n,
        seed,
        grid_size: map.n,
        root_index: map.root_index,
        dual_root_index: map.dual_root_index,
    };
    let json = serde_json::to_vec(&header)?;
    out.write_all(&(json.len() as u32).to_le_bytes())?;
    out.write_all(&json)?;
    let mut buf = Vec::with_capacity(map.dmat.len() * 8);
    for v in &map.dmat {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_dmat<R: Read>(mut input: R) -> Result<(DmatHeader, Vec<f64>)> {
    let mut len = [0u8; 4];
    input.read_exact(&mut len)?;
    let mut json = vec![0u8; u32::from_le_bytes(len) as usize];
    input.read_exact(&mut json)?;
    let header: DmatHeader = serde_json::from_slice(&json)?;
    let mut raw = Vec::new();
    input.read_to_end(&mut raw)?;
    if raw.len() != header.n * header.n * 8 {
        return Err(Error::Malformed(format!(
            "expected {} matrix bytes, found {}",
            header.n * header.n * 8,
            raw.len()
        )));
    }
    let values = raw
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    Ok((header, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::{sample_snake, GridPath, PathKind};

    #[test]
    fn single_source_matches_full_closure() {
        let s = sample_snake(300, 1.0, RngStream::new(31, 0)).unwrap();
        let map = quotient_metric(&s).unwrap();
        for src in [0, 7, s.s_star_index, 299] {
            let row = distances_from_point(&s, src).unwrap();
            for (a, b) in row.iter().zip(map.row(src)) {
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
            }
        }
        assert!(distances_from_point(&s, 300).is_err());
    }

    fn fixture() -> BrownianSnakeSample {
        let x = GridPath::new(
            vec![0.0, 0.25, 0.5, 0.75, 1.0],
            vec![0.0, 1.0, 0.5, 2.0, 0.0],
            PathKind::Excursion,
        )
        .unwrap();
        BrownianSnakeSample::from_labels(x, vec![0.0, 1.0, 0.5, 2.0, 0.0]).unwrap()
    }

    #[test]
    fn d_circ_fixture() {
        let s = fixture();
        assert_eq!(d_circ(&s, 1, 3).unwrap(), 2.0);
        assert_eq!(d_circ(&s, 3, 1).unwrap(), 2.0);
        assert_eq!(d_circ(&s, 2, 2).unwrap(), 0.0);
        assert_eq!(d_circ(&s, 0, 4).unwrap(), 0.0);
        assert!(d_circ(&s, 0, 5).is_err());
        let m = d_circ_matrix(&s.y_values);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(m[i * 5 + j], d_circ(&s, i, j).unwrap());
            }
        }
    }

    #[test]
    fn d_circ_dominates_label_gap() {
        let s = sample_snake(200, 1.0, RngStream::new(11, 0)).unwrap();
        let m = d_circ_matrix(&s.y_values);
        for i in 0..200 {
            for j in 0..200 {
                assert!(m[i * 200 + j] >= (s.y_values[i] - s.y_values[j]).abs() - 1e-12);
            }
        }
    }

    #[test]
    fn dijkstra_matches_floyd_warshall() {
        let s = sample_snake(150, 1.0, RngStream::new(12, 0)).unwrap();
        let w = d_circ_matrix(&s.y_values);
        let mut fw = w.clone();
        floyd_warshall(&mut fw, 150);
        let dj = dense_dijkstra_all(&w, 150);
        for (a, b) in fw.iter().zip(&dj) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn endpoints_are_identified() {
        let s = sample_snake(64, 1.0, RngStream::new(13, 0)).unwrap();
        let map = quotient_metric(&s).unwrap();
        assert_eq!(map.dist(0, 63), 0.0);
        assert_eq!(map.identified_with[63], 0);
        assert_eq!(map.dual_root_index, 0);
    }

    #[test]
    fn cap_is_enforced() {
        let s = sample_snake(65, 1.0, RngStream::new(1, 0)).unwrap();
        assert!(matches!(quotient_metric_with_cap(&s, 64), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn dmat_dump_round_trips() {
        let s = sample_snake(33, 1.0, RngStream::new(14, 0)).unwrap();
        let map = quotient_metric(&s).unwrap();
        let mut buf = Vec::new();
        write_dmat(&map, 14, &mut buf).unwrap();
        let (h, v) = read_dmat(buf.as_slice()).unwrap();
        assert_eq!(h.n, 33);
        assert_eq!(h.seed, 14);
        assert_eq!(v, map.dmat);
        assert!(read_dmat(&buf[..buf.len() - 3]).is_err());
    }

    #[test]
    fn csv_export_has_root_distances() {
        let map = quotient_metric(&fixture()).unwrap();
        let mut buf = Vec::new();
        map.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.lines().nth(4).unwrap().starts_with("3,0.75,2,2,2"));
    }
}
