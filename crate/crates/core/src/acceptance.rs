//! The acceptance suite: fourteen numbered checks, each producing a
//! [`CriterionReport`] with a pass flag and the numbers behind it.
//!
//! Every check draws from streams derived from a single seed, so a report
//! is reproducible bit for bit (wall-clock timings are kept out of the
//! serialized form).

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::csbp::*;
use crate::error::{invalid, Result};
use crate::geodesic::*;
use crate::gff::*;
use crate::manifest::RunManifest;
use crate::planar_map::*;
use crate::rng::RngStream;
use crate::snake_map::{d_circ_matrix, distances_from_point, quotient_metric};
use crate::stats::{ks_two_sample, linear_fit, mean_se};
use crate::stochastic::sample_snake;

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const CRITERIA: [u32; 14] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub summary: String,
    pub details: Value,
    #[serde(skip)]
    pub seconds: f64,
}

impl CriterionReport {
    /// One line for the pass/fail table.
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} {} ({:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.summary,
            self.seconds
        )
    }
}

pub fn criterion_name(id: u32) -> &'static str {
    match id {
        1 => "csbp-laplace",
        2 => "csbp-extinction",
        3 => "csbp-scaling",
        4 => "lamperti-round-trip",
        5 => "snake-map-invariants",
        6 => "cvs-bijection",
        7 => "ball-volume-exponent",
        8 => "two-sampler-agreement",
        9 => "merge-ppp",
        10 => "geodesic-oracles",
        11 => "frame-sparsity",
        12 => "dgff-law",
        13 => "strong-confluence",
        14 => "determinism",
        _ => "unknown",
    }
}

/// Runs one criterion with streams derived from `seed`.
pub fn run_criterion(id: u32, seed: u64) -> Result<CriterionReport> {
    let start = Instant::now();
    let (passed, summary, details) = match id {
        1 => csbp_laplace(seed),
        2 => csbp_extinction(seed),
        3 => csbp_scaling(seed),
        4 => lamperti_round_trip(seed),
        5 => snake_invariants(seed, start),
        6 => cvs_bijection(seed),
        7 => ball_volume_exponent(seed),
        8 => two_sampler_agreement(seed),
        9 => merge_ppp(seed),
        10 => geodesic_oracles(seed),
        11 => frame_sparsity(seed),
        12 => dgff_law(seed),
        13 => strong_confluence(seed),
        14 => determinism(seed),
        _ => return invalid(format!("no acceptance criterion {id}")),
    }?;
    Ok(CriterionReport {
        id,
        name: criterion_name(id).to_string(),
        passed,
        summary,
        details,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs the listed criteria in order; `on_report` sees each as it finishes.
pub fn run_suite(ids: &[u32], seed: u64, mut on_report: impl FnMut(&CriterionReport)) -> Result<Vec<CriterionReport>> {
    let mut out = Vec::with_capacity(ids.len());
    for &id in ids {
        let r = run_criterion(id, seed)?;
        on_report(&r);
        out.push(r);
    }
    Ok(out)
}

type Outcome = Result<(bool, String, Value)>;

fn stream(seed: u64, name: &str) -> RngStream {
    RngStream::for_replica(seed, name, 0)
}

const ALPHA: f64 = 1.5;
const C: f64 = 1.0;
const DT: f64 = 1e-3;

fn csbp_marginals(seed: u64, name: &str, y0: f64, times: &[f64], reps: u64) -> Result<Vec<Vec<f64>>> {
    let sampler = CsbpSampler::new(ALPHA, C, DT)?;
    Ok((0..reps)
        .into_par_iter()
        .map(|r| sampler.marginals(y0, times, RngStream::for_replica(seed, name, r)))
        .collect())
}

fn csbp_laplace(seed: u64) -> Outcome {
    let start = Instant::now();
    let times = [0.25, 1.0];
    let paths = csbp_marginals(seed, "c1", 1.0, &times, 100_000)?;
    let mut rows = Vec::new();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for (ti, &t) in times.iter().enumerate() {
        for lambda in [0.5, 1.0, 2.0] {
            let vals: Vec<f64> = paths.iter().map(|p| (-lambda * p[ti]).exp()).collect();
            let m = mean_se(&vals);
            let target = laplace_transform(ALPHA, C, 1.0, lambda, t);
            let tol = 3.0 * m.se + 0.01;
            let err = (m.mean - target).abs();
            ok &= err < tol;
            worst = worst.max(err / tol);
            rows.push(json!({"t": t, "lambda": lambda, "estimate": m.mean, "se": m.se, "target": target}));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let fast = secs < 120.0;
    Ok((
        ok && fast,
        format!("worst |err|/tol = {worst:.3} over 6 cells, runtime {}", if fast { "< 2 min" } else { ">= 2 min" }),
        json!({"rows": rows, "paths": 100_000, "dt": DT}),
    ))
}

fn csbp_extinction(seed: u64) -> Outcome {
    let paths = csbp_marginals(seed, "c2", 1.0, &[1.0], 100_000)?;
    let alive = paths.iter().filter(|p| p[0] > 0.0).count() as f64 / paths.len() as f64;
    let target = survival_probability(ALPHA, C, 1.0, 1.0);
    let ok = (alive - target).abs() <= 0.01;
    Ok((ok, format!("survival {alive:.4} vs {target:.4}"), json!({"frequency": alive, "target": target})))
}

fn csbp_scaling(seed: u64) -> Outcome {
    // with C = 4: Y_{C^{1/2} t} / C from 4 against Y_t from 1, t = 1/2
    let big = csbp_marginals(seed, "c3-big", 4.0, &[1.0], 100_000)?;
    let small = csbp_marginals(seed, "c3-small", 1.0, &[0.5], 100_000)?;
    let a: Vec<f64> = big.iter().map(|p| p[0] / 4.0).collect();
    let b: Vec<f64> = small.iter().map(|p| p[0]).collect();
    let ks = ks_two_sample(&a, &b);
    Ok((ks < 0.02, format!("KS = {ks:.4} (< 0.02)"), json!({"ks": ks, "replicas": 100_000})))
}

fn lamperti_round_trip(seed: u64) -> Outcome {
    let lc = levy_coefficient(ALPHA, C);
    let results: Vec<Result<bool>> = (0..1000u64)
        .into_par_iter()
        .map(|r| {
            let lp = sample_levy(ALPHA, lc, 1.0, 4.0, DT, true, RngStream::for_replica(seed, "c4", r))?;
            let cp = lamperti_levy_to_csbp(&lp)?;
            let back = lamperti_csbp_to_levy(&cp)?;
            let s = lp.path.times();
            let x = lp.path.values();
            let last = back.path.len() - 1;
            let dev = (0..last).map(|k| (back.path.interpolate(s[k]) - x[k]).abs()).fold(0.0, f64::max);
            Ok(dev < 10.0 * DT.sqrt() * lp.path.sup())
        })
        .collect();
    let mut ok = 0;
    for r in results {
        ok += usize::from(r?);
    }
    Ok((ok >= 990, format!("{ok} / 1000 paths within tolerance"), json!({"within": ok, "paths": 1000})))
}

fn rel_ok(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()) + 1e-15
}

/// Chain infimum by exhaustive search over ordered chains of distinct points.
fn chain_oracle(dc: &[f64], n: usize) -> Vec<f64> {
    fn rec(dc: &[f64], n: usize, u: usize, len: f64, used: &mut Vec<bool>, best: &mut [f64]) {
        for v in 0..n {
            if !used[v] {
                let l = len + dc[u * n + v];
                best[v] = best[v].min(l);
                used[v] = true;
                rec(dc, n, v, l, used, best);
                used[v] = false;
            }
        }
    }
    let mut out = vec![0.0; n * n];
    for a in 0..n {
        let mut best = vec![f64::INFINITY; n];
        best[a] = 0.0;
        let mut used = vec![false; n];
        used[a] = true;
        rec(dc, n, a, 0.0, &mut used, &mut best);
        out[a * n..(a + 1) * n].copy_from_slice(&best);
    }
    out
}

fn snake_invariants(seed: u64, start: Instant) -> Outcome {
    let snake = sample_snake(512, 1.0, stream(seed, "c5"))?;
    let map = quotient_metric(&snake)?;
    let n = map.len();
    let y = &map.labels;
    let dc = d_circ_matrix(y);
    let ymin = y.iter().copied().fold(f64::INFINITY, f64::min);
    let mut failures = BTreeMap::<&str, usize>::new();
    for i in 0..n {
        if !rel_ok(map.dist(map.root_index, i), y[i] - ymin) {
            *failures.entry("root-formula").or_default() += 1;
        }
        for j in 0..n {
            let d = map.dist(i, j);
            if d > dc[i * n + j] * (1.0 + 1e-9) + 1e-12 {
                *failures.entry("dominated").or_default() += 1;
            }
            if d < (y[i] - y[j]).abs() * (1.0 - 1e-9) - 1e-12 {
                *failures.entry("cactus").or_default() += 1;
            }
        }
    }
    let tri: usize = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut bad = 0;
            for j in 0..n {
                let dij = map.dist(i, j);
                for k in 0..n {
                    if dij > (map.dist(i, k) + map.dist(k, j)) * (1.0 + 1e-9) + 1e-12 {
                        bad += 1;
                    }
                }
            }
            bad
        })
        .sum();
    if tri > 0 {
        failures.insert("triangle", tri);
    }
    let mut chain_cases = 0;
    for r in 0..50 {
        let small = sample_snake(6, 1.0, RngStream::for_replica(seed, "c5-chain", r))?;
        let m = quotient_metric(&small)?;
        let oracle = chain_oracle(&d_circ_matrix(&m.labels), 6);
        for (a, b) in m.dmat().iter().zip(&oracle) {
            if !rel_ok(*a, *b) {
                *failures.entry("chain-oracle").or_default() += 1;
            }
        }
        chain_cases += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = failures.is_empty() && secs < 60.0;
    Ok((
        ok,
        format!("n = {n}: {} violations, {chain_cases} chain-oracle maps at n = 6", failures.values().sum::<usize>()),
        json!({"n": n, "violations": failures}),
    ))
}

fn cvs_bijection(seed: u64) -> Outcome {
    let mut problems = Vec::new();
    for n in 1..=3usize {
        let mut pointed = HashSet::new();
        let mut rooted: HashMap<Vec<u32>, usize> = HashMap::new();
        for t in all_labeled_trees(n) {
            for sign in [1, -1] {
                let q = cvs_construct(&t, sign)?;
                if (q.n_vertices, q.n_edges()) != (n + 2, 2 * n) {
                    problems.push(format!("n = {n}: wrong Euler counts"));
                }
                if !pointed.insert(q.canonical_code()) {
                    problems.push(format!("n = {n}: CVS not injective"));
                }
                *rooted.entry(q.rooted_code()).or_default() += 1;
            }
        }
        // rooted quadrangulations with n faces: 2 * 3^n (2n)! / (n! (n+2)!)
        let expected = [2usize, 9, 54][n - 1];
        if rooted.len() != expected || rooted.values().any(|&m| m != n + 2) {
            problems.push(format!("n = {n}: {} rooted maps, multiplicities off", rooted.len()));
        }
    }
    let bad: usize = (0..100u64)
        .into_par_iter()
        .map(|r| -> Result<usize> {
            let (t, q) = sample_quadrangulation(10_000, RngStream::for_replica(seed, "c6", r))?;
            q.validate()?;
            let euler = q.n_vertices + q.n_faces == q.n_edges() + 2;
            let ident = q.bfs_metric(q.pointed_vertex as usize) == label_distances(&t);
            Ok(usize::from(!(euler && ident)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    if bad > 0 {
        problems.push(format!("{bad} of 100 samples at n = 10^4 fail"));
    }
    Ok((
        problems.is_empty(),
        if problems.is_empty() { "exhaustive n <= 3 and 100 samples at n = 10^4 agree".into() } else { problems.join("; ") },
        json!({"problems": problems}),
    ))
}

fn ball_volume_exponent(seed: u64) -> Outcome {
    let (_, q) = sample_quadrangulation(50_000, stream(seed, "c7-map"))?;
    let radii = [2u32, 4, 8, 16, 32];
    let mut rng = stream(seed, "c7-centers").rng();
    let centers: Vec<usize> = (0..50).map(|_| rng.random_range(0..q.n_vertices)).collect();
    let vols: Vec<Vec<usize>> = centers
        .par_iter()
        .map(|&c| ball_volumes(&q, c, &radii))
        .collect::<Result<_>>()?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for v in &vols {
        for (r, &vol) in radii.iter().zip(v) {
            xs.push(f64::from(*r).ln());
            ys.push((vol as f64).ln());
        }
    }
    let fit = linear_fit(&xs, &ys);
    let mean_vol: Vec<f64> = (0..radii.len())
        .map(|k| vols.iter().map(|v| v[k] as f64).sum::<f64>() / vols.len() as f64)
        .collect();
    let ok = (3.3..=4.7).contains(&fit.slope);
    Ok((
        ok,
        format!("slope {:.3} +- {:.3} (target [3.3, 4.7])", fit.slope, fit.slope_se),
        json!({"slope": fit.slope, "slope_se": fit.slope_se, "radii": radii, "mean_volume": mean_vol, "vertices": q.n_vertices}),
    ))
}

fn two_sampler_agreement(seed: u64) -> Outcome {
    let quad: Vec<Vec<f64>> = (0..20u64)
        .into_par_iter()
        .map(|id| -> Result<Vec<f64>> {
            let (_, m) = sample_quadrangulation(50_000, RngStream::for_replica(seed, "c8-quad", id))?;
            let mut rng = RngStream::for_replica(seed, "c8-thin", id).rng();
            let root = m.pointed_vertex as usize;
            Ok(m.bfs_metric(root)
                .into_iter()
                .enumerate()
                .filter(|&(v, _)| v != root && rng.random::<f64>() < 0.1)
                .map(|(_, d)| f64::from(d))
                .collect())
        })
        .collect::<Result<_>>()?;
    let snake: Vec<Vec<f64>> = (0..100u64)
        .into_par_iter()
        .map(|id| -> Result<Vec<f64>> {
            let s = sample_snake(2048, 1.0, RngStream::for_replica(seed, "c8-snake", id))?;
            let d = distances_from_point(&s, s.s_star_index)?;
            Ok(d.into_iter().enumerate().filter(|&(i, _)| i != s.s_star_index && i % 2 == 0).map(|(_, x)| x).collect())
        })
        .collect::<Result<_>>()?;
    let quad: Vec<f64> = quad.into_iter().flatten().collect();
    let snake: Vec<f64> = snake.into_iter().flatten().collect();
    let kappa = calibrate_scaling(&quad, &snake)?;
    let scaled: Vec<f64> = quad.iter().map(|d| d * kappa).collect();
    let ks = ks_two_sample(&scaled, &snake);
    Ok((
        ks < 0.08,
        format!("KS = {ks:.4} (< 0.08), kappa = {kappa:.5}"),
        json!({"ks": ks, "kappa": kappa, "quad_samples": quad.len(), "snake_samples": snake.len()}),
    ))
}

fn merge_ppp(seed: u64) -> Outcome {
    let x_min = 0.05;
    let cases = [(0.05, 1.0), (0.1, 0.5), (0.2, 1.0), (0.1, 0.1)];
    let ppps: Vec<MergePpp> = (0..100_000u64)
        .into_par_iter()
        .map(|r| sample_merge_ppp(x_min, RngStream::for_replica(seed, "c9", r)))
        .collect::<Result<_>>()?;
    let mut ok = true;
    let mut rows = Vec::new();
    for (w, ell) in cases {
        let counts: Vec<f64> = ppps.iter().map(|p| p.count_above(w, ell) as f64).collect();
        let m = mean_se(&counts);
        let target = merge_count_mean(w, ell);
        ok &= (m.mean - target).abs() < 3.0 * m.se;
        rows.push(json!({"w": w, "ell": ell, "mean": m.mean, "se": m.se, "target": target}));
    }
    Ok((ok, format!("{} (w, l) cases, 10^5 replicas", cases.len()), json!({"rows": rows})))
}

/// Connected random graph with integer weights in 1..=3.
fn random_graph(n: usize, extra: usize, stream: RngStream) -> Result<WeightedGraph> {
    let mut rng = stream.rng();
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.random_range(0..v), v, f64::from(rng.random_range(1..=3u8))));
    }
    for _ in 0..extra {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != b {
            edges.push((a, b, f64::from(rng.random_range(1..=3u8))));
        }
    }
    WeightedGraph::new(n, &edges)
}

fn neighbors(g: &WeightedGraph, u: usize) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    g.for_each_neighbor(u, |v, w| out.push((v, w)));
    out
}

/// Every simple path from `a` to `b` of total weight `d(a, b)`.
fn brute_geodesics(g: &WeightedGraph, a: usize, b: usize) -> BTreeSet<Vec<usize>> {
    fn rec(g: &WeightedGraph, path: &mut Vec<usize>, len: f64, b: usize, target: f64, out: &mut BTreeSet<Vec<usize>>) {
        let u = *path.last().unwrap();
        if u == b {
            if len == target {
                out.insert(path.clone());
            }
            return;
        }
        for (v, w) in neighbors(g, u) {
            if !path.contains(&v) && len + w <= target {
                path.push(v);
                rec(g, path, len + w, b, target, out);
                path.pop();
            }
        }
    }
    let target = g.distances_from(a)[b];
    let mut out = BTreeSet::new();
    rec(g, &mut vec![a], 0.0, b, target, &mut out);
    out
}

/// Signature read off a path set: distinct first steps, distinct last
/// steps, and the number of extra ways of arriving at interior vertices.
fn brute_signature(paths: &BTreeSet<Vec<usize>>) -> NetworkSignature {
    let i = paths.iter().map(|p| p[1]).collect::<BTreeSet<_>>().len();
    let j = paths.iter().map(|p| p[p.len() - 2]).collect::<BTreeSet<_>>().len();
    let end = paths.iter().next().unwrap().last().copied().unwrap();
    let mut preds: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for p in paths {
        for w in p.windows(2) {
            preds.entry(w[1]).or_default().insert(w[0]);
        }
    }
    let k = preds.iter().filter(|(z, _)| **z != end).map(|(_, s)| s.len() - 1).sum();
    NetworkSignature { i, j, k }
}

/// Exhaustive star: all center-rooted geodesic segments stopped at the
/// first vertex at distance >= radius, then the largest pairwise disjoint
/// family (capped at `k`).
fn brute_star(g: &WeightedGraph, center: usize, k: usize, radius: f64) -> usize {
    fn segments(g: &WeightedGraph, dc: &[f64], r: f64, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let u = *path.last().unwrap();
        if dc[u] >= r {
            out.push(path[1..].to_vec());
            return;
        }
        let mut next: Vec<usize> = neighbors(g, u).into_iter().filter(|&(v, w)| dc[u] + w == dc[v]).map(|(v, _)| v).collect();
        next.dedup();
        let next: BTreeSet<usize> = next.into_iter().collect();
        for v in next {
            path.push(v);
            segments(g, dc, r, path, out);
            path.pop();
        }
    }
    fn search(segs: &[Vec<usize>], from: usize, used: &mut Vec<usize>, count: usize, k: usize, best: &mut usize) {
        *best = (*best).max(count.min(k));
        for i in from..segs.len() {
            if segs[i].iter().all(|v| !used.contains(v)) {
                let mark = used.len();
                used.extend(&segs[i]);
                search(segs, i + 1, used, count + 1, k, best);
                used.truncate(mark);
            }
        }
    }
    let dc = g.distances_from(center);
    let mut segs = Vec::new();
    segments(g, &dc, radius, &mut vec![center], &mut segs);
    let mut best = 0;
    search(&segs, 0, &mut Vec::new(), 0, k, &mut best);
    best
}

/// `j` arms from `u` to a hub, a trunk edge, then `k` arms to `v`.
pub fn normal_network(j: usize, k: usize) -> Result<(WeightedGraph, usize, usize)> {
    let (u, m, c, v) = (0, 1, 2, 3);
    let mut edges = vec![(m, c)];
    let mut next = 4;
    for _ in 0..j {
        edges.extend([(u, next), (next, m)]);
        next += 1;
    }
    for _ in 0..k {
        edges.extend([(c, next), (next, v)]);
        next += 1;
    }
    Ok((WeightedGraph::unit(next, &edges)?, u, v))
}

fn geodesic_oracles(seed: u64) -> Outcome {
    let mut mismatches = Vec::new();
    let (mut bundles, mut stars, mut classified) = (0usize, 0usize, 0usize);
    for r in 0..100u64 {
        let n = 5 + r as usize % 6;
        let g = random_graph(n, n, RngStream::for_replica(seed, "c10", r))?;
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let bundle = enumerate_geodesics(&g, a, b, Some(0.0), 100_000)?;
                let got: BTreeSet<Vec<usize>> = bundle.paths.iter().map(|p| p.vertices.clone()).collect();
                let want = brute_geodesics(&g, a, b);
                if got != want || bundle.truncated {
                    mismatches.push(format!("bundle graph {r} ({a}, {b})"));
                    continue;
                }
                bundles += 1;
                if classify_network(&bundle)? != brute_signature(&want) {
                    mismatches.push(format!("signature graph {r} ({a}, {b})"));
                }
                classified += 1;
            }
            for radius in [1.0, 2.0, 3.0] {
                let rep = star_at(&g, a, 6, radius)?;
                if rep.skipped {
                    continue;
                }
                if rep.k != brute_star(&g, a, 6, radius) {
                    mismatches.push(format!("star graph {r} center {a} radius {radius}"));
                }
                stars += 1;
            }
        }
    }
    let mut normals = 0;
    for j in 1..=3 {
        for k in 1..=3 {
            let (g, u, v) = normal_network(j, k)?;
            let b = enumerate_geodesics(&g, u, v, None, 1000)?;
            if classify_network(&b)? != (NetworkSignature { i: j, j: k, k: j - 1 }) {
                mismatches.push(format!("normal ({j}, {k})"));
            }
            normals += 1;
        }
    }
    Ok((
        mismatches.is_empty(),
        format!("{bundles} bundles, {classified} signatures, {stars} stars, {normals} normal networks; {} mismatches", mismatches.len()),
        json!({"mismatches": mismatches}),
    ))
}

const FRAME_SCALES: [f64; 8] = [2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 20.0];

fn frame_sparsity(seed: u64) -> Outcome {
    let (_, q) = sample_quadrangulation(50_000, stream(seed, "c11-map"))?;
    let frame = frame_box_dimension(&q, 50, &FRAME_SCALES, stream(seed, "c11-pairs"))?;
    let all: Vec<usize> = (0..q.len()).collect();
    let whole = box_dimension(&q, &all, &FRAME_SCALES)?;
    let gap = whole.slope - frame.slope;
    let mut fractions = Vec::new();
    for n in [64usize, 128, 256] {
        let field = sample_dgff(n, RngStream::for_replica(seed, "c11-gff", n as u64))?;
        let metric = WeightedMetric::new(&field, DEFAULT_GAMMA)?;
        let pairs = random_boundary_pairs(&field, 20, RngStream::for_replica(seed, "c11-gff-pairs", n as u64));
        let overlay = geodesic_overlay(&metric, &pairs)?;
        fractions.push(frame_fraction(&metric, &overlay));
    }
    let decreasing = fractions.windows(2).all(|w| w[1] < w[0]);
    let in_range = (0.7..=1.8).contains(&frame.slope);
    Ok((
        in_range && gap >= 1.0 && decreasing,
        format!(
            "frame slope {:.3}, whole {:.3}, gap {gap:.3} (>= 1.0); GFF fractions {:.4} > {:.4} > {:.4}",
            frame.slope, whole.slope, fractions[0], fractions[1], fractions[2]
        ),
        json!({"frame": frame, "whole": whole, "gap": gap, "gff_fractions": fractions}),
    ))
}

/// Green's function of the interior Dirichlet Laplacian by a dense solve.
fn dirichlet_green(n: usize) -> Option<DMatrix<f64>> {
    let m = n - 2;
    let mut lap = DMatrix::<f64>::zeros(m * m, m * m);
    for r in 0..m {
        for c in 0..m {
            let i = r * m + c;
            lap[(i, i)] = 4.0;
            if c + 1 < m {
                lap[(i, i + 1)] = -1.0;
                lap[(i + 1, i)] = -1.0;
            }
            if r + 1 < m {
                lap[(i, i + m)] = -1.0;
                lap[(i + m, i)] = -1.0;
            }
        }
    }
    lap.lu().solve(&DMatrix::identity(m * m, m * m))
}

fn dgff_law(seed: u64) -> Outcome {
    let n = 9;
    let Some(green) = dirichlet_green(n) else {
        return invalid("singular Laplacian");
    };
    let center = (n - 2) * (n - 2) / 2;
    let target = green[(center, center)];
    let squares: Vec<f64> = (0..10_000u64)
        .into_par_iter()
        .map(|r| sample_dgff(n, RngStream::for_replica(seed, "c12", r)).map(|f| f.get(n / 2, n / 2).powi(2)))
        .collect::<Result<_>>()?;
    let m = mean_se(&squares);
    let var_ok = (m.mean - target).abs() < 3.0 * m.se;

    let mut fixtures_ok = true;
    let zero = GffField::zero(5)?;
    fixtures_ok &= path_length(&zero, DEFAULT_GAMMA, &[0, 1, 2, 7, 12])? == 5.0;
    let mut f = GffField::zero(5)?;
    f.values[12] = 2f64.ln();
    fixtures_ok &= path_length(&f, 1.0, &[12])? == 2.0;
    fixtures_ok &= path_length(&f, 1.0, &[7, 12, 17])? == 4.0;
    fixtures_ok &= path_length(&f, 1.0, &[0, 6]).is_err() && path_length(&f, 1.0, &[]).is_err();
    let field = sample_dgff(12, stream(seed, "c12-fixture"))?;
    let path = [13, 14, 26, 38, 37, 49];
    let direct: f64 = path.iter().map(|&v| (0.7 * field.values[v]).exp()).sum();
    fixtures_ok &= path_length(&field, 0.7, &path)? == direct;
    Ok((
        var_ok && fixtures_ok,
        format!("center variance {:.4} +- {:.4} vs {target:.4}; fixtures {}", m.mean, m.se, if fixtures_ok { "exact" } else { "WRONG" }),
        json!({"variance": m.mean, "se": m.se, "green": target, "fixtures_exact": fixtures_ok}),
    ))
}

fn strong_confluence(seed: u64) -> Outcome {
    let (_, q) = sample_quadrangulation(50_000, stream(seed, "c13-map"))?;
    let eps = [0.0, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0];
    let rep = strong_confluence_statistic(&q, &eps, 1000, stream(seed, "c13"))?;
    let ok = rep.max_deficit_at_zero == 0.0 && rep.violation_mass < 0.05;
    Ok((
        ok,
        format!(
            "max deficit at H = 0: {}, violation mass {:.4} (< 0.05), fitted c = {:.3}",
            rep.max_deficit_at_zero, rep.violation_mass, rep.fitted_c
        ),
        json!({"rows": rep.rows, "fitted_c": rep.fitted_c, "diameter_estimate": rep.diameter_estimate,
               "max_deficit_at_zero": rep.max_deficit_at_zero, "violation_mass": rep.violation_mass}),
    ))
}

/// Each driver command, run twice from the same arguments into separate
/// directories; the output digests recorded in the manifests must agree.
fn determinism(seed: u64) -> Outcome {
    let base = std::env::temp_dir().join(format!("bml-determinism-{}-{seed}", std::process::id()));
    let seed_s = seed.to_string();
    let commands: Vec<(&str, Vec<String>)> = vec![
        ("sample-snake", args(&["sample-snake", "--n", "512", "--seed", &seed_s])),
        ("sample-quad", args(&["sample-quad", "--n", "2000", "--seed", &seed_s])),
        ("csbp", args(&["csbp", "--alpha", "1.5", "--c", "1", "--y0", "1", "--t", "1", "--lambda", "1", "--reps", "2000", "--seed", &seed_s])),
        ("merge-ppp", args(&["merge-ppp", "--w", "0.1", "--ell", "0.5", "--reps", "2000", "--seed", &seed_s])),
        ("gff", args(&["gff", "--n", "32", "--pairs", "5", "--seed", &seed_s])),
        ("acceptance", args(&["acceptance", "--suite", "primary", "--only", "9,12", "--seed", &seed_s])),
    ];
    let mut rows = Vec::new();
    let mut ok = true;
    for (name, cmd) in &commands {
        let mut digests = Vec::new();
        for (run, threads) in [(0, "1"), (1, "4")] {
            let out = base.join(format!("{name}-{run}"));
            let mut full = cmd.clone();
            full.extend(args(&["--threads", threads, "--out"]));
            full.push(out.to_string_lossy().into_owned());
            let code = crate::cli::run_quiet(&full);
            if code != 0 {
                ok = false;
                rows.push(json!({"command": name, "exit": code}));
                break;
            }
            digests.push(output_digests(&out)?);
        }
        if digests.len() == 2 {
            let same = digests[0] == digests[1] && !digests[0].is_empty();
            ok &= same;
            rows.push(json!({"command": name, "identical": same, "files": digests[0].len()}));
        }
    }
    // the analyze command re-reads a stored map
    let quad_file = base.join("sample-quad-0").join("quadrangulation.json");
    let mut digests = Vec::new();
    for run in 0..2 {
        let out = base.join(format!("analyze-{run}"));
        let mut cmd = args(&["analyze", "--pairs", "5", "--centers", "5", "--seed", &seed_s, "--input"]);
        cmd.push(quad_file.to_string_lossy().into_owned());
        cmd.push("--out".into());
        cmd.push(out.to_string_lossy().into_owned());
        if crate::cli::run_quiet(&cmd) != 0 {
            ok = false;
            break;
        }
        digests.push(output_digests(&out)?);
    }
    if digests.len() == 2 {
        let same = digests[0] == digests[1];
        ok &= same;
        rows.push(json!({"command": "analyze", "identical": same, "files": digests[0].len()}));
    }
    let _ = std::fs::remove_dir_all(&base);
    Ok((ok, format!("{} commands re-run with identical digests", rows.len()), json!({"commands": rows})))
}

fn args(a: &[&str]) -> Vec<String> {
    a.iter().map(|s| s.to_string()).collect()
}

/// Output digests recorded by the manifest in `dir`, keyed by file name.
fn output_digests(dir: &Path) -> Result<BTreeMap<String, String>> {
    Ok(RunManifest::read(&dir.join("manifest.json"))?.outputs)
}
