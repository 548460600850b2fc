use std::collections::BTreeSet;

use bml_core::geodesic::*;
use bml_core::planar_map::sample_quadrangulation;
use bml_core::{Error, RngStream};
use rand::Rng;

/// Connected random graph with integer weights in 1..=3.
fn random_graph(n: usize, extra: usize, seed: u64) -> WeightedGraph {
    let mut rng = RngStream::new(seed, 0).rng();
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
    WeightedGraph::new(n, &edges).unwrap()
}

fn all_pairs<S: Space>(s: &S) -> Vec<Vec<f64>> {
    (0..s.len()).map(|u| s.distances_from(u)).collect()
}

/// All simple paths from a to b whose summed edge weights equal d(a, b).
fn brute_geodesics(g: &WeightedGraph, a: usize, b: usize) -> BTreeSet<Vec<usize>> {
    let target = g.distances_from(a)[b];
    let mut out = BTreeSet::new();
    fn rec(g: &WeightedGraph, path: &mut Vec<usize>, len: f64, b: usize, target: f64, out: &mut BTreeSet<Vec<usize>>) {
        let u = *path.last().unwrap();
        if u == b {
            if len == target {
                out.insert(path.clone());
            }
            return;
        }
        let mut next = Vec::new();
        g.for_each_neighbor(u, |v, w| next.push((v, w)));
        for (v, w) in next {
            if !path.contains(&v) && len + w <= target {
                path.push(v);
                rec(g, path, len + w, b, target, out);
                path.pop();
            }
        }
    }
    rec(g, &mut vec![a], 0.0, b, target, &mut out);
    out
}

fn vertex_sets(bundle: &GeodesicBundle) -> BTreeSet<Vec<usize>> {
    bundle.paths.iter().map(|p| p.vertices.clone()).collect()
}

#[test]
fn path_and_cycle_fixtures() {
    let p = WeightedGraph::path(3);
    let b = enumerate_geodesics(&p, 0, 2, None, 100).unwrap();
    assert_eq!(vertex_sets(&b), BTreeSet::from([vec![0, 1, 2]]));
    assert_eq!(b.signature, Some(NetworkSignature { i: 1, j: 1, k: 0 }));
    let c = WeightedGraph::cycle(4);
    let b = enumerate_geodesics(&c, 0, 2, None, 100).unwrap();
    assert_eq!(b.paths.len(), 2);
    assert!(enumerate_geodesics(&c, 1, 1, None, 10).is_err());
}

#[test]
fn bundles_match_brute_force_on_random_graphs() {
    for seed in 0..60 {
        let n = 6 + seed as usize % 5;
        let g = random_graph(n, n, seed);
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let bundle = enumerate_geodesics(&g, a, b, Some(0.0), 10_000).unwrap();
                assert!(!bundle.truncated);
                assert_eq!(vertex_sets(&bundle), brute_geodesics(&g, a, b));
                for p in &bundle.paths {
                    assert_eq!(p.length(), bundle.length);
                    assert_eq!(*p, GeodesicPath::from_vertices(&g, p.vertices.clone()).unwrap());
                }
            }
        }
    }
}

#[test]
fn dense_metric_bundles_are_maximal_tight_chains() {
    for seed in 0..20 {
        let g = random_graph(7, 8, 100 + seed);
        let d = all_pairs(&g);
        let flat: Vec<f64> = d.iter().flatten().copied().collect();
        let m = DenseMetric::new(7, flat).unwrap();
        for a in 0..7 {
            for b in 0..7 {
                if a == b {
                    continue;
                }
                // every ordered chain a .. b of distinct points with total d(a, b),
                // kept when no point can be inserted between neighbours
                let mut chains = BTreeSet::new();
                let others: Vec<usize> = (0..7).filter(|&x| x != a && x != b).collect();
                for mask in 0u32..(1 << others.len()) {
                    let inner: Vec<usize> = others.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect();
                    let mut mid = inner.clone();
                    mid.sort_by(|&x, &y| d[a][x].total_cmp(&d[a][y]));
                    let chain: Vec<usize> = std::iter::once(a).chain(mid).chain(std::iter::once(b)).collect();
                    let len: f64 = chain.windows(2).map(|w| d[w[0]][w[1]]).sum();
                    if len != d[a][b] {
                        continue;
                    }
                    let maximal = chain.windows(2).all(|w| {
                        !(0..7).any(|x| !chain.contains(&x) && d[w[0]][x] + d[x][w[1]] == d[w[0]][w[1]])
                    });
                    if maximal {
                        chains.insert(chain);
                    }
                }
                let bundle = enumerate_geodesics(&m, a, b, Some(0.0), 10_000).unwrap();
                assert_eq!(vertex_sets(&bundle), chains, "seed {seed} pair ({a}, {b})");
            }
        }
    }
}

#[test]
fn truncation_is_flagged() {
    let g = WeightedGraph::grid(6, 6);
    let b = enumerate_geodesics(&g, 0, 35, None, 10).unwrap();
    assert!(b.truncated && b.paths.len() == 10 && b.signature.is_none());
    assert!(matches!(classify_network(&b), Err(Error::Unclassifiable(_))));
    // C(10, 5) staircases
    let b = enumerate_geodesics(&g, 0, 35, None, 252).unwrap();
    assert!(!b.truncated);
    assert_eq!(b.paths.len(), 252);
}

/// Normal (j, k)-network: j arms from u meet at `m`, a trunk `m - c`, then
/// k arms from `c` to v.
fn normal_network(j: usize, k: usize) -> (WeightedGraph, usize, usize) {
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
    (WeightedGraph::unit(next, &edges).unwrap(), u, v)
}

#[test]
fn normal_networks_classify_as_j_k_j_minus_1() {
    for j in 1..=3 {
        for k in 1..=3 {
            let (g, u, v) = normal_network(j, k);
            let b = enumerate_geodesics(&g, u, v, None, 100).unwrap();
            assert_eq!(b.paths.len(), j * k);
            assert_eq!(classify_network(&b).unwrap(), NetworkSignature { i: j, j: k, k: j - 1 });
            // the split sits where the trunk meets the u-side arms
            if j > 1 {
                assert_eq!(b.splitting_points, vec![(1, j - 1)]);
            }
            let rev = enumerate_geodesics(&g, v, u, None, 100).unwrap();
            assert_eq!(classify_network(&rev).unwrap(), NetworkSignature { i: k, j, k: k - 1 });
        }
    }
}

#[test]
fn classification_ignores_path_order() {
    let (g, u, v) = normal_network(3, 2);
    let mut b = enumerate_geodesics(&g, u, v, None, 100).unwrap();
    let sig = classify_network(&b).unwrap();
    b.paths.reverse();
    b.paths.swap(0, 3);
    assert_eq!(classify_network(&b).unwrap(), sig);
}

#[test]
fn hausdorff_matches_double_loop() {
    let g = random_graph(25, 20, 7);
    let d = all_pairs(&g);
    let mut rng = RngStream::new(8, 0).rng();
    let mut set = || (0..6).map(|_| rng.random_range(0..25)).collect::<Vec<usize>>();
    for _ in 0..50 {
        let (a, b, c) = (set(), set(), set());
        let oracle = |x: &[usize], y: &[usize]| {
            let dir = |p: &[usize], q: &[usize]| {
                p.iter().map(|&i| q.iter().map(|&j| d[i][j]).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
            };
            dir(x, y).max(dir(y, x))
        };
        let hab = hausdorff_distance(&g, &a, &b).unwrap();
        assert_eq!(hab, oracle(&a, &b));
        assert_eq!(hab, hausdorff_distance(&g, &b, &a).unwrap());
        assert_eq!(hausdorff_distance(&g, &a, &a).unwrap(), 0.0);
        let (hac, hbc) = (hausdorff_distance(&g, &a, &c).unwrap(), hausdorff_distance(&g, &b, &c).unwrap());
        assert!(hab <= hac + hbc);
    }
    assert_eq!(hausdorff_distance(&g, &[3], &[9]).unwrap(), d[3][9]);
    assert!(hausdorff_distance(&g, &[], &[1]).is_err());
}

#[test]
fn coalescence_on_a_tree() {
    // 0 - 1 - 2 - {3, 4};  1 - 5;  0 - 6
    let t = WeightedGraph::unit(7, &[(0, 1), (1, 2), (2, 3), (2, 4), (1, 5), (0, 6)]).unwrap();
    let path = |v: Vec<usize>| GeodesicPath::from_vertices(&t, v).unwrap();
    let g3 = path(vec![3, 2, 1, 0]);
    let g4 = path(vec![4, 2, 1, 0]);
    let g5 = path(vec![5, 1, 0]);
    let g6 = path(vec![6, 0]);
    assert_eq!(coalescence_point(0, &g3, &g4).unwrap(), (2, 2.0));
    assert_eq!(coalescence_point(0, &g3, &g5).unwrap(), (1, 1.0));
    assert_eq!(coalescence_point(0, &g3, &g6).unwrap(), (0, 0.0));
    assert_eq!(coalescence_point(0, &g3, &g3).unwrap(), (3, 3.0));
    assert!(coalescence_point(1, &g3, &g4).is_err());
}

/// Exhaustive star oracle: all geodesic segments from the center to the
/// first vertex at distance >= radius, then the largest family sharing
/// only the center.
fn brute_star(g: &WeightedGraph, center: usize, k: usize, radius: f64) -> usize {
    let dc = g.distances_from(center);
    let mut segs: Vec<Vec<usize>> = Vec::new();
    fn rec(g: &WeightedGraph, dc: &[f64], r: f64, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let u = *path.last().unwrap();
        if dc[u] >= r {
            out.push(path[1..].to_vec());
            return;
        }
        let mut next = Vec::new();
        g.for_each_neighbor(u, |v, w| {
            if dc[u] + w == dc[v] && !next.contains(&v) {
                next.push(v)
            }
        });
        for v in next {
            path.push(v);
            rec(g, dc, r, path, out);
            path.pop();
        }
    }
    rec(g, &dc, radius, &mut vec![center], &mut segs);
    let mut best = 0;
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
    search(&segs, 0, &mut Vec::new(), 0, k, &mut best);
    best
}

#[test]
fn star_fixtures() {
    let p = WeightedGraph::path(9);
    let r = star_at(&p, 4, 5, 2.0).unwrap();
    assert_eq!(r.k, 2);
    assert_eq!(star_at(&p, 0, 5, 2.0).unwrap().k, 1);
    for legs in 2..7 {
        let mut e = Vec::new();
        for l in 0..legs {
            e.push((0, 1 + 2 * l));
            e.push((1 + 2 * l, 2 + 2 * l));
        }
        let s = WeightedGraph::unit(1 + 2 * legs, &e).unwrap();
        let r = star_at(&s, 0, legs, 2.0).unwrap();
        assert_eq!(r.k, legs);
        assert_eq!(r.witnesses.len(), legs);
        assert_eq!(star_at(&s, 0, 2, 2.0).unwrap().k, 2);
    }
    assert!(star_at(&p, 4, 2, 10.0).unwrap().skipped);
    assert!(star_at(&p, 4, 1, 1.0).is_err());
}

#[test]
fn star_matches_exhaustive_search() {
    for seed in 0..150 {
        let n = 7 + seed as usize % 4;
        let g = random_graph(n, 2 * n, 200 + seed);
        for center in 0..n {
            for radius in [1.0, 2.0, 3.0] {
                let r = star_at(&g, center, 6, radius).unwrap();
                if r.skipped {
                    continue;
                }
                assert_eq!(r.k, brute_star(&g, center, 6, radius), "seed {seed} center {center} r {radius}");
                assert!(r.k <= g.degree(center));
                // witnesses are geodesic and share only the center
                let mut seen = BTreeSet::new();
                let dc = g.distances_from(center);
                for w in &r.witnesses {
                    assert_eq!(w.start(), center);
                    assert_eq!(w.length(), dc[w.end()]);
                    assert!(dc[w.end()] >= radius);
                    for &v in &w.vertices[1..] {
                        assert!(seen.insert(v));
                    }
                }
            }
        }
    }
}

#[test]
fn box_dimension_fixtures() {
    let p = WeightedGraph::path(4001);
    let line: Vec<usize> = (1..4000).collect();
    let scales = [4.0, 8.0, 16.0, 32.0, 64.0];
    let d = box_dimension(&p, &line, &scales).unwrap();
    assert!((d.slope - 1.0).abs() < 0.05, "{d:?}");
    let g = WeightedGraph::grid(200, 200);
    let all: Vec<usize> = (0..g.len()).collect();
    let d = box_dimension(&g, &all, &scales).unwrap();
    assert!((d.slope - 2.0).abs() < 0.2, "{d:?}");
    assert!(box_dimension(&g, &all, &[1.0, 2.0, 4.0]).is_err());
    assert!(box_dimension(&g, &all, &[1.0, 20.0]).is_err());
}

#[test]
fn covering_counts_match_exhaustive_greedy() {
    // the farthest-point cover really covers, and never beats an optimal cover
    let g = random_graph(40, 30, 9);
    let d = all_pairs(&g);
    let pts: Vec<usize> = (0..40).step_by(2).collect();
    for eps in [1.0, 2.0, 3.0, 5.0] {
        let n = covering_counts(&g, &pts, &[eps]).unwrap()[0];
        // lower bound: a packing of points pairwise > 2 eps apart needs one ball each
        let mut packing: Vec<usize> = Vec::new();
        for &p in &pts {
            if packing.iter().all(|&q| d[p][q] > 2.0 * eps) {
                packing.push(p);
            }
        }
        assert!(n >= packing.len());
        assert!(n <= pts.len());
    }
}

#[test]
fn frame_is_thinner_than_the_space() {
    let (_, q) = sample_quadrangulation(3000, RngStream::new(20, 0)).unwrap();
    let scales = [1.0, 2.0, 4.0, 8.0, 16.0];
    let frame = frame_box_dimension(&q, 20, &scales, RngStream::new(20, 1)).unwrap();
    let all: Vec<usize> = (0..q.len()).collect();
    let whole = box_dimension(&q, &all, &scales).unwrap();
    assert!(frame.slope <= whole.slope + 0.05, "{frame:?} {whole:?}");
    for (f, w) in frame.counts.iter().zip(&whole.counts) {
        assert!(f <= w);
    }
}

#[test]
fn geodesic_paths_on_quadrangulations() {
    let (_, q) = sample_quadrangulation(2000, RngStream::new(21, 0)).unwrap();
    let mut rng = RngStream::new(21, 1).rng();
    for _ in 0..20 {
        let (a, b) = (rng.random_range(0..q.len()), rng.random_range(0..q.len()));
        if a == b {
            continue;
        }
        let dag = geodesic_dag(&q, b).unwrap();
        let g = dag.random_path(&q, a, &mut rng).unwrap();
        assert_eq!(g.length(), dag.dist[a]);
        let da = q.distances_from(a);
        for (i, &v) in g.vertices.iter().enumerate() {
            assert_eq!(da[v], g.cumlen[i]);
        }
        let bundle = enumerate_geodesics(&q, a, b, None, 1000).unwrap();
        assert!(bundle.paths.iter().any(|p| p.vertices == g.vertices) || bundle.truncated);
    }
}

#[test]
fn deficit_fixtures() {
    let mk = |v: Vec<usize>| GeodesicPath { cumlen: (0..v.len()).map(|i| i as f64).collect(), vertices: v };
    let g1 = mk(vec![10, 11, 0, 1, 2, 3, 4, 12, 13]);
    let g2 = mk(vec![20, 21, 0, 1, 2, 3, 4, 22, 23]);
    assert_eq!(overlap_deficit(&g1, &g1), 0.0);
    assert_eq!(overlap_deficit(&g1, &g2), 2.0);
    let g3 = mk(vec![30, 0, 1, 2, 3, 4, 31, 32, 33]);
    assert_eq!(overlap_deficit(&g1, &g3), 3.0);
    assert_eq!(overlap_deficit(&g1, &mk(vec![40, 41])), 8.0);
}

#[test]
fn confluence_table_is_monotone() {
    let (_, q) = sample_quadrangulation(5000, RngStream::new(22, 0)).unwrap();
    let rep = strong_confluence_statistic(&q, &[0.0, 1.0, 2.0, 3.0, 4.0, 6.0], 400, RngStream::new(22, 1)).unwrap();
    assert_eq!(rep.max_deficit_at_zero, 0.0);
    assert!(rep.violation_mass < 0.05, "{:?}", rep.rows);
    assert!(rep.rows.iter().all(|r| !r.empty));
    assert!(rep.fitted_c.is_finite());
    let small = WeightedGraph::path(10);
    assert!(strong_confluence_statistic(&small, &[1.0], 5, RngStream::new(0, 0)).is_err());
}

#[test]
fn snake_map_space_has_the_map_metric() {
    use bml_core::snake_map::quotient_metric;
    use bml_core::stochastic::sample_snake;
    let map = quotient_metric(&sample_snake(200, 1.0, RngStream::new(23, 0)).unwrap()).unwrap();
    let s = SnakeMapSpace::new(&map).unwrap();
    for a in [0, 17, 80] {
        let via_graph = dijkstra(&s, &[a]);
        let direct = s.distances_from(a);
        for (x, y) in via_graph.iter().zip(&direct) {
            assert!((x - y).abs() <= 1e-9 * y.max(1e-300) + 1e-12);
        }
    }
    let b = enumerate_geodesics(&s, 0, s.point_of[map.root_index], None, 100).unwrap();
    for p in &b.paths {
        assert!((p.length() - b.length).abs() <= 1e-9 * b.length);
    }
}
