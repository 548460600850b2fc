use bml_core::geodesic::{enumerate_geodesics, geodesic_dag, Space};
use bml_core::gff::*;
use bml_core::RngStream;
use nalgebra::DMatrix;
use rand::Rng;

/// Inverse of the interior Dirichlet Laplacian (4 on the diagonal, -1 for
/// interior neighbors), by a dense linear solve.
fn green(n: usize) -> DMatrix<f64> {
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
    lap.lu().solve(&DMatrix::identity(m * m, m * m)).unwrap()
}

#[test]
fn frame_is_zero_and_small_boxes_rejected() {
    for n in [3, 4, 17] {
        let f = sample_dgff(n, RngStream::new(1, n as u64)).unwrap();
        for v in f.frame_vertices() {
            assert_eq!(f.values[v], 0.0);
        }
        assert_eq!(f.frame_vertices().len(), 4 * (n - 1));
        assert!(f.values.iter().all(|x| x.is_finite()));
    }
    assert!(sample_dgff(2, RngStream::new(1, 0)).is_err());
}

#[test]
fn covariance_matches_green_function() {
    let n = 9;
    let g = green(n);
    let reps = 10_000;
    let fields: Vec<GffField> = (0..reps).map(|r| sample_dgff(n, RngStream::for_replica(2, "gff", r)).unwrap()).collect();
    let interior = |r: usize, c: usize| (r - 1) * (n - 2) + (c - 1);
    let pairs = [((4, 4), (4, 4)), ((4, 4), (3, 4)), ((2, 3), (6, 5)), ((1, 1), (1, 2))];
    for ((ar, ac), (br, bc)) in pairs {
        let xy: Vec<f64> = fields.iter().map(|f| f.get(ar, ac) * f.get(br, bc)).collect();
        let yx: Vec<f64> = fields.iter().map(|f| f.get(br, bc) * f.get(ar, ac)).collect();
        assert_eq!(xy, yx);
        let mean = xy.iter().sum::<f64>() / reps as f64;
        let sd = (xy.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
        let se = sd / (reps as f64).sqrt();
        let target = g[(interior(ar, ac), interior(br, bc))];
        assert!((mean - target).abs() < 3.0 * se, "cov {mean} vs {target} (se {se})");
    }
}

#[test]
fn path_length_fixtures() {
    let zero = GffField::zero(5).unwrap();
    assert_eq!(path_length(&zero, DEFAULT_GAMMA, &[0, 1, 2, 7, 12]).unwrap(), 5.0);
    let mut f = GffField::zero(5).unwrap();
    f.values[12] = 2f64.ln();
    assert!((path_length(&f, 1.0, &[12]).unwrap() - 2.0).abs() < 1e-15);
    assert!(path_length(&f, 1.0, &[0, 6]).is_err());
    assert!(path_length(&f, 1.0, &[4, 5]).is_err());
    assert!(path_length(&f, 1.0, &[]).is_err());

    let field = sample_dgff(12, RngStream::new(3, 0)).unwrap();
    let path = [13, 14, 26, 38, 37, 49];
    let direct: f64 = path.iter().map(|&v| (0.7 * field.values[v]).exp()).sum();
    assert_eq!(path_length(&field, 0.7, &path).unwrap(), direct);
    // splitting at a vertex counts it twice
    for cut in 0..path.len() {
        let whole = path_length(&field, 0.7, &path).unwrap();
        let left = path_length(&field, 0.7, &path[..=cut]).unwrap();
        let right = path_length(&field, 0.7, &path[cut..]).unwrap();
        let shared = (0.7 * field.values[path[cut]]).exp();
        assert!((left + right - shared - whole).abs() < 1e-12);
    }
}

#[test]
fn flat_field_geodesics_are_staircases() {
    let field = GffField::zero(10).unwrap();
    let metric = WeightedMetric::new(&field, DEFAULT_GAMMA).unwrap();
    // corners of an m x m box
    for m in [2usize, 4, 7] {
        let (a, b) = (0, (m - 1) * 10 + (m - 1));
        let dag = geodesic_dag(&metric, b).unwrap();
        let p = dag.canonical_path(&metric, a).unwrap();
        assert_eq!(p.vertices.len(), 2 * m - 1);
        assert_eq!(metric.vertex_length(a, b, p.length()), (2 * m - 1) as f64);
    }
    let b = enumerate_geodesics(&metric, 0, 11, Some(0.0), 100).unwrap();
    assert_eq!(b.paths.len(), 2);
}

#[test]
fn engine_lengths_equal_recomputed_lengths() {
    let field = sample_dgff(30, RngStream::new(4, 0)).unwrap();
    let metric = WeightedMetric::new(&field, DEFAULT_GAMMA).unwrap();
    let pairs = random_boundary_pairs(&field, 10, RngStream::new(4, 1));
    for (a, b) in pairs {
        let dag = geodesic_dag(&metric, b).unwrap();
        let p = dag.canonical_path(&metric, a).unwrap();
        let recomputed = path_length(&field, DEFAULT_GAMMA, &p.vertices).unwrap();
        let engine = metric.vertex_length(a, b, dag.dist[a]);
        assert!((engine - recomputed).abs() <= 1e-12 * recomputed);
    }
    let bundles = gff_geodesic_bundle(&metric, &[(0, 899), (5, 600)], None, 50).unwrap();
    for b in bundles {
        for p in &b.paths {
            let l = path_length(&field, DEFAULT_GAMMA, &p.vertices).unwrap();
            assert!((metric.vertex_length(p.start(), p.end(), b.length) - l).abs() <= 1e-9 * l);
        }
    }
}

#[test]
fn shortest_lengths_match_exhaustive_search_at_n6() {
    let n = 6;
    for seed in 0..3 {
        let field = sample_dgff(n, RngStream::new(5, seed)).unwrap();
        let metric = WeightedMetric::new(&field, DEFAULT_GAMMA).unwrap();
        let w: Vec<f64> = field.values.iter().map(|h| (DEFAULT_GAMMA * h).exp()).collect();
        let mut rng = RngStream::new(5, 100 + seed).rng();
        for _ in 0..4 {
            let (a, b) = (rng.random_range(0..n * n), rng.random_range(0..n * n));
            if a == b {
                continue;
            }
            // depth-first search over all self-avoiding paths
            let mut best = f64::INFINITY;
            let mut seen = vec![false; n * n];
            fn dfs(u: usize, b: usize, n: usize, len: f64, w: &[f64], seen: &mut [bool], best: &mut f64) {
                if len >= *best {
                    return;
                }
                if u == b {
                    *best = len;
                    return;
                }
                let (r, c) = (u / n, u % n);
                let mut next = Vec::new();
                if r > 0 { next.push(u - n) }
                if r + 1 < n { next.push(u + n) }
                if c > 0 { next.push(u - 1) }
                if c + 1 < n { next.push(u + 1) }
                for v in next {
                    if !seen[v] {
                        seen[v] = true;
                        dfs(v, b, n, len + w[v], w, seen, best);
                        seen[v] = false;
                    }
                }
            }
            seen[a] = true;
            dfs(a, b, n, w[a], &w, &mut seen, &mut best);
            let d = metric.distances_from(a)[b];
            let engine = metric.vertex_length(a, b, d);
            assert!((engine - best).abs() <= 1e-12 * best, "{engine} vs {best}");
        }
    }
}

#[test]
fn frame_fraction_shrinks_with_box_size() {
    let mut prev = 1.0;
    for n in [64, 128, 256] {
        let field = sample_dgff(n, RngStream::new(6, n as u64)).unwrap();
        let metric = WeightedMetric::new(&field, DEFAULT_GAMMA).unwrap();
        let pairs = random_boundary_pairs(&field, 20, RngStream::new(6, 1000 + n as u64));
        let overlay = geodesic_overlay(&metric, &pairs).unwrap();
        let frac = frame_fraction(&metric, &overlay);
        assert!(frac < prev, "n = {n}: {frac} >= {prev}");
        prev = frac;
    }
}

#[test]
fn overlay_exports() {
    let field = sample_dgff(8, RngStream::new(7, 0)).unwrap();
    let metric = WeightedMetric::new(&field, DEFAULT_GAMMA).unwrap();
    let overlay = geodesic_overlay(&metric, &[(0, 63), (7, 56)]).unwrap();
    let mut csv = Vec::new();
    write_overlay_csv(8, &overlay, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("x,y,multiplicity\n0,0,1\n"));
    assert_eq!(text.lines().count(), overlay.len() + 1);
    let mut svg = Vec::new();
    write_overlay_svg(&field, &overlay, &mut svg).unwrap();
    assert!(String::from_utf8(svg).unwrap().trim_end().ends_with("</svg>"));
    let mut grid = Vec::new();
    field.write_csv(&mut grid).unwrap();
    assert_eq!(String::from_utf8(grid).unwrap().lines().count(), 8);
}
