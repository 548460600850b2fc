use bml_core::geodesic::{enumerate_geodesics, Space, WeightedGraph};
use bml_core::manifest::RunManifest;
use bml_core::planar_map::{label_distances, sample_quadrangulation, QuadFile};
use bml_core::snake_map::{d_circ_matrix, quotient_metric};
use bml_core::stats::isotonic_fit;
use bml_core::stochastic::{sample_excursion, BrownianSnakeSample};
use bml_core::RngStream;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quotient_metric_is_a_metric_below_d_circ(labels in prop::collection::vec(-3.0f64..3.0, 3..40), seed in any::<u64>()) {
        let n = labels.len();
        let x = sample_excursion(n, 1.0, RngStream::new(seed, 0)).unwrap();
        let mut labels = labels;
        labels[0] = 0.0;
        labels[n - 1] = 0.0;
        let snake = BrownianSnakeSample::from_labels(x, labels.clone()).unwrap();
        let map = quotient_metric(&snake).unwrap();
        let dc = d_circ_matrix(&labels);
        let ymin = labels.iter().copied().fold(f64::INFINITY, f64::min);
        for i in 0..n {
            prop_assert!((map.dist(map.root_index, i) - (labels[i] - ymin)).abs() < 1e-9);
            for j in 0..n {
                let d = map.dist(i, j);
                prop_assert!(d <= dc[i * n + j] + 1e-12);
                prop_assert!(d >= (labels[i] - labels[j]).abs() - 1e-12);
                prop_assert!((d - map.dist(j, i)).abs() < 1e-12);
                for k in 0..n {
                    prop_assert!(d <= map.dist(i, k) + map.dist(k, j) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn cvs_maps_are_valid_and_round_trip(n in 1usize..300, seed in any::<u64>()) {
        let (tree, q) = sample_quadrangulation(n, RngStream::new(seed, 1)).unwrap();
        q.validate().unwrap();
        prop_assert_eq!(q.n_vertices + q.n_faces, q.n_edges() + 2);
        prop_assert_eq!(q.bfs_metric(q.pointed_vertex as usize), label_distances(&tree));
        let text = serde_json::to_string(&QuadFile::from_quad(&q, Some(seed))).unwrap();
        let back: QuadFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.into_quad().unwrap().canonical_code(), q.canonical_code());
    }

    #[test]
    fn manifests_round_trip(params in prop::collection::btree_map("[a-z_]{1,8}", ".{0,12}", 0..6), seed in any::<Option<u64>>()) {
        let mut m = RunManifest::new("sample-quad", seed);
        for (k, v) in &params {
            m.param(k, v);
        }
        m.finish();
        let text = m.to_json().unwrap();
        let back = RunManifest::from_json(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn isotonic_fit_is_monotone_and_mean_preserving(ys in prop::collection::vec(-10.0f64..10.0, 1..50)) {
        let w = vec![1.0; ys.len()];
        let fit = isotonic_fit(&ys, &w);
        prop_assert!(fit.windows(2).all(|p| p[0] <= p[1] + 1e-12));
        let (a, b): (f64, f64) = (ys.iter().sum(), fit.iter().sum());
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn grid_geodesics_have_the_graph_distance(rows in 2usize..6, cols in 2usize..6, a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let g = WeightedGraph::grid(rows, cols);
        let (a, b) = (a.index(g.len()), b.index(g.len()));
        prop_assume!(a != b);
        let d = g.distances_from(a)[b];
        let bundle = enumerate_geodesics(&g, a, b, None, 100_000).unwrap();
        // staircases: C(dr + dc, dr)
        let (dr, dc) = ((a / cols).abs_diff(b / cols), (a % cols).abs_diff(b % cols));
        let count = (1..=dr).fold(1usize, |c, k| c * (dc + k) / k);
        prop_assert_eq!(bundle.paths.len(), count);
        for p in &bundle.paths {
            prop_assert_eq!(p.length(), d);
        }
    }
}
