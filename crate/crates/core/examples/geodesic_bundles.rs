//! All geodesics between two points, and the network signature (I, J, K).

use bml_core::geodesic::*;
use bml_core::planar_map::sample_quadrangulation;
use bml_core::RngStream;

fn main() -> bml_core::Result<()> {
    // normal (2, 3)-network: two arms merge, then three arms fan out
    let edges = [(1, 2), (0, 4), (4, 1), (0, 5), (5, 1), (2, 6), (6, 3), (2, 7), (7, 3), (2, 8), (8, 3)];
    let g = WeightedGraph::unit(9, &edges)?;
    let b = enumerate_geodesics(&g, 0, 3, None, 100)?;
    println!("{} geodesics of length {}, signature {:?}", b.paths.len(), b.length, classify_network(&b)?);
    println!("splitting points (vertex, multiplicity): {:?}", b.splitting_points);

    let (_, q) = sample_quadrangulation(5000, RngStream::new(2, 0))?;
    let pairs = sample_pairs(&q, 8, RngStream::new(2, 1))?;
    for (a, z) in pairs {
        let b = enumerate_geodesics(&q, a, z, None, 10_000)?;
        let sig = b.signature.map_or("truncated".to_string(), |s| format!("({}, {}, {})", s.i, s.j, s.k));
        println!("{a:>5} -> {z:>5}: d = {:>3}, {:>5} geodesics, signature {sig}", b.length, b.paths.len());
    }

    // geodesics to a common root coalesce
    let root = q.pointed_vertex as usize;
    let dag = geodesic_dag(&q, root)?;
    let g1 = dag.canonical_path(&q, 17)?;
    let g2 = dag.canonical_path(&q, 1017)?;
    println!("coalescence of 17 and 1017 towards the root: {:?}", coalescence_point(root, &g1, &g2)?);
    Ok(())
}
