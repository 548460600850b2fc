//! Uniform quadrangulations through the Cori–Vauquelin–Schaeffer bijection,
//! with filled balls and their boundary lengths.

use bml_core::planar_map::*;
use bml_core::RngStream;

fn main() -> bml_core::Result<()> {
    let (tree, q) = sample_quadrangulation(10_000, RngStream::new(5, 0))?;
    q.validate()?;
    println!(
        "{} faces, {} vertices, {} edges (V - E + F = {})",
        q.n_faces,
        q.n_vertices,
        q.n_edges(),
        q.n_vertices as i64 - q.n_edges() as i64 + q.n_faces as i64
    );

    // graph distances from the pointed vertex are the shifted tree labels
    let d = q.bfs_metric(q.pointed_vertex as usize);
    assert_eq!(d, label_distances(&tree));
    println!("radius from the pointed vertex: {}", d.iter().max().unwrap());

    let center = q.pointed_vertex as usize;
    let base = (0..q.n_vertices).max_by_key(|&v| d[v]).unwrap();
    let radii = [1u32, 2, 4, 8, 16];
    println!("ball volumes {:?}", ball_volumes(&q, center, &radii)?);
    let lengths = boundary_length_process(&q, center, base)?;
    println!("hull boundary lengths r = 1..: {:?}", &lengths[..lengths.len().min(12)]);
    let hull = filled_ball(&q, center, base, 4)?;
    println!("filled ball of radius 4: {} vertices, boundary {}", hull.vertex_set.len(), hull.boundary_length);

    let json = serde_json::to_string(&QuadFile::from_quad(&q, Some(5)))?;
    let back: QuadFile = serde_json::from_str(&json)?;
    assert_eq!(back.into_quad()?.canonical_code(), q.canonical_code());
    println!("JSON round trip: {} bytes", json.len());
    Ok(())
}
