//! Distances to the root in quadrangulations and in snake maps, after
//! calibrating the quadrangulation scale on the mean.

use bml_core::planar_map::{calibrate_scaling, sample_quadrangulation};
use bml_core::snake_map::distances_from_point;
use bml_core::stats::ks_two_sample;
use bml_core::stochastic::sample_snake;
use bml_core::RngStream;
use rayon::prelude::*;

fn main() -> bml_core::Result<()> {
    let faces = 20_000;
    let quad: Vec<f64> = (0..8u64)
        .into_par_iter()
        .map(|id| {
            let (_, q) = sample_quadrangulation(faces, RngStream::new(8, id))?;
            let root = q.pointed_vertex as usize;
            Ok(q.bfs_metric(root).into_iter().enumerate().filter(|&(v, _)| v != root && v % 10 == 0).map(|(_, d)| f64::from(d)).collect::<Vec<_>>())
        })
        .collect::<bml_core::Result<Vec<_>>>()?
        .concat();
    let snake: Vec<f64> = (0..40u64)
        .into_par_iter()
        .map(|id| {
            let s = sample_snake(1024, 1.0, RngStream::new(9, id))?;
            let d = distances_from_point(&s, s.s_star_index)?;
            Ok(d.into_iter().enumerate().filter(|&(i, _)| i != s.s_star_index).map(|(_, x)| x).collect::<Vec<_>>())
        })
        .collect::<bml_core::Result<Vec<_>>>()?
        .concat();
    let kappa = calibrate_scaling(&quad, &snake)?;
    let scaled: Vec<f64> = quad.iter().map(|d| d * kappa).collect();
    println!("kappa = {kappa:.5} (kappa n^(1/4) = {:.4})", kappa * (faces as f64).powf(0.25));
    println!("KS distance after calibration: {:.4}", ks_two_sample(&scaled, &snake));
    Ok(())
}
