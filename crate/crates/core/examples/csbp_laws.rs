//! Monte Carlo marginals of a stable CSBP against its closed-form laws.
//!
//! `cargo run --release --example csbp_laws`

use bml_core::csbp::{laplace_transform, survival_probability, u_t, CsbpSampler};
use bml_core::stats::mean_se;
use bml_core::RngStream;
use rayon::prelude::*;

fn main() -> bml_core::Result<()> {
    let (alpha, c, y0) = (1.5, 1.0, 1.0);
    let sampler = CsbpSampler::new(alpha, c, 1e-3)?;
    let times = [0.25, 1.0];
    let paths: Vec<Vec<f64>> = (0..20_000u64)
        .into_par_iter()
        .map(|r| sampler.marginals(y0, &times, RngStream::for_replica(7, "csbp", r)))
        .collect();

    println!("   t  lambda   u_t(lambda)   MC E[exp(-lambda Y_t)]    exact");
    for (ti, &t) in times.iter().enumerate() {
        for lambda in [0.5, 1.0, 2.0] {
            let vals: Vec<f64> = paths.iter().map(|p| (-lambda * p[ti]).exp()).collect();
            let m = mean_se(&vals);
            println!(
                "{t:>4}  {lambda:>6}   {:>11.5}   {:>10.5} +- {:.5}   {:.5}",
                u_t(alpha, c, lambda, t),
                m.mean,
                m.se,
                laplace_transform(alpha, c, y0, lambda, t)
            );
        }
    }
    let alive = paths.iter().filter(|p| p[1] > 0.0).count() as f64 / paths.len() as f64;
    println!("P(Y_1 > 0): {alive:.4}, exact {:.4}", survival_probability(alpha, c, y0, 1.0));
    Ok(())
}
