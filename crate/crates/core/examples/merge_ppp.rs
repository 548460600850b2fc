//! Merge events on an inner boundary: a Poisson point process with
//! intensity `ds x^-3 dx`; counts above depth `w` on length `l` are Poisson
//! with mean `l / (2 w^2)`.

use bml_core::csbp::{merge_count_mean, sample_merge_ppp};
use bml_core::stats::mean_se;
use bml_core::RngStream;

fn main() -> bml_core::Result<()> {
    let ppp = sample_merge_ppp(0.05, RngStream::new(11, 0))?;
    println!("{} merge points above depth {}", ppp.points().len(), ppp.x_min());
    let d = ppp.merge_depth(0.2, 0.6)?;
    println!("deepest merge between s = 0.2 and 0.6: {d:?}");

    for (w, ell) in [(0.05, 1.0), (0.1, 0.5), (0.2, 1.0)] {
        let counts: Vec<f64> = (0..20_000u64)
            .map(|r| sample_merge_ppp(0.05, RngStream::for_replica(11, "ppp", r)).map(|p| p.count_above(w, ell) as f64))
            .collect::<bml_core::Result<_>>()?;
        let m = mean_se(&counts);
        println!("w = {w}, l = {ell}: mean {:.3} +- {:.3}, exact {:.3}", m.mean, m.se, merge_count_mean(w, ell));
    }
    Ok(())
}
