//! Lamperti time change: a spectrally positive stable Lévy path becomes a
//! CSBP path and back.

use bml_core::csbp::{lamperti_csbp_to_levy, lamperti_levy_to_csbp, levy_coefficient, sample_levy};
use bml_core::RngStream;

fn main() -> bml_core::Result<()> {
    let (alpha, c) = (1.5, 1.0);
    let levy = sample_levy(alpha, levy_coefficient(alpha, c), 1.0, 4.0, 1e-3, true, RngStream::new(3, 0))?;
    let csbp = lamperti_levy_to_csbp(&levy)?;
    let back = lamperti_csbp_to_levy(&csbp)?;

    println!("Lévy clock: {} steps, sup {:.4}", levy.path.len(), levy.path.sup());
    match csbp.extinction_time() {
        Some(t) => println!("CSBP dies at t = {t:.4}"),
        None => println!("CSBP alive at the end of the window ({:.4})", csbp.path.duration()),
    }
    let s = levy.path.times();
    let x = levy.path.values();
    let worst = (0..back.path.len() - 1)
        .map(|k| (back.path.interpolate(s[k]) - x[k]).abs())
        .fold(0.0, f64::max);
    println!("round trip: max deviation {worst:.2e} on the original clock");

    let mut out = std::io::stdout().lock();
    println!("first CSBP grid points (t, Y):");
    let head = bml_core::stochastic::GridPath::new(
        csbp.path.times()[..6].to_vec(),
        csbp.path.values()[..6].to_vec(),
        csbp.path.kind(),
    )?;
    head.write_csv(&mut out)?;
    Ok(())
}
