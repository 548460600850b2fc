use crate::error::{invalid, Result};

/// Factor `kappa` with `kappa * mean(quad) = mean(snake)`: multiply
/// quadrangulation graph distances by it to compare with snake-map distances.
pub fn calibrate_scaling(quad_distances: &[f64], snake_distances: &[f64]) -> Result<f64> {
    if quad_distances.is_empty() || snake_distances.is_empty() {
        return invalid("calibration needs nonempty samples on both sides");
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (q, s) = (mean(quad_distances), mean(snake_distances));
    if !(q > 0.0) || !s.is_finite() {
        return invalid("quadrangulation distances must have a positive mean");
    }
    Ok(s / q)
}
