//! Gaussian and stable building blocks: Brownian bridges and excursions,
//! snake label processes and spectrally positive stable increments.

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    Bridge,
    Excursion,
    Levy,
    Csbp,
    Generic,
}

/// A real-valued path observed on an increasing time grid starting at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPath {
    times: Vec<f64>,
    values: Vec<f64>,
    kind: PathKind,
}

impl GridPath {
    pub fn new(times: Vec<f64>, values: Vec<f64>, kind: PathKind) -> Result<Self> {
        if times.is_empty() {
            return invalid("empty path");
        }
        if times.len() != values.len() {
            return invalid(format!(
                "times ({}) and values ({}) differ in length",
                times.len(),
                values.len()
            ));
        }
        if times[0] != 0.0 {
            return invalid("path must start at time 0");
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("times must be strictly increasing");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("path values must be finite");
        }
        if kind == PathKind::Excursion {
            let last = *values.last().unwrap();
            if values[0] != 0.0 || last != 0.0 || values.iter().any(|&v| v < 0.0) {
                return invalid("excursion must be nonnegative and pinned at 0");
            }
        }
        Ok(Self { times, values, kind })
    }

    pub(crate) fn from_parts_unchecked(times: Vec<f64>, values: Vec<f64>, kind: PathKind) -> Self {
        debug_assert!(Self::new(times.clone(), values.clone(), kind).is_ok());
        Self { times, values, kind }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Right-continuous step evaluation: the value at the last grid time `<= t`.
    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&s| s <= t);
        self.values[k.saturating_sub(1)]
    }

    /// Linear interpolation between grid times, constant beyond the ends.
    pub fn interpolate(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            return self.values[0];
        }
        if k == self.times.len() {
            return *self.values.last().unwrap();
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        self.values[k - 1] * (1.0 - w) + self.values[k] * w
    }

    /// CSV with columns `time,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "time,value")?;
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(out, "{t},{v}")?;
        }
        Ok(())
    }
}

fn uniform_grid(n: usize, duration: f64) -> Vec<f64> {
    let step = duration / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { duration } else { i as f64 * step }).collect()
}

fn check_grid(n: usize, duration: f64) -> Result<()> {
    if n < 2 {
        return invalid(format!("grid size must be at least 2, got {n}"));
    }
    if !(duration > 0.0) || !duration.is_finite() {
        return invalid(format!("duration must be positive, got {duration}"));
    }
    Ok(())
}

fn bridge_values<R: Rng>(n: usize, duration: f64, scale: f64, rng: &mut R) -> Vec<f64> {
    let sd = (duration / (n - 1) as f64).sqrt() * scale;
    let mut walk = Vec::with_capacity(n);
    walk.push(0.0);
    let mut w = 0.0;
    for _ in 1..n {
        let z: f64 = StandardNormal.sample(rng);
        w += sd * z;
        walk.push(w);
    }
    let end = w;
    let m = (n - 1) as f64;
    for (i, v) in walk.iter_mut().enumerate() {
        *v -= end * i as f64 / m;
    }
    walk[n - 1] = 0.0;
    walk
}

/// Brownian bridge of the given duration on `n` equally spaced points, with
/// covariance `scale^2 * s (duration - t) / duration`.
pub fn sample_bridge(n: usize, duration: f64, scale: f64, stream: RngStream) -> Result<GridPath> {
    check_grid(n, duration)?;
    let mut rng = stream.rng();
    let values = bridge_values(n, duration, scale, &mut rng);
    Ok(GridPath::from_parts_unchecked(uniform_grid(n, duration), values, PathKind::Bridge))
}

/// Brownian excursion of the given length, built by rotating a bridge at
/// its minimum (Vervaat transform). Exact in law on the grid.
pub fn sample_excursion(n: usize, length: f64, stream: RngStream) -> Result<GridPath> {
    check_grid(n, length)?;
    let mut rng = stream.rng();
    let bridge = bridge_values(n, length, 1.0, &mut rng);
    let m = n - 1;
    let k = (0..m)
        .min_by(|&a, &b| bridge[a].total_cmp(&bridge[b]))
        .unwrap_or(0);
    let base = bridge[k];
    let mut values: Vec<f64> = (0..=m).map(|i| bridge[(k + i) % m] - base).collect();
    values[0] = 0.0;
    values[m] = 0.0;
    for v in values.iter_mut() {
        // roundoff can leave -0.0 or tiny negatives at the rotation point
        if *v <= 0.0 {
            *v = 0.0;
        }
    }
    Ok(GridPath::from_parts_unchecked(uniform_grid(n, length), values, PathKind::Excursion))
}

/// An excursion `X` together with its Gaussian labels `Y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrownianSnakeSample {
    pub x_path: GridPath,
    pub y_values: Vec<f64>,
    /// Index of the minimum of `Y` (lowest index on ties).
    pub s_star_index: usize,
    /// More than one index attains the minimum.
    pub tied_minimum: bool,
    /// `X` vanished on the whole grid, so `Y` is identically zero.
    pub degenerate: bool,
}

impl BrownianSnakeSample {
    pub fn len(&self) -> usize {
        self.y_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y_values.is_empty()
    }

    pub fn min_label(&self) -> f64 {
        self.y_values[self.s_star_index]
    }

    /// Builds a sample from given labels, for fixtures and replays.
    pub fn from_labels(x_path: GridPath, y_values: Vec<f64>) -> Result<Self> {
        if x_path.kind() != PathKind::Excursion {
            return invalid("snake lifetime must be an excursion");
        }
        if y_values.len() != x_path.len() {
            return invalid("labels must align with the lifetime grid");
        }
        if y_values.iter().any(|y| !y.is_finite()) {
            return invalid("labels must be finite");
        }
        let degenerate = x_path.values().iter().all(|&x| x == 0.0);
        let (s_star_index, tied_minimum) = argmin_with_ties(&y_values);
        Ok(Self { x_path, y_values, s_star_index, tied_minimum, degenerate })
    }
}

fn argmin_with_ties(ys: &[f64]) -> (usize, bool) {
    let mut best = 0;
    for (i, y) in ys.iter().enumerate() {
        if *y < ys[best] {
            best = i;
        }
    }
    let ties = ys.iter().filter(|&&y| y == ys[best]).count() > 1;
    (best, ties)
}

struct SpineRecord {
    level: f64,
    label: f64,
}

/// Labels `Y` with covariance `cov(Y_i, Y_j) = min_{i<=k<=j} X_k`.
///
/// Walks the grid keeping the ancestral spine of the current point as a
/// stack of (level, label) records with increasing levels. Moving to the
/// next point pops every record above the branch level `m`, places the
/// label at `m` by Brownian-bridge interpolation between the neighbouring
/// records, and adds an independent `N(0, X_next - m)` increment.
pub fn sample_snake_labels(x_path: &GridPath, stream: RngStream) -> Result<BrownianSnakeSample> {
    if x_path.kind() != PathKind::Excursion {
        return invalid("snake lifetime must be an excursion");
    }
    let xs = x_path.values();
    let n = xs.len();
    if xs.iter().all(|&x| x == 0.0) {
        log::warn!("degenerate lifetime process: all labels are zero");
        return BrownianSnakeSample::from_labels(x_path.clone(), vec![0.0; n]);
    }
    let mut rng = stream.rng();
    let mut ys = Vec::with_capacity(n);
    ys.push(0.0);
    let mut stack = vec![SpineRecord { level: xs[0], label: 0.0 }];
    for i in 0..n - 1 {
        let next = xs[i + 1];
        let m = xs[i].min(next);
        let mut above: Option<SpineRecord> = None;
        while stack.last().is_some_and(|r| r.level > m) {
            above = stack.pop();
        }
        let low = stack.last().expect("root record has level 0");
        let branch_label = match above {
            _ if low.level == m => low.label,
            None => low.label,
            Some(hi) => {
                let span = hi.level - low.level;
                let w = (m - low.level) / span;
                let mean = low.label + w * (hi.label - low.label);
                let var = (m - low.level) * (hi.level - m) / span;
                let z: f64 = StandardNormal.sample(&mut rng);
                mean + var.max(0.0).sqrt() * z
            }
        };
        if low.level < m {
            stack.push(SpineRecord { level: m, label: branch_label });
        }
        let y = if next > m {
            let z: f64 = StandardNormal.sample(&mut rng);
            let y = branch_label + (next - m).sqrt() * z;
            stack.push(SpineRecord { level: next, label: y });
            y
        } else {
            branch_label
        };
        ys.push(y);
    }
    ys[n - 1] = 0.0;
    BrownianSnakeSample::from_labels(x_path.clone(), ys)
}

/// Excursion of `n` points on `[0, length]` with its labels; the two
/// streams are split from `stream`.
pub fn sample_snake(n: usize, length: f64, stream: RngStream) -> Result<BrownianSnakeSample> {
    let x = sample_excursion(n, length, stream.split(0))?;
    sample_snake_labels(&x, stream.split(1))
}

/// Spectrally positive strictly stable law with Laplace exponent
/// `E exp(-lambda D) = exp(dt * c * lambda^alpha)`, `alpha` in `(1, 2)`.
///
/// Sampled with the Chambers–Mallows–Stuck representation at skewness +1;
/// the scale `(c dt |cos(pi alpha / 2)|)^(1/alpha)` turns the unit-scale
/// law into the stated Laplace exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableIncrement {
    alpha: f64,
    c: f64,
    shift: f64,
    skew_scale: f64,
    cos_factor: f64,
}

impl StableIncrement {
    pub fn new(alpha: f64, c: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return invalid(format!("alpha must lie in (1, 2), got {alpha}"));
        }
        if !(c > 0.0) || !c.is_finite() {
            return invalid(format!("c must be positive, got {c}"));
        }
        let tan = (PI * alpha / 2.0).tan();
        Ok(Self {
            alpha,
            c,
            shift: tan.atan() / alpha,
            skew_scale: (1.0 + tan * tan).powf(1.0 / (2.0 * alpha)),
            cos_factor: (PI * alpha / 2.0).cos().abs(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    fn unit<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let v = PI * (rng.random::<f64>() - 0.5);
        let w: f64 = Exp1.sample(rng);
        let a = self.alpha;
        let arg = a * (v + self.shift);
        self.skew_scale * arg.sin() / v.cos().powf(1.0 / a)
            * ((v - arg).cos() / w).powf((1.0 - a) / a)
    }

    pub fn sample<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        let sigma = (self.c * dt * self.cos_factor).powf(1.0 / self.alpha);
        sigma * self.unit(rng)
    }
}

/// One increment over a time step `dt`; see [`StableIncrement`].
pub fn sample_stable_increment(alpha: f64, c: f64, dt: f64, stream: RngStream) -> Result<f64> {
    if !(dt > 0.0) || !dt.is_finite() {
        return invalid(format!("dt must be positive, got {dt}"));
    }
    let law = StableIncrement::new(alpha, c)?;
    Ok(law.sample(dt, &mut stream.rng()))
}
