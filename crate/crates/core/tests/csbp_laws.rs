//! Monte Carlo checks of the stable and CSBP laws against closed forms.

use bml_core::csbp::{
    lamperti_csbp_to_levy, lamperti_levy_to_csbp, merge_count_mean, sample_levy,
    sample_merge_ppp, laplace_transform, survival_probability, CsbpSampler,
};
use bml_core::stats::{ks_two_sample, mean_se};
use bml_core::stochastic::StableIncrement;
use bml_core::RngStream;
use rayon::prelude::*;

#[test]
fn stable_laplace_identity() {
    let law = StableIncrement::new(1.5, 1.0).unwrap();
    let draws: Vec<f64> = (0..100u64)
        .into_par_iter()
        .flat_map_iter(|chunk| {
            let mut rng = RngStream::for_replica(1, "stable", chunk).rng();
            (0..10_000).map(move |_| law.sample(1.0, &mut rng)).collect::<Vec<_>>()
        })
        .collect();
    for &lambda in &[0.5, 1.0, 2.0] {
        let target = f64::powf(lambda, 1.5).exp();
        let vals: Vec<f64> = draws.iter().map(|d| (-lambda * d).exp()).collect();
        let m = mean_se(&vals);
        println!("lambda {lambda}: {} +- {} vs {target}", m.mean, m.se);
        assert!((m.mean - target).abs() < 4.0 * m.se, "lambda {lambda}: {m:?} vs {target}");
    }
    // only upward jumps with compensating drift: more mass below zero
    let neg = draws.iter().filter(|&&d| d < 0.0).count() as f64 / draws.len() as f64;
    assert!(neg > 0.5, "P[D < 0] = {neg}");
}

#[test]
fn stable_small_step_is_mostly_negative() {
    let law = StableIncrement::new(1.3, 2.0).unwrap();
    let mut rng = RngStream::new(2, 0).rng();
    let n = 200_000;
    let neg = (0..n).filter(|_| law.sample(1e-4, &mut rng) < 0.0).count() as f64 / n as f64;
    let se = (0.25 / n as f64).sqrt();
    assert!(neg > 0.5 + 4.0 * se, "P[D < 0] = {neg}");
}

fn csbp_marginals(alpha: f64, c: f64, y0: f64, times: &[f64], reps: u64, seed: u64) -> Vec<Vec<f64>> {
    let sampler = CsbpSampler::new(alpha, c, 1e-3).unwrap();
    (0..reps)
        .into_par_iter()
        .map(|r| sampler.marginals(y0, times, RngStream::for_replica(seed, "csbp-law", r)))
        .collect()
}

#[test]
fn csbp_laplace_on_parameter_grid() {
    let times = [0.25, 1.0];
    for (k, &(alpha, c, y0)) in [(1.5, 1.0, 1.0), (1.3, 0.5, 2.0), (1.8, 2.0, 0.5)].iter().enumerate() {
        let paths = csbp_marginals(alpha, c, y0, &times, 20_000, 10 + k as u64);
        for (ti, &t) in times.iter().enumerate() {
            for &lambda in &[0.5, 1.0, 2.0] {
                let vals: Vec<f64> = paths.iter().map(|p| (-lambda * p[ti]).exp()).collect();
                let m = mean_se(&vals);
                let target = laplace_transform(alpha, c, y0, lambda, t);
                println!("a={alpha} c={c} y0={y0} t={t} l={lambda}: {:.4} vs {target:.4}", m.mean);
                assert!(
                    (m.mean - target).abs() < 3.0 * m.se + 0.01,
                    "alpha {alpha} c {c} y0 {y0} t {t} lambda {lambda}: {m:?} vs {target}"
                );
            }
        }
    }
}

#[test]
fn csbp_extinction_law() {
    let times = [0.5, 1.0, 2.0];
    let paths = csbp_marginals(1.5, 1.0, 1.0, &times, 40_000, 20);
    for (ti, &t) in times.iter().enumerate() {
        let alive: Vec<f64> = paths.iter().map(|p| f64::from(p[ti] > 0.0)).collect();
        let m = mean_se(&alive);
        let target = survival_probability(1.5, 1.0, 1.0, t);
        // one grid step of slack in time
        let slack = (survival_probability(1.5, 1.0, 1.0, t - 1e-3) - target).abs();
        println!("t={t}: {:.4} vs {target:.4}", m.mean);
        assert!((m.mean - target).abs() < 3.0 * m.se + slack + 1e-3, "t {t}: {m:?} vs {target}");
    }
}

#[test]
fn csbp_scaling_relation() {
    let big = csbp_marginals(1.5, 1.0, 4.0, &[1.0], 40_000, 30);
    let small = csbp_marginals(1.5, 1.0, 1.0, &[0.5], 40_000, 31);
    let a: Vec<f64> = big.iter().map(|p| p[0] / 4.0).collect();
    let b: Vec<f64> = small.iter().map(|p| p[0]).collect();
    let ks = ks_two_sample(&a, &b);
    assert!(ks < 0.02, "KS {ks}");
}

#[test]
fn lamperti_round_trip_and_extinction_times() {
    let dt = 1e-3;
    let mut ok = 0;
    for r in 0..1000 {
        let lp = sample_levy(1.5, 1.0, 1.0, 4.0, dt, true, RngStream::for_replica(40, "rt", r)).unwrap();
        let cp = lamperti_levy_to_csbp(&lp).unwrap();
        let back = lamperti_csbp_to_levy(&cp).unwrap();
        let s = lp.path.times();
        let x = lp.path.values();
        let last = back.path.len() - 1;
        let dev = (0..last)
            .map(|k| (back.path.interpolate(s[k]) - x[k]).abs())
            .fold(0.0, f64::max);
        if dev < 10.0 * dt.sqrt() * lp.path.sup() {
            ok += 1;
        }
        // monotone clocks: the CSBP dies exactly at the image of the Lévy zero
        if let Some(k) = cp.extinction_index {
            let levy_zero = x.iter().position(|&v| v <= 0.0).unwrap();
            assert_eq!(k, levy_zero);
        }
    }
    assert!(ok >= 990, "{ok} / 1000 paths within tolerance");
}

#[test]
fn merge_counts_are_poisson() {
    let (w, ell) = (0.1, 0.5);
    let counts: Vec<f64> = (0..20_000u64)
        .into_par_iter()
        .map(|r| {
            let ppp = sample_merge_ppp(0.05, RngStream::for_replica(50, "ppp", r)).unwrap();
            ppp.count_above(w, ell) as f64
        })
        .collect();
    let m = mean_se(&counts);
    let target = merge_count_mean(w, ell);
    assert!((m.mean - target).abs() < 3.0 * m.se, "{m:?} vs {target}");
    let var = counts.iter().map(|c| (c - m.mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64;
    assert!((var / m.mean - 1.0).abs() < 0.05, "dispersion {}", var / m.mean);
}
