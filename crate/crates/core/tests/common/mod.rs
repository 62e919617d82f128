#![allow(dead_code)]

use harmonic::{ExitSample, Point};
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub const ARCS: usize = 36;

/// Index of the equal-angle arc containing a planar exit point.
pub fn arc_index(p: &Point, center: &Point, bins: usize) -> usize {
    let phi = (p[1] - center[1]).atan2(p[0] - center[0]).rem_euclid(std::f64::consts::TAU);
    ((phi / std::f64::consts::TAU * bins as f64) as usize).min(bins - 1)
}

pub fn arc_counts(samples: &[ExitSample], center: &Point, bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; bins];
    for s in samples {
        counts[arc_index(&s.exit_point, center, bins)] += 1;
    }
    counts
}

/// Two-sample homogeneity statistic and its degrees of freedom. Bins empty in
/// both samples are dropped.
pub fn two_sample_chi2(a: &[u64], b: &[u64]) -> (f64, usize) {
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let (k1, k2) = ((nb / na).sqrt(), (na / nb).sqrt());
    let mut stat = 0.0;
    let mut used = 0;
    for (&x, &y) in a.iter().zip(b) {
        if x + y == 0 {
            continue;
        }
        used += 1;
        let d = k1 * x as f64 - k2 * y as f64;
        stat += d * d / (x + y) as f64;
    }
    (stat, used - 1)
}

/// Pearson goodness-of-fit statistic against cell probabilities.
pub fn gof_chi2(counts: &[u64], probs: &[f64]) -> f64 {
    let n = counts.iter().sum::<u64>() as f64;
    counts
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = n * p;
            (o as f64 - e).powi(2) / e
        })
        .sum()
}

pub fn chi2_quantile(df: usize, p: f64) -> f64 {
    ChiSquared::new(df as f64).unwrap().inverse_cdf(p)
}

/// z-score of the difference of two independent estimates.
pub fn diff_z(a: f64, se_a: f64, b: f64, se_b: f64) -> f64 {
    (a - b) / (se_a * se_a + se_b * se_b).sqrt()
}

pub fn report(criterion: u32, name: &str, ok: bool, detail: &str) {
    println!("[{}] criterion {criterion}: {name} ({detail})", if ok { "PASS" } else { "FAIL" });
}
