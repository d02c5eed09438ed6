//! Linear envelope constants of the survival function near the support
//! maximum: L * eps <= G(b - eps) <= U * eps.

use super::survival::SurvivalEstimate;
use crate::error::{Error, Result};

pub const DEFAULT_GRID_SIZE: usize = 100;
pub const MIN_SHAPE_SAMPLES: usize = 100;
/// Arms whose sample standard deviation falls below this are excluded.
pub const DEGENERATE_STD: f64 = 1e-3;

/// Survival levels bounding the probe range: offsets run from the upper
/// quantile (G = 0.01) down to the lower quantile (G = 0.99).
const UPPER_LEVEL: f64 = 0.01;
const LOWER_LEVEL: f64 = 0.99;

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeConstants {
    pub l: f64,
    pub u: f64,
    /// Support upper bound used for the probes.
    pub b_hat: f64,
    pub eps_grid: Vec<f64>,
    /// G(b_hat - eps) / eps for each probe.
    pub ratios: Vec<f64>,
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub fn sample_std(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Evaluates G(b - eps) / eps at the given offsets (non-positive offsets
/// are dropped) and takes L and U as the extreme ratios.
pub fn probe_shape_constants(survival: impl Fn(f64) -> f64, b: f64, eps: &[f64]) -> Result<ShapeConstants> {
    let eps_grid: Vec<f64> = eps.iter().copied().filter(|&e| e > 0.0).collect();
    if eps_grid.is_empty() {
        return Err(Error::DegenerateSupport("empty probe range".into()));
    }
    let ratios: Vec<f64> = eps_grid.iter().map(|&e| survival(b - e) / e).collect();
    let l = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let u = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ShapeConstants {
        l,
        u,
        b_hat: b,
        eps_grid,
        ratios,
    })
}

/// Empirical L and U of a reward sample. The support bound is the sample
/// maximum; offsets span `[b - Q(0.01), b - Q(0.99)]` on a linear grid of
/// `grid_size` points, Q being the empirical survival inverse.
pub fn estimate_shape_constants(samples: &[f64], grid_size: usize) -> Result<ShapeConstants> {
    if samples.len() < MIN_SHAPE_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_SHAPE_SAMPLES,
            got: samples.len(),
        });
    }
    let std = sample_std(samples);
    if std < DEGENERATE_STD {
        return Err(Error::DegenerateSupport(format!(
            "sample standard deviation {std:e} below {DEGENERATE_STD}"
        )));
    }
    let g = SurvivalEstimate::new(samples)?;
    let b = g.max();
    let lo = b - g.inverse(UPPER_LEVEL);
    let hi = b - g.inverse(LOWER_LEVEL);
    probe_shape_constants(|x| g.eval(x), b, &linear_grid(lo, hi, grid_size))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::Distribution;
    use crate::seed::rng_from_seed;

    #[test]
    fn quadratic_survival_table() {
        let g1 = |x: f64| 1.0 - x * x;
        let sc = probe_shape_constants(g1, 1.0, &[0.1, 0.3, 0.5, 0.7, 0.9]).unwrap();
        let expected = [1.90, 1.70, 1.50, 1.30, 1.10];
        for (r, e) in sc.ratios.iter().zip(expected) {
            assert!((r - e).abs() < 1e-12, "{r} vs {e}");
        }
        assert!((sc.l - 1.10).abs() < 1e-12);
        assert!((sc.u - 1.90).abs() < 1e-12);

        let g2 = |x: f64| (1.0 - x) * (1.0 - x);
        let sc = probe_shape_constants(g2, 1.0, &[0.1, 0.3, 0.5, 0.7, 0.9]).unwrap();
        assert!((sc.l - 0.10).abs() < 1e-12);
        assert!((sc.u - 0.90).abs() < 1e-12);
    }

    #[test]
    fn uniform_sample_gives_inverse_width() {
        let d = Distribution::TruncatedUniform { low: 0.0, high: 0.5 };
        let mut rng = rng_from_seed(12);
        let xs: Vec<f64> = (0..1_000_000).map(|_| d.sample(&mut rng)).collect();
        let sc = estimate_shape_constants(&xs, DEFAULT_GRID_SIZE).unwrap();
        assert!((sc.l - 2.0).abs() < 0.1, "L = {}", sc.l);
        assert!((sc.u - 2.0).abs() < 0.1, "U = {}", sc.u);
        assert!(sc.ratios.iter().all(|r| (sc.l..=sc.u).contains(r)));
    }

    #[test]
    fn degenerate_and_small_samples() {
        assert!(matches!(
            estimate_shape_constants(&[0.5; 500], 100),
            Err(Error::DegenerateSupport(_))
        ));
        assert!(matches!(
            estimate_shape_constants(&[0.5; 99], 100),
            Err(Error::InsufficientData { needed: 100, got: 99 })
        ));
    }

    #[test]
    fn grid_endpoints() {
        assert_eq!(linear_grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linear_grid(2.0, 3.0, 1), vec![2.0]);
    }
}
