//! Parametric reward distributions used by the synthetic environments.
//!
//! Samplers are inverse-transform based where a closed form exists, so every
//! kind has a `*_from_uniform` function that maps a uniform draw in (0, 1] to
//! a reward. The analytic CDF of every kind is available for goodness-of-fit
//! checks and for the survival-function plots of the demo.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Smallest acceptance probability tolerated by the truncated-Gaussian
/// rejection sampler.
const MIN_ACCEPTANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    /// One-parameter Pareto with scale 1, support [1, inf).
    Pareto { tail: f64 },
    Exponential { rate: f64 },
    Gaussian { mean: f64, std: f64 },
    /// Normal(mean, std) conditioned on [0, 1].
    TruncatedGaussian { mean: f64, std: f64 },
    TruncatedUniform { low: f64, high: f64 },
    /// CDF (x / scale)^shape on [0, scale].
    Power { shape: f64, scale: f64 },
    /// CDF x^exponent on [0, 1]; with `complement` the reward is 1 - X.
    InverseCdfPoly { exponent: f64, complement: bool },
    Constant { value: f64 },
}

/// Uniform draw on (0, 1]. Zero is excluded so that inverse transforms with
/// negative exponents or logarithms stay finite.
#[inline]
pub fn open_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

#[inline]
pub fn pareto_from_uniform(tail: f64, u: f64) -> f64 {
    u.powf(-1.0 / tail)
}

#[inline]
pub fn exponential_from_uniform(rate: f64, u: f64) -> f64 {
    -u.ln() / rate
}

#[inline]
pub fn power_from_uniform(shape: f64, scale: f64, u: f64) -> f64 {
    scale * u.powf(1.0 / shape)
}

#[inline]
pub fn poly_from_uniform(exponent: f64, u: f64) -> f64 {
    u.powf(1.0 / exponent)
}

#[inline]
pub fn uniform_from_uniform(low: f64, high: f64, u: f64) -> f64 {
    low + (high - low) * u
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}

impl Distribution {
    pub fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match *self {
            Distribution::Pareto { tail } => {
                check(finite(&[tail]) && tail > 1.0, || format!("pareto tail must be > 1, got {tail}"))
            }
            Distribution::Exponential { rate } => {
                check(finite(&[rate]) && rate > 0.0, || format!("exponential rate must be > 0, got {rate}"))
            }
            Distribution::Gaussian { mean, std } => check(finite(&[mean, std]) && std >= 0.0, || {
                format!("gaussian needs finite mean and std >= 0, got ({mean}, {std})")
            }),
            Distribution::TruncatedGaussian { mean, std } => {
                check(finite(&[mean, std]) && std > 0.0, || {
                    format!("truncated gaussian needs finite mean and std > 0, got ({mean}, {std})")
                })?;
                let p = Self::truncation_mass(mean, std);
                check(p >= MIN_ACCEPTANCE, || {
                    format!("truncated gaussian ({mean}, {std}) has acceptance probability {p:e} on [0, 1]")
                })
            }
            Distribution::TruncatedUniform { low, high } => check(finite(&[low, high]) && low < high, || {
                format!("truncated uniform needs low < high, got [{low}, {high}]")
            }),
            Distribution::Power { shape, scale } => {
                check(finite(&[shape, scale]) && shape >= 1.0 && scale > 0.0, || {
                    format!("power needs shape >= 1 and scale > 0, got ({shape}, {scale})")
                })
            }
            Distribution::InverseCdfPoly { exponent, .. } => check(finite(&[exponent]) && exponent > 0.0, || {
                format!("inverse_cdf_poly exponent must be > 0, got {exponent}")
            }),
            Distribution::Constant { value } => {
                check(value.is_finite(), || format!("constant value must be finite, got {value}"))
            }
        }
    }

    fn truncation_mass(mean: f64, std: f64) -> f64 {
        normal_cdf((1.0 - mean) / std) - normal_cdf(-mean / std)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Distribution::Pareto { tail } => pareto_from_uniform(tail, open_uniform(rng)),
            Distribution::Exponential { rate } => exponential_from_uniform(rate, open_uniform(rng)),
            Distribution::Gaussian { mean, std } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + std * z
            }
            Distribution::TruncatedGaussian { mean, std } => loop {
                let z: f64 = rng.sample(StandardNormal);
                let x = mean + std * z;
                if (0.0..=1.0).contains(&x) {
                    break x;
                }
            },
            Distribution::TruncatedUniform { low, high } => {
                uniform_from_uniform(low, high, open_uniform(rng))
            }
            Distribution::Power { shape, scale } => power_from_uniform(shape, scale, open_uniform(rng)),
            Distribution::InverseCdfPoly {
                exponent,
                complement,
            } => {
                let y = poly_from_uniform(exponent, open_uniform(rng));
                if complement {
                    1.0 - y
                } else {
                    y
                }
            }
            Distribution::Constant { value } => value,
        }
    }

    /// Closed interval containing all the mass; ends may be infinite.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Distribution::Pareto { .. } => (1.0, f64::INFINITY),
            Distribution::Exponential { .. } => (0.0, f64::INFINITY),
            Distribution::Gaussian { mean, std: 0.0 } => (mean, mean),
            Distribution::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Distribution::TruncatedGaussian { .. } | Distribution::InverseCdfPoly { .. } => (0.0, 1.0),
            Distribution::TruncatedUniform { low, high } => (low, high),
            Distribution::Power { scale, .. } => (0.0, scale),
            Distribution::Constant { value } => (value, value),
        }
    }

    pub fn is_bounded(&self) -> bool {
        let (lo, hi) = self.support();
        lo.is_finite() && hi.is_finite()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let step = |at: f64| if x < at { 0.0 } else { 1.0 };
        let raw = match *self {
            Distribution::Pareto { tail } => {
                if x < 1.0 {
                    0.0
                } else {
                    1.0 - x.powf(-tail)
                }
            }
            Distribution::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    1.0 - (-rate * x).exp()
                }
            }
            Distribution::Gaussian { mean, std } => {
                if std == 0.0 {
                    step(mean)
                } else {
                    normal_cdf((x - mean) / std)
                }
            }
            Distribution::TruncatedGaussian { mean, std } => {
                if x < 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    (normal_cdf((x - mean) / std) - normal_cdf(-mean / std))
                        / Self::truncation_mass(mean, std)
                }
            }
            Distribution::TruncatedUniform { low, high } => (x - low) / (high - low),
            Distribution::Power { shape, scale } => {
                if x <= 0.0 {
                    0.0
                } else {
                    (x / scale).powf(shape)
                }
            }
            Distribution::InverseCdfPoly {
                exponent,
                complement,
            } => {
                let x = x.clamp(0.0, 1.0);
                if complement {
                    1.0 - (1.0 - x).powf(exponent)
                } else {
                    x.powf(exponent)
                }
            }
            Distribution::Constant { value } => step(value),
        };
        raw.clamp(0.0, 1.0)
    }

    /// Survival function G(x) = P(X > x).
    pub fn survival(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }
}
