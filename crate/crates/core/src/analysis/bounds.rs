//! Closed-form evaluators of the regret analysis.

use crate::error::{Error, Result};

/// Upper bound on the expected number of pulls of a suboptimal arm by MaxUCB
/// with exploration `alpha` over `horizon` rounds:
///
/// `T^(1-2 L* alpha sqrt(delta)) / (1 - 2 L* alpha sqrt(delta)) + 2 alpha sqrt(U T) ln T`.
///
/// When the exponent `1 - 2 L* alpha sqrt(delta)` is not positive the closed
/// form is meaningless, and the first term is replaced by the partial sum
/// `sum_{t=1}^{T} t^(-2 L* alpha sqrt(delta))` it bounds.
pub fn suboptimal_pulls_bound(l_star: f64, u_i: f64, delta_i: f64, alpha: f64, horizon: u64) -> f64 {
    let t = horizon as f64;
    let rate = 2.0 * l_star * alpha * delta_i.sqrt();
    let exponent = 1.0 - rate;
    let first = if exponent > 0.0 {
        t.powf(exponent) / exponent
    } else {
        (1..=horizon).map(|s| (s as f64).powf(-rate)).sum()
    };
    first + 2.0 * alpha * (u_i * t).sqrt() * t.ln()
}

/// Regret bound from pull counts: `max_i b_i / T * sum_{i != best} N_i`.
pub fn regret_bound_from_pulls(pulls: &[f64], supports: &[f64], horizon: u64, best_arm: usize) -> f64 {
    let b = supports.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let suboptimal: f64 = pulls
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best_arm)
        .map(|(_, n)| n)
        .sum();
    b / horizon as f64 * suboptimal
}

/// Exploration parameter balancing the per-arm bounds when L*, the smallest
/// gap and T are known: `(1 - 2 ln ln T / ln T) / (4 L* sqrt(delta_min))`.
pub fn balanced_alpha(l_star: f64, delta_min: f64, horizon: u64) -> Result<f64> {
    if !(l_star > 0.0 && l_star.is_finite()) {
        return Err(Error::Domain(format!("L* must be positive, got {l_star}")));
    }
    if !(delta_min > 0.0 && delta_min.is_finite()) {
        return Err(Error::Domain(format!("minimum gap must be positive, got {delta_min}")));
    }
    if horizon < 16 {
        return Err(Error::Domain(format!("horizon must be >= 16, got {horizon}")));
    }
    let lt = (horizon as f64).ln();
    Ok((1.0 - 2.0 * lt.ln() / lt) / (4.0 * l_star * delta_min.sqrt()))
}

/// Monte-Carlo check of the two tail inequalities for the max of n i.i.d.
/// draws: `P(max <= x) <= exp(-n G(x))` and `P(max > x) <= n G(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxTailReport {
    pub samples: usize,
    pub p_at_most: f64,
    pub bound_at_most: f64,
    pub se_at_most: f64,
    pub p_above: f64,
    pub bound_above: f64,
    pub se_above: f64,
}

impl MaxTailReport {
    pub fn at_most_holds(&self) -> bool {
        self.p_at_most <= self.bound_at_most + 3.0 * self.se_at_most
    }

    pub fn above_holds(&self) -> bool {
        self.p_above <= self.bound_above + 3.0 * self.se_above
    }

    pub fn passed(&self) -> bool {
        self.at_most_holds() && self.above_holds()
    }
}

/// `maxima` are independent realizations of the max of `n` draws; `g_at_x`
/// is the survival function at the threshold `x`.
pub fn max_tail_check(maxima: &[f64], g_at_x: f64, n: u64, x: f64) -> MaxTailReport {
    let m = maxima.len().max(1) as f64;
    let p_at_most = maxima.iter().filter(|&&v| v <= x).count() as f64 / m;
    let p_above = 1.0 - p_at_most;
    let se = (p_at_most * p_above / m).sqrt();
    MaxTailReport {
        samples: maxima.len(),
        p_at_most,
        bound_at_most: (-(n as f64) * g_at_x).exp(),
        se_at_most: se,
        p_above,
        bound_above: n as f64 * g_at_x,
        se_above: se,
    }
}
