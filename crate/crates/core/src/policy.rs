//! Index policies behind one interface: MaxUCB (with optional burn-in and a
//! general bonus exponent), classical UCB, and the uniform random policy.
//!
//! Every policy evaluates each arm once in the first K rounds (round-robin)
//! before its own rule takes over. Ties in the argmax go to the lowest arm
//! index.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{rng_from_seed, StreamRng};
use crate::types::Reward;

pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_EXPONENT: f64 = 2.0;

pub trait Policy: Send + std::fmt::Debug {
    fn num_arms(&self) -> usize;

    /// Arm to pull at 1-based round `t`.
    fn select(&mut self, t: u64) -> usize;

    /// Feeds back the reward of the arm returned by the preceding `select`.
    fn update(&mut self, arm: usize, reward: Reward);

    /// Smallest horizon the policy can run with.
    fn min_horizon(&self) -> u64 {
        self.num_arms() as u64
    }
}

/// MaxUCB index: observed maximum plus `(alpha * ln t / n)^exponent`.
#[inline]
pub fn maxucb_index(max: f64, n: u64, t: u64, alpha: f64, exponent: f64) -> f64 {
    max + (alpha * (t as f64).ln() / n as f64).powf(exponent)
}

/// Classical UCB index: running mean plus `sqrt(alpha * ln t / n)`.
#[inline]
pub fn ucb_index(mean: f64, n: u64, t: u64, alpha: f64) -> f64 {
    mean + (alpha * (t as f64).ln() / n as f64).sqrt()
}

/// First index of the maximum; NaN never wins.
pub fn argmax_lowest(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best_v {
            best = i;
            best_v = v;
        }
    }
    best
}

pub fn random_select<R: Rng + ?Sized>(rng: &mut R, arms: usize) -> usize {
    rng.random_range(0..arms)
}

#[inline]
fn round_robin(t: u64, arms: usize) -> usize {
    ((t - 1) % arms as u64) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxUcb {
    alpha: f64,
    exponent: f64,
    burn_in: u64,
    maxima: Vec<f64>,
    counts: Vec<u64>,
    discarded: u64,
}

impl MaxUcb {
    pub fn new(arms: usize, alpha: f64) -> Self {
        Self::with_options(arms, alpha, DEFAULT_EXPONENT, 0)
    }

    /// `burn_in` is the number of unobserved round-robin passes (C) before
    /// the observed initialization.
    pub fn with_options(arms: usize, alpha: f64, exponent: f64, burn_in: u64) -> Self {
        assert!(arms >= 1);
        MaxUcb {
            alpha,
            exponent,
            burn_in,
            maxima: vec![f64::NEG_INFINITY; arms],
            counts: vec![0; arms],
            discarded: 0,
        }
    }

    pub fn maxima(&self) -> &[f64] {
        &self.maxima
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn warmup_rounds(&self) -> u64 {
        (self.burn_in + 1) * self.maxima.len() as u64
    }

    pub fn index(&self, arm: usize, t: u64) -> f64 {
        if self.counts[arm] == 0 {
            return f64::INFINITY;
        }
        maxucb_index(self.maxima[arm], self.counts[arm], t, self.alpha, self.exponent)
    }
}

impl Policy for MaxUcb {
    fn num_arms(&self) -> usize {
        self.maxima.len()
    }

    fn select(&mut self, t: u64) -> usize {
        let k = self.maxima.len();
        if t <= self.warmup_rounds() {
            return round_robin(t, k);
        }
        argmax_lowest((0..k).map(|i| self.index(i, t)))
    }

    fn update(&mut self, arm: usize, reward: Reward) {
        if self.discarded < self.burn_in * self.maxima.len() as u64 {
            self.discarded += 1;
            return;
        }
        self.counts[arm] += 1;
        self.maxima[arm] = self.maxima[arm].max(reward.value());
    }

    fn min_horizon(&self) -> u64 {
        self.warmup_rounds()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ucb {
    alpha: f64,
    means: Vec<f64>,
    counts: Vec<u64>,
}

impl Ucb {
    pub fn new(arms: usize, alpha: f64) -> Self {
        assert!(arms >= 1);
        Ucb {
            alpha,
            means: vec![0.0; arms],
            counts: vec![0; arms],
        }
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

impl Policy for Ucb {
    fn num_arms(&self) -> usize {
        self.means.len()
    }

    fn select(&mut self, t: u64) -> usize {
        let k = self.means.len();
        if t <= k as u64 {
            return round_robin(t, k);
        }
        argmax_lowest((0..k).map(|i| {
            if self.counts[i] == 0 {
                f64::INFINITY
            } else {
                ucb_index(self.means[i], self.counts[i], t, self.alpha)
            }
        }))
    }

    fn update(&mut self, arm: usize, reward: Reward) {
        self.counts[arm] += 1;
        let n = self.counts[arm] as f64;
        self.means[arm] += (reward.value() - self.means[arm]) / n;
    }
}

#[derive(Debug, Clone)]
pub struct RandomPolicy {
    arms: usize,
    rng: StreamRng,
}

impl RandomPolicy {
    pub fn new(arms: usize, seed: u64) -> Self {
        assert!(arms >= 1);
        RandomPolicy {
            arms,
            rng: rng_from_seed(seed),
        }
    }
}

impl Policy for RandomPolicy {
    fn num_arms(&self) -> usize {
        self.arms
    }

    fn select(&mut self, t: u64) -> usize {
        if t <= self.arms as u64 {
            return round_robin(t, self.arms);
        }
        random_select(&mut self.rng, self.arms)
    }

    fn update(&mut self, _arm: usize, _reward: Reward) {}
}

/// Policy section of an experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub name: String,
    /// Identifier used in output files; defaults to `name`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in_c: Option<i64>,
    /// Hyperparameters for plug-in baselines.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl PolicyConfig {
    pub fn named(name: &str) -> Self {
        PolicyConfig {
            name: name.to_owned(),
            label: None,
            alpha: None,
            exponent_m: None,
            burn_in_c: None,
            params: BTreeMap::new(),
        }
    }

    pub fn maxucb(alpha: f64) -> Self {
        PolicyConfig {
            alpha: Some(alpha),
            ..Self::named("maxucb")
        }
    }

    pub fn ucb(alpha: f64) -> Self {
        PolicyConfig {
            alpha: Some(alpha),
            ..Self::named("ucb")
        }
    }

    pub fn random() -> Self {
        Self::named("random")
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(label.to_owned());
        self
    }

    pub fn id(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.name)
    }
}

/// Hyperparameter value of a baseline default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HyperValue {
    Real(f64),
    /// Set to the time horizon T.
    Horizon,
    /// 1 / t at iteration t.
    InverseIteration,
}

impl std::fmt::Display for HyperValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HyperValue::Real(v) => write!(f, "{v}"),
            HyperValue::Horizon => f.write_str("T"),
            HyperValue::InverseIteration => f.write_str("1/t"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineDefaults {
    pub name: &'static str,
    pub display_name: &'static str,
    pub implemented: bool,
    pub params: &'static [(&'static str, HyperValue)],
}

use HyperValue::{Horizon, InverseIteration, Real};

const BASELINES: &[BaselineDefaults] = &[
    BaselineDefaults { name: "maxucb", display_name: "MaxUCB", implemented: true, params: &[("alpha", Real(0.5))] },
    BaselineDefaults { name: "ucb", display_name: "UCB", implemented: true, params: &[("alpha", Real(0.5))] },
    BaselineDefaults { name: "random", display_name: "Random Policy", implemented: true, params: &[] },
    BaselineDefaults {
        name: "quantile_bayes_ucb",
        display_name: "Quantile Bayes UCB",
        implemented: false,
        params: &[("alpha", Real(1.0)), ("beta", Real(0.2)), ("tau", Real(0.95))],
    },
    BaselineDefaults {
        name: "quantile_ucb",
        display_name: "Quantile UCB",
        implemented: false,
        params: &[("alpha", Real(0.5)), ("tau", Real(0.95))],
    },
    BaselineDefaults {
        name: "er_ucb_s",
        display_name: "ER-UCB-S",
        implemented: false,
        params: &[("beta", Real(0.6)), ("theta", Real(0.01)), ("gamma", Real(20.0))],
    },
    BaselineDefaults {
        name: "er_ucb_n",
        display_name: "ER-UCB-N",
        implemented: false,
        params: &[("alpha", Real(1.0)), ("theta", Real(0.01)), ("gamma", Real(20.0))],
    },
    BaselineDefaults {
        name: "rising_bandits",
        display_name: "Rising Bandits",
        implemented: false,
        params: &[("C", Real(7.0)), ("T", Horizon)],
    },
    BaselineDefaults {
        name: "max_median",
        display_name: "Max-Median",
        implemented: false,
        params: &[("epsilon", InverseIteration)],
    },
    BaselineDefaults {
        name: "qomax_sda",
        display_name: "QoMax-SDA",
        implemented: false,
        params: &[("q", Real(0.5)), ("gamma", Real(2.0 / 3.0))],
    },
    BaselineDefaults {
        name: "qomax_etc",
        display_name: "QoMax-ETC",
        implemented: false,
        params: &[("q", Real(0.5)), ("b_T", Real(4.0)), ("n_T", Real(3.0)), ("T", Horizon)],
    },
    BaselineDefaults {
        name: "threshold_ascent",
        display_name: "Threshold Ascent",
        implemented: false,
        params: &[("delta", Real(0.1)), ("s", Real(20.0)), ("T", Horizon)],
    },
    BaselineDefaults {
        name: "successive_halving",
        display_name: "Successive Halving",
        implemented: false,
        params: &[("eta", Real(2.0)), ("T", Horizon)],
    },
    BaselineDefaults {
        name: "r_sr",
        display_name: "R-SR",
        implemented: false,
        params: &[("epsilon", Real(0.25)), ("T", Horizon)],
    },
    BaselineDefaults {
        name: "r_ucbe",
        display_name: "R-UCBE",
        implemented: false,
        params: &[("alpha", Real(57.12)), ("epsilon", Real(0.25)), ("sigma", Real(0.05)), ("T", Horizon)],
    },
    BaselineDefaults {
        name: "maxsearch_gaussian",
        display_name: "MaxSearch (Gaussian)",
        implemented: false,
        params: &[("c", Real(1.0))],
    },
    BaselineDefaults {
        name: "maxsearch_subgaussian",
        display_name: "MaxSearch (SubGaussian)",
        implemented: false,
        params: &[("c", Real(0.27))],
    },
    BaselineDefaults { name: "exp3", display_name: "EXP3", implemented: false, params: &[] },
];

/// Registry of policy names with their default hyperparameters.
pub fn baseline_defaults() -> &'static [BaselineDefaults] {
    BASELINES
}

pub fn lookup_baseline(name: &str) -> Option<&'static BaselineDefaults> {
    BASELINES.iter().find(|b| b.name == name)
}

fn domain(msg: String) -> Error {
    Error::Domain(msg)
}

/// Builds a policy instance for `arms` arms. `seed` feeds the policy's own
/// random stream (only the random policy uses one).
pub fn make_policy(cfg: &PolicyConfig, arms: usize, seed: u64) -> Result<Box<dyn Policy>> {
    let entry = lookup_baseline(&cfg.name).ok_or_else(|| Error::UnknownPolicy(cfg.name.clone()))?;
    if !entry.implemented {
        let defaults = entry
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(", ");
        return Err(Error::ExternalBaseline {
            name: cfg.name.clone(),
            defaults,
        });
    }
    if arms < 1 {
        return Err(domain("policy needs at least one arm".into()));
    }
    if let Some(k) = cfg.params.keys().next() {
        return Err(Error::Config(format!("policy `{}` takes no parameter `{k}`", cfg.name)));
    }
    let alpha = cfg.alpha.unwrap_or(DEFAULT_ALPHA);
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(domain(format!("alpha must be finite and >= 0, got {alpha}")));
    }
    let reject = |field: &str, present: bool| {
        if present {
            Err(Error::Config(format!("policy `{}` does not accept `{field}`", cfg.name)))
        } else {
            Ok(())
        }
    };
    match cfg.name.as_str() {
        "maxucb" => {
            let exponent = cfg.exponent_m.unwrap_or(DEFAULT_EXPONENT);
            if !(exponent.is_finite() && exponent >= 1.0) {
                return Err(domain(format!("exponent_m must be >= 1, got {exponent}")));
            }
            let c = cfg.burn_in_c.unwrap_or(0);
            if c < 0 {
                return Err(domain(format!("burn_in_c must be >= 0, got {c}")));
            }
            Ok(Box::new(MaxUcb::with_options(arms, alpha, exponent, c as u64)))
        }
        "ucb" => {
            reject("exponent_m", cfg.exponent_m.is_some())?;
            reject("burn_in_c", cfg.burn_in_c.is_some())?;
            Ok(Box::new(Ucb::new(arms, alpha)))
        }
        "random" => {
            reject("alpha", cfg.alpha.is_some())?;
            reject("exponent_m", cfg.exponent_m.is_some())?;
            reject("burn_in_c", cfg.burn_in_c.is_some())?;
            Ok(Box::new(RandomPolicy::new(arms, seed)))
        }
        other => Err(Error::UnknownPolicy(other.to_owned())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: f64) -> Reward {
        Reward::new(v).unwrap()
    }

    fn maxucb_with(maxima: &[f64], counts: &[u64], alpha: f64) -> MaxUcb {
        let mut p = MaxUcb::new(maxima.len(), alpha);
        p.maxima = maxima.to_vec();
        p.counts = counts.to_vec();
        p
    }

    #[test]
    fn index_values() {
        assert_eq!(maxucb_index(0.9, 3, 50, 0.0, 2.0), 0.9);
        let v = maxucb_index(0.9, 1, 3, 0.5, 2.0);
        assert!((v - (0.9 + (0.5 * 3f64.ln()).powi(2))).abs() < 1e-15);
        assert!((v - 1.20173).abs() < 1e-5);
        let b1 = maxucb_index(0.0, 1, 3, 0.5, 2.0);
        let b4 = maxucb_index(0.0, 4, 3, 0.5, 2.0);
        assert!((b1 / b4 - 16.0).abs() < 1e-12);
    }

    #[test]
    fn init_rounds_are_round_robin() {
        for cfg in [PolicyConfig::maxucb(0.5), PolicyConfig::ucb(0.5), PolicyConfig::random()] {
            let mut p = make_policy(&cfg, 3, 1).unwrap();
            assert_eq!(p.select(1), 0);
            p.update(0, r(0.1));
            assert_eq!(p.select(2), 1);
            p.update(1, r(0.1));
            assert_eq!(p.select(3), 2);
        }
    }

    #[test]
    fn maxucb_selection_examples() {
        assert_eq!(maxucb_with(&[0.9, 0.5], &[1, 1], 0.5).select(3), 0);
        assert_eq!(maxucb_with(&[0.7, 0.7], &[3, 3], 0.0).select(9), 0);
        assert_eq!(maxucb_with(&[0.3, 0.9], &[3, 3], 0.0).select(9), 1);
        assert_eq!(maxucb_with(&[0.9, 0.5], &[10, 1], 0.5).select(100), 1);
    }

    #[test]
    fn maxucb_update_keeps_running_max() {
        let mut p = maxucb_with(&[0.4, 0.0], &[1, 1], 0.5);
        p.update(0, r(0.6));
        assert_eq!((p.maxima[0], p.counts[0]), (0.6, 2));
        p.update(0, r(0.2));
        assert_eq!((p.maxima[0], p.counts[0]), (0.6, 3));
        assert_eq!((p.maxima[1], p.counts[1]), (0.0, 1));
    }

    #[test]
    fn ucb_examples() {
        let mut u = Ucb::new(2, 0.5);
        u.update(0, r(0.4));
        u.update(0, r(0.6));
        assert_eq!((u.means[0], u.counts[0]), (0.5, 2));

        let with = |means: &[f64], counts: &[u64], alpha| Ucb {
            alpha,
            means: means.to_vec(),
            counts: counts.to_vec(),
        };
        assert_eq!(with(&[0.2, 0.8], &[2, 2], 0.0).select(5), 1);
        assert_eq!(with(&[0.5, 0.5], &[4, 1], 0.5).select(10), 1);
        assert_eq!(with(&[0.8, 0.5], &[1, 1], 0.5).select(3), 0);
        assert!((ucb_index(0.8, 1, 3, 0.5) - (0.8 + 0.741_152)).abs() < 1e-6);
    }

    #[test]
    fn burn_in_discards_observations() {
        let mut p = MaxUcb::with_options(3, 0.5, 2.0, 2);
        for t in 1..=6 {
            let arm = p.select(t);
            assert_eq!(arm, ((t - 1) % 3) as usize);
            p.update(arm, r(1e9));
        }
        assert_eq!(p.counts(), &[0, 0, 0]);
        for t in 7..=9 {
            let arm = p.select(t);
            assert_eq!(arm, ((t - 1) % 3) as usize);
            p.update(arm, r(0.1 * t as f64));
        }
        assert_eq!(p.counts(), &[1, 1, 1]);
        assert!(p.maxima().iter().all(|&m| m < 1.0));
        assert_eq!(p.min_horizon(), 9);
    }

    #[test]
    fn random_select_single_arm() {
        let mut rng = rng_from_seed(1);
        for _ in 0..10 {
            assert_eq!(random_select(&mut rng, 1), 0);
        }
    }

    #[test]
    fn random_select_is_uniform() {
        let mut rng = rng_from_seed(2024);
        let mut counts = [0usize; 4];
        let n = 100_000;
        for _ in 0..n {
            counts[random_select(&mut rng, 4)] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 0.25).abs() < 0.01);
        }
    }

    #[test]
    fn factory_errors() {
        assert!(make_policy(&PolicyConfig::maxucb(0.5), 3, 0).is_ok());
        assert!(matches!(make_policy(&PolicyConfig::maxucb(-1.0), 3, 0), Err(Error::Domain(_))));
        let mut m = PolicyConfig::maxucb(0.5);
        m.exponent_m = Some(0.5);
        assert!(matches!(make_policy(&m, 3, 0), Err(Error::Domain(_))));
        m.exponent_m = None;
        m.burn_in_c = Some(-1);
        assert!(matches!(make_policy(&m, 3, 0), Err(Error::Domain(_))));
        assert!(matches!(make_policy(&PolicyConfig::named("nope"), 3, 0), Err(Error::UnknownPolicy(_))));
        let err = make_policy(&PolicyConfig::named("rising_bandits"), 3, 0).unwrap_err();
        assert!(err.to_string().starts_with("not implemented: external baseline"));
        assert!(err.to_string().contains("C=7"));
    }

    #[test]
    fn baseline_table_values() {
        let get = |n: &str, p: &str| {
            lookup_baseline(n)
                .unwrap()
                .params
                .iter()
                .find(|(k, _)| *k == p)
                .unwrap()
                .1
        };
        assert_eq!(get("quantile_bayes_ucb", "tau"), Real(0.95));
        assert_eq!(get("qomax_sda", "gamma"), Real(2.0 / 3.0));
        assert_eq!(get("r_ucbe", "alpha"), Real(57.12));
        assert_eq!(get("er_ucb_s", "gamma"), Real(20.0));
        assert_eq!(get("threshold_ascent", "s"), Real(20.0));
        assert_eq!(get("successive_halving", "eta"), Real(2.0));
        assert_eq!(get("max_median", "epsilon"), InverseIteration);
    }
}
