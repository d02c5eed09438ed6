//! Browser demo bindings. Each export takes and returns JSON so the page
//! needs no generated type definitions.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use extbandit::analysis::{balanced_alpha, estimate_shape_constants, suboptimal_pulls_bound, SurvivalEstimate};
use extbandit::environment::{ArmSpec, Task};
use extbandit::experiment::{horizon_report, simulate};
use extbandit::metrics::mean_curve;
use extbandit::seed::rng_from_seed;
use extbandit::{Distribution, PolicyConfig};

/// Largest episode count accepted from the page, to keep the tab responsive.
const MAX_WORK: u64 = 5_000_000;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareRequest {
    pub arms: Vec<ArmSpec>,
    pub horizon: u64,
    pub repetitions: u32,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_alpha() -> f64 {
    0.5
}

#[derive(Debug, Serialize)]
pub struct PolicySummary {
    pub policy: String,
    /// Mean over repetitions of the best reward so far, per round.
    pub mean_best: Vec<f64>,
    pub mean_pulls: Vec<f64>,
    pub proxy_regret: f64,
    pub optimal_pulls: f64,
}

#[derive(Debug, Serialize)]
pub struct CompareResponse {
    pub best_arm: usize,
    pub oracle_best: Vec<f64>,
    pub policies: Vec<PolicySummary>,
}

fn distributions(arms: &[ArmSpec]) -> Result<Vec<Distribution>, String> {
    arms.iter()
        .map(|a| a.distribution().ok_or_else(|| "trace arms are not available in the browser".to_owned()))
        .collect()
}

/// MaxUCB, classical UCB and random selection on the same reward streams.
pub fn compare(req: &CompareRequest) -> Result<CompareResponse, String> {
    let work = req.horizon.saturating_mul(req.repetitions as u64).saturating_mul(req.arms.len() as u64 + 3);
    if work > MAX_WORK {
        return Err(format!("horizon x repetitions x (arms + 3) is {work}; keep it below {MAX_WORK}"));
    }
    if req.repetitions == 0 {
        return Err("repetitions must be >= 1".into());
    }
    let task = Task::from_distributions("demo", distributions(&req.arms)?).map_err(|e| e.to_string())?;
    let policies = [PolicyConfig::maxucb(req.alpha), PolicyConfig::ucb(req.alpha), PolicyConfig::random()];
    let ids: Vec<String> = policies.iter().map(|p| p.id().to_owned()).collect();
    let results = simulate(&task, &policies, req.horizon, req.repetitions, req.seed).map_err(|e| e.to_string())?;
    let rows = horizon_report(&results, &ids, &[req.horizon as usize]).map_err(|e| e.to_string())?;
    let best_arm = rows[0].best_arm;
    let oracle_best = mean_curve(&results.oracle_curves()[best_arm]).map_err(|e| e.to_string())?;
    let k = task.num_arms();
    let policies = ids
        .iter()
        .zip(&rows)
        .map(|(id, row)| {
            let reps = &results.runs[id];
            let mut pulls = vec![0.0; k];
            for ep in reps.values() {
                for (p, c) in pulls.iter_mut().zip(ep.pull_counts(k)) {
                    *p += c as f64 / reps.len() as f64;
                }
            }
            Ok(PolicySummary {
                policy: id.clone(),
                mean_best: mean_curve(&results.policy_curves(id)).map_err(|e| e.to_string())?,
                mean_pulls: pulls,
                proxy_regret: row.proxy_regret,
                optimal_pulls: row.optimal_pulls,
            })
        })
        .collect::<Result<_, String>>()?;
    Ok(CompareResponse {
        best_arm,
        oracle_best,
        policies,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeRequest {
    pub arm: ArmSpec,
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct ShapeResponse {
    pub l: f64,
    pub u: f64,
    pub b_hat: f64,
    pub eps: Vec<f64>,
    pub ratios: Vec<f64>,
    /// (x, empirical survival, analytic survival) on a grid over the sample range.
    pub survival: Vec<[f64; 3]>,
}

/// Shape constants and survival curve of one arm from fresh samples.
pub fn shape(req: &ShapeRequest) -> Result<ShapeResponse, String> {
    if req.samples as u64 > MAX_WORK {
        return Err(format!("at most {MAX_WORK} samples"));
    }
    let d = distributions(std::slice::from_ref(&req.arm))?[0];
    d.validate().map_err(|e| e.to_string())?;
    let mut rng = rng_from_seed(req.seed);
    let xs: Vec<f64> = (0..req.samples).map(|_| d.sample(&mut rng)).collect();
    let sc = estimate_shape_constants(&xs, 100).map_err(|e| e.to_string())?;
    let g = SurvivalEstimate::new(&xs).map_err(|e| e.to_string())?;
    let (lo, hi) = (g.min(), g.max());
    let survival = (0..=200)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / 200.0;
            [x, g.eval(x), d.survival(x)]
        })
        .collect();
    Ok(ShapeResponse {
        l: sc.l,
        u: sc.u,
        b_hat: sc.b_hat,
        eps: sc.eps_grid,
        ratios: sc.ratios,
        survival,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundRequest {
    pub l_star: f64,
    pub u: f64,
    pub delta: f64,
    pub alpha: f64,
    pub horizon: u64,
}

#[derive(Debug, Serialize)]
pub struct BoundResponse {
    pub bound: f64,
    /// Bound evaluated over alpha in [0, 2 * alpha_max] for plotting.
    pub curve: Vec<[f64; 2]>,
    pub balanced_alpha: Option<f64>,
}

/// Suboptimal-pull bound at the requested alpha, its curve over alpha, and
/// the balanced alpha when defined.
pub fn bound(req: &BoundRequest) -> Result<BoundResponse, String> {
    if !(req.l_star >= 0.0 && req.u >= 0.0 && req.delta >= 0.0 && req.alpha >= 0.0 && req.horizon >= 1) {
        return Err("inputs must be non-negative and T >= 1".into());
    }
    if req.horizon > 10_000_000 {
        return Err("T must be at most 1e7".into());
    }
    let balanced = balanced_alpha(req.l_star, req.delta, req.horizon).ok();
    let top = 2.0 * balanced.unwrap_or(req.alpha).max(req.alpha).max(0.1);
    let curve = (0..=100)
        .map(|i| {
            let a = top * i as f64 / 100.0;
            [a, suboptimal_pulls_bound(req.l_star, req.u, req.delta, a, req.horizon)]
        })
        .collect();
    Ok(BoundResponse {
        bound: suboptimal_pulls_bound(req.l_star, req.u, req.delta, req.alpha, req.horizon),
        curve,
        balanced_alpha: balanced,
    })
}

fn json_call<Q: for<'de> Deserialize<'de>, R: Serialize>(
    input: &str,
    f: impl Fn(&Q) -> Result<R, String>,
) -> Result<String, String> {
    let req: Q = serde_json::from_str(input).map_err(|e| format!("bad request: {e}"))?;
    let resp = f(&req)?;
    serde_json::to_string(&resp).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = comparePolicies)]
pub fn compare_policies(request: &str) -> Result<String, JsValue> {
    json_call(request, compare).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = shapeConstants)]
pub fn shape_constants(request: &str) -> Result<String, JsValue> {
    json_call(request, shape).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = pullBound)]
pub fn pull_bound(request: &str) -> Result<String, JsValue> {
    json_call(request, bound).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compare_round_trip() {
        let out = json_call(
            r#"{"arms":[{"kind":"truncated_uniform","low":0.0,"high":1.0},{"kind":"constant","value":0.2}],"horizon":30,"repetitions":5}"#,
            compare,
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["best_arm"], 0);
        assert_eq!(v["policies"].as_array().unwrap().len(), 3);
        assert_eq!(v["policies"][0]["mean_best"].as_array().unwrap().len(), 30);
        let pulls: f64 = v["policies"][2]["mean_pulls"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
        assert!((pulls - 30.0).abs() < 1e-9);
    }

    #[test]
    fn compare_rejects_bad_input() {
        assert!(json_call(r#"{"arms":[],"horizon":3,"repetitions":1,"bogus":1}"#, compare).is_err());
        let huge = r#"{"arms":[{"kind":"constant","value":0},{"kind":"constant","value":1}],"horizon":100000,"repetitions":1000}"#;
        assert!(json_call(huge, compare).unwrap_err().contains("below"));
        let trace = r#"{"arms":[{"kind":"trace","file":"a.csv","arm":0},{"kind":"constant","value":1}],"horizon":5,"repetitions":1}"#;
        assert!(json_call(trace, compare).is_err());
    }

    #[test]
    fn shape_of_uniform() {
        let r = shape(&ShapeRequest {
            arm: ArmSpec::TruncatedUniform { low: 0.0, high: 0.5 },
            samples: 50_000,
            seed: 1,
        })
        .unwrap();
        assert!((r.l - 2.0).abs() < 0.15 && (r.u - 2.0).abs() < 0.15);
        assert_eq!(r.survival.len(), 201);
        assert!(r.survival.iter().all(|p| (p[1] - p[2]).abs() < 0.02));
    }

    #[test]
    fn bound_values() {
        let r = bound(&BoundRequest {
            l_star: 1.0,
            u: 1.0,
            delta: 0.25,
            alpha: 0.5,
            horizon: 100,
        })
        .unwrap();
        assert!((r.bound - (20.0 + 10.0 * 100f64.ln())).abs() < 1e-9);
        assert!(r.balanced_alpha.is_some());
        assert_eq!(r.curve.len(), 101);
        assert!(bound(&BoundRequest { l_star: -1.0, u: 1.0, delta: 0.1, alpha: 0.5, horizon: 10 }).is_err());
    }
}
