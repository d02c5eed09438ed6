use crate::error::{Error, Result};

/// Empirical survival function G(x) = #{samples > x} / n over sorted samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalEstimate {
    sorted: Vec<f64>,
}

impl SurvivalEstimate {
    /// Needs at least two finite samples.
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: samples.len(),
            });
        }
        if let Some(x) = samples.iter().find(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("non-finite sample {x}")));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(SurvivalEstimate { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn min(&self) -> f64 {
        self.sorted[0]
    }

    pub fn max(&self) -> f64 {
        self.sorted[self.sorted.len() - 1]
    }

    fn count_above(&self, x: f64) -> usize {
        self.sorted.len() - self.sorted.partition_point(|&v| v <= x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.count_above(x) as f64 / self.sorted.len() as f64
    }

    /// Smallest sample x with G(x) <= q.
    pub fn inverse(&self, q: f64) -> f64 {
        let n = self.sorted.len();
        // G(sorted[i]) is non-increasing in i; find the first i where it drops to q.
        let i = self.sorted.partition_point(|&v| self.count_above(v) as f64 / n as f64 > q);
        self.sorted[i.min(n - 1)]
    }
}
