use crate::error::{Error, Result};

/// Closeness tolerance for declaring a tie.
pub const TIE_TOLERANCE: f64 = 1e-8;

/// Tie iff `|a - b| <= 1e-8 * (1 + max(|a|, |b|))`.
pub fn is_tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * (1.0 + a.abs().max(b.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WtlRecord {
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
    pub tolerance: f64,
}

impl WtlRecord {
    pub fn tasks(&self) -> usize {
        self.wins + self.ties + self.losses
    }

    /// One-sided sign-test p-value of the candidate beating the reference.
    pub fn p_value(&self) -> f64 {
        sign_test(self.wins as u64, self.losses as u64)
    }
}

/// Compares per-task mean final performance (higher is better) of a
/// candidate against a reference.
pub fn wins_ties_losses(candidate: &[f64], reference: &[f64]) -> Result<WtlRecord> {
    if candidate.len() != reference.len() {
        return Err(Error::Ragged(format!(
            "{} candidate tasks vs {} reference tasks",
            candidate.len(),
            reference.len()
        )));
    }
    let mut rec = WtlRecord {
        wins: 0,
        ties: 0,
        losses: 0,
        tolerance: TIE_TOLERANCE,
    };
    for (&a, &b) in candidate.iter().zip(reference) {
        if is_tied(a, b) {
            rec.ties += 1;
        } else if a > b {
            rec.wins += 1;
        } else {
            rec.losses += 1;
        }
    }
    Ok(rec)
}

/// Exact one-sided binomial sign test: `P[Bin(n, 1/2) >= wins]` with
/// `n = wins + losses`; 1 when there are no decisive comparisons.
///
/// Summed in log space, so it stays accurate for n in the tens of thousands.
pub fn sign_test(wins: u64, losses: u64) -> f64 {
    let n = wins + losses;
    if n == 0 || wins == 0 {
        return 1.0;
    }
    // ln C(n, k) for k = wins..=n, built by the ratio C(n, k+1) = C(n, k) (n-k)/(k+1).
    let mut log_c: f64 = (1..=wins).map(|j| ((n - wins + j) as f64 / j as f64).ln()).sum();
    let mut terms = Vec::with_capacity((n - wins + 1) as usize);
    for k in wins..=n {
        terms.push(log_c);
        if k < n {
            log_c += ((n - k) as f64 / (k + 1) as f64).ln();
        }
    }
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - top).exp()).sum();
    (top + sum.ln() - n as f64 * std::f64::consts::LN_2).exp().min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Exact tail from Pascal's triangle in integers.
    fn exact_tail(wins: u64, losses: u64) -> f64 {
        let n = (wins + losses) as usize;
        let mut row = vec![1u128];
        for _ in 0..n {
            let mut next = vec![1u128; row.len() + 1];
            for k in 1..row.len() {
                next[k] = row[k - 1] + row[k];
            }
            row = next;
        }
        let tail: u128 = row[wins as usize..].iter().sum();
        tail as f64 / (1u128 << n) as f64
    }

    #[test]
    fn smallest_cases() {
        assert_eq!(sign_test(1, 0), 0.5);
        assert_eq!(sign_test(0, 0), 1.0);
        assert_eq!(sign_test(0, 5), 1.0);
        assert!((sign_test(3, 0) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn matches_integer_oracle_up_to_60() {
        for n in 0..=60u64 {
            for w in 0..=n {
                let p = sign_test(w, n - w);
                let q = exact_tail(w, n - w);
                assert!((p - q).abs() <= 1e-12 * q.max(1e-300) + 1e-15, "n={n} w={w}: {p} vs {q}");
            }
        }
    }

    #[test]
    fn large_n_is_finite_and_symmetric() {
        let p = sign_test(5000, 5000);
        // P[X >= n/2] = 1/2 + P[X = n/2]/2
        assert!(p > 0.5 && p < 0.51, "{p}");
        let q = sign_test(6000, 4000);
        assert!(q > 0.0 && q < 1e-80);
    }

    #[test]
    fn tie_rule() {
        assert!(is_tied(0.3, 0.3));
        assert!(is_tied(0.3 + 1e-12, 0.3));
        assert!(!is_tied(0.4, 0.3));
        let r = wins_ties_losses(&[0.4, 0.3, 0.1], &[0.3, 0.3, 0.2]).unwrap();
        assert_eq!((r.wins, r.ties, r.losses), (1, 1, 1));
        assert!(wins_ties_losses(&[0.1], &[]).is_err());
    }

    proptest! {
        #[test]
        fn sign_test_decreasing_in_wins(n in 1u64..400) {
            let mut prev = 1.0f64;
            for w in 0..=n {
                let p = sign_test(w, n - w);
                prop_assert!(p <= prev * (1.0 + 1e-12));
                prev = p;
            }
        }

        #[test]
        fn swapping_swaps_wins_and_losses(
            a in prop::collection::vec(-2.0f64..2.0, 0..30),
            noise in prop::collection::vec(prop::sample::select(vec![0.0, 1e-13, -1e-13, 0.1, -0.2]), 30),
        ) {
            let b: Vec<f64> = a.iter().zip(&noise).map(|(x, e)| x + e).collect();
            let fwd = wins_ties_losses(&a, &b).unwrap();
            let rev = wins_ties_losses(&b, &a).unwrap();
            prop_assert_eq!(fwd.tasks(), a.len());
            prop_assert_eq!((fwd.wins, fwd.ties, fwd.losses), (rev.losses, rev.ties, rev.wins));
        }
    }
}
