//! Evaluation statistics: regret proxies, pull counts, normalized loss,
//! bootstrap average ranks, win/tie/loss counts and the sign test.

mod comparison;
mod curves;
mod ranking;

pub use comparison::{is_tied, sign_test, wins_ties_losses, WtlRecord, TIE_TOLERANCE};
pub use curves::{
    max_so_far, mean_curve, normalized_loss, optimal_pull_count, proxy_regret, proxy_regret_curve, MaxSoFarCurve,
};
pub use ranking::{bootstrap_average_rank, fractional_ranks, percentile, RankSummary, BOOTSTRAP_ITERATIONS};
