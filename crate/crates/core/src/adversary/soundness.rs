use rayon::prelude::*;

use super::{wilson_interval, SecurityReport};
use crate::channel::WiretapChannel;
use crate::protocol::{honest_run, ProtocolParams};
use crate::rng::Streams;
use crate::Result;

/// Hoeffding bound `2 exp(-2 n α₁²)` on `P(X ∉ L(Y))`, capped at one.
pub fn hoeffding_rejection_bound(n: usize, alpha1: f64) -> f64 {
    (2.0 * (-2.0 * n as f64 * alpha1 * alpha1).exp()).min(1.0)
}

/// Empirical honest-rejection rate over `trials` seeded sessions.
pub fn estimate_soundness(
    params: &ProtocolParams,
    channel: &WiretapChannel,
    trials: u64,
    seed: u64,
) -> Result<SecurityReport> {
    let outcomes = (0..trials.max(1))
        .into_par_iter()
        .map(|t| honest_run(params, channel, Streams::new(seed, t)).map(|r| r.accepted))
        .collect::<Result<Vec<bool>>>()?;
    let trials = outcomes.len() as u64;
    let rejected = outcomes.iter().filter(|a| !**a).count() as u64;
    let mut report = SecurityReport::new("soundness_rejection_rate", params, seed)
        .with_interval(wilson_interval(rejected, trials));
    report.estimate = rejected as f64 / trials as f64;
    report.trials = trials;
    report.reference_bound = hoeffding_rejection_bound(params.n(), params.alpha1());
    Ok(report)
}
