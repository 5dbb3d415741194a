//! Security estimators: honest-rejection (soundness), binding attacks with
//! and without Eve's help, and concealment/secrecy leakage measured exactly
//! by enumeration or by Monte Carlo.

mod binding;
mod concealment;
mod soundness;

pub use binding::{
    binding_attack, binding_trial, enumerate_confusables, BindingMode, BindingRun, BindingTrial,
    ConfusableSet, MAX_ATTACK_CANDIDATES, MAX_EXHAUSTIVE_N,
};
pub use concealment::{
    concealment_exact, concealment_monte_carlo, exact_preconditions, pad_leakage, view_leakage_exact, ConcealmentExact,
    McConcealment, View, ViewLeakage, MAX_EXACT_N, MAX_EXACT_SEED_BITS, MAX_EXACT_WORK,
};
pub use soundness::{estimate_soundness, hoeffding_rejection_bound};

use serde::{Deserialize, Serialize};

use crate::protocol::ProtocolParams;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// One measured security quantity together with the analytic bound it is
/// checked against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityReport {
    pub metric: String,
    pub estimate: f64,
    /// 95% interval; absent for exact values and for estimators without one.
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    /// True only for full-enumeration results.
    pub exact: bool,
    pub trials: u64,
    /// NaN when no analytic bound applies.
    pub reference_bound: f64,
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub coupling: String,
    pub seed: u64,
}

impl SecurityReport {
    pub(crate) fn new(metric: &str, params: &ProtocolParams, seed: u64) -> Self {
        let ch = params.channel_config();
        Self {
            metric: metric.to_string(),
            estimate: f64::NAN,
            ci_lo: None,
            ci_hi: None,
            exact: false,
            trials: 0,
            reference_bound: f64::NAN,
            n: params.n(),
            p: ch.p,
            q: ch.q,
            coupling: params.channel().coupling().name().to_string(),
            seed,
        }
    }

    pub(crate) fn with_interval(mut self, (lo, hi): (f64, f64)) -> Self {
        self.ci_lo = Some(lo);
        self.ci_hi = Some(hi);
        self
    }
}

/// Wilson score interval at 95% for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}
