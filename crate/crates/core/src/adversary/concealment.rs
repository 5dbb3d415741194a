//! Concealment (what Bob learns about `c`) and secrecy (what Eve learns).
//!
//! The exact method enumerates every challenge seed and extractor seed. For
//! fixed seeds the view distribution only depends on the noise through the
//! syndrome `M·e`, where `M` stacks the challenge rows over the extractor
//! row, so the sums over `x` and the observation collapse to one pass over
//! the noise patterns per seed pair.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{wilson_interval, SecurityReport, Z95};
use crate::bits::BitVector;
use crate::channel::WiretapChannel;
use crate::hashing::{evaluate_rows, lhl_bound, HashSpec};
use crate::measures::{accurate_sum, binary_entropy, conditional_entropy};
use crate::protocol::{commit_phase, ProtocolParams};
use crate::rng::{Role, Streams};
use crate::{Error, Result};
use rand::Rng;

/// Largest block length for exact enumeration.
pub const MAX_EXACT_N: usize = 8;
/// Largest `n + l_g` for exact enumeration.
pub const MAX_EXACT_SEED_BITS: usize = 14;
/// Cap on seed pairs times noise cells visited by one exact run.
pub const MAX_EXACT_WORK: u64 = 1 << 33;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum View {
    /// `V_B = (Y, transcript)`.
    Bob,
    /// `V_E = (Z, transcript)`.
    Eve,
    /// `(V_B, V_E)`.
    BobEve,
}

impl View {
    pub const ALL: [View; 3] = [View::Bob, View::Eve, View::BobEve];

    pub fn name(self) -> &'static str {
        match self {
            View::Bob => "bob",
            View::Eve => "eve",
            View::BobEve => "bob_eve",
        }
    }
}

/// Exact leakage of `c` into one view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewLeakage {
    pub view: View,
    /// `SD(view | c = 0, view | c = 1)`.
    pub sd: f64,
    /// `I(C; view)` in bits.
    pub mi: f64,
    /// Worst-case min-entropy of `X` given the view without `Q`.
    pub k_hat: f64,
    /// `2 · lhl_bound(k̂, 1)`.
    pub reference_bound: f64,
}

impl ViewLeakage {
    pub fn sd_report(&self, params: &ProtocolParams) -> SecurityReport {
        let mut r = SecurityReport::new(&format!("sd_{}", self.view.name()), params, 0);
        r.estimate = self.sd;
        r.exact = true;
        r.reference_bound = self.reference_bound;
        r
    }

    pub fn mi_report(&self, params: &ProtocolParams) -> SecurityReport {
        let mut r = SecurityReport::new(&format!("mi_{}", self.view.name()), params, 0);
        r.estimate = self.mi;
        r.exact = true;
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcealmentExact {
    pub bob: ViewLeakage,
    pub eve: ViewLeakage,
    pub bob_eve: ViewLeakage,
}

impl ConcealmentExact {
    pub fn view(&self, view: View) -> &ViewLeakage {
        match view {
            View::Bob => &self.bob,
            View::Eve => &self.eve,
            View::BobEve => &self.bob_eve,
        }
    }

    pub fn reports(&self, params: &ProtocolParams) -> Vec<SecurityReport> {
        View::ALL
            .iter()
            .flat_map(|&v| [self.view(v).sd_report(params), self.view(v).mi_report(params)])
            .collect()
    }
}

/// SD and mutual information of the pad bit for one seed pair.
///
/// `cells[2 s + b]` is the probability that the challenge syndrome is `s`
/// and the extractor bit is `b`, restricted to one observation class. The
/// returned pair is `(Σ_s |P(s,0) - P(s,1)|, Σ_s (P(s,0) + P(s,1)) (1 - h(·)))`;
/// both are exactly zero when every pair of cells is equal.
pub fn pad_leakage(cells: &[f64]) -> (f64, f64) {
    let mut sd = 0.0;
    let mut mi = 0.0;
    for pair in cells.chunks_exact(2) {
        let (f0, f1) = (pair[0], pair[1]);
        if f0 == f1 {
            continue;
        }
        sd += (f0 - f1).abs();
        let total = f0 + f1;
        if total > 0.0 {
            mi += total * (1.0 - binary_entropy(f0 / total).expect("ratio in [0, 1]"));
        }
    }
    (sd, mi)
}

/// Checks every precondition of [`view_leakage_exact`] without doing any
/// enumeration.
pub fn exact_preconditions(params: &ProtocolParams, view: View) -> Result<()> {
    let (n, l) = (params.n(), params.challenge_bits());
    if params.commit_bits() != 1 {
        return Err(Error::Unsupported(format!(
            "exact concealment needs m_c = 1, got {}",
            params.commit_bits()
        )));
    }
    if n > MAX_EXACT_N || n + l > MAX_EXACT_SEED_BITS {
        return Err(Error::Scale(format!(
            "exact concealment needs n <= {MAX_EXACT_N} and n + l_g <= {MAX_EXACT_SEED_BITS}, got n = {n}, l_g = {l}"
        )));
    }
    let pairs = 1u64 << (2 * n + l - 1);
    let classes = if view == View::BobEve { 1u64 << n } else { 1 };
    let work = pairs.saturating_mul(classes << n);
    if work > MAX_EXACT_WORK {
        return Err(Error::Scale(format!(
            "exact {} view needs {work} steps, budget is {MAX_EXACT_WORK}",
            view.name()
        )));
    }
    Ok(())
}

/// Noise weight tables, one per observation class. For a single receiver
/// there is one class; for the joint view class `d = y ⊕ z` holds the weights
/// `P(N_B = e, N_E = e ⊕ d)` indexed by `e`.
fn noise_tables(n: usize, channel: &WiretapChannel, view: View) -> Vec<Vec<f64>> {
    let size = 1usize << n;
    let powers = |w: f64| -> Vec<f64> { (0..=n as i32).map(|k| w.powi(k)).collect() };
    let bsc = |f: f64| -> Vec<Vec<f64>> {
        let (flip, keep) = (powers(f), powers(1.0 - f));
        vec![(0..size)
            .map(|e| {
                let w = (e as u64).count_ones() as usize;
                flip[w] * keep[n - w]
            })
            .collect()]
    };
    match view {
        View::Bob => bsc(channel.p()),
        View::Eve => bsc(channel.q()),
        View::BobEve => {
            let pmf = channel.noise_pmf();
            let w00 = powers(pmf.prob(false, false));
            let w11 = powers(pmf.prob(true, true));
            let w01 = powers(pmf.prob(false, true));
            let w10 = powers(pmf.prob(true, false));
            let all = size as u64 - 1;
            (0..size as u64)
                .map(|d| {
                    (0..size as u64)
                        .map(|e| {
                            let both_keep = (!e & !d & all).count_ones() as usize;
                            let both_flip = (e & !d).count_ones() as usize;
                            let eve_only = (!e & d & all).count_ones() as usize;
                            let bob_only = (e & d).count_ones() as usize;
                            w00[both_keep] * w11[both_flip] * w01[eve_only] * w10[bob_only]
                        })
                        .collect()
                })
                .collect()
        }
    }
}

struct SeedTotals {
    sd: f64,
    mi: f64,
    k_hat: f64,
}

fn leakage_for_challenge(n: usize, l_g: usize, g_index: u64, tables: &[Vec<f64>]) -> SeedTotals {
    let size = 1usize << n;
    let g = HashSpec::from_index(n, l_g, g_index).expect("valid dimensions");
    let g_rows = g.row_words();
    let syn: Vec<u64> = (0..size as u64).map(|e| evaluate_rows(&g_rows, e)).collect();

    // Min-entropy of X given (observation, challenge value).
    let mut k_hat = f64::INFINITY;
    let mut best = vec![0.0f64; 1 << l_g];
    let mut mass = vec![0.0f64; 1 << l_g];
    for t in tables {
        best.iter_mut().for_each(|v| *v = 0.0);
        mass.iter_mut().for_each(|v| *v = 0.0);
        for (e, &w) in t.iter().enumerate() {
            let s = syn[e] as usize;
            best[s] = best[s].max(w);
            mass[s] += w;
        }
        for (b, m) in best.iter().zip(&mass) {
            if *m > 0.0 {
                k_hat = k_hat.min(-(b / m).log2());
            }
        }
    }

    let cells = 2usize << l_g;
    let mut acc = vec![0.0f64; cells];
    let mut sd = Vec::with_capacity(size * tables.len());
    let mut mi = Vec::with_capacity(size * tables.len());
    for ext_index in 0..size as u64 {
        // The extractor seed is its single row, reversed.
        let ext = HashSpec::from_index(n, 1, ext_index).expect("valid dimensions");
        let ext_row = ext.row_words()[0];
        for t in tables {
            acc.iter_mut().for_each(|v| *v = 0.0);
            for (e, &w) in t.iter().enumerate() {
                let bit = ((ext_row & e as u64).count_ones() & 1) as u64;
                acc[((syn[e] << 1) | bit) as usize] += w;
            }
            let (s, m) = pad_leakage(&acc);
            sd.push(s);
            mi.push(m);
        }
    }
    SeedTotals {
        sd: accurate_sum(sd),
        mi: accurate_sum(mi),
        k_hat,
    }
}

/// Exact leakage of a one-bit commitment into `view`, averaged over all
/// challenge and extractor seeds.
pub fn view_leakage_exact(params: &ProtocolParams, channel: &WiretapChannel, view: View) -> Result<ViewLeakage> {
    exact_preconditions(params, view)?;
    if channel.config() != params.channel_config() {
        return Err(Error::InvalidCoupling(
            "channel does not match parameters".to_string(),
        ));
    }
    let (n, l_g) = (params.n(), params.challenge_bits());
    let g_seeds = 1u64 << (n + l_g - 1);
    let pairs = g_seeds << n;
    let tables = noise_tables(n, channel, view);
    let per_seed: Vec<SeedTotals> = (0..g_seeds)
        .into_par_iter()
        .map(|g| leakage_for_challenge(n, l_g, g, &tables))
        .collect();
    let sd = accurate_sum(per_seed.iter().map(|s| s.sd)) / pairs as f64;
    let mi = accurate_sum(per_seed.iter().map(|s| s.mi)) / pairs as f64;
    let k_hat = per_seed.iter().map(|s| s.k_hat).fold(f64::INFINITY, f64::min);
    Ok(ViewLeakage {
        view,
        sd,
        mi: mi.max(0.0),
        k_hat,
        reference_bound: 2.0 * lhl_bound(k_hat, params.commit_bits()),
    })
}

/// Exact leakage into Bob's view, Eve's view and both together.
pub fn concealment_exact(params: &ProtocolParams, channel: &WiretapChannel) -> Result<ConcealmentExact> {
    Ok(ConcealmentExact {
        bob: view_leakage_exact(params, channel, View::Bob)?,
        eve: view_leakage_exact(params, channel, View::Eve)?,
        bob_eve: view_leakage_exact(params, channel, View::BobEve)?,
    })
}

/// Monte-Carlo distinguisher result.
#[derive(Debug, Clone, PartialEq)]
pub struct McConcealment {
    pub view: View,
    /// `2 · accuracy - 1` of the trained rule on fresh samples.
    pub advantage: f64,
    /// Standard error of `advantage`.
    pub std_error: f64,
    /// Miller–Madow corrected plug-in estimate of `I(C; features)`.
    pub mi_estimate: f64,
    pub report: SecurityReport,
}

/// Syndrome bits of the challenge kept as features.
const MAX_FEATURE_SYNDROME: usize = 8;

fn feature_key(params: &ProtocolParams, view: View, streams: Streams, ideal_pad: bool) -> Result<(bool, u64)> {
    let mut rngs = streams.parties();
    let c = BitVector::random(1, &mut rngs.alice);
    let session = commit_phase(params, &c, &params.channel(), &mut rngs)?;
    let t = session.transcript();
    let q = if ideal_pad {
        let u: bool = streams.stream(Role::Auxiliary).random();
        c.get(0) ^ u
    } else {
        t.masked_commit.get(0)
    };
    let keep = if ideal_pad {
        0
    } else {
        params.challenge_bits().min(MAX_FEATURE_SYNDROME)
    };
    let mut key = t.extractor.seed().weight().min(0xfff) as u64;
    let mut push = |obs: &BitVector| -> Result<()> {
        let syn = t.challenge.evaluate(obs)?.xor(&t.challenge_value)?;
        for i in 0..keep {
            key = (key << 1) | syn.get(i) as u64;
        }
        key = (key << 1) | (t.extractor.evaluate(obs)?.get(0) ^ q) as u64;
        Ok(())
    };
    if view != View::Eve {
        push(session.bob_view().y)?;
    }
    if view != View::Bob {
        push(session.eve_view().z)?;
    }
    Ok((c.get(0), key))
}

fn plug_in_entropy_mm<I: IntoIterator<Item = u64>>(counts: I, total: f64) -> f64 {
    let mut h = 0.0;
    let mut cells = 0usize;
    for k in counts.into_iter().filter(|&k| k > 0) {
        let p = k as f64 / total;
        h -= p * p.log2();
        cells += 1;
    }
    h + (cells as f64 - 1.0) / (2.0 * total * std::f64::consts::LN_2)
}

/// Trains a maximum-a-posteriori rule for `c` on `trials` sampled views and
/// scores it on `trials` fresh ones. Features are the challenge syndrome
/// (up to eight bits), the extractor output XOR `Q` for each observation,
/// and the extractor seed weight. With `ideal_pad` the pad is a fresh
/// uniform bit and the challenge value is withheld.
pub fn concealment_monte_carlo(
    params: &ProtocolParams,
    channel: &WiretapChannel,
    view: View,
    trials: u64,
    seed: u64,
    ideal_pad: bool,
) -> Result<McConcealment> {
    if params.commit_bits() != 1 {
        return Err(Error::Unsupported(format!(
            "distinguisher needs m_c = 1, got {}",
            params.commit_bits()
        )));
    }
    if channel.config() != params.channel_config() {
        return Err(Error::InvalidCoupling(
            "channel does not match parameters".to_string(),
        ));
    }
    let trials = trials.max(1);
    let samples = (0..2 * trials)
        .into_par_iter()
        .map(|t| feature_key(params, view, Streams::new(seed, t), ideal_pad))
        .collect::<Result<Vec<_>>>()?;
    let (train, test) = samples.split_at(trials as usize);

    let mut counts: HashMap<u64, [u64; 2]> = HashMap::new();
    for &(c, key) in train {
        counts.entry(key).or_default()[c as usize] += 1;
    }
    let correct = test
        .iter()
        .filter(|(c, key)| {
            let guess = counts.get(key).is_some_and(|n| n[1] > n[0]);
            guess == *c
        })
        .count() as u64;
    let acc = correct as f64 / trials as f64;
    let advantage = 2.0 * acc - 1.0;
    let std_error = 2.0 * (acc * (1.0 - acc) / trials as f64).sqrt();

    let mut joint: BTreeMap<(bool, u64), u64> = BTreeMap::new();
    let mut keys: BTreeMap<u64, u64> = BTreeMap::new();
    let mut ones = 0u64;
    for &(c, key) in test {
        *joint.entry((c, key)).or_default() += 1;
        *keys.entry(key).or_default() += 1;
        ones += c as u64;
    }
    let total = trials as f64;
    let mi_estimate = (plug_in_entropy_mm([ones, trials - ones], total)
        + plug_in_entropy_mm(keys.values().copied(), total)
        - plug_in_entropy_mm(joint.values().copied(), total))
    .max(0.0);

    let metric = format!("advantage_{}{}", view.name(), if ideal_pad { "_ideal_pad" } else { "" });
    let (lo, hi) = wilson_interval(correct, trials);
    let mut report = SecurityReport::new(&metric, params, seed).with_interval((2.0 * lo - 1.0, 2.0 * hi - 1.0));
    report.estimate = advantage;
    report.trials = trials;
    report.reference_bound = mc_reference_bound(params, channel, view)?;
    Ok(McConcealment {
        view,
        advantage,
        std_error,
        mi_estimate,
        report,
    })
}

impl McConcealment {
    /// Normal-approximation 95% interval `advantage ± 1.96 se`.
    pub fn normal_interval(&self) -> (f64, f64) {
        (
            self.advantage - Z95 * self.std_error,
            self.advantage + Z95 * self.std_error,
        )
    }
}

/// `2 · lhl_bound(n H(X | obs) - l_g, 1)` with the single-letter conditional
/// entropy under uniform input.
fn mc_reference_bound(params: &ProtocolParams, channel: &WiretapChannel, view: View) -> Result<f64> {
    let joint = channel.one_shot_joint(0.5);
    let given: &[usize] = match view {
        View::Bob => &[1],
        View::Eve => &[2],
        View::BobEve => &[1, 2],
    };
    let h = conditional_entropy(&joint, &[0], given)?;
    let k = params.n() as f64 * h - params.challenge_bits() as f64;
    Ok(2.0 * lhl_bound(k, params.commit_bits()))
}
