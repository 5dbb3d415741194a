//! Binding attacks by a cheating Alice.
//!
//! After the commit phase Alice wants two different openings `x̄ != x̂` that
//! Bob would both accept. Both must hash to the published `ḡ`, so she picks
//! them from the coset `{x' : G(x') = ḡ}`. She cannot see `y`, so she ranks
//! every candidate pair by the posterior probability that both land in
//! Bob's distance band, using the per-position flip probabilities she
//! believes in: `p` everywhere when alone, or `P(N_B = 1 | N_E)` when Eve
//! hands her `z`. The attack succeeds when her best pair is in the band
//! around the true `y`.
//!
//! The confusable set `𝒜` (hash-consistent strings in the band around `y`)
//! is enumerated exhaustively as the oracle: a success always implies
//! `|𝒜| >= 2`.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{wilson_interval, SecurityReport};
use crate::bits::BitVector;
use crate::channel::WiretapChannel;
use crate::protocol::{commit_phase, ProtocolParams, SessionState};
use crate::rng::Streams;
use crate::{Error, Result};

/// Largest `n` for exhaustive search over `{0,1}^n`.
pub const MAX_EXHAUSTIVE_N: usize = 20;

/// Alice scores pairs among at most this many hash-consistent candidates,
/// taken in order of distance from the transmitted `x`.
pub const MAX_ATTACK_CANDIDATES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingMode {
    Alone,
    WithEve,
}

/// Hash-consistent strings inside Bob's band for one session.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusableSet {
    n: usize,
    /// Members as integers, vector bit `i` at integer bit `n - 1 - i`.
    members: Vec<u64>,
}

impl ConfusableSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn words(&self) -> &[u64] {
        &self.members
    }

    pub fn contains(&self, x: &BitVector) -> bool {
        x.len() == self.n
            && x
                .to_u64()
                .is_some_and(|w| self.members.binary_search(&w).is_ok())
    }

    pub fn iter(&self) -> impl Iterator<Item = BitVector> + '_ {
        self.members.iter().map(|&w| BitVector::from_u64(w, self.n))
    }

    /// `η̂ = log₂ max(|𝒜|, 1) / n`.
    pub fn eta_hat(&self) -> f64 {
        (self.members.len().max(1) as f64).log2() / self.n as f64
    }
}

fn check_scale(n: usize) -> Result<()> {
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::Scale(format!(
            "exhaustive search needs n <= {MAX_EXHAUSTIVE_N}, got {n}"
        )));
    }
    Ok(())
}

/// All `x'` with `G(x') = ḡ`, ascending, by Gray-code walk over `{0,1}^n`.
fn hash_coset(session: &SessionState) -> Vec<u64> {
    let t = session.transcript();
    let n = t.challenge.input_bits();
    let cols = t.challenge.column_words();
    // Flipping integer bit b toggles vector bit n - 1 - b.
    let by_int_bit: Vec<u64> = (0..n).map(|b| cols[n - 1 - b]).collect();
    let target = t.challenge_value.to_u64().expect("challenge fits in a word");
    let mut out = Vec::new();
    let mut h = 0u64;
    for k in 0u64..(1u64 << n) {
        if k > 0 {
            h ^= by_int_bit[k.trailing_zeros() as usize];
        }
        if h == target {
            out.push(k ^ (k >> 1));
        }
    }
    out.sort_unstable();
    out
}

fn in_band(params: &ProtocolParams, a: u64, b: u64) -> bool {
    params.band_contains((a ^ b).count_ones() as usize)
}

/// Exhaustive confusable set `𝒜` for a session.
pub fn enumerate_confusables(session: &SessionState, params: &ProtocolParams) -> Result<ConfusableSet> {
    check_scale(params.n())?;
    let y = session.bob_view().y.to_u64().expect("n <= 20");
    let members = hash_coset(session)
        .into_iter()
        .filter(|&w| in_band(params, w, y))
        .collect();
    Ok(ConfusableSet {
        n: params.n(),
        members,
    })
}

/// Probability that both `d_H(x ⊕ u, Y)` and `d_H(x ⊕ v, Y)` land in
/// `[lo, hi]` when `Y = x ⊕ N` with independent per-position flips.
/// Positions are grouped into classes sharing a flip probability; scores
/// depend only on per-class overlap counts and are memoized on them.
struct PairScorer {
    band: Option<(usize, usize)>,
    classes: Vec<(u64, f64)>,
    memo: HashMap<Vec<u8>, f64>,
}

impl PairScorer {
    fn new(band: Option<(usize, usize)>, classes: Vec<(u64, f64)>) -> Self {
        Self {
            band,
            classes,
            memo: HashMap::new(),
        }
    }

    fn score(&mut self, u: u64, v: u64) -> f64 {
        let Some((lo, hi)) = self.band else {
            return 0.0;
        };
        let mut key = Vec::with_capacity(4 * self.classes.len());
        for &(m, _) in &self.classes {
            let c11 = (u & v & m).count_ones();
            let c10 = (u & !v & m).count_ones();
            let c01 = (!u & v & m).count_ones();
            let c00 = m.count_ones() - c11 - c10 - c01;
            key.extend([c00 as u8, c01 as u8, c10 as u8, c11 as u8]);
        }
        if let Some(&s) = self.memo.get(&key) {
            return s;
        }
        let s = band_pair_probability(&key, &self.classes, lo, hi);
        self.memo.insert(key, s);
        s
    }
}

fn band_pair_probability(counts: &[u8], classes: &[(u64, f64)], lo: usize, hi: usize) -> f64 {
    // Distances above `hi` are absorbed into `cap`.
    let cap = hi + 1;
    let width = cap + 1;
    let mut dist = vec![0.0f64; width * width];
    dist[0] = 1.0;
    let mut next = vec![0.0f64; width * width];
    for (ci, &(_, pi)) in classes.iter().enumerate() {
        for (ty, &count) in counts[4 * ci..4 * ci + 4].iter().enumerate() {
            // Counts are stored c00, c01, c10, c11: ty = 2 * u_bit + v_bit.
            let (a, b) = (ty >> 1, ty & 1);
            for _ in 0..count {
                next.iter_mut().for_each(|v| *v = 0.0);
                for d1 in 0..width {
                    for d2 in 0..width {
                        let mass = dist[d1 * width + d2];
                        if mass == 0.0 {
                            continue;
                        }
                        // No flip: distance grows where the candidate differs from x.
                        let (s1, s2) = ((d1 + a).min(cap), (d2 + b).min(cap));
                        next[s1 * width + s2] += mass * (1.0 - pi);
                        let (f1, f2) = ((d1 + 1 - a).min(cap), (d2 + 1 - b).min(cap));
                        next[f1 * width + f2] += mass * pi;
                    }
                }
                std::mem::swap(&mut dist, &mut next);
            }
        }
    }
    let mut total = 0.0;
    for d1 in lo..=hi {
        for d2 in lo..=hi {
            total += dist[d1 * width + d2];
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq)]
pub struct BindingTrial {
    /// `|G⁻¹(ḡ)|`.
    pub hash_consistent: usize,
    /// `|𝒜|`.
    pub confusable: usize,
    /// Two distinct members of `𝒜` exist.
    pub pair_exists: bool,
    /// Alice's chosen openings, as integers.
    pub chosen: Option<(u64, u64)>,
    /// Alice's posterior probability that her pair passes the band test.
    pub attack_score: f64,
    pub success: bool,
    /// `min(1, |𝒜|² 2^-l_g)`.
    pub ceiling: f64,
}

/// One seeded binding attempt.
pub fn binding_trial(
    params: &ProtocolParams,
    channel: &WiretapChannel,
    mode: BindingMode,
    streams: Streams,
) -> Result<BindingTrial> {
    let n = params.n();
    check_scale(n)?;
    let mut rngs = streams.parties();
    let c = BitVector::random(params.commit_bits(), &mut rngs.alice);
    let session = commit_phase(params, &c, channel, &mut rngs)?;

    let x = session.alice_view().x.to_u64().expect("n <= 20");
    let y = session.bob_view().y.to_u64().expect("n <= 20");
    let z = session.eve_view().z.to_u64().expect("n <= 20");
    let coset = hash_coset(&session);
    let confusable = coset.iter().filter(|&&w| in_band(params, w, y)).count();

    let all = if n == 64 { !0 } else { (1u64 << n) - 1 };
    let classes = match mode {
        BindingMode::Alone => vec![(all, channel.p())],
        BindingMode::WithEve => {
            let eve_flips = (z ^ x) & all;
            let (pi0, pi1) = (channel.bob_flip_given_eve(false), channel.bob_flip_given_eve(true));
            if pi0 == pi1 {
                vec![(all, pi0)]
            } else {
                vec![(all & !eve_flips, pi0), (eve_flips, pi1)]
            }
        }
    };
    let mut scorer = PairScorer::new(params.band_range(), classes);

    let mut candidates: Vec<u64> = coset.iter().map(|&w| w ^ x).collect();
    candidates.sort_unstable_by_key(|&u| (u.count_ones(), u));
    candidates.truncate(MAX_ATTACK_CANDIDATES);

    let mut best: Option<((u64, u64), f64)> = None;
    for (i, &u) in candidates.iter().enumerate() {
        for &v in &candidates[i + 1..] {
            let s = scorer.score(u, v);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some(((u, v), s));
            }
        }
    }

    let chosen = best.map(|((u, v), _)| (x ^ u, x ^ v));
    let success = chosen.is_some_and(|(a, b)| in_band(params, a, y) && in_band(params, b, y));
    let l_g = params.challenge_bits() as i32;
    Ok(BindingTrial {
        hash_consistent: coset.len(),
        confusable,
        pair_exists: confusable >= 2,
        chosen,
        attack_score: best.map_or(0.0, |(_, s)| s),
        success,
        ceiling: ((confusable * confusable) as f64 * (-l_g as f64).exp2()).min(1.0),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BindingRun {
    pub mode: BindingMode,
    pub trials: Vec<BindingTrial>,
    /// Success rate with Wilson interval and the `2^-n β'` reference.
    pub report: SecurityReport,
    pub mean_confusable: f64,
    /// `log₂ max(mean |𝒜|, 1) / n`.
    pub eta_hat: f64,
    /// `β' = l_g / n - 2 η̂`.
    pub beta_prime: f64,
    /// Mean of the per-trial `|𝒜|² 2^-l_g` ceilings.
    pub mean_ceiling: f64,
}

impl BindingRun {
    pub fn successes(&self) -> u64 {
        self.trials.iter().filter(|t| t.success).count() as u64
    }

    pub fn success_rate(&self) -> f64 {
        self.report.estimate
    }

    /// False when the challenge is too short for the measured confusable
    /// set (`β₁ <= 2 η̂`), so the reference bound is vacuous.
    pub fn challenge_exceeds_confusion(&self) -> bool {
        self.beta_prime > 0.0
    }
}

/// Runs `trials` seeded binding attempts. Trial `t` uses the streams
/// `(seed, t)`, so runs that differ only in mode or challenge length see the
/// same `x`, noise and hash seed bits.
pub fn binding_attack(
    params: &ProtocolParams,
    channel: &WiretapChannel,
    mode: BindingMode,
    trials: u64,
    seed: u64,
) -> Result<BindingRun> {
    check_scale(params.n())?;
    let results = (0..trials.max(1))
        .into_par_iter()
        .map(|t| binding_trial(params, channel, mode, Streams::new(seed, t)))
        .collect::<Result<Vec<_>>>()?;
    let count = results.len() as u64;
    let successes = results.iter().filter(|t| t.success).count() as u64;
    let mean_confusable = results.iter().map(|t| t.confusable as f64).sum::<f64>() / count as f64;
    let mean_ceiling = results.iter().map(|t| t.ceiling).sum::<f64>() / count as f64;
    let n = params.n() as f64;
    let eta_hat = mean_confusable.max(1.0).log2() / n;
    let beta_prime = params.challenge_bits() as f64 / n - 2.0 * eta_hat;

    let metric = match mode {
        BindingMode::Alone => "binding_success_alone",
        BindingMode::WithEve => "binding_success_with_eve",
    };
    let mut report =
        SecurityReport::new(metric, params, seed).with_interval(wilson_interval(successes, count));
    report.estimate = successes as f64 / count as f64;
    report.trials = count;
    report.reference_bound = (-n * beta_prime).exp2().min(1.0);
    Ok(BindingRun {
        mode,
        trials: results,
        report,
        mean_confusable,
        eta_hat,
        beta_prime,
        mean_ceiling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ChannelConfig, CouplingKind};
    use crate::protocol::{list_membership, ParamsSpec, Privacy};

    fn params(n: usize, p: f64, alpha1: f64, l_g: usize, coupling: CouplingKind) -> ProtocolParams {
        ParamsSpec {
            n,
            privacy: Privacy::One,
            alpha1,
            beta1: 0.1,
            beta2: 0.2,
            commit_bits: Some(1),
            challenge_bits: Some(l_g),
        }
        .derive(&ChannelConfig {
            p,
            q: 0.3,
            coupling,
            r: None,
        })
        .unwrap()
    }

    fn session(p: &ProtocolParams, seed: u64) -> SessionState {
        let mut rngs = Streams::new(seed, 0).parties();
        let c = BitVector::random(p.commit_bits(), &mut rngs.alice);
        commit_phase(p, &c, &p.channel(), &mut rngs).unwrap()
    }

    /// Oracle: filter `{0,1}^n` by R3 conditions (i) and (ii) directly.
    fn brute_confusables(s: &SessionState, p: &ProtocolParams) -> Vec<u64> {
        let t = s.transcript();
        (0..1u64 << p.n())
            .filter(|&w| {
                let x = BitVector::from_u64(w, p.n());
                list_membership(&x, s.bob_view().y, p).unwrap()
                    && t.challenge.evaluate(&x).unwrap() == t.challenge_value
            })
            .collect()
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let p = params(10, 0.25, 0.15, 3, CouplingKind::Independent);
        for seed in 0..5 {
            let s = session(&p, seed);
            let set = enumerate_confusables(&s, &p).unwrap();
            assert_eq!(set.words(), brute_confusables(&s, &p).as_slice());
            let x = s.alice_view().x;
            if list_membership(x, s.bob_view().y, &p).unwrap() {
                assert!(set.contains(x));
            }
        }
    }

    #[test]
    fn wide_band_single_bit_challenge_halves_the_space() {
        let p = params(8, 0.25, 0.9, 1, CouplingKind::Independent);
        for seed in 0..20 {
            let s = session(&p, seed);
            let set = enumerate_confusables(&s, &p).unwrap();
            if s.transcript().challenge.seed().weight() == 0 {
                assert_eq!(set.len(), 256);
            } else {
                // A nonzero linear functional splits the cube evenly.
                assert_eq!(set.len(), 128);
            }
        }
    }

    #[test]
    fn empty_band_gives_empty_set() {
        let p = params(8, 0.05, 0.01, 2, CouplingKind::Independent);
        assert_eq!(p.band_range(), None);
        let set = enumerate_confusables(&session(&p, 1), &p).unwrap();
        assert!(set.is_empty());
        assert_eq!(set.eta_hat(), 0.0);
    }

    #[test]
    fn scale_limit() {
        let p = params(21, 0.25, 0.1, 3, CouplingKind::Independent);
        assert!(matches!(enumerate_confusables(&session(&p, 1), &p), Err(Error::Scale(_))));
        assert!(matches!(
            binding_attack(&p, &p.channel(), BindingMode::Alone, 1, 0),
            Err(Error::Scale(_))
        ));
    }

    #[test]
    fn injective_challenge_defeats_attack() {
        let p = params(10, 0.25, 0.15, 10, CouplingKind::Independent);
        let run = binding_attack(&p, &p.channel(), BindingMode::Alone, 100, 4).unwrap();
        for t in &run.trials {
            if t.hash_consistent == 1 {
                assert!(!t.success);
            }
        }
        // Full-rank Toeplitz matrices dominate; most trials have a singleton coset.
        assert!(run.success_rate() < 0.5);
    }

    #[test]
    fn success_implies_a_confusable_pair() {
        let p = params(12, 0.25, 0.125, 4, CouplingKind::Independent);
        let run = binding_attack(&p, &p.channel(), BindingMode::Alone, 200, 5).unwrap();
        assert!(run.successes() > 0);
        for t in &run.trials {
            assert!(!t.success || t.pair_exists);
            assert!(t.confusable <= t.hash_consistent);
        }
    }

    #[test]
    fn pair_probability_against_monte_carlo() {
        // u, v overlapping in one position; n = 10, p = 0.25, band [1, 4].
        let n = 10;
        let (u, v) = (0b11_0000_0000u64, 0b01_1000_0000u64);
        let mut scorer = PairScorer::new(Some((1, 4)), vec![((1 << n) - 1, 0.25)]);
        let exact = scorer.score(u, v);
        // Exhaustive oracle over all noise patterns.
        let oracle: f64 = (0..1u64 << n)
            .map(|e| {
                let w = e.count_ones() as i32;
                let pr = 0.25f64.powi(w) * 0.75f64.powi(n - w);
                let d1 = (u ^ e).count_ones();
                let d2 = (v ^ e).count_ones();
                if (1..=4).contains(&d1) && (1..=4).contains(&d2) {
                    pr
                } else {
                    0.0
                }
            })
            .sum();
        assert!((exact - oracle).abs() < 1e-12, "{exact} vs {oracle}");
    }

    #[test]
    fn eve_informed_scoring_uses_two_classes() {
        let n = 8u32;
        let eve = 0b1111_0000u64;
        let (pi0, pi1) = (0.1, 0.6);
        let mut scorer = PairScorer::new(Some((1, 3)), vec![(0xff & !eve, pi0), (eve, pi1)]);
        let (u, v) = (0b1000_0001u64, 0b0000_0011u64);
        let exact = scorer.score(u, v);
        let oracle: f64 = (0..1u64 << n)
            .map(|e| {
                let pr: f64 = (0..n)
                    .map(|i| {
                        let pi = if eve >> i & 1 == 1 { pi1 } else { pi0 };
                        if e >> i & 1 == 1 { pi } else { 1.0 - pi }
                    })
                    .product();
                let (d1, d2) = ((u ^ e).count_ones(), (v ^ e).count_ones());
                if (1..=3).contains(&d1) && (1..=3).contains(&d2) {
                    pr
                } else {
                    0.0
                }
            })
            .sum();
        assert!((exact - oracle).abs() < 1e-12);
    }

    #[test]
    fn collusion_changes_nothing_on_independent_noise() {
        let p = params(14, 0.25, 0.125, 6, CouplingKind::Independent);
        let ch = p.channel();
        let alone = binding_attack(&p, &ch, BindingMode::Alone, 150, 6).unwrap();
        let eve = binding_attack(&p, &ch, BindingMode::WithEve, 150, 6).unwrap();
        for (a, b) in alone.trials.iter().zip(&eve.trials) {
            assert_eq!(a.success, b.success);
            assert_eq!(a.chosen, b.chosen);
        }
    }

    #[test]
    fn collusion_can_help_on_correlated_noise() {
        // With Eve's noise equal to Bob's, z reveals y and the attack
        // probability can only go up in expectation.
        let p = ParamsSpec {
            n: 14,
            privacy: Privacy::One,
            alpha1: 0.05,
            beta1: 0.1,
            beta2: 0.2,
            commit_bits: Some(1),
            challenge_bits: Some(5),
        }
        .derive(&ChannelConfig {
            p: 0.25,
            q: 0.25,
            coupling: CouplingKind::Custom,
            r: Some(0.25),
        })
        .unwrap();
        let ch = p.channel();
        let alone = binding_attack(&p, &ch, BindingMode::Alone, 300, 7).unwrap();
        let eve = binding_attack(&p, &ch, BindingMode::WithEve, 300, 7).unwrap();
        assert!(eve.successes() >= alone.successes());
    }

    #[test]
    fn reproducible_from_seed() {
        let p = params(12, 0.25, 0.125, 5, CouplingKind::Independent);
        let a = binding_attack(&p, &p.channel(), BindingMode::Alone, 40, 8).unwrap();
        let b = binding_attack(&p, &p.channel(), BindingMode::Alone, 40, 8).unwrap();
        assert_eq!(a, b);
    }
}
