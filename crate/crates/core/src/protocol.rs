//! The commit/reveal protocol.
//!
//! Commit phase:
//!
//! 1. Alice sends `X ~ Bernoulli(1/2)^n` over the wiretap channel; Bob gets
//!    `Y`, Eve gets `Z`.
//! 2. Bob samples a challenge hash `G` with `l_g` output bits and publishes it.
//! 3. Alice publishes `ḡ = G(X)`.
//! 4. Alice samples an extractor `Ext` with `m_c` output bits and publishes
//!    `Ext` together with `Q = c ⊕ Ext(X)`.
//!
//! Reveal phase: Alice announces `(c̃, x̃)` and Bob accepts iff
//! (i) `n(p - α₁) <= d_H(x̃, y) <= n(p + α₁)`, (ii) `G(x̃) = ḡ` and
//! (iii) `c̃ = Q ⊕ Ext(x̃)`.
//!
//! Both privacy regimes run this same wire protocol; only the rate differs.

use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::channel::{ChannelConfig, CouplingKind, WiretapChannel};
use crate::hashing::{sample_hash, HashSpec};
use crate::measures::{capacity_one_private, capacity_two_private, CrossoverPair};
use crate::rng::{PartyRngs, Streams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Privacy {
    /// Eve colludes with nobody.
    One,
    /// Eve may collude with Alice or with Bob.
    Two,
}

/// User-chosen protocol constants. Lengths left as `None` are derived as
/// `floor(n R)` and `floor(n β₁)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub n: usize,
    pub privacy: Privacy,
    pub alpha1: f64,
    pub beta1: f64,
    pub beta2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commit_bits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub challenge_bits: Option<usize>,
}

/// Validated parameters with derived lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "ParamsRecord", try_from = "ParamsRecord")]
pub struct ProtocolParams {
    spec: ParamsSpec,
    channel: ChannelConfig,
    pq: CrossoverPair,
    rate: f64,
    commit_bits: usize,
    challenge_bits: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ParamsRecord {
    #[serde(flatten)]
    spec: ParamsSpec,
    channel: ChannelConfig,
    /// Informational; recomputed on load.
    #[serde(default)]
    rate: Option<f64>,
}

impl From<ProtocolParams> for ParamsRecord {
    fn from(p: ProtocolParams) -> Self {
        Self {
            spec: p.spec,
            channel: p.channel,
            rate: Some(p.rate),
        }
    }
}

impl TryFrom<ParamsRecord> for ProtocolParams {
    type Error = Error;

    fn try_from(r: ParamsRecord) -> Result<Self> {
        r.spec.derive(&r.channel)
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {v} must be positive")))
    }
}

impl ParamsSpec {
    pub fn derive(&self, channel: &ChannelConfig) -> Result<ProtocolParams> {
        let n = self.n;
        if n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        positive("alpha1", self.alpha1)?;
        positive("beta1", self.beta1)?;
        positive("beta2", self.beta2)?;
        if self.beta2 <= self.beta1 {
            return Err(Error::Domain(format!(
                "beta2 = {} must exceed beta1 = {}",
                self.beta2, self.beta1
            )));
        }
        let pq = CrossoverPair::new(channel.p, channel.q)?;
        // Surface coupling errors before anything else is derived.
        channel.build()?;
        let capacity = match self.privacy {
            Privacy::One => capacity_one_private(pq),
            Privacy::Two => {
                if channel.coupling != CouplingKind::Independent {
                    return Err(Error::InvalidCoupling(format!(
                        "2-privacy is only supported on independent coupling, got {:?}",
                        channel.coupling
                    )));
                }
                capacity_two_private(pq)
            }
        };
        let rate = capacity - self.beta2;
        if rate <= 0.0 {
            return Err(Error::RateNonPositive(format!(
                "R = {capacity} - {} = {rate}",
                self.beta2
            )));
        }
        let nf = n as f64;
        let commit_bits = match self.commit_bits {
            Some(m) => m,
            None => {
                let m = (nf * rate).floor() as usize;
                if m < 1 {
                    return Err(Error::RateNonPositive(format!(
                        "floor(n R) = floor({n} * {rate}) = 0"
                    )));
                }
                m
            }
        };
        let challenge_bits = match self.challenge_bits {
            Some(l) => l,
            None => {
                let l = (nf * self.beta1).floor() as usize;
                if l < 1 {
                    return Err(Error::Dimension(format!(
                        "floor(n beta1) = floor({n} * {}) = 0",
                        self.beta1
                    )));
                }
                l
            }
        };
        for (name, len) in [("commit_bits", commit_bits), ("challenge_bits", challenge_bits)] {
            if len == 0 || len > n {
                return Err(Error::Dimension(format!("{name} = {len} outside 1..={n}")));
            }
        }
        Ok(ProtocolParams {
            spec: *self,
            channel: *channel,
            pq,
            rate,
            commit_bits,
            challenge_bits,
        })
    }
}

/// Derives lengths from `(n, p, q, privacy, α₁, β₁, β₂, coupling)`.
#[allow(clippy::too_many_arguments)]
pub fn derive_params(
    n: usize,
    pq: CrossoverPair,
    privacy: Privacy,
    alpha1: f64,
    beta1: f64,
    beta2: f64,
    coupling: CouplingKind,
    custom_r: Option<f64>,
) -> Result<ProtocolParams> {
    ParamsSpec {
        n,
        privacy,
        alpha1,
        beta1,
        beta2,
        commit_bits: None,
        challenge_bits: None,
    }
    .derive(&ChannelConfig {
        p: pq.p(),
        q: pq.q(),
        coupling,
        r: custom_r,
    })
}

impl ProtocolParams {
    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn pair(&self) -> CrossoverPair {
        self.pq
    }

    pub fn privacy(&self) -> Privacy {
        self.spec.privacy
    }

    pub fn alpha1(&self) -> f64 {
        self.spec.alpha1
    }

    pub fn beta1(&self) -> f64 {
        self.spec.beta1
    }

    pub fn beta2(&self) -> f64 {
        self.spec.beta2
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn commit_bits(&self) -> usize {
        self.commit_bits
    }

    pub fn challenge_bits(&self) -> usize {
        self.challenge_bits
    }

    pub fn channel_config(&self) -> ChannelConfig {
        self.channel
    }

    pub fn spec(&self) -> ParamsSpec {
        self.spec
    }

    pub fn channel(&self) -> WiretapChannel {
        self.channel.build().expect("validated at derivation")
    }

    /// Same parameters with the given lengths in place of the derived ones.
    pub fn with_lengths(&self, commit_bits: usize, challenge_bits: usize) -> Result<Self> {
        ParamsSpec {
            commit_bits: Some(commit_bits),
            challenge_bits: Some(challenge_bits),
            ..self.spec
        }
        .derive(&self.channel)
    }

    pub fn with_challenge_bits(&self, challenge_bits: usize) -> Result<Self> {
        self.with_lengths(self.commit_bits, challenge_bits)
    }

    pub fn with_alpha1(&self, alpha1: f64) -> Result<Self> {
        ParamsSpec {
            alpha1,
            commit_bits: Some(self.commit_bits),
            challenge_bits: Some(self.challenge_bits),
            ..self.spec
        }
        .derive(&self.channel)
    }

    /// Closed band `[n(p - α₁), n(p + α₁)]` for Bob's distance test.
    pub fn band(&self) -> (f64, f64) {
        let n = self.n() as f64;
        let (p, a) = (self.pq.p(), self.spec.alpha1);
        (n * (p - a), n * (p + a))
    }

    pub fn band_contains(&self, distance: usize) -> bool {
        let (lo, hi) = self.band();
        let d = distance as f64;
        lo <= d && d <= hi
    }

    /// Integer distances inside the band.
    pub fn band_range(&self) -> Option<(usize, usize)> {
        let (lo, hi) = self.band();
        let lo = lo.max(0.0).ceil();
        let hi = hi.min(self.n() as f64).floor();
        (lo <= hi).then_some((lo as usize, hi as usize))
    }
}

/// Everything sent over the public authenticated link in the commit phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub challenge: HashSpec,
    pub challenge_value: BitVector,
    pub extractor: HashSpec,
    pub masked_commit: BitVector,
}

/// State after the commit phase. The transcript is stored once and shared
/// by every view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionState {
    commit: BitVector,
    x: BitVector,
    y: BitVector,
    z: BitVector,
    transcript: Transcript,
}

#[derive(Debug, Clone, Copy)]
pub struct AliceView<'a> {
    pub commit: &'a BitVector,
    pub x: &'a BitVector,
    pub transcript: &'a Transcript,
}

#[derive(Debug, Clone, Copy)]
pub struct BobView<'a> {
    pub y: &'a BitVector,
    pub transcript: &'a Transcript,
}

#[derive(Debug, Clone, Copy)]
pub struct EveView<'a> {
    pub z: &'a BitVector,
    pub transcript: &'a Transcript,
}

impl SessionState {
    pub fn alice_view(&self) -> AliceView<'_> {
        AliceView {
            commit: &self.commit,
            x: &self.x,
            transcript: &self.transcript,
        }
    }

    pub fn bob_view(&self) -> BobView<'_> {
        BobView {
            y: &self.y,
            transcript: &self.transcript,
        }
    }

    pub fn eve_view(&self) -> EveView<'_> {
        EveView {
            z: &self.z,
            transcript: &self.transcript,
        }
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    /// Alice's honest reveal `(c, x)`.
    pub fn honest_claim(&self) -> RevealClaim {
        RevealClaim {
            commit: self.commit.clone(),
            x: self.x.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevealClaim {
    pub commit: BitVector,
    pub x: BitVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    /// (i) distance to `y` outside the band.
    Band,
    /// (ii) challenge hash mismatch.
    Challenge,
    /// (iii) commit string does not unmask `Q`.
    Pad,
}

impl RejectReason {
    /// The failed condition's index, 1 to 3.
    pub fn index(self) -> u8 {
        match self {
            RejectReason::Band => 1,
            RejectReason::Challenge => 2,
            RejectReason::Pad => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject(RejectReason),
}

impl Verdict {
    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }
}

/// Runs commit steps C1 to C4 for commit string `c`.
pub fn commit_phase(
    params: &ProtocolParams,
    c: &BitVector,
    channel: &WiretapChannel,
    rngs: &mut PartyRngs,
) -> Result<SessionState> {
    if c.len() != params.commit_bits() {
        return Err(Error::LengthMismatch {
            expected: params.commit_bits(),
            actual: c.len(),
        });
    }
    if channel.config() != params.channel_config() {
        return Err(Error::InvalidCoupling(format!(
            "channel {:?} does not match parameters {:?}",
            channel.config(),
            params.channel_config()
        )));
    }
    let n = params.n();
    let x = BitVector::random(n, &mut rngs.alice);
    let (y, z) = channel.transmit(&x, &mut rngs.channel);
    let challenge = sample_hash(&mut rngs.bob, n, params.challenge_bits())?;
    let challenge_value = challenge.evaluate(&x)?;
    let extractor = sample_hash(&mut rngs.alice, n, params.commit_bits())?;
    let masked_commit = extractor.evaluate(&x)?.xor(c)?;
    Ok(SessionState {
        commit: c.clone(),
        x,
        y,
        z,
        transcript: Transcript {
            challenge,
            challenge_value,
            extractor,
            masked_commit,
        },
    })
}

/// Step R1: is `x` in Bob's list `L(y)`?
pub fn list_membership(x: &BitVector, y: &BitVector, params: &ProtocolParams) -> Result<bool> {
    if x.len() != params.n() {
        return Err(Error::LengthMismatch {
            expected: params.n(),
            actual: x.len(),
        });
    }
    Ok(params.band_contains(x.hamming_distance(y)?))
}

/// Step R3: Bob's acceptance test.
pub fn bob_test(params: &ProtocolParams, bob: BobView<'_>, claim: &RevealClaim) -> Result<Verdict> {
    let t = bob.transcript;
    if claim.commit.len() != t.masked_commit.len() {
        return Err(Error::Malformed(format!(
            "claimed commit string has {} bits, expected {}",
            claim.commit.len(),
            t.masked_commit.len()
        )));
    }
    if claim.x.len() != bob.y.len() {
        return Err(Error::Malformed(format!(
            "claimed x has {} bits, expected {}",
            claim.x.len(),
            bob.y.len()
        )));
    }
    if !list_membership(&claim.x, bob.y, params)? {
        return Ok(Verdict::Reject(RejectReason::Band));
    }
    if t.challenge.evaluate(&claim.x)? != t.challenge_value {
        return Ok(Verdict::Reject(RejectReason::Challenge));
    }
    if t.masked_commit.xor(&t.extractor.evaluate(&claim.x)?)? != claim.commit {
        return Ok(Verdict::Reject(RejectReason::Pad));
    }
    Ok(Verdict::Accept)
}

#[derive(Debug, Clone)]
pub struct HonestRun {
    pub accepted: bool,
    pub verdict: Verdict,
    pub session: SessionState,
}

/// Commit to a uniformly random string and reveal it honestly.
pub fn honest_run(params: &ProtocolParams, channel: &WiretapChannel, streams: Streams) -> Result<HonestRun> {
    let mut rngs = streams.parties();
    let c = BitVector::random(params.commit_bits(), &mut rngs.alice);
    let session = commit_phase(params, &c, channel, &mut rngs)?;
    let verdict = bob_test(params, session.bob_view(), &session.honest_claim())?;
    Ok(HonestRun {
        accepted: verdict.is_accept(),
        verdict,
        session,
    })
}

/// JSON form of a session for replay. Bit vectors are hex, most significant
/// bit first, zero-padded to whole bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionRecord {
    pub params: ProtocolParams,
    #[serde(rename = "G")]
    pub challenge: HashSpec,
    pub g_bar: String,
    #[serde(rename = "Ext")]
    pub extractor: HashSpec,
    #[serde(rename = "Q")]
    pub masked_commit: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,
    /// Reveal-phase announcement to check on replay.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claim: Option<ClaimRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimRecord {
    pub c: String,
    pub x: String,
}

impl SessionState {
    /// Public record of the session, optionally with Bob's and Eve's
    /// channel outputs. Never includes `x` or `c`.
    pub fn to_record(&self, params: &ProtocolParams, with_y: bool, with_z: bool) -> SessionRecord {
        let t = &self.transcript;
        SessionRecord {
            params: *params,
            challenge: t.challenge.clone(),
            g_bar: t.challenge_value.to_hex(),
            extractor: t.extractor.clone(),
            masked_commit: t.masked_commit.to_hex(),
            y: with_y.then(|| self.y.to_hex()),
            z: with_z.then(|| self.z.to_hex()),
            claim: None,
        }
    }
}

impl SessionRecord {
    pub fn with_claim(mut self, claim: &RevealClaim) -> Self {
        self.claim = Some(ClaimRecord {
            c: claim.commit.to_hex(),
            x: claim.x.to_hex(),
        });
        self
    }

    pub fn transcript(&self) -> Result<Transcript> {
        let n = self.params.n();
        let (l, m) = (self.params.challenge_bits(), self.params.commit_bits());
        for (name, h, out) in [("G", &self.challenge, l), ("Ext", &self.extractor, m)] {
            if h.input_bits() != n || h.output_bits() != out {
                return Err(Error::Malformed(format!(
                    "{name} has dimensions {}x{}, expected {n}x{out}",
                    h.output_bits(),
                    h.input_bits()
                )));
            }
        }
        Ok(Transcript {
            challenge: self.challenge.clone(),
            challenge_value: BitVector::from_hex(&self.g_bar, l)?,
            extractor: self.extractor.clone(),
            masked_commit: BitVector::from_hex(&self.masked_commit, m)?,
        })
    }

    pub fn bob_output(&self) -> Result<BitVector> {
        let y = self
            .y
            .as_ref()
            .ok_or_else(|| Error::Malformed("record has no y".into()))?;
        BitVector::from_hex(y, self.params.n())
    }

    pub fn reveal_claim(&self) -> Result<RevealClaim> {
        let c = self
            .claim
            .as_ref()
            .ok_or_else(|| Error::Malformed("record has no claim".into()))?;
        Ok(RevealClaim {
            commit: BitVector::from_hex(&c.c, self.params.commit_bits())?,
            x: BitVector::from_hex(&c.x, self.params.n())?,
        })
    }

    /// Re-runs Bob's test on the recorded claim.
    pub fn replay(&self) -> Result<Verdict> {
        let transcript = self.transcript()?;
        let y = self.bob_output()?;
        let claim = self.reveal_claim()?;
        bob_test(
            &self.params,
            BobView {
                y: &y,
                transcript: &transcript,
            },
            &claim,
        )
    }
}
