//! Memoryless BS-BC(p, q) wiretap channel.
//!
//! Each channel use flips Bob's bit with probability `p` and Eve's with
//! probability `q`. The pair of flips `(N_B, N_E)` is drawn from a
//! [`NoisePairPmf`] fixed by the joint flip probability
//! `r = P(N_B = 1, N_E = 1)`, which must lie in the Fréchet range
//! `[max(0, p + q - 1), min(p, q)]`:
//!
//! - independent noise (`Y - X - Z`): `r = p q`
//! - degraded (`X - Y - Z`, `q >= p`): Eve sees Bob's output through a further
//!   `BSC(θ)`, `θ = (q - p) / (1 - 2p)`, so `r = p (1 - θ)`
//! - custom: any `r` in range

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::measures::{CrossoverPair, Pmf, PROB_TOLERANCE};
use crate::{Error, Result};

/// Coupling requested when building a channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingSpec {
    Independent,
    Degraded,
    /// Joint flip probability `r`.
    Custom(f64),
}

/// Validated coupling of a [`WiretapChannel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Independent,
    Degraded { theta: f64 },
    Custom { r: f64 },
}

impl Coupling {
    pub fn name(&self) -> &'static str {
        match self {
            Coupling::Independent => "independent",
            Coupling::Degraded { .. } => "degraded",
            Coupling::Custom { .. } => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingKind {
    Independent,
    Degraded,
    Custom,
}

/// JSON form of a channel: `{p, q, coupling, r?}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub p: f64,
    pub q: f64,
    pub coupling: CouplingKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

impl ChannelConfig {
    pub fn spec(&self) -> Result<CouplingSpec> {
        match (self.coupling, self.r) {
            (CouplingKind::Independent, None) => Ok(CouplingSpec::Independent),
            (CouplingKind::Degraded, None) => Ok(CouplingSpec::Degraded),
            (CouplingKind::Custom, Some(r)) => Ok(CouplingSpec::Custom(r)),
            (CouplingKind::Custom, None) => Err(Error::InvalidCoupling(
                "custom coupling requires r".into(),
            )),
            (kind, Some(_)) => Err(Error::InvalidCoupling(format!(
                "r is only accepted with custom coupling, got {kind:?}"
            ))),
        }
    }

    pub fn build(&self) -> Result<WiretapChannel> {
        make_channel(self.p, self.q, self.spec()?)
    }
}

/// Joint distribution of the per-symbol flips, indexed `[N_B][N_E]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisePairPmf {
    probs: [[f64; 2]; 2],
}

impl NoisePairPmf {
    pub fn prob(&self, bob_flip: bool, eve_flip: bool) -> f64 {
        self.probs[bob_flip as usize][eve_flip as usize]
    }

    pub fn bob_marginal(&self) -> f64 {
        self.probs[1][0] + self.probs[1][1]
    }

    pub fn eve_marginal(&self) -> f64 {
        self.probs[0][1] + self.probs[1][1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WiretapChannel {
    pq: CrossoverPair,
    coupling: Coupling,
    r: f64,
}

pub fn make_channel(p: f64, q: f64, coupling: CouplingSpec) -> Result<WiretapChannel> {
    let pq = CrossoverPair::new(p, q)?;
    let (coupling, r) = match coupling {
        CouplingSpec::Independent => (Coupling::Independent, p * q),
        CouplingSpec::Degraded => {
            if q < p {
                return Err(Error::InvalidCoupling(format!(
                    "degraded coupling needs q >= p, got p = {p}, q = {q}"
                )));
            }
            let theta = (q - p) / (1.0 - 2.0 * p);
            (Coupling::Degraded { theta }, p * (1.0 - theta))
        }
        CouplingSpec::Custom(r) => {
            let lo = (p + q - 1.0).max(0.0);
            let hi = p.min(q);
            if !(lo..=hi).contains(&r) {
                return Err(Error::InvalidCoupling(format!(
                    "joint flip probability {r} outside [{lo}, {hi}]"
                )));
            }
            (Coupling::Custom { r }, r)
        }
    };
    Ok(WiretapChannel { pq, coupling, r })
}

impl WiretapChannel {
    pub fn p(&self) -> f64 {
        self.pq.p()
    }

    pub fn q(&self) -> f64 {
        self.pq.q()
    }

    pub fn pair(&self) -> CrossoverPair {
        self.pq
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn joint_flip(&self) -> f64 {
        self.r
    }

    pub fn config(&self) -> ChannelConfig {
        let (coupling, r) = match self.coupling {
            Coupling::Independent => (CouplingKind::Independent, None),
            Coupling::Degraded { .. } => (CouplingKind::Degraded, None),
            Coupling::Custom { r } => (CouplingKind::Custom, Some(r)),
        };
        ChannelConfig {
            p: self.p(),
            q: self.q(),
            coupling,
            r,
        }
    }

    pub fn noise_pmf(&self) -> NoisePairPmf {
        let (p, q, r) = (self.p(), self.q(), self.r);
        NoisePairPmf {
            probs: [
                [(1.0 - p - q + r).max(0.0), q - r],
                [p - r, r],
            ],
        }
    }

    /// `P(N_E = 1 | N_B = bob_flip)`.
    fn eve_flip_given_bob(&self, bob_flip: bool) -> f64 {
        let (p, q, r) = (self.p(), self.q(), self.r);
        match (self.coupling, bob_flip) {
            (Coupling::Independent, _) => q,
            (_, true) => r / p,
            (_, false) => (q - r) / (1.0 - p),
        }
    }

    /// `P(N_B = 1 | N_E = eve_flip)`: Bob's flip posterior once Eve's noise
    /// is known. Exactly `p` under independent coupling.
    pub fn bob_flip_given_eve(&self, eve_flip: bool) -> f64 {
        let (p, q, r) = (self.p(), self.q(), self.r);
        match (self.coupling, eve_flip) {
            (Coupling::Independent, _) => p,
            (_, true) => r / q,
            (_, false) => (p - r) / (1.0 - q),
        }
    }

    /// Draws one `(N_B, N_E)` pair: `N_B` first, then `N_E` from its
    /// conditional given `N_B`.
    pub fn sample_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> (bool, bool) {
        let nb = rng.random::<f64>() < self.p();
        let ne = rng.random::<f64>() < self.eve_flip_given_bob(nb);
        (nb, ne)
    }

    /// Sends `x` through `n` independent channel uses.
    pub fn transmit<R: Rng + ?Sized>(&self, x: &BitVector, rng: &mut R) -> (BitVector, BitVector) {
        let mut y = x.clone();
        let mut z = x.clone();
        for i in 0..x.len() {
            let (nb, ne) = self.sample_noise(rng);
            if nb {
                y.flip(i);
            }
            if ne {
                z.flip(i);
            }
        }
        (y, z)
    }

    /// Exact single-use joint pmf of `(X, Y, Z)` with `P(X = 1) = px1`.
    pub fn one_shot_joint(&self, px1: f64) -> Pmf {
        assert!((0.0..=1.0).contains(&px1), "input bias {px1} outside [0, 1]");
        let noise = self.noise_pmf();
        let mut outcomes = Vec::with_capacity(8);
        for x in 0..2u32 {
            let px = if x == 1 { px1 } else { 1.0 - px1 };
            for nb in [false, true] {
                for ne in [false, true] {
                    outcomes.push((
                        vec![x, x ^ nb as u32, x ^ ne as u32],
                        px * noise.prob(nb, ne),
                    ));
                }
            }
        }
        Pmf::new(3, outcomes).expect("noise pmf sums to one")
    }
}

/// Is Bob's channel a degraded version of Eve's? Returns `θ` with
/// `BSC(p) = BSC(q) ∘ BSC(θ)` when `p >= q`.
pub fn degradation_check(pq: CrossoverPair) -> Option<f64> {
    let (p, q) = (pq.p(), pq.q());
    (p >= q).then(|| (p - q) / (1.0 - 2.0 * q))
}

fn check_theta(theta: f64) -> Result<()> {
    if (0.0..0.5).contains(&theta) {
        Ok(())
    } else {
        Err(Error::Domain(format!("θ = {theta} outside [0, 1/2)")))
    }
}

/// Eve's simulation of Bob's channel: passes `z` through a private `BSC(θ)`.
pub fn eve_degrade<R: Rng + ?Sized>(z: &BitVector, theta: f64, rng: &mut R) -> Result<BitVector> {
    check_theta(theta)?;
    let mut out = z.clone();
    for i in 0..z.len() {
        if rng.random::<f64>() < theta {
            out.flip(i);
        }
    }
    Ok(out)
}

/// Exact single-use pmf of `(X, Z, Ỹ)` for uniform `X`, `Z = X ⊕ BSC(q)`
/// and `Ỹ = Z ⊕ BSC(θ)`.
pub fn eve_degrade_one_shot(q: f64, theta: f64) -> Result<Pmf> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("q = {q} outside [0, 1]")));
    }
    check_theta(theta)?;
    let mut outcomes = Vec::with_capacity(8);
    for x in 0..2u32 {
        for ne in 0..2u32 {
            for m in 0..2u32 {
                let p = 0.5
                    * if ne == 1 { q } else { 1.0 - q }
                    * if m == 1 { theta } else { 1.0 - theta };
                outcomes.push((vec![x, x ^ ne, x ^ ne ^ m], p));
            }
        }
    }
    Pmf::new(3, outcomes)
}

impl NoisePairPmf {
    /// Checks that marginals match `(p, q)` within tolerance.
    pub fn is_consistent_with(&self, p: f64, q: f64) -> bool {
        let total: f64 = self.probs.iter().flatten().sum();
        (total - 1.0).abs() <= PROB_TOLERANCE
            && (self.bob_marginal() - p).abs() <= PROB_TOLERANCE
            && (self.eve_marginal() - q).abs() <= PROB_TOLERANCE
            && self.probs.iter().flatten().all(|&v| v >= 0.0)
    }
}
