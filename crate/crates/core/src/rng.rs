//! Counter-based, splittable random streams.
//!
//! Every simulated trial owns independent ChaCha streams for Alice's private
//! randomness, Bob's private randomness and the channel noise. Streams are
//! addressed by `(seed, trial, role)`, so trial `i` sees the same bits no
//! matter which worker runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type StreamRng = ChaCha12Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Role {
    Alice = 0,
    Bob = 1,
    Channel = 2,
    /// Randomness outside the protocol (attack coins, training samples).
    Auxiliary = 3,
}

const ROLES: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Streams {
    seed: u64,
    trial: u64,
}

impl Streams {
    pub fn new(seed: u64, trial: u64) -> Self {
        Self { seed, trial }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trial(&self) -> u64 {
        self.trial
    }

    pub fn stream(&self, role: Role) -> StreamRng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.trial.wrapping_mul(ROLES).wrapping_add(role as u64));
        rng
    }

    /// The three protocol streams.
    pub fn parties(&self) -> PartyRngs {
        PartyRngs {
            alice: self.stream(Role::Alice),
            bob: self.stream(Role::Bob),
            channel: self.stream(Role::Channel),
        }
    }
}

/// Private randomness `K_A`, `K_B` and the channel's noise source.
#[derive(Debug, Clone)]
pub struct PartyRngs {
    pub alice: StreamRng,
    pub bob: StreamRng,
    pub channel: StreamRng,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: [u64; 4] = Streams::new(7, 3).stream(Role::Alice).random();
        let b: [u64; 4] = Streams::new(7, 3).stream(Role::Alice).random();
        let c: [u64; 4] = Streams::new(7, 3).stream(Role::Bob).random();
        let d: [u64; 4] = Streams::new(7, 4).stream(Role::Alice).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }
}
