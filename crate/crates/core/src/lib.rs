//! Commitment over binary symmetric broadcast (BS-BC) wiretap channels.
//!
//! Alice commits to a string by sending uniformly random bits over a
//! broadcast channel that reaches Bob through `BSC(p)` and an eavesdropper
//! Eve through `BSC(q)`. A single Toeplitz hash challenge binds her to what
//! she sent, and a second Toeplitz hash acts as a strong extractor whose
//! output one-time-pads the commit string.
//!
//! The crate is organised bottom-up:
//!
//! - [`measures`]: exact information measures on small explicit distributions,
//!   the commitment capacity formulas and converse rate bounds.
//! - [`bits`] and [`hashing`]: fixed-length GF(2) words and the XOR-universal
//!   Toeplitz family used both as the challenge hash and as the extractor.
//! - [`channel`]: the memoryless BS-BC with an explicit noise coupling,
//!   degradation analysis and Eve's channel-simulation strategy.
//! - [`protocol`]: parameter derivation and the commit/reveal state machine.
//! - [`adversary`]: soundness, binding, concealment and secrecy estimators.
//!
//! All randomness flows through [`rng::Streams`], so every result is
//! reproducible from a single `u64` seed regardless of thread count.

pub mod adversary;
pub mod bits;
pub mod channel;
mod error;
pub mod hashing;
pub mod measures;
pub mod protocol;
pub mod rng;

pub use error::{Error, Result};
