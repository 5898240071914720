//! E91 key distribution when the eavesdropper controls the entangled-pair
//! source and mounts a symmetric incoherent attack.
//!
//! * [`qmath`]: kets, operators, the `+`/`×` and Bell bases, projective
//!   measurement, two-qubit Schmidt coefficients.
//! * [`attack_model`]: Eve's source state, symmetry constraints, error rates,
//!   Helstrom guess probabilities, the optimal attack and its bound
//!   `1/2 + √(ε̄(1−ε̄))`, mutual information.
//! * [`channel_attack`]: the weaker single-photon attack, its unitarity
//!   constraints and the witnesses separating it from the source attack.
//! * [`protocol_sim`]: reproducible Monte Carlo runs of the protocol.
//! * [`cli`]: the commands behind the `e91-eve` binary.

pub mod attack_model;
pub mod channel_attack;
pub mod cli;
mod error;
pub mod protocol_sim;
pub mod qmath;
pub mod sampling;

pub use error::{Error, Result};
