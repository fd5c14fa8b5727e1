//! Channel coding for erasures and stuck-at defects.
//!
//! The binary erasure channel (BEC) loses bits at known positions and the
//! decoder restores them by solving an overdetermined linear system. The
//! binary defect channel (BDC) has cells stuck at 0 or 1; the encoder, who
//! knows the defects, masks them by solving an underdetermined system for a
//! parity vector. The combined defect-and-erasure channel (BDEC) composes
//! both, and its code splits the redundancy into `l` bits for masking and
//! `r` bits for erasure correction.
//!
//! Crate layout:
//!
//! - [`gf2`] — dense bit-packed GF(2) vectors, matrices, and solvers
//! - [`codes`] — linear codes, BCH constructions, partitioned codes, weight
//!   distributions
//! - [`channels`] — BEC/BDC/BDEC channel models and sampling
//! - [`schemes`] — the encoders and decoders for all three channels
//! - [`bounds`] — closed-form failure probabilities and finite-length bounds
//! - [`allocation`] — redundancy split between masking and erasure parity
//! - [`sim`] — Monte-Carlo harness, exact small-code oracles, duality checks

pub mod allocation;
pub mod bounds;
pub mod channels;
pub mod codes;
pub mod gf2;
pub mod schemes;
pub mod sim;

pub use channels::{ChannelKind, ChannelParams};
pub use gf2::{BitMatrix, BitVec};
