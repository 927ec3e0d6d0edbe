//! Hierarchical polar coding over block-fading binary-input channels.
//!
//! The library is organized around one scheme: a two-phase polar code
//! construction that splits the polarization indices of a length-`N` code
//! into a set that is good under every fading state, per-state "mixture"
//! sets, and a set bad under all states. Mixture positions are protected
//! across `B` coherence blocks by erasure-channel polar codes, so a
//! receiver that knows the per-block fading state can peel: decode the
//! best-state blocks, recover mixture columns as erasure codes, then
//! finish the worse-state blocks with those values frozen.
//!
//! Modules:
//! - [`polar`]: bit-reversal butterfly transform and LLR-domain
//!   successive cancellation decoding with dynamic frozen values.
//! - [`construction`]: reliability vectors (exact BEC recursion,
//!   Bhattacharyya bound, genie Monte-Carlo) and the nested index
//!   partition.
//! - [`channel`]: block-fading BPSK/AWGN pipeline and its hard-decision
//!   BSC equivalent.
//! - [`scheme`]: code plans, payload encode/decode, the peeling decoder.
//! - [`metrics`]: entropies, capacities, error statistics.
//! - [`sim`]: seeded Monte-Carlo trial harness.
//!
//! All randomness flows through [`rng`]: substreams are derived from a
//! master seed plus role and index tags, so parallel execution (the
//! `parallel` feature, on by default) and sequential execution produce
//! identical results.

pub mod channel;
pub mod construction;
mod error;
mod exec;
pub mod matrix;
pub mod metrics;
pub mod polar;
pub mod rng;
pub mod scheme;
pub mod sim;

pub use error::{Error, Result};
