//! Analysis and simulation of serially concatenated block-accumulate(-accumulate)
//! code ensembles.
//!
//! An outer `(n, k)` block code (Hamming, extended Hamming, repetition or a
//! user-supplied generator) is repeated `L` times, interleaved, and passed
//! through one or two rate-1 accumulators `1/(1+D)`. The crate provides
//!
//! - [`linear_code`]: outer code construction, exact weight enumerators, encoding;
//! - [`enumerator`]: exact finite-length ensemble-average weight enumerators
//!   under uniform interleaving and the resulting minimum-distance bound;
//! - [`asymptotic`]: spectral shape `r(δ)`, distance growth rate `δ_min` and
//!   Gilbert–Varshamov references;
//! - [`codec`]: encoder chain and exact log-domain SISO decoders;
//! - [`simulate`]: BPSK/AWGN Monte-Carlo, EXIT curves, convergence thresholds
//!   and BPSK constrained capacity.
//!
//! All spectral quantities are in nats per output bit; LLRs follow
//! `L = ln(P(bit = 0) / P(bit = 1))`.

pub mod asymptotic;
pub mod codec;
pub mod ensemble;
pub mod enumerator;
mod error;
pub mod linear_code;
pub mod logmath;
pub mod simulate;

pub use ensemble::EnsembleSpec;
pub use error::{Error, Result};
