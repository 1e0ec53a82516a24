//! Coset-coding constructions for wiretap channels.
//!
//! The crate provides the building blocks used by the `wiretap` simulation
//! binary:
//!
//! * [`gf2`] — exact linear algebra over GF(2) (bit-packed dense and sparse
//!   matrices, solving, rank, nullspaces).
//! * [`degree`] — edge/node degree-distribution algebra for LDPC ensembles and
//!   density-evolution thresholds on the binary erasure channel.
//! * [`ldpc`] — configuration-model sampling of Tanner graphs and the
//!   iterative (peeling) erasure decoder.
//! * [`channel`] — BEC/BSC/DMC channel models, capacities and secrecy
//!   capacities for the symmetric cases.
//! * [`coset`] — coset coding over a noiseless main channel with an erasure
//!   wiretapper, including rank-based security tests and equivocation.
//! * [`ltcode`] — secrecy codes decodable in (near) linear time via
//!   approximate upper triangulation of the stacked generator.
//! * [`nested`] — nested parity-check constructions for erasure main
//!   channels.
//! * [`bsc`] — weight-enumerator based security analysis for BSC
//!   wiretappers.
//! * [`exponents`] — Gallager random-coding exponents for wiretap channel
//!   pairs.
//! * [`repro`] — the reproduction checks driven by `wiretap paper-examples`
//!   and the acceptance test suite.

pub mod bsc;
pub mod channel;
pub mod coset;
pub mod degree;
pub mod exponents;
pub mod gf2;
pub mod ldpc;
pub mod ltcode;
pub mod nested;
pub mod repro;
