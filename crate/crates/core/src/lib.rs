//! Simulation and security analysis of probabilistic quantum one-time
//! programs.
//!
//! Classical gates are encoded as single- and few-qubit states whose
//! measurement in an input-dependent Pauli basis reveals one line of the
//! truth table with bounded error. On top of that the crate provides:
//!
//! - [`encoding`]: G1 conjugate-coding states, the linear (three-photon) and
//!   elliptical (two-photon) G2 encodings, and the general maximum-entropy
//!   encoding for any `k`.
//! - [`circuits`]: the public interconnect between gate programs, the
//!   millionaires comparator, NOT-pair randomization and exact success
//!   prediction.
//! - [`runtime`]: the Alice/Bob protocol over a lossy channel with the
//!   pad-reveal subroutine, in-process or over newline-delimited JSON.
//! - [`signature`]: the delegated one-time signature scheme and its
//!   honest/dishonest probability analysis.
//! - [`analysis`]: classical bounds, multi-copy discrimination, pretty-good
//!   and JRF measurements, optimality certificates and the two-copy circuit.
//! - [`experiments`]: the batch experiments behind the `qotp` binary.

pub mod analysis;
pub mod circuits;
pub mod encoding;
mod error;
pub mod experiments;
pub mod qmath;
pub mod runtime;
pub mod signature;
pub mod stats;

pub use error::{Error, Result};
