//! Exact enumeration of gerrymander polynomials and grid-partition sequences.
//!
//! The engine counts the ways of cutting an L x L grid into two edge-connected
//! pieces, tracked by the area of one piece. It works column by column with a
//! transfer-matrix sweep over boundary signatures, runs modulo word-sized
//! primes, and reconstructs exact integers by the Chinese remainder theorem.
//! A separate toolkit fits the resulting sequences: ratio extrapolation for
//! growth constants and power-law corrections, and differential approximants
//! for singularity structure and series extension.

pub mod analysis;
pub mod assemble;
pub mod diffapprox;
pub mod io;
pub mod modarith;
pub mod oracle;
pub mod series;
pub mod signature;
pub mod transfer;
