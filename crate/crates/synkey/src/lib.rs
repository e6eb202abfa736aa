//! Coding-theoretic construction and auditing of secret and private keys
//! for correlated binary sources.
//!
//! Two terminals (or more, on a tree) observe correlated words; one
//! transmits the syndrome of its word under a shared linear code, the
//! other reconstructs by coset decoding, and both index the word inside
//! its coset to obtain a key that is exactly uniform and exactly
//! independent of the public transcript. Small codes use exact
//! coset-leader tables and exhaustive rational audits; block-length-1000
//! LDPC codes use syndrome belief propagation and Monte Carlo key bit
//! error rate estimation.
//!
//! The `parallel` feature (on by default) runs Monte Carlo blocks on a
//! rayon pool; per-block counter-derived seeds make results identical
//! for any thread count, including the sequential fallback.

pub mod error;
pub mod evalbench;
pub mod exact;
pub mod gf2;
pub mod keygen;
pub mod ldpc;
pub mod lincode;
mod par;
pub mod seeding;
pub mod sources;
pub mod typicality;

pub use error::{Error, Result};
