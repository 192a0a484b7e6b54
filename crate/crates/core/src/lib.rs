//! Instrumented left-to-right persistence reduction over GF(2) for clique
//! (flag) filtrations in homological degree one.
//!
//! The crate measures the two quantities that govern the running time of the
//! standard algorithm: the *fill-up* of the reduced matrix (its number of
//! non-zero entries) and the metered *cost* (for every addition `M_i += M_j`,
//! the size of `M_j`). Around the engine sit generators for Erdős–Rényi,
//! Vietoris–Rips and an adversarial worst-case filtration, a first Betti
//! number profile with an independent brute-force oracle, and an experiment
//! harness with log-log regression.
//!
//! Indices are 0-based throughout: row `p` is the edge of rank `p` in the
//! filtration, and `K_i` is the clique complex spanned by the first `i` edges
//! (ranks `0..i`).

pub mod adversarial;
pub mod bench;
pub mod error;
pub mod exec;
pub mod flagfilt;
pub mod homology;
pub mod io;
pub mod randmodels;
pub mod svg;
pub mod z2core;

pub use error::{Error, Result};
