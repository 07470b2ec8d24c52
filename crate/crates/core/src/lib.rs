//! Estimation of low-rank graphons and connection probability matrices
//! from a single observed network.
//!
//! The model is `f(u, v) = rho * sum_k lambda_k G_k(u) G_k(v)` with
//! orthonormal components `G_k`. From one adjacency matrix the library
//! recovers the per-pair connection probabilities, the spectrum
//! `(lambda_k)`, the component integrals, and a piecewise-linear
//! reconstruction of the graphon itself. Estimation is moment-based:
//! per-node line and cycle counts are matched against power sums of the
//! eigenvalues.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the `std`
//! feature (default) additionally enables wall-clock stage timing.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod counts;
pub mod error;
pub mod graphon;
pub mod linalg;
pub mod matrix;
pub mod metrics;
pub mod moments;
pub mod power_iter;
pub mod rank1;
pub mod rankr;
pub mod select;

pub use error::{Error, Result};
pub use graphon::{sample_latents, AdjacencyMatrix, GraphonSpec, LatentSample};
pub use matrix::Matrix;
