//! Geometry and performance analytics for space-time block codes.
//!
//! Code symbols are T×k complex matrices with orthonormal columns (k-frames
//! on the Stiefel manifold); the non-coherent receiver only sees the column
//! span, which lives on the Grassmann manifold. This crate computes the
//! principal-angle geometry of symbol pairs, the induced receiver metrics,
//! diversity expansions with Chernov bounds and exact pairwise error
//! probabilities, codebook statistics and composition, maximin packing
//! searches, constrained extremal formulas with a brute-force grid oracle,
//! and a Rayleigh flat-fading Monte Carlo simulator.
//!
//! All randomized operations are driven by explicit seeds through
//! counter-derived ChaCha streams, so results are reproducible and
//! independent of the worker thread count.

pub mod channel;
pub mod cli;
pub mod codebook;
pub mod diversity;
pub mod error;
pub mod extremal;
pub mod linalg;
pub mod manifold;
pub mod packing;
pub mod tol;

pub use channel::{Channel, ChannelConfig, SimResult};
pub use codebook::{Codebook, Space};
pub use error::{Error, Result};
pub use manifold::{GrassmannPoint, PairGeometry, PrincipalAngles, StiefelFrame};
