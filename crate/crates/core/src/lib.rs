//! Decentralized accelerated mirror descent for potential games with
//! delayed first-order feedback.
//!
//! The crate is split into four layers:
//!
//! - [`potential`]: scaled simplices, the scaled negative-entropy
//!   regularizer with its mirror map and Bregman divergence, and the
//!   step-size schedules shared by all algorithms.
//! - [`dynamics`]: the per-player update (instantaneous and delayed
//!   variants), delay models, feedback delivery and the simulation driver.
//! - [`routing`]: the congestion game on a road network with BPR edge
//!   costs and the Beckmann potential.
//! - [`ingest`]: TNTP network parsing, seeded scenario sampling and JSON
//!   scenario persistence.

pub mod dynamics;
pub mod error;
pub mod ingest;
pub mod potential;
pub mod routing;

pub use error::{Error, Result};
