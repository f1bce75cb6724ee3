//! Downlink massive MIMO-NOMA simulation: channels, spatial collinearity,
//! zero-forcing beams, SIC-constrained power allocation, user clustering and
//! a Monte-Carlo harness.

pub mod beamforming;
pub mod channel;
pub mod cluster;
pub mod correlation;
pub mod error;
pub mod metrics;
pub mod power;
pub mod sim;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/channels.md")]
    mod channels {}
    #[doc = include_str!("../../../book/src/beamforming.md")]
    mod beamforming {}
    #[doc = include_str!("../../../book/src/power.md")]
    mod power {}
    #[doc = include_str!("../../../book/src/clustering.md")]
    mod clustering {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
}
