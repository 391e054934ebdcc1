//! Coded caching delivery over a shared wireless channel.
//!
//! - [`codec`]: random placement, XOR delivery plans and per-user decoding.
//! - [`analytic`]: expected traffic of the coded and unicast schemes.
//! - [`channel`]: path loss plus Ricean fading, reduced to effective noise PSDs.
//! - [`allocator`]: time-division and frequency-division resource allocation,
//!   and quantization onto a slot/subcarrier grid.
//! - [`harness`]: seeded end-to-end trials and parameter sweeps.

pub mod allocator;
pub mod analytic;
pub mod channel;
pub mod codec;
pub mod config;
pub mod exec;
pub mod harness;
mod rng;
pub mod subset;

pub use allocator::{Allocation, Mode, OptInstance};
pub use config::{ConfigError, SystemConfig};
pub use exec::Execution;
pub use harness::{Scheme, SizesSource, TrialSpec};
pub use subset::UserSet;
