//! System-level Monte Carlo simulator for the downlink effect of uplink
//! fractional power control (FPC) on pilot quality in TDD massive MIMO.
//!
//! The pipeline for one Monte Carlo drop is
//!
//! ```text
//! deployment -> channel -> powerctl -> training -> precoding -> kpi
//! ```
//!
//! and the [`campaign`] module runs many drops over a grid of operating
//! points with paired seeds, writing CSV summaries.
//!
//! Every random draw is derived from `(master_seed, purpose, drop, entity)`
//! through [`seed::stream`], so results are a pure function of the
//! configuration and do not depend on thread count.

pub mod campaign;
pub mod channel;
pub mod deployment;
pub mod dump;
mod error;
pub mod kpi;
pub mod powerctl;
pub mod precoding;
pub mod radio;
pub mod seed;
pub mod training;

pub use error::{Result, SimError};

/// Complex baseband sample type used throughout.
pub type C64 = num_complex::Complex64;
