//! Coherent collective Rydberg excitation in the blockade regime.
//!
//! - [`exact`]: few-atom Schrödinger dynamics on full or blockade-restricted bases.
//! - [`cloud`]: Gaussian clouds partitioned into superatoms.
//! - [`superatom`]: excitation curves from an ensemble of collective oscillators.
//! - [`analysis`]: saturation fits and power-law scaling sweeps.
//! - [`cli`]: configuration, manifests and the `rydberg` subcommands.
//!
//! Frequencies are angular (rad/s) throughout. All lengths are SI.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod cloud;
pub mod error;
pub mod exact;
pub mod grid;
pub mod physics;
pub mod superatom;

pub use error::{Error, Result};
pub use physics::PhysicalParams;
