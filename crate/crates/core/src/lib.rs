//! Homogenized mass decay for the linear Boltzmann equation in a plane
//! perforated by a periodic lattice of absorbing holes.

// Range checks are written as `!(x > a)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fp_dist;
pub mod lattice;
pub mod quadrature;
pub mod renewal;
pub mod rng;
pub mod special;
pub mod spectral;
pub mod transport;
pub mod verify;

pub use error::{Error, Result};

/// Library version, echoed in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
