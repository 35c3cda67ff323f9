//! Geometry, sampling, graph construction and analytic bounds for k-nearest
//! neighbour graphs on a unit-intensity Poisson process in a square.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs (plus an explicit seed where randomness is
//! involved), so values can be shared freely between threads. IO, the CLI
//! and trial scheduling live in the companion `knnlab` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod math;

pub mod bounds;
pub mod components;
pub mod constructions;
pub mod error;
pub mod geom;
pub mod knngraph;
pub mod sampling;
pub mod spatial;

pub use error::Error;

/// Absolute tolerance, in world length units, for on-line and tangency tests.
pub const GEOM_TOL: f64 = 1e-9;
