//! Spectra and dynamics of a binary tight-binding lattice under a static
//! force, and its exact correspondence with the Floquet Hamiltonian of the
//! semiclassical Rabi model.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod ode;
pub mod rabi;
pub mod resonance;
pub mod spectral;

pub use error::{Error, Result};
