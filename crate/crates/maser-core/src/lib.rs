//! Numerical laboratory for a cavity mode driven by a beam of thermal
//! two-level atoms.
//!
//! The crate builds the exact one-interaction propagator of the
//! Jaynes-Cummings pair on a truncated Fock space, reduces it to the cavity
//! channel in Kraus form, decomposes the channel into gauge sectors (one
//! tridiagonal operator per diagonal offset), analyzes the sector spectra,
//! and runs long-horizon iteration experiments: relaxation to the
//! renormalized thermal state, decoherence curves, Rabi resonance and
//! quasi-resonance detection, metastable lifetimes and slow-mixing
//! witnesses.
//!
//! Data-parallel inner loops (per-band channel application, eigenvalue
//! bisection, scans) use rayon when the `parallel` feature is enabled
//! (default); disabling it yields a dependency-free sequential build with
//! identical results.

pub mod banded;
pub mod channel;
pub mod dense;
pub mod dynamics;
pub mod params;
mod par;
pub mod propagator;
pub mod resonance;
pub mod spectral;
pub mod tridiag;

pub use num_complex::Complex64;

pub use params::{DiagonalState, ModelParams};
