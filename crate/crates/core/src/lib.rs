//! Classical simulator and analysis toolkit for Quantum Hamiltonian Descent.
//!
//! The wavefunction lives on a uniform grid over the scaled box `[-1/2, 1/2)^d`
//! and is evolved with a Strang split-step Fourier integrator under the
//! time-dependent Hamiltonian `a(t) (-Δ) + b(t) f`. Around the integrator sit
//! the optimizer driver, query-counted oracles, error-bound calculators and
//! closed-form resource estimates.

pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod grid;
mod phase;
pub mod optimizer;
pub mod potential;
pub mod propagator;
pub mod resources;
pub mod schedule;

pub use error::{QhdError, Result};
pub use grid::{GridSpec, Representation, WaveState};
pub use num_complex::Complex64;
