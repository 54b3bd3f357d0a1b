//! Quantum noise and dynamic back-action of asymmetric, signal/power-recycled
//! Michelson-Sagnac interferometers.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: complex 2×2 kit and a small dense solver.
//! * [`scattering`]: exact two-port optical solution (mode dynamics, output
//!   scattering matrix, displacement transfer, classical intracavity field)
//!   together with a brute-force sideband solver used as an oracle.
//! * [`radiation_pressure`]: force transfer, optical rigidity and force-noise
//!   spectra built on the exact solution.
//! * [`lumped_mode`]: small-asymmetry, high-finesse closed forms (effective
//!   bandwidth and detuning, coupling constants, approximate matrices,
//!   canonical and Fano spectra).
//! * [`cooling`]: thermal spectra, steady-state phonon occupancy and pump
//!   optimisation at fixed intracavity energy.
//!
//! Units are SI throughout. Classical amplitudes are normalised so that
//! `|A|²` is a photon flux in photons per second.

// `!(x > 0.0)` is used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod cooling;
pub mod error;
pub mod lumped_mode;
pub mod radiation_pressure;
pub mod scattering;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s (exact).
pub const C_LIGHT: f64 = 299_792_458.0;
