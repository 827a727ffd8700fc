//! Nonlinear-resonator quantum Rabi models in truncated Hilbert spaces.
//!
//! The library builds dense Hamiltonians for a single resonator mode with
//! Kerr or quartic nonlinearities, coupled to a qubit in the dipole or
//! Coulomb gauge, and analyzes their spectra, gauge consistency, photon
//! squeezing and Wigner functions. A two-mode Hopfield reduction maps a
//! nonlinear matter mode onto an effective nonlinear polariton.
//!
//! Everything is generic over the real scalar ([`Real`], implemented for
//! `f32` and `f64`). The aliases at the crate root fix `f64`.

pub mod error;
pub mod fock;
pub mod hamiltonians;
pub mod io;
pub mod phase_space;
pub mod polariton;
pub mod scalar;
pub mod spectra;
pub mod validate;

pub use error::{Error, Result};
pub use fock::{Axis, Factor, OperatorMatrix, SpaceDescriptor, StateVector};
pub use hamiltonians::{Flavor, Gauge, Nonlinearity, RabiParams, ResonatorParams};
pub use polariton::{HopfieldParams, HopfieldSolution};
pub use scalar::Real;
pub use spectra::{Control, ModelParams, Spectrum, SweepTable, System};

/// Double-precision operator.
pub type Operator = OperatorMatrix<f64>;
/// Double-precision state.
pub type State = StateVector<f64>;
/// Double-precision complex amplitude.
pub type C64 = num_complex::Complex<f64>;
