//! Models RIS-aided wireless links as N-port networks.
//!
//! The crate covers four layers:
//! - [`netparams`]: S/Z parameter algebra (conversions, reflection
//!   coefficients, T/S/R block partitioning, Touchstone export).
//! - [`scene`]: physical scenes of z-directed thin dipoles and assembly of
//!   the full mutual-impedance matrix via the induced-EMF method.
//! - [`channel`]: end-to-end transfer functions in both representations,
//!   structural scattering, and a direct power-wave network solver used as
//!   a ground-truth oracle.
//! - [`optimizer`]: perturbative phase ascent on the S-form (S-OPT), an
//!   analogous reactance ascent on the Z-form (Z-OPT), and brute-force /
//!   finite-difference oracles.
//!
//! [`experiment`] and the `risnet` binary orchestrate the convergence
//! studies and write machine-readable traces.

pub mod channel;
pub mod error;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod netparams;
pub mod optimizer;
pub mod scene;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const C0: f64 = 299_792_458.0;

/// Free-space wave impedance, ohms (CODATA).
pub const ETA0: f64 = 376.730_313_668;

/// Default reference impedance, ohms.
pub const Z0_DEFAULT: f64 = 50.0;
