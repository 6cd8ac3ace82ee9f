//! Numerical laboratory for the periodic Lorentz gas in the Boltzmann-Grad scaling.
//!
//! * [`billiard`]: exact ray casting against the obstacle lattice, the specular
//!   (or diffuse) billiard flow and absorbing transport.
//! * [`ensemble`]: Monte Carlo free-path statistics, `1/t` tail checks, the
//!   Poisson-obstacle contrast and the two-scale Fourier test.
//! * [`kinetic`]: discrete-velocity Fourier solver for the linear Boltzmann
//!   equation on the torus, decay fits and spectral gaps.
//! * [`harness`]: bump initial data, the lower/upper bound comparison and the
//!   non-convergence certificate.
//! * [`io`]: CSV and JSON formats shared with the command-line tool.

pub mod billiard;
pub mod ensemble;
pub mod error;
pub mod harness;
pub mod io;
pub mod kinetic;
pub mod lattice;
pub mod real;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use lattice::{LatticeConfig, PhasePoint};

/// Crate version, embedded in every emitted file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
