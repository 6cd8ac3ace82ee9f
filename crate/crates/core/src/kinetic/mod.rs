//! Discrete-velocity Fourier solver for the linear Boltzmann equation on the torus.

pub mod decay;
pub mod field;
pub mod kernel;
pub mod quadrature;
pub mod solver;

pub use decay::{fit_decay, DecayFit, DISTANCE_FLOOR};
pub use field::{index_of, mode_cube, mode_of, KineticField};
pub use kernel::{build_kernel, CollisionKernelSpec, KernelKind};
pub use quadrature::{sphere_nodes, velocity_nodes, VelocityQuadrature};
pub use solver::{
    generator_eigenvalues, generator_matrix, solve_linear_boltzmann, spectral_gap,
    spectral_gap_cube, ModeAbscissa, SpectralReport,
};
