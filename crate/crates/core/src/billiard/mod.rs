//! Geometry and dynamics of the periodic Lorentz gas.

pub mod flow;
pub mod geometry;

pub use flow::{
    absorbing_transport, evolve_billiard, evolve_scaled, evolve_specular, sample_outgoing,
    survival_indicator, torus_position, BoundaryLaw, DiffuseSampling, ScaledState, Trajectory,
};
pub use geometry::{first_hit, reflect, CollisionEvent, ExitTimeResult, GRAZING_TOL, RESTART_TOL};
