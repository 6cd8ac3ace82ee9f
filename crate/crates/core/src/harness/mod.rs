//! Quantitative form of the non-convergence argument.

pub mod bounds;
pub mod bump;
pub mod certify;
pub mod dominance;
pub mod observables;

pub use bounds::{
    contradiction_time, lower_bound_from_norm, lower_bound_l, upper_bound_from_norms, upper_bound_u,
};
pub use bump::{make_bump_rho, BumpInitialData, BumpProfile};
pub use certify::{
    certify_nonconvergence, CertifyOptions, NonConvergenceReport, Provenance, ScheduleEntry,
};
pub use dominance::{dominance_check, transported_values, DominanceReport, DOMINANCE_TOL};
pub use observables::{
    empirical_fe_observables, ObservableRow, ObservableTable, SurvivalRow, TestFunction,
};
