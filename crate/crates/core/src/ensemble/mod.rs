//! Free-path statistics under the invariant measure `μ_r`.

pub mod poisson;
pub mod sampling;
pub mod survival;
pub mod tail;
pub mod two_scale;

pub use poisson::{matched_poisson_intensity, poisson_decay_rate, poisson_survival};
pub use sampling::{sample_mu_r, sample_mu_r_counted, sample_scaled_phase};
pub use survival::{
    estimate_survival, geometric_grid, linear_grid, survival_from_samples, CurveModel,
    SurvivalCurve,
};
pub use tail::{check_bgw_bounds, fit_tail_models, ModelFit, TailBoundsEstimate, Window};
pub use two_scale::{phi_sampler, two_scale_fourier_check, TwoScaleReport};
