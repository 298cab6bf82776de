//! Preferences, the null likelihood and its estimator, and simulation under
//! the null and the strategic alternative.

pub mod logistic;
mod likelihood;
mod mle;
mod params;
mod simulate;
mod strategic;

pub use likelihood::{moment_residual, null_gradient, null_log_likelihood};
pub use mle::{mle_null, ConvergenceReport, MleFit};
pub use params::{
    params_from_json, systematic_utility, NuisanceParams, ParamsRecord, SystematicUtility,
};
pub use simulate::{
    equilibrium_from_shocks, is_pure_nash, simulate_alternative, simulate_null,
    simulate_null_with_shocks, UtilityShockMatrix,
};
pub use strategic::{strategic_term, Evaluator, StrategicKind, StrategicSpec};
