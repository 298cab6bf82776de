//! Test statistics and conditional p-values.

mod critical;
mod exact;
mod pvalue;
mod statistic;

pub use critical::{critical_values_from_values, exact_conditional_critical_values, exact_size, CriticalValues};
pub use exact::{dyad_probabilities, exact_reciprocity_likelihood, DyadProbabilities};
pub use pvalue::{
    compare_with_null, conditional_p_value, exact_p_value, prepare_statistic, reference_sample, tie_tolerance,
    Diagnostics, NullComparison, Reference, ReferenceSample, TauChoice, TestOptions, TestResult, TestResultRecord,
    DEFAULT_PILOT_STEPS,
};
pub use statistic::{
    locally_best_from_utility, locally_best_statistic, theorem2_derivative, DeltaSource, PreparedStatistic,
    StatisticKind, TestStatisticSpec,
};
