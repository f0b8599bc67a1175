//! Traces, summaries, the conditioning experiment and the query-cost
//! estimator.

mod conditioning;
mod cost;
mod trace;

pub use conditioning::{
    conditioning_experiment, fit_log_slope, log_mu_grid, sample_records, ConditioningReport, ConditioningSeries,
    SlopeFit, FIT_MU_MAX, MIN_FIT_POINTS,
};
pub use cost::{estimate_query_cost, CostEstimate, CostInputs, COST_UNITS};
pub use trace::{load_trace, read_trace, save_json, save_trace, write_trace, SolveSummary, TRACE_COLUMNS};
