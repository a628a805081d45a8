//! The local-hidden-variable contradiction and the optimal coincidence
//! probabilities.

mod lhv;
mod model;

pub use lhv::{
    lhv_feasibility, ratio, verify_witness, Certificate, Constraint, Event, Feasibility, LhvScenario, Literal,
    Strategy, Variable,
};
pub use model::{
    full_model_evaluation, hardy_probability, optimize_constrained, optimize_unconstrained_measurements,
    HardyEvaluation, HardyInstance, OptimizerConfig, OptimumReport, GOLDEN_HARDY_PROBABILITY,
};
