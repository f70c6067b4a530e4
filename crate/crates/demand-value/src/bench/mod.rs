//! Experiment harness: synthetic games and panels, approximator scoring,
//! cooperation analysis, retail selection, and cross-metric validation.

pub mod coop;
pub mod cross_metric;
pub mod evaluate;
pub mod retail;
pub mod synthetic;

pub use coop::{cooperation_benefit, CooperationAnalysis, WillingCount, DEFAULT_ACCURACY_FLOOR};
pub use cross_metric::{metric_cross_validation, MetricCrossValidation, MetricPairStats};
pub use evaluate::{evaluate_approximator, ApproximatorEvaluation, BenchError};
pub use retail::{accuracy_probability_curve, pims_select, CurvePoint, PimsOutcome};
pub use synthetic::derive_seed;
