//! Relative valuation of pooled spatio-temporal demand data.
//!
//! Several sources (taxi companies, individual drivers) each hold a log of
//! demand observations for the same city. Pooling those logs can improve a
//! demand forecast, and this crate answers two questions about such pools:
//! *is the pool worth more than its parts*, and *how should the pool's worth
//! be split among the sources*. Worth is measured by a coalition value
//! function: train a forecaster on the aggregate series of a coalition of
//! sources, score the prediction against the all-sources ground truth over a
//! held-out control window, and read the similarity score as the coalition's
//! value. On top of that value function the crate provides exact Shapley
//! values, permutation-sampling approximations (Monte Carlo, random sampling,
//! Latin-square structured sampling, each with optional truncation), the
//! leave-one-out and volume heuristics, and a benchmark harness for comparing
//! the approximators against exact values on synthetic games.
//!
//! The `examples/` directory has one runnable program per capability; start
//! with `exact_valuation`. A thin `demand-value` binary exposes the same
//! pipelines as subcommands for batch runs.

pub mod approx;
pub mod bench;
pub mod coalition;
pub mod forecast;
pub mod game;
pub mod grid;
pub mod ingest;
pub mod panel;
pub mod run;
pub mod series;
pub mod similarity;
pub mod valuation;

pub use coalition::{Coalition, CoalitionError, CoalitionKey};
pub use game::{CharacteristicFunction, TabularGame, ValuationGame};
pub use grid::TimeGrid;
pub use panel::DemandPanel;
pub use series::{DemandSeries, SourceId, ZoneId};
