//! Haar averages of products of traces of unitary words via the
//! Schwinger-Dyson recursion: level-wise series, exact solution as a
//! rational function of `N`, and a Monte-Carlo cross-check.

mod exact;
#[cfg(feature = "std")]
mod montecarlo;
mod parse;
mod series;
mod step;
mod word;

pub use exact::{evaluate_exact, evaluate_exact_with, ExactOptions, SdSystem, DEFAULT_SYMBOLIC_BUDGET};
#[cfg(feature = "std")]
pub use montecarlo::{monte_carlo_expectation, MonteCarloEstimate};
pub use parse::{parse_trace_expr, ParsedExpr};
pub use series::{evaluate_series, truncation_bound, SeriesOptions, SeriesResult, Termination};
pub use step::{sd_step, SdChild, SdGroup, SdTerm};
pub use word::{CanonicalKey, ExpectationQuery, Letter, TraceWord};
