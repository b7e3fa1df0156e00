//! Heights, levels and momenta of a raising run, and the inequalities
//! relating them to the local raising imbalances.
//!
//! Everything is measured against the raising limit: the unique function
//! that any fair infinite sequence of raising operations converges to.
//! [`raising_limit`] approximates it, [`chart`] evaluates the per-vertex
//! quantities, [`audit_bounds`] checks the inequalities on one state, and
//! [`potential_series`] follows a recorded run.

mod audit;
mod chart;
mod limit;
mod potential;

pub use audit::{audit_bounds, chart_tolerance, AuditReport, BoundCheck, BOUND_NAMES};
pub use chart::{chart, HeightLevelChart};
pub use limit::{default_oracle_epsilon, raising_limit, raising_limit_with, RaisingLimit};
pub use potential::{phi, phi_delta, potential_series, PotentialSample, PotentialSeries, SeriesOptions, PHI_MAX_EDGES};
