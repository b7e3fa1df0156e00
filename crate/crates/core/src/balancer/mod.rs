//! One-vertex balancing operations and the iterations built from them.
//!
//! A balancing operation at `v` adds `(out − in)/2` to every weight entering
//! `v` and subtracts it from every weight leaving `v`, where `out` and `in`
//! are the largest outgoing and incoming weights. Raising operations only
//! fire when `out > in`, lowering operations only when `in > out`.

mod phases;
mod schedule;
mod state;
mod trace;

pub use phases::{
    classic_balance, classic_balance_with, compute_t, lowering_phase, lowering_phase_with, raising_phase,
    raising_phase_with, two_phase_balance, two_phase_balance_with, BalanceOptions, StopRule,
};
pub use schedule::{Discipline, ScheduleKind, ScheduleSpec, Scheduler};
pub use state::{balance_at, lower_at, raise_at, BalanceState, Op, StepAudit};
pub use trace::{replay, replay_summary, verify_replay, BalanceTrace, PhaseSummary, Replayer, Step, StopCause};
