//! Phase drivers: raising, lowering, two-phase and classic balancing.

use super::schedule::{Discipline, ScheduleKind, ScheduleSpec, Scheduler};
use super::state::{BalanceState, Op};
use super::trace::{BalanceTrace, PhaseSummary, Step, StopCause};
use crate::error::BalanceError;
use crate::graph::GraphFunction;
use crate::scalar::Scalar;

/// When a phase stops.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopRule<T> {
    pub epsilon: T,
    pub max_ops: u64,
    /// Stop as soon as the phase's imbalance is at most `epsilon`, checked
    /// before the first operation and after every `n` operations.
    pub early_exit: bool,
}

impl<T: Scalar> StopRule<T> {
    pub fn new(epsilon: T, max_ops: u64) -> Self {
        Self { epsilon, max_ops, early_exit: true }
    }

    fn validate(&self) -> Result<(), BalanceError> {
        if !(self.epsilon > T::zero()) {
            return Err(BalanceError::InvalidParameter(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_ops == 0 {
            return Err(BalanceError::InvalidParameter("max_ops must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BalanceOptions {
    /// Keep every non-trivial step in the trace.
    pub record_steps: bool,
    /// Check after every raising or lowering step that the opposite
    /// imbalances did not grow.
    pub audit_steps: bool,
    /// Per-phase budget for two-phase runs, replacing `compute_t`.
    pub max_ops: Option<u64>,
}

impl Default for BalanceOptions {
    fn default() -> Self {
        Self { record_steps: true, audit_steps: false, max_ops: None }
    }
}

/// Number of raising operations after which a uniformly random raising
/// phase is `epsilon`-raising-balanced with probability at least `1 − delta`:
/// `⌈6 n³ ln(2 ρ n / (ε δ))⌉`, or 0 when `rho ≤ epsilon`. Saturates at `u64::MAX`.
pub fn compute_t(n: usize, rho: f64, epsilon: f64, delta: f64) -> Result<u64, BalanceError> {
    if n == 0 {
        return Err(BalanceError::InvalidParameter("n must be positive".into()));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(BalanceError::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(BalanceError::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(BalanceError::InvalidParameter(format!("rho must be finite and non-negative, got {rho}")));
    }
    if rho <= epsilon {
        return Ok(0);
    }
    let n = n as f64;
    let t = (6.0 * n * n * n * (2.0 * rho * n / (epsilon * delta)).ln()).ceil();
    Ok(if t >= u64::MAX as f64 { u64::MAX } else { t as u64 })
}

struct Runner<T> {
    state: BalanceState<T>,
    scheduler: Scheduler,
    steps: Vec<Step<T>>,
    record: bool,
    phases: Vec<PhaseSummary<T>>,
}

impl<T: Scalar> Runner<T> {
    fn new(alpha: &GraphFunction<T>, kind: ScheduleKind, options: &BalanceOptions) -> Result<Self, BalanceError> {
        let mut state = BalanceState::new(alpha.clone())?;
        if options.audit_steps {
            state.enable_step_audit();
        }
        Ok(Self {
            scheduler: Scheduler::new(kind, alpha.n()),
            state,
            steps: Vec::new(),
            record: options.record_steps,
            phases: Vec::new(),
        })
    }

    fn run(&mut self, op: Op, stop: &StopRule<T>) -> PhaseSummary<T> {
        let n = self.state.n() as u64;
        let measure = |s: &BalanceState<T>| op.measure(&s.imbalance());
        let mut done = 0u64;
        let mut reached = stop.early_exit && measure(&self.state) <= stop.epsilon;
        while !reached && done < stop.max_ops {
            let v = self.scheduler.next(&self.state, op);
            let amount = self.state.apply(v, op);
            done += 1;
            if self.record && amount != T::zero() {
                self.steps.push(Step { t: self.state.ops(), op, v, amount });
            }
            if stop.early_exit && done % n == 0 {
                reached = measure(&self.state) <= stop.epsilon;
            }
        }
        let residual = measure(&self.state);
        let summary = PhaseSummary { op, ops: done, max_ops: stop.max_ops, residual, reached: residual <= stop.epsilon };
        self.phases.push(summary);
        summary
    }

    fn finish(
        self,
        initial: &GraphFunction<T>,
        schedule: ScheduleSpec,
        epsilon: T,
        delta: Option<T>,
        budget: Option<u64>,
    ) -> (GraphFunction<T>, BalanceTrace<T>) {
        let stop = if self.phases.iter().all(|p| p.reached) {
            StopCause::TargetReached
        } else {
            StopCause::BudgetExhausted
        };
        let trace = BalanceTrace {
            n: initial.n(),
            schedule,
            epsilon,
            delta,
            budget,
            initial_digest: initial.digest(),
            final_digest: String::new(),
            steps: self.steps,
            steps_recorded: self.record,
            phases: self.phases,
            ops: self.state.ops(),
            stop,
            initial_imbalance: initial.imbalance(),
            final_imbalance: self.state.imbalance(),
            raising: self.state.raised().to_vec(),
            lowering: self.state.lowered().to_vec(),
            scaling: self.state.scaling().to_vec(),
            step_audit: self.state.step_audit(),
        };
        let graph = self.state.into_graph();
        let trace = BalanceTrace { final_digest: graph.digest(), ..trace };
        (graph, trace)
    }
}

fn single_phase<T: Scalar>(
    alpha: &GraphFunction<T>,
    op: Op,
    stop: &StopRule<T>,
    schedule: ScheduleSpec,
    options: &BalanceOptions,
) -> Result<(GraphFunction<T>, BalanceTrace<T>), BalanceError> {
    stop.validate()?;
    let mut runner = Runner::new(alpha, schedule.kind, options)?;
    runner.run(op, stop);
    Ok(runner.finish(alpha, schedule, stop.epsilon, None, None))
}

/// Applies raising operations in schedule order until the stop rule fires.
pub fn raising_phase<T: Scalar>(
    alpha: &GraphFunction<T>,
    stop: &StopRule<T>,
    schedule: ScheduleSpec,
) -> Result<(GraphFunction<T>, BalanceTrace<T>), BalanceError> {
    raising_phase_with(alpha, stop, schedule, &BalanceOptions::default())
}

pub fn raising_phase_with<T: Scalar>(
    alpha: &GraphFunction<T>,
    stop: &StopRule<T>,
    schedule: ScheduleSpec,
    options: &BalanceOptions,
) -> Result<(GraphFunction<T>, BalanceTrace<T>), BalanceError> {
    single_phase(alpha, Op::Raise, stop, schedule, options)
}

/// Applies lowering operations in schedule order until the stop rule fires.
pub fn lowering_phase<T: Scalar>(
    alpha: &GraphFunction<T>,
    stop: &StopRule<T>,
    schedule: ScheduleSpec,
) -> Result<(GraphFunction<T>, BalanceTrace<T>), BalanceError> {
    lowering_phase_with(alpha, stop, schedule, &BalanceOptions::default())
}

pub fn lowering_phase_with<T: Scalar>(
    alpha: &GraphFunction<T>,
    stop: &StopRule<T>,
    schedule: ScheduleSpec,
    options: &BalanceOptions,
) -> Result<(GraphFunction<T>, BalanceTrace<T>), BalanceError> {
    single_phase(alpha, Op::Lower, stop, schedule, options)
}

/// A raising phase followed by a lowering phase, each with budget
/// `compute_t(n, ρ, ε, δ)` measured on the input and early exit on.
/// `delta` defaults to `1/n` (or `1/2` when `n = 1`).
///
/// Running out of budget is not an error: the trace's stop cause and final
/// imbalance report it.
pub fn two_phase_balance<T: Scalar>(
    alpha: &GraphFunction<T>,
    epsilon: T,
    schedule: ScheduleSpec,
    delta: Option<T>,
) -> Result<(GraphFunction<T>, BalanceTrace<T>), BalanceError> {
    two_phase_balance_with(alpha, epsilon, schedule, delta, &BalanceOptions::default())
}

pub fn two_phase_balance_with<T: Scalar>(
    alpha: &GraphFunction<T>,
    epsilon: T,
    schedule: ScheduleSpec,
    delta: Option<T>,
    options: &BalanceOptions,
) -> Result<(GraphFunction<T>, BalanceTrace<T>), BalanceError> {
    let n = alpha.n();
    let delta = delta.unwrap_or_else(|| T::lit(if n > 1 { 1.0 / n as f64 } else { 0.5 }));
    let rho = alpha.imbalance().rho;
    let budget = compute_t(n, rho.to_f64_lossy(), epsilon.to_f64_lossy(), delta.to_f64_lossy())?;
    let stop = StopRule { epsilon, max_ops: options.max_ops.unwrap_or(budget).max(1), early_exit: true };
    stop.validate()?;
    let mut runner = Runner::new(alpha, schedule.kind, options)?;
    runner.run(Op::Raise, &stop);
    runner.run(Op::Lower, &stop);
    let schedule = ScheduleSpec { discipline: Discipline::TwoPhase, ..schedule };
    Ok(runner.finish(alpha, schedule, epsilon, Some(delta), Some(budget)))
}

/// Standard balancing in schedule order until `ρ ≤ epsilon` or `max_ops`
/// operations. Only fair schedules are covered by the convergence theorem;
/// the greedy order is accepted as an experiment.
pub fn classic_balance<T: Scalar>(
    alpha: &GraphFunction<T>,
    epsilon: T,
    schedule: ScheduleSpec,
    max_ops: u64,
) -> Result<(GraphFunction<T>, BalanceTrace<T>), BalanceError> {
    classic_balance_with(alpha, epsilon, schedule, max_ops, &BalanceOptions::default())
}

pub fn classic_balance_with<T: Scalar>(
    alpha: &GraphFunction<T>,
    epsilon: T,
    schedule: ScheduleSpec,
    max_ops: u64,
    options: &BalanceOptions,
) -> Result<(GraphFunction<T>, BalanceTrace<T>), BalanceError> {
    let schedule = ScheduleSpec { discipline: Discipline::Classic, ..schedule };
    single_phase(alpha, Op::Balance, &StopRule { epsilon, max_ops, early_exit: true }, schedule, options)
}
