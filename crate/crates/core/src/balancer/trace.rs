//! Run records and replay.

use serde::{Deserialize, Serialize};

use super::schedule::ScheduleSpec;
use super::state::{shift_vertex, Op, StepAudit};
use crate::error::BalanceError;
use crate::graph::{GraphFunction, Imbalance, ScalingVector};
use crate::scalar::Scalar;

/// One non-trivial operation: at global op index `t` (1-based), vertex `v`
/// moved by the signed potential change `amount`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step<T> {
    pub t: u64,
    pub op: Op,
    pub v: usize,
    pub amount: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopCause {
    TargetReached,
    BudgetExhausted,
}

/// Outcome of one phase. `residual` is the phase's own imbalance at exit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSummary<T> {
    pub op: Op,
    pub ops: u64,
    pub max_ops: u64,
    pub residual: T,
    pub reached: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BalanceTrace<T> {
    pub n: usize,
    pub schedule: ScheduleSpec,
    pub epsilon: T,
    pub delta: Option<T>,
    /// Per-phase budget, when computed from the step-count bound.
    pub budget: Option<u64>,
    pub initial_digest: String,
    pub final_digest: String,
    /// Non-trivial operations only; empty when recording was switched off.
    pub steps: Vec<Step<T>>,
    pub steps_recorded: bool,
    pub phases: Vec<PhaseSummary<T>>,
    pub ops: u64,
    pub stop: StopCause,
    pub initial_imbalance: Imbalance<T>,
    pub final_imbalance: Imbalance<T>,
    pub raising: Vec<T>,
    pub lowering: Vec<T>,
    /// Net potential change per vertex: `raising − lowering` for phased
    /// runs, the sum of balancing amounts for classic ones.
    pub scaling: Vec<T>,
    pub step_audit: Option<StepAudit>,
}

impl<T: Scalar> BalanceTrace<T> {
    pub fn reached(&self) -> bool {
        self.stop == StopCause::TargetReached
    }

    pub fn scaling_vector(&self) -> ScalingVector<T> {
        ScalingVector(self.scaling.clone())
    }

    /// `Err(TargetNotReached)` when some phase ran out of budget.
    pub fn check_reached(&self) -> Result<(), BalanceError> {
        if self.reached() {
            return Ok(());
        }
        Err(BalanceError::TargetNotReached {
            target: self.epsilon.to_f64_lossy(),
            imbalance: self.final_imbalance.rho.to_f64_lossy(),
        })
    }
}

/// Re-applies recorded steps to an initial graph function, optionally
/// stopping at intermediate times.
#[derive(Clone, Debug)]
pub struct Replayer<'a, T> {
    initial: &'a GraphFunction<T>,
    steps: &'a [Step<T>],
    pos: usize,
    weights: Vec<T>,
    raised: Vec<T>,
    lowered: Vec<T>,
    scaling: Vec<T>,
}

impl<'a, T: Scalar> Replayer<'a, T> {
    pub fn new(trace: &'a BalanceTrace<T>, initial: &'a GraphFunction<T>) -> Result<Self, BalanceError> {
        if trace.n != initial.n() {
            return Err(BalanceError::ReplayMismatch(format!(
                "trace has {} vertices, input has {}",
                trace.n,
                initial.n()
            )));
        }
        if trace.initial_digest != initial.digest() {
            return Err(BalanceError::ReplayMismatch("input digest differs from the recorded one".into()));
        }
        if !trace.steps_recorded {
            return Err(BalanceError::ReplayMismatch("trace was recorded without steps".into()));
        }
        Ok(Self::from_steps(&trace.steps, initial))
    }

    /// Replays bare steps without digest checks.
    pub fn from_steps(steps: &'a [Step<T>], initial: &'a GraphFunction<T>) -> Self {
        let n = initial.n();
        Self {
            initial,
            steps,
            pos: 0,
            weights: initial.weights().to_vec(),
            raised: vec![T::zero(); n],
            lowered: vec![T::zero(); n],
            scaling: vec![T::zero(); n],
        }
    }

    /// Applies every step with `step.t <= t`.
    pub fn advance_to(&mut self, t: u64) -> Result<(), BalanceError> {
        while let Some(step) = self.steps.get(self.pos) {
            if step.t > t {
                break;
            }
            if step.v >= self.initial.n() {
                return Err(BalanceError::ReplayMismatch(format!("step at t={} names vertex {}", step.t, step.v)));
            }
            shift_vertex(&mut self.weights, self.initial, step.v, step.amount);
            self.scaling[step.v] = self.scaling[step.v] + step.amount;
            match step.op {
                Op::Raise => self.raised[step.v] = self.raised[step.v] + step.amount,
                Op::Lower => self.lowered[step.v] = self.lowered[step.v] - step.amount,
                Op::Balance => {}
            }
            self.pos += 1;
        }
        Ok(())
    }

    pub fn finish(&mut self) -> Result<(), BalanceError> {
        self.advance_to(u64::MAX)
    }

    pub fn graph(&self) -> Result<GraphFunction<T>, BalanceError> {
        Ok(self.initial.with_weights(self.weights.clone())?)
    }

    pub fn raised(&self) -> &[T] {
        &self.raised
    }

    pub fn lowered(&self) -> &[T] {
        &self.lowered
    }

    pub fn scaling(&self) -> &[T] {
        &self.scaling
    }
}

/// Replays a trace from its initial graph function and checks that the
/// result matches the recorded final digest bit for bit.
pub fn replay<T: Scalar>(trace: &BalanceTrace<T>, initial: &GraphFunction<T>) -> Result<GraphFunction<T>, BalanceError> {
    let mut r = Replayer::new(trace, initial)?;
    r.finish()?;
    let g = r.graph()?;
    let digest = g.digest();
    if digest != trace.final_digest {
        return Err(BalanceError::ReplayMismatch(format!(
            "final digest {digest} differs from recorded {}",
            trace.final_digest
        )));
    }
    Ok(g)
}

/// Rebuilds the summary fields of `trace` (final digest, final imbalance,
/// raising, lowering and scaling vectors) by replaying it on `initial`.
pub fn replay_summary<T: Scalar>(
    trace: &BalanceTrace<T>,
    initial: &GraphFunction<T>,
) -> Result<(GraphFunction<T>, BalanceTrace<T>), BalanceError> {
    let mut r = Replayer::new(trace, initial)?;
    r.finish()?;
    let g = r.graph()?;
    let mut out = trace.clone();
    out.final_digest = g.digest();
    out.final_imbalance = g.imbalance();
    out.raising = r.raised().to_vec();
    out.lowering = r.lowered().to_vec();
    out.scaling = r.scaling().to_vec();
    Ok((g, out))
}

/// Replays `trace` and requires every recomputed summary field to match
/// the recorded one bit for bit.
pub fn verify_replay<T: Scalar>(trace: &BalanceTrace<T>, initial: &GraphFunction<T>) -> Result<GraphFunction<T>, BalanceError> {
    let (g, again) = replay_summary(trace, initial)?;
    let same = |a: &[T], b: &[T]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_f64_lossy().to_bits() == y.to_f64_lossy().to_bits());
    let imb = |i: &Imbalance<T>| [i.rho, i.rho_raise, i.rho_lower];
    let checks = [
        ("final digest", again.final_digest == trace.final_digest),
        ("final imbalance", same(&imb(&again.final_imbalance), &imb(&trace.final_imbalance))),
        ("raising vector", same(&again.raising, &trace.raising)),
        ("lowering vector", same(&again.lowering, &trace.lowering)),
        ("scaling vector", same(&again.scaling, &trace.scaling)),
    ];
    if let Some((what, _)) = checks.iter().find(|c| !c.1) {
        return Err(BalanceError::ReplayMismatch(format!("{what} differs from the recorded summary")));
    }
    Ok(g)
}
