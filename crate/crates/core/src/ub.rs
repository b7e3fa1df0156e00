//! Unique-balance decision.
//!
//! A balanced function is the only balanced member of its equivalence
//! class exactly when every threshold subgraph `{e : β_e ≥ w}` (isolated
//! vertices dropped) is strongly connected. Under floating point the edge
//! weights are first grouped: sorted weights closer than a tolerance are
//! treated as equal, and only the smallest weight of each group is used
//! as a threshold.

use serde::{Deserialize, Serialize};

use crate::balancer::{classic_balance, compute_t, two_phase_balance, Discipline, ScheduleKind, ScheduleSpec};
use crate::error::{BalanceError, UbError};
use crate::graph::{threshold_subgraph, GraphFunction};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "UB")]
    Ub,
    #[serde(rename = "NotUB")]
    NotUb,
    Indeterminate,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Ub => "UB",
            Verdict::NotUb => "NotUB",
            Verdict::Indeterminate => "Indeterminate",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UbReport<T> {
    pub verdict: Verdict,
    /// Largest group threshold whose subgraph is not strongly connected.
    pub witness_threshold: Option<T>,
    /// Strongly connected components of the witness subgraph.
    pub witness_components: Vec<Vec<usize>>,
    pub balanced_representative: GraphFunction<T>,
    pub grouping_tolerance: T,
    /// Balancing target used to produce the representative, if any.
    pub epsilon: Option<T>,
    pub thresholds_checked: usize,
    pub distinct_limits: Option<(GraphFunction<T>, GraphFunction<T>)>,
    pub note: Option<String>,
}

struct ThresholdScan<T> {
    witness: Option<(T, Vec<Vec<usize>>)>,
    checked: usize,
}

/// Smallest weight of each group of sorted weights whose consecutive gaps are at most `tol`.
pub fn group_thresholds<T: Scalar>(weights: &[T], tol: T) -> Vec<T> {
    let mut w: Vec<T> = weights.to_vec();
    w.sort_by(|a, b| b.partial_cmp(a).expect("finite weights"));
    let mut out = Vec::new();
    for (k, &x) in w.iter().enumerate() {
        let last_of_group = k + 1 == w.len() || x - w[k + 1] > tol;
        if last_of_group {
            out.push(x);
        }
    }
    out
}

fn scan<T: Scalar>(beta: &GraphFunction<T>, tol: T) -> ThresholdScan<T> {
    let thresholds = group_thresholds(beta.weights(), tol);
    let checked = thresholds.len();
    for w in thresholds {
        let sub = threshold_subgraph(beta, w);
        let comps = sub.components(beta);
        if comps.len() > 1 {
            return ThresholdScan { witness: Some((w, comps)), checked };
        }
    }
    ThresholdScan { witness: None, checked }
}

fn report_from<T: Scalar>(beta: &GraphFunction<T>, tau: T, s: ThresholdScan<T>) -> UbReport<T> {
    let (verdict, witness_threshold, witness_components) = match s.witness {
        Some((w, comps)) => (Verdict::NotUb, Some(w), comps),
        None => (Verdict::Ub, None, Vec::new()),
    };
    UbReport {
        verdict,
        witness_threshold,
        witness_components,
        balanced_representative: beta.clone(),
        grouping_tolerance: tau,
        epsilon: None,
        thresholds_checked: s.checked,
        distinct_limits: None,
        note: None,
    }
}

/// Decides unique balance for an (approximately) balanced function.
pub fn is_ub_balanced<T: Scalar>(beta: &GraphFunction<T>, tau: T) -> Result<UbReport<T>, UbError> {
    if !(tau >= T::zero()) {
        return Err(BalanceError::InvalidParameter(format!("tau must be non-negative, got {tau}")).into());
    }
    let rho = beta.imbalance().rho;
    if rho > tau {
        return Err(UbError::NotBalanced { imbalance: rho.to_f64_lossy(), tau: tau.to_f64_lossy() });
    }
    Ok(report_from(beta, tau, scan(beta, tau)))
}

/// Default balancing target: `1e−10` relative to the weight scale.
pub fn default_ub_epsilon<T: Scalar>(alpha: &GraphFunction<T>) -> T {
    T::lit(1e-10) * T::one().max(alpha.scale())
}

/// Balances `alpha` with the two-phase algorithm and decides unique balance
/// on the result. `tau` defaults to `1000·epsilon`.
///
/// Grouping with a finer tolerance tests a superset of thresholds, so the
/// verdict can only move from UB towards NotUB as the tolerance shrinks.
/// The verdict is computed at both `epsilon` and `tau`; when they disagree
/// some weight gap decides the answer and the verdict is Indeterminate.
pub fn is_ub<T: Scalar>(alpha: &GraphFunction<T>, epsilon: Option<T>, tau: Option<T>, seed: u64) -> Result<UbReport<T>, UbError> {
    let epsilon = epsilon.unwrap_or_else(|| default_ub_epsilon(alpha));
    let tau = tau.unwrap_or(T::lit(1e3) * epsilon);
    let spec = ScheduleSpec { kind: ScheduleKind::UniformRandom { seed }, discipline: Discipline::TwoPhase };
    let (beta, trace) = two_phase_balance(alpha, epsilon, spec, None)?;
    if !trace.reached() {
        let mut r = report_from(&beta, tau, ThresholdScan { witness: None, checked: 0 });
        r.verdict = Verdict::Indeterminate;
        r.epsilon = Some(epsilon);
        r.note = Some(format!(
            "balancing stopped at imbalance {} above target {}",
            trace.final_imbalance.rho, epsilon
        ));
        return Ok(r);
    }
    let coarse = scan(&beta, tau);
    let coarse_ub = coarse.witness.is_none();
    let fine = scan(&beta, epsilon);
    let fine_ub = fine.witness.is_none();
    let mut r = if coarse_ub && !fine_ub {
        let mut r = report_from(&beta, tau, fine);
        r.verdict = Verdict::Indeterminate;
        r.note = Some("a weight gap between epsilon and tau decides strong connectivity".into());
        r
    } else {
        report_from(&beta, tau, coarse)
    };
    r.epsilon = Some(epsilon);
    Ok(r)
}

/// Runs classic balancing under cyclic schedules from every start and then
/// under random seeds, at most `attempts` runs in total, and returns the
/// first two outputs that differ by more than `10·epsilon` on some edge.
/// Finding nothing is not evidence of unique balance.
pub fn find_distinct_limits<T: Scalar>(
    alpha: &GraphFunction<T>,
    epsilon: T,
    attempts: usize,
) -> Result<Option<(GraphFunction<T>, GraphFunction<T>)>, UbError> {
    let n = alpha.n();
    let rho = alpha.imbalance().rho.to_f64_lossy();
    let delta = if n > 1 { 1.0 / n as f64 } else { 0.5 };
    let max_ops = compute_t(n, rho, epsilon.to_f64_lossy(), delta)?.saturating_mul(4).max(1);
    let kinds = (0..n)
        .map(|start| ScheduleKind::Cyclic { start })
        .chain((0u64..).map(|seed| ScheduleKind::UniformRandom { seed }))
        .take(attempts);
    let gap = T::lit(10.0) * epsilon;
    let mut seen: Vec<GraphFunction<T>> = Vec::new();
    for kind in kinds {
        let spec = ScheduleSpec { kind, discipline: Discipline::Classic };
        let (g, trace) = classic_balance(alpha, epsilon, spec, max_ops)?;
        if !trace.reached() {
            continue;
        }
        for prev in &seen {
            let differs = prev.weights().iter().zip(g.weights()).any(|(&a, &b)| (a - b).abs() > gap);
            if differs {
                return Ok(Some((prev.clone(), g)));
            }
        }
        seen.push(g);
    }
    Ok(None)
}
