use serde::{Deserialize, Serialize};

use super::audit::{audit_bounds, AuditReport};
use super::chart::chart;
use super::limit::{default_oracle_epsilon, raising_limit, RaisingLimit};
use crate::balancer::{BalanceTrace, Op, Replayer};
use crate::error::{BalanceError, DiagnosticsError};
use crate::graph::GraphFunction;
use crate::scalar::{factorials, Scalar};

/// Largest number of non-loop edges for which `Φ` is evaluated.
pub const PHI_MAX_EDGES: usize = 18;

/// `Φ = Σ N_e!·α_e` over non-loop edges, where `N_e` is the 1-based rank of
/// `e` by weight. Tied edges get consecutive ranks, which keeps `Φ`
/// continuous as weights cross. `None` above [`PHI_MAX_EDGES`] edges.
pub fn phi<T: Scalar>(alpha: &GraphFunction<T>) -> Option<T> {
    let (ids, ranks) = phi_ranks(alpha)?;
    let fact = factorials(ids.len())?;
    Some(ids.iter().zip(&ranks).map(|(&id, &k)| T::lit(fact[k] as f64) * alpha.weight(id)).sum())
}

fn phi_ranks<T: Scalar>(alpha: &GraphFunction<T>) -> Option<(Vec<usize>, Vec<usize>)> {
    let ids: Vec<usize> = (0..alpha.edge_count()).filter(|&id| {
        let (u, v) = alpha.endpoints(id);
        u != v
    }).collect();
    if ids.len() > PHI_MAX_EDGES {
        return None;
    }
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by(|&a, &b| alpha.weight(ids[a]).partial_cmp(&alpha.weight(ids[b])).expect("finite weights").then(a.cmp(&b)));
    let mut ranks = vec![0; ids.len()];
    for (k, &i) in order.iter().enumerate() {
        ranks[i] = k + 1;
    }
    Some((ids, ranks))
}

/// `Φ(after) − Φ(before)`, evaluated as `Σ N′!(α′ − α) + Σ (N′! − N!)(α − c)`
/// with `c` the mean weight, which avoids cancelling the large terms.
pub fn phi_delta<T: Scalar>(before: &GraphFunction<T>, after: &GraphFunction<T>) -> Option<T> {
    if !before.same_edge_set(after) {
        return None;
    }
    let (ids, r0) = phi_ranks(before)?;
    let (_, r1) = phi_ranks(after)?;
    let fact = factorials(ids.len())?;
    let c = ids.iter().map(|&id| before.weight(id)).sum::<T>() / T::lit(ids.len().max(1) as f64);
    let mut moved = T::zero();
    let mut reranked = T::zero();
    for (k, &id) in ids.iter().enumerate() {
        let f1 = fact[r1[k]] as f64;
        moved = moved + T::lit(f1) * (after.weight(id) - before.weight(id));
        if r0[k] != r1[k] {
            reranked = reranked + T::lit(f1 - fact[r0[k]] as f64) * (before.weight(id) - c);
        }
    }
    Some(moved + reranked)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSample {
    pub t: u64,
    pub psi: f64,
    pub h: f64,
    pub sum_rho_raise: f64,
    pub phi: Option<f64>,
    pub violations: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSeries {
    pub samples: Vec<PotentialSample>,
    pub audit: AuditReport,
    pub oracle_epsilon: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesOptions<T> {
    pub oracle_epsilon: Option<T>,
    /// Evaluate `Φ` at each sample (small graphs only).
    pub phi: bool,
    /// Run the full inequality audit at each sample.
    pub audit: bool,
    /// Recompute the raising limit from each sampled state instead of
    /// rebasing the initial one. Slow; for cross-checking.
    pub recompute: bool,
}

impl<T> Default for SeriesOptions<T> {
    fn default() -> Self {
        Self { oracle_epsilon: None, phi: false, audit: true, recompute: false }
    }
}

/// Replays the raising part of `trace` on `alpha0` and samples the potentials
/// every `sample_every` raising operations, plus at the end of the phase.
pub fn potential_series<T: Scalar>(
    trace: &BalanceTrace<T>,
    alpha0: &GraphFunction<T>,
    sample_every: u64,
    options: &SeriesOptions<T>,
) -> Result<PotentialSeries, DiagnosticsError> {
    if sample_every == 0 {
        return Err(BalanceError::InvalidParameter("sample_every must be at least 1".into()).into());
    }
    let raise_ops = match trace.phases.first() {
        Some(p) if p.op == Op::Raise => p.ops,
        _ => return Err(BalanceError::InvalidParameter("trace has no raising phase".into()).into()),
    };
    let mut replayer = Replayer::new(trace, alpha0)?;
    let eps = options.oracle_epsilon.unwrap_or_else(|| default_oracle_epsilon(alpha0));
    let base = raising_limit(alpha0, eps)?;

    let mut times: Vec<u64> = (0..=raise_ops).step_by(sample_every as usize).collect();
    if times.last() != Some(&raise_ops) {
        times.push(raise_ops);
    }
    let mut audit = AuditReport::new(0.0);
    let mut samples = Vec::with_capacity(times.len());
    let mut oracle_epsilon = base.oracle_epsilon;
    for t in times {
        replayer.advance_to(t)?;
        let g = replayer.graph()?;
        let limit: RaisingLimit<T> = if options.recompute {
            raising_limit(&g, eps)?
        } else {
            base.rebase(replayer.raised())?
        };
        oracle_epsilon = oracle_epsilon.max(limit.oracle_epsilon);
        let c = chart(&g, &limit)?;
        let mut violations = 0;
        if options.audit {
            let r = audit_bounds(&g, &c)?;
            violations = r.violations();
            audit.merge(&r);
        }
        samples.push(PotentialSample {
            t,
            psi: c.psi.to_f64_lossy(),
            h: c.h.to_f64_lossy(),
            sum_rho_raise: c.rho.iter().copied().sum::<T>().to_f64_lossy(),
            phi: if options.phi { phi(&g).map(|p| p.to_f64_lossy()) } else { None },
            violations,
        });
    }
    Ok(PotentialSeries { samples, audit, oracle_epsilon: oracle_epsilon.to_f64_lossy() })
}
