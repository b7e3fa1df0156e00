use serde::{Deserialize, Serialize};

use super::chart::HeightLevelChart;
use crate::error::{DiagnosticsError, GraphError};
use crate::graph::GraphFunction;
use crate::scalar::Scalar;

/// Names of the audited inequalities, in report order.
pub const BOUND_NAMES: [&str; 12] = [
    "imbalance_bounds_height",
    "height_bounded_by_total_imbalance",
    "smoothing_edges",
    "momentum_local",
    "height_step_local",
    "momentum_global",
    "height_global",
    "top_height_zero",
    "psi_h_sandwich",
    "upper_neighbors_below_level",
    "level_monotone",
    "escape_edge",
];

/// One inequality family. `min_margin` is the smallest `rhs − lhs` seen;
/// an instance is a violation when its margin is below `−slack`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub checked: u64,
    pub violations: u64,
    pub min_margin: Option<f64>,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub checks: Vec<BoundCheck>,
    pub slack: f64,
    pub states: u64,
}

impl Default for AuditReport {
    fn default() -> Self {
        Self::new(0.0)
    }
}

impl AuditReport {
    pub fn new(slack: f64) -> Self {
        let checks = BOUND_NAMES
            .iter()
            .map(|name| BoundCheck { name: name.to_string(), checked: 0, violations: 0, min_margin: None })
            .collect();
        Self { checks, slack, states: 0 }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(BoundCheck::holds)
    }

    pub fn violations(&self) -> u64 {
        self.checks.iter().map(|c| c.violations).sum()
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.holds()).map(|c| c.name.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn record(&mut self, idx: usize, lhs: f64, rhs: f64, slack: f64) {
        let margin = rhs - lhs;
        let c = &mut self.checks[idx];
        c.checked += 1;
        if !(margin >= -slack) {
            c.violations += 1;
        }
        c.min_margin = Some(c.min_margin.map_or(margin, |m| m.min(margin)));
    }

    /// Folds another report in; the slack becomes the larger of the two.
    pub fn merge(&mut self, other: &AuditReport) {
        for (c, o) in self.checks.iter_mut().zip(&other.checks) {
            c.checked += o.checked;
            c.violations += o.violations;
            c.min_margin = match (c.min_margin, o.min_margin) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
        }
        self.slack = self.slack.max(other.slack);
        self.states += other.states;
    }
}

/// Tolerance on the height/weight consistency residual.
pub fn chart_tolerance<T: Scalar>(alpha: &GraphFunction<T>) -> T {
    T::default_tol() * T::one().max(alpha.scale())
}

/// Checks every inequality relating heights, levels, momenta and raising
/// imbalances on one state, each with additive slack `10·oracle_epsilon`.
pub fn audit_bounds<T: Scalar>(alpha: &GraphFunction<T>, c: &HeightLevelChart<T>) -> Result<AuditReport, DiagnosticsError> {
    let n = alpha.n();
    if c.n() != n || !alpha.same_edge_set(&c.alpha_r) {
        return Err(GraphError::EdgeSetMismatch.into());
    }
    if c.residual > chart_tolerance(alpha) || !c.residual.is_finite() {
        let (u, v) = c.residual_edge.unwrap_or((0, 0));
        return Err(DiagnosticsError::InconsistentChart { u, v, residual: c.residual.to_f64_lossy() });
    }
    let f = |t: T| t.to_f64_lossy();
    let slack = f(c.slack());
    let mut r = AuditReport::new(slack);
    r.states = 1;
    let ar = &c.alpha_r;
    let rho_max = c.rho.iter().copied().fold(T::zero(), T::max);
    let rho_sum: T = c.rho.iter().copied().sum();

    r.record(0, f(rho_max / T::lit(2.0)), f(c.h), slack);
    r.record(1, f(c.h), f(T::lit((n - 1) as f64) * rho_sum), slack);

    for v in 0..n {
        // a raising-imbalanced vertex has neighbors on average above it
        if c.rho[v] > T::zero() {
            let up_in = alpha.in_edges(v).iter().map(|&id| c.y[alpha.endpoints(id).0]).fold(T::neg_infinity(), T::max);
            let up_out = alpha.out_edges(v).iter().map(|&id| c.y[alpha.endpoints(id).1]).fold(T::neg_infinity(), T::max);
            r.record(2, f(c.y[v] + c.rho[v] / T::lit(2.0)), f((up_in + up_out) / T::lit(2.0)), slack);
        }

        let mut local = T::zero();
        for &id in alpha.in_edges(v) {
            let u = alpha.endpoints(id).0;
            if c.tier[u] < c.tier[v] {
                local = local.max(c.m[u] + c.rho[u] + c.x[u] - c.x[v]);
            } else {
                r.record(9, f(alpha.weight(id) - c.x[v]), 0.0, slack);
            }
        }
        r.record(3, f(c.m[v]), f(local), slack);

        r.record(5, f(c.m[v]), f(c.rho_s[v] + c.z[v]), slack);
        r.record(6, f(c.y[v] - c.y_min), f(T::lit(c.s_size[v] as f64) * c.rho_s[v]), slack);
        r.record(10, 0.0, f(c.z[v]), slack);
    }

    for (id, (u, v, _)) in alpha.edges().enumerate() {
        r.record(4, f(c.y[v]), f(c.y[u] + c.m[u] + c.rho[u] + c.x[u] - ar.weight(id)), slack);
    }

    r.record(7, f(c.y_max.abs()), 0.0, slack);
    r.record(8, f(c.h), f(c.psi), slack);
    r.record(8, f(c.psi / T::lit(n as f64)), f(c.h), slack);

    // x + z is monotone in height
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| c.tier[v]);
    let mut best = T::neg_infinity();
    let mut k = 0;
    while k < n {
        let t = c.tier[order[k]];
        let group: Vec<usize> = order[k..].iter().copied().take_while(|&v| c.tier[v] == t).collect();
        let lo = group.iter().map(|&v| c.x[v] + c.z[v]).fold(T::infinity(), T::min);
        let hi = group.iter().map(|&v| c.x[v] + c.z[v]).fold(T::neg_infinity(), T::max);
        r.record(10, f(best.max(hi)), f(lo), slack);
        best = best.max(hi);
        k += group.len();
    }

    for v in 0..n {
        if c.tier[v] == 0 {
            continue;
        }
        let below: Vec<usize> = (0..n).filter(|&u| c.tier[u] < c.tier[v]).collect();
        let x_top = below.iter().map(|&u| c.x[u]).fold(T::neg_infinity(), T::max);
        let mut best_margin = f64::NEG_INFINITY;
        for &u in &below {
            if c.x[u] < x_top - c.slack() {
                continue;
            }
            for &id in alpha.out_edges(u) {
                let w = alpha.endpoints(id).1;
                if c.tier[w] >= c.tier[v] {
                    best_margin = best_margin.max(f(ar.weight(id) - x_top));
                }
            }
        }
        r.record(11, 0.0, best_margin, slack);
    }

    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{chart, raising_limit};
    use crate::fixtures::{ln, path_graph, path_graph_b2};

    #[test]
    fn path_passes_with_tight_lower_bound() {
        let a = path_graph();
        let lim = raising_limit(&a, 1e-12).unwrap();
        let c = chart(&a, &lim).unwrap();
        let r = audit_bounds(&a, &c).unwrap();
        assert!(r.passed(), "{:?}", r.failing());
        // rho^R/2 = log 2 = h
        assert!(r.get("imbalance_bounds_height").unwrap().min_margin.unwrap().abs() < 1e-9);
        assert!((c.h - ln(2.0)).abs() < 1e-9);
    }

    #[test]
    fn balanced_passes_trivially() {
        let b2 = path_graph_b2();
        let c = chart(&b2, &raising_limit(&b2, 1e-12).unwrap()).unwrap();
        let r = audit_bounds(&b2, &c).unwrap();
        assert!(r.passed());
        assert_eq!(r.get("escape_edge").unwrap().checked, 0);
    }

    #[test]
    fn corrupted_momentum_is_named() {
        let a = path_graph();
        let mut c = chart(&a, &raising_limit(&a, 1e-12).unwrap()).unwrap();
        c.m[1] += 1.0;
        let r = audit_bounds(&a, &c).unwrap();
        assert!(r.failing().contains(&"momentum_global"), "{:?}", r.failing());
    }

    #[test]
    fn inconsistent_chart_rejected() {
        let a = path_graph();
        let mut c = chart(&a, &raising_limit(&a, 1e-12).unwrap()).unwrap();
        c.residual = 1.0;
        assert!(matches!(audit_bounds(&a, &c), Err(DiagnosticsError::InconsistentChart { .. })));
    }

    #[test]
    fn merge_accumulates() {
        let mut a = AuditReport::new(1e-3);
        let mut b = AuditReport::new(1e-2);
        a.record(0, 1.0, 2.0, 1e-3);
        b.record(0, 3.0, 1.0, 1e-2);
        a.merge(&b);
        let c = a.get("imbalance_bounds_height").unwrap();
        assert_eq!((c.checked, c.violations, c.min_margin), (2, 1, Some(-2.0)));
        assert_eq!(a.slack, 1e-2);
    }
}
