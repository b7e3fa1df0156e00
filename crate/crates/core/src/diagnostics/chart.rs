use super::limit::RaisingLimit;
use crate::error::{DiagnosticsError, GraphError};
use crate::graph::GraphFunction;
use crate::scalar::Scalar;

/// Heights, levels and momenta of a graph function relative to its raising limit.
///
/// Heights are compared through `tier`: vertices whose sorted heights are
/// separated by gaps of at most `tie_tolerance` share a tier, and
/// `y_u < y_v` is read as `tier[u] < tier[v]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightLevelChart<T> {
    /// `y_v = −r*_v ≤ 0`.
    pub y: Vec<T>,
    /// Level: the largest incoming weight of `v` in the limit.
    pub x: Vec<T>,
    /// Momentum: the largest incoming weight of `v` now, minus its level.
    pub m: Vec<T>,
    /// `max{x_u : y_u ≤ y_v} − x_v ≥ 0`.
    pub z: Vec<T>,
    /// Current raising imbalance per vertex.
    pub rho: Vec<T>,
    pub tier: Vec<usize>,
    /// `|S_v|` for `S_v = {u : y_u < y_v}`.
    pub s_size: Vec<usize>,
    /// `ρ(S_v)`: total raising imbalance over `S_v`.
    pub rho_s: Vec<T>,
    pub y_min: T,
    pub y_max: T,
    pub h: T,
    pub psi: T,
    /// Largest `|α^R_uv − α_uv − (y_u − y_v)|` over all edges, and where.
    pub residual: T,
    pub residual_edge: Option<(usize, usize)>,
    pub oracle_epsilon: T,
    pub tie_tolerance: T,
    pub alpha_r: GraphFunction<T>,
}

impl<T: Scalar> HeightLevelChart<T> {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Vertices strictly below `v`.
    pub fn s_set(&self, v: usize) -> Vec<usize> {
        (0..self.n()).filter(|&u| self.tier[u] < self.tier[v]).collect()
    }

    /// Additive slack used by the audit.
    pub fn slack(&self) -> T {
        T::lit(10.0) * self.oracle_epsilon
    }
}

/// Evaluates heights, levels, momenta and the derived quantities of `alpha`
/// against `limit`, which must be the raising limit of `alpha` itself
/// (use [`RaisingLimit::rebase`] for states along a raising run).
pub fn chart<T: Scalar>(alpha: &GraphFunction<T>, limit: &RaisingLimit<T>) -> Result<HeightLevelChart<T>, DiagnosticsError> {
    let n = alpha.n();
    if !alpha.same_edge_set(&limit.alpha_r) {
        return Err(GraphError::EdgeSetMismatch.into());
    }
    if limit.r_star.len() != n {
        return Err(GraphError::DimensionMismatch { expected: n, found: limit.r_star.len() }.into());
    }
    let alpha_r = &limit.alpha_r;
    let y: Vec<T> = limit.r_star.iter().map(|&r| T::zero() - r).collect();
    let x: Vec<T> = (0..n).map(|v| alpha_r.in_max(v)).collect();
    let m: Vec<T> = (0..n).map(|v| alpha.in_max(v) - x[v]).collect();
    let rho: Vec<T> = alpha.all_stats().iter().map(|s| s.rho_raise).collect();

    let tie_tolerance = limit.oracle_epsilon;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| y[a].partial_cmp(&y[b]).expect("finite heights").then(a.cmp(&b)));
    let mut tier = vec![0usize; n];
    let mut tiers = 0;
    for (k, &v) in order.iter().enumerate() {
        if k > 0 && y[v] - y[order[k - 1]] > tie_tolerance {
            tiers += 1;
        }
        tier[v] = tiers;
    }
    let tiers = tiers + 1;

    let mut tier_count = vec![0usize; tiers];
    let mut tier_rho = vec![T::zero(); tiers];
    let mut tier_xmax = vec![T::neg_infinity(); tiers];
    for v in 0..n {
        tier_count[tier[v]] += 1;
        tier_rho[tier[v]] = tier_rho[tier[v]] + rho[v];
        tier_xmax[tier[v]] = tier_xmax[tier[v]].max(x[v]);
    }
    let mut below_count = vec![0usize; tiers];
    let mut below_rho = vec![T::zero(); tiers];
    let mut upto_xmax = vec![T::neg_infinity(); tiers];
    for k in 0..tiers {
        if k > 0 {
            below_count[k] = below_count[k - 1] + tier_count[k - 1];
            below_rho[k] = below_rho[k - 1] + tier_rho[k - 1];
            upto_xmax[k] = upto_xmax[k - 1].max(tier_xmax[k]);
        } else {
            upto_xmax[k] = tier_xmax[k];
        }
    }
    let z = (0..n).map(|v| upto_xmax[tier[v]] - x[v]).collect();
    let s_size = (0..n).map(|v| below_count[tier[v]]).collect();
    let rho_s = (0..n).map(|v| below_rho[tier[v]]).collect();

    let y_min = y.iter().copied().fold(T::infinity(), T::min);
    let y_max = y.iter().copied().fold(T::neg_infinity(), T::max);
    let psi = -y.iter().copied().sum::<T>();

    let mut residual = T::zero();
    let mut residual_edge = None;
    for (id, (u, v, w)) in alpha.edges().enumerate() {
        let r = (alpha_r.weight(id) - w - (y[u] - y[v])).abs();
        if r > residual || residual_edge.is_none() {
            residual = residual.max(r);
            residual_edge = Some((u, v));
        }
    }

    Ok(HeightLevelChart {
        y,
        x,
        m,
        z,
        rho,
        tier,
        s_size,
        rho_s,
        y_min,
        y_max,
        h: y_max - y_min,
        psi,
        residual,
        residual_edge,
        oracle_epsilon: limit.oracle_epsilon,
        tie_tolerance,
        alpha_r: alpha_r.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::raising_limit;
    use crate::fixtures::{ln, path_graph, path_graph_b2};

    #[test]
    fn path_chart() {
        let a = path_graph();
        let lim = raising_limit(&a, 1e-12).unwrap();
        let c = chart(&a, &lim).unwrap();
        let tol = 10.0 * lim.oracle_epsilon;
        let expect_y = [0.0, -ln(2.0), 0.0, -ln(2.0)];
        for v in 0..4 {
            assert!((c.y[v] - expect_y[v]).abs() <= tol);
            assert!((c.x[v] - ln(4.0)).abs() <= tol);
        }
        assert!((c.m[1] + ln(2.0)).abs() <= tol);
        assert!((c.h - ln(2.0)).abs() <= tol);
        assert!((c.psi - 2.0 * ln(2.0)).abs() <= tol);
        assert_eq!(c.s_set(0), vec![1, 3]);
        assert!(c.s_set(1).is_empty());
        assert!(c.residual <= 1e-12);
    }

    #[test]
    fn balanced_chart_is_flat() {
        let b2 = path_graph_b2();
        let lim = raising_limit(&b2, 1e-12).unwrap();
        let c = chart(&b2, &lim).unwrap();
        assert!(c.y.iter().all(|&y| y == 0.0));
        assert!(c.m.iter().all(|&m| m == 0.0));
        assert!(c.s_size.iter().all(|&s| s == 0));
        assert_eq!(c.h, 0.0);
        // z is the gap to the highest level among the single tier
        let xmax = c.x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for v in 0..4 {
            assert_eq!(c.z[v], xmax - c.x[v]);
        }
    }
}
