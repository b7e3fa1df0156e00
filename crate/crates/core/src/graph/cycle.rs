//! Minimum mean cycle (Karp's dynamic program) and the edge-weight floor it implies.

use super::GraphFunction;
use crate::scalar::Scalar;

/// Cycle-mean bounds of a strongly connected graph function.
///
/// `w1` is the least mean weight of a directed cycle, `m1` the largest edge
/// weight and `b = w1 − (n−1)(m1 − w1)`. No sequence of balancing
/// operations can push any edge below `b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleBounds<T> {
    pub w1: T,
    pub m1: T,
    pub b: T,
}

/// Least mean weight over all directed cycles, `None` for an acyclic graph.
///
/// `d[k][v]` is the lightest walk with exactly `k` edges from vertex 0 to
/// `v`; the answer is `min_v max_k (d[n][v] − d[k][v]) / (n − k)`. This
/// assumes every vertex is reachable from 0, which holds when the graph
/// is strongly connected.
pub fn min_mean_cycle<T: Scalar>(alpha: &GraphFunction<T>) -> Option<T> {
    let n = alpha.n();
    let inf = T::infinity();
    let mut d = vec![vec![inf; n]; n + 1];
    d[0][0] = T::zero();
    for k in 1..=n {
        let (prev, cur) = d.split_at_mut(k);
        let prev = &prev[k - 1];
        let cur = &mut cur[0];
        for (u, v, w) in alpha.edges() {
            if prev[u] < inf {
                let cand = prev[u] + w;
                if cand < cur[v] {
                    cur[v] = cand;
                }
            }
        }
    }
    let mut best: Option<T> = None;
    for v in 0..n {
        if d[n][v] == inf {
            continue;
        }
        let mut worst = T::neg_infinity();
        for k in 0..n {
            if d[k][v] < inf {
                let len = T::from_usize(n - k).expect("vertex count fits the scalar");
                worst = worst.max((d[n][v] - d[k][v]) / len);
            }
        }
        if worst > T::neg_infinity() {
            best = Some(best.map_or(worst, |b| b.min(worst)));
        }
    }
    best
}

/// `w1`, `m1` and the floor `b`. Panics if the graph has no cycle, which
/// cannot happen for a strongly connected graph function.
pub fn cycle_bounds<T: Scalar>(alpha: &GraphFunction<T>) -> CycleBounds<T> {
    let w1 = min_mean_cycle(alpha).expect("strongly connected graph has a cycle");
    let m1 = alpha.max_weight().expect("strongly connected graph has an edge");
    let spread = T::from_usize(alpha.n() - 1).expect("vertex count fits the scalar");
    CycleBounds { w1, m1, b: w1 - spread * (m1 - w1) }
}
