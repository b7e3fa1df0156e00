//! Threshold subgraphs and the order on graph functions they induce.

use super::{scc, GraphFunction};
use crate::error::GraphError;
use crate::scalar::Scalar;

/// Edges of weight at least `threshold`, with isolated vertices removed.
/// A vertex carrying a self-loop in the subgraph is not isolated.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdSubgraph<T> {
    pub threshold: T,
    /// Sorted vertex ids touched by a kept edge.
    pub vertices: Vec<usize>,
    /// Kept edge ids, in edge-id order.
    pub edges: Vec<usize>,
}

impl<T: Scalar> ThresholdSubgraph<T> {
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Strongly connected components of the subgraph on its own vertex set.
    pub fn components(&self, alpha: &GraphFunction<T>) -> Vec<Vec<usize>> {
        let n = alpha.n();
        let mut succ = vec![Vec::new(); n];
        for &id in &self.edges {
            let (u, v) = alpha.endpoints(id);
            succ[u].push(v);
        }
        let mut keep = vec![false; n];
        for &v in &self.vertices {
            keep[v] = true;
        }
        scc::tarjan_subset(&succ, Some(&keep))
    }

    /// The empty subgraph counts as strongly connected.
    pub fn is_strongly_connected(&self, alpha: &GraphFunction<T>) -> bool {
        self.components(alpha).len() <= 1
    }
}

pub fn threshold_subgraph<T: Scalar>(alpha: &GraphFunction<T>, w: T) -> ThresholdSubgraph<T> {
    let mut touched = vec![false; alpha.n()];
    let mut edges = Vec::new();
    for (id, (u, v, weight)) in alpha.edges().enumerate() {
        if weight >= w {
            edges.push(id);
            touched[u] = true;
            touched[v] = true;
        }
    }
    let vertices = (0..alpha.n()).filter(|&v| touched[v]).collect();
    ThresholdSubgraph { threshold: w, vertices, edges }
}

/// Outcome of comparing two graph functions on the same digraph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Less,
    Greater,
    Equal,
    Incomparable,
}

/// Compares `alpha` and `gamma` at the largest threshold where their
/// threshold subgraphs differ: `Less` if `alpha`'s subgraph is strictly
/// contained in `gamma`'s there, `Greater` for the reverse, `Incomparable`
/// when neither contains the other.
///
/// The subgraphs first differ at `W = max{max(α_e, γ_e) : α_e ≠ γ_e}`, and
/// at `W` only the edges whose larger value equals `W` distinguish them,
/// so a single pass over the edges decides the comparison.
pub fn compare_order<T: Scalar>(
    alpha: &GraphFunction<T>,
    gamma: &GraphFunction<T>,
) -> Result<Order, GraphError> {
    if !alpha.same_edge_set(gamma) {
        return Err(GraphError::EdgeSetMismatch);
    }
    let top = alpha
        .weights()
        .iter()
        .zip(gamma.weights())
        .filter(|(a, g)| a != g)
        .map(|(&a, &g)| a.max(g))
        .reduce(T::max);
    let Some(top) = top else {
        return Ok(Order::Equal);
    };
    let mut alpha_only = false;
    let mut gamma_only = false;
    for (&a, &g) in alpha.weights().iter().zip(gamma.weights()) {
        if a == top && g < top {
            alpha_only = true;
        }
        if g == top && a < top {
            gamma_only = true;
        }
    }
    Ok(match (alpha_only, gamma_only) {
        (false, true) => Order::Less,
        (true, false) => Order::Greater,
        (true, true) => Order::Incomparable,
        (false, false) => unreachable!("the top differing weight belongs to one side"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{path_graph, path_graph_b1, ln};

    /// Direct definition: scan every distinct weight from the top.
    fn compare_by_sweep(a: &GraphFunction<f64>, g: &GraphFunction<f64>) -> Order {
        let mut ws: Vec<f64> = a.weights().iter().chain(g.weights()).copied().collect();
        ws.sort_by(|x, y| y.partial_cmp(x).unwrap());
        ws.dedup();
        for w in ws {
            let sa = threshold_subgraph(a, w).edges;
            let sg = threshold_subgraph(g, w).edges;
            if sa != sg {
                let a_in_g = sa.iter().all(|e| sg.contains(e));
                let g_in_a = sg.iter().all(|e| sa.contains(e));
                return match (a_in_g, g_in_a) {
                    (true, false) => Order::Less,
                    (false, true) => Order::Greater,
                    _ => Order::Incomparable,
                };
            }
        }
        Order::Equal
    }

    #[test]
    fn b1_threshold_at_four() {
        let b1 = path_graph_b1();
        let sub = threshold_subgraph(&b1, ln(4.0) - 1e-12);
        let mut pairs: Vec<(usize, usize)> = sub.edges.iter().map(|&id| b1.endpoints(id)).collect();
        pairs.sort();
        assert_eq!(pairs, vec![(0, 1), (1, 0), (2, 3), (3, 2)]);
        assert_eq!(sub.vertices, vec![0, 1, 2, 3]);
        assert_eq!(sub.components(&b1).len(), 2);
    }

    #[test]
    fn extreme_thresholds() {
        let a = path_graph();
        let all = threshold_subgraph(&a, f64::NEG_INFINITY);
        assert_eq!(all.edges.len(), a.edge_count());
        assert!(all.is_strongly_connected(&a));
        let none = threshold_subgraph(&a, 100.0);
        assert!(none.is_empty() && none.vertices.is_empty());
    }

    #[test]
    fn self_loop_keeps_vertex() {
        let g = GraphFunction::new(2, [(0, 0, 5.0), (0, 1, 0.0), (1, 0, 0.0)]).unwrap();
        let sub = threshold_subgraph(&g, 1.0);
        assert_eq!(sub.vertices, vec![0]);
        assert!(sub.is_strongly_connected(&g));
    }

    #[test]
    fn order_examples() {
        let a = path_graph();
        assert_eq!(compare_order(&a, &a).unwrap(), Order::Equal);
        // balancing at vertex 1 (0-based): shift by (in - out)/2
        let s = a.vertex_stats(1).unwrap();
        let after = a.shift(&[1], (s.in_max - s.out_max) / 2.0).unwrap();
        assert_eq!(compare_order(&a, &after).unwrap(), Order::Greater);
        assert_eq!(compare_order(&after, &a).unwrap(), Order::Less);
    }

    #[test]
    fn swapped_top_edge_is_incomparable() {
        // two 2-cycles sharing vertex 0; the top weight sits on different edges
        let g1 = GraphFunction::new(3, [(0, 1, 5.0), (1, 0, 1.0), (0, 2, 2.0), (2, 0, 1.0)]).unwrap();
        let g2 = GraphFunction::new(3, [(0, 1, 2.0), (1, 0, 1.0), (0, 2, 5.0), (2, 0, 1.0)]).unwrap();
        assert_eq!(compare_order(&g1, &g2).unwrap(), Order::Incomparable);
        assert_eq!(compare_by_sweep(&g1, &g2), Order::Incomparable);
    }

    #[test]
    fn single_pass_matches_sweep() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let base = path_graph();
        for _ in 0..500 {
            let pick = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
                (0..base.edge_count()).map(|_| rng.gen_range(0..4) as f64).collect()
            };
            let a = base.with_weights(pick(&mut rng)).unwrap();
            let g = base.with_weights(pick(&mut rng)).unwrap();
            assert_eq!(compare_order(&a, &g).unwrap(), compare_by_sweep(&a, &g));
        }
    }

    #[test]
    fn mismatched_edges_error() {
        let a = path_graph();
        let c = GraphFunction::new(2, [(0, 1, 0.0), (1, 0, 0.0)]).unwrap();
        assert_eq!(compare_order(&a, &c), Err(GraphError::EdgeSetMismatch));
    }
}
