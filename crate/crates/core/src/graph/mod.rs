//! Log-domain graph functions.
//!
//! A non-negative irreducible matrix `A` is represented by the digraph with
//! an edge `(i, j)` for every non-zero `a_ij`, carrying the weight
//! `log |a_ij|`. Zero entries are simply absent. Every balancing operation
//! is an additive shift of these weights, so the edge set never changes.

mod cycle;
mod matrix;
mod order;
pub mod scc;

use std::collections::VecDeque;

use crate::error::GraphError;
use crate::scalar::Scalar;

pub use cycle::{cycle_bounds, min_mean_cycle, CycleBounds};
pub use matrix::{apply_scaling, apply_scaling_coo, from_coo, from_matrix, CooMatrix};
pub use order::{compare_order, threshold_subgraph, Order, ThresholdSubgraph};

/// Finite edge weights on a fixed digraph, indexed by vertex `0..n`.
///
/// Edges are kept sorted by `(u, v)`; an edge id is its position in that
/// order. Self-loops are allowed and appear in both adjacency lists of
/// their vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphFunction<T> {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<T>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl<T: Scalar> GraphFunction<T> {
    /// Builds a graph function and checks that its digraph is strongly connected.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, T)>,
    {
        let g = Self::new_unchecked(n, edges)?;
        let components = g.components();
        if components.len() != 1 {
            return Err(GraphError::MatrixNotIrreducible { components });
        }
        Ok(g)
    }

    /// Like [`GraphFunction::new`] but accepts reducible digraphs.
    ///
    /// Vertex ranges, duplicates and finiteness are still validated. The
    /// balancing entry points reject reducible inputs themselves.
    pub fn new_unchecked<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, T)>,
    {
        if n == 0 {
            return Err(GraphError::EmptyMatrix);
        }
        let mut list: Vec<(usize, usize, T)> = edges.into_iter().collect();
        for &(u, v, w) in &list {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if !w.is_finite() {
                return Err(GraphError::NonFiniteWeight { u, v });
            }
        }
        list.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        for pair in list.windows(2) {
            if (pair[0].0, pair[0].1) == (pair[1].0, pair[1].1) {
                return Err(GraphError::DuplicateEdge { u: pair[0].0, v: pair[0].1 });
            }
        }
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        let mut edge_list = Vec::with_capacity(list.len());
        let mut weights = Vec::with_capacity(list.len());
        for (id, &(u, v, w)) in list.iter().enumerate() {
            out_adj[u].push(id);
            in_adj[v].push(id);
            edge_list.push((u, v));
            weights.push(w);
        }
        // in_adj[v] was filled in increasing u because edges are sorted by (u, v).
        Ok(Self { n, edges: edge_list, weights, out_adj, in_adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Endpoints of edge `id`.
    pub fn endpoints(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    pub fn weight(&self, id: usize) -> T {
        self.weights[id]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub(crate) fn weights_mut(&mut self) -> &mut [T] {
        &mut self.weights
    }

    /// Iterates `(u, v, weight)` in edge-id order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.edges.iter().zip(&self.weights).map(|(&(u, v), &w)| (u, v, w))
    }

    /// Edge ids leaving `v`, ordered by target.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    /// Edge ids entering `v`, ordered by source.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    /// Id of edge `(u, v)` if present.
    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        let out = self.out_adj.get(u)?;
        out.binary_search_by(|&id| self.edges[id].1.cmp(&v)).ok().map(|k| out[k])
    }

    pub fn get(&self, u: usize, v: usize) -> Option<T> {
        self.edge_id(u, v).map(|id| self.weights[id])
    }

    pub fn same_edge_set(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }

    /// Copy of this function with new weights on the same edges.
    pub fn with_weights(&self, weights: Vec<T>) -> Result<Self, GraphError> {
        if weights.len() != self.weights.len() {
            return Err(GraphError::DimensionMismatch {
                expected: self.weights.len(),
                found: weights.len(),
            });
        }
        for (id, w) in weights.iter().enumerate() {
            if !w.is_finite() {
                let (u, v) = self.edges[id];
                return Err(GraphError::NonFiniteWeight { u, v });
            }
        }
        Ok(Self { weights, ..self.clone() })
    }

    /// Largest absolute weight, or zero for an edgeless graph.
    pub fn scale(&self) -> T {
        self.weights.iter().fold(T::zero(), |acc, w| acc.max(w.abs()))
    }

    pub fn max_weight(&self) -> Option<T> {
        self.weights.iter().copied().reduce(T::max)
    }

    /// SHA-256 over `n` and every `(u, v, bits(w as f64))`, little-endian, hex encoded.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update((self.n as u64).to_le_bytes());
        for (u, v, w) in self.edges() {
            h.update((u as u64).to_le_bytes());
            h.update((v as u64).to_le_bytes());
            h.update(w.to_f64_lossy().to_bits().to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    /// Successor lists, for the SCC routines.
    pub fn successors(&self) -> Vec<Vec<usize>> {
        self.out_adj
            .iter()
            .map(|ids| ids.iter().map(|&id| self.edges[id].1).collect())
            .collect()
    }

    /// Strongly connected components in reverse topological order.
    pub fn components(&self) -> Vec<Vec<usize>> {
        scc::tarjan(&self.successors())
    }

    /// True iff the digraph is one strongly connected component.
    pub fn is_irreducible(&self) -> bool {
        self.components().len() == 1
    }

    /// Maximum outgoing weight at `v` (self-loop included); `-inf` if none.
    pub fn out_max(&self, v: usize) -> T {
        self.out_adj[v].iter().fold(T::neg_infinity(), |m, &id| m.max(self.weights[id]))
    }

    /// Maximum incoming weight at `v` (self-loop included); `-inf` if none.
    pub fn in_max(&self, v: usize) -> T {
        self.in_adj[v].iter().fold(T::neg_infinity(), |m, &id| m.max(self.weights[id]))
    }

    pub fn vertex_stats(&self, v: usize) -> Result<VertexStats<T>, GraphError> {
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(VertexStats::from_maxima(self.out_max(v), self.in_max(v)))
    }

    pub fn all_stats(&self) -> Vec<VertexStats<T>> {
        (0..self.n).map(|v| VertexStats::from_maxima(self.out_max(v), self.in_max(v))).collect()
    }

    /// Global imbalance `(rho, rho_raise, rho_lower)`.
    pub fn imbalance(&self) -> Imbalance<T> {
        Imbalance::from_stats(self.all_stats().iter())
    }

    /// Transposed graph function: edge `(u, v)` becomes `(v, u)`, weights kept.
    pub fn transpose(&self) -> Self {
        Self::new_unchecked(self.n, self.edges().map(|(u, v, w)| (v, u, w)))
            .expect("transpose of a valid graph function is valid")
    }

    /// `self` shifted by `x` at the vertex set `set`:
    /// `(α + xS)_uv = α_uv + x·(1_S(u) − 1_S(v))`.
    pub fn shift(&self, set: &[usize], x: T) -> Result<Self, GraphError> {
        let mut member = vec![false; self.n];
        for &v in set {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
            member[v] = true;
        }
        let weights = self
            .edges()
            .map(|(u, v, w)| match (member[u], member[v]) {
                (true, false) => w + x,
                (false, true) => w - x,
                _ => w,
            })
            .collect();
        Ok(Self { weights, ..self.clone() })
    }

    /// Largest residual `|α_uv − γ_uv − (p_u − p_v)|` for the best potential `p`
    /// pinned on a spanning tree of the underlying undirected graph.
    ///
    /// Zero residual on every edge is equivalent to equal sums around every
    /// cycle. Reducible (but weakly connected) graphs are handled as well.
    pub fn equivalence_residual(&self, other: &Self) -> Result<T, GraphError> {
        if !self.same_edge_set(other) {
            return Err(GraphError::EdgeSetMismatch);
        }
        let diff: Vec<T> = self.weights.iter().zip(&other.weights).map(|(&a, &b)| a - b).collect();
        let mut potential: Vec<Option<T>> = vec![None; self.n];
        for root in 0..self.n {
            if potential[root].is_some() {
                continue;
            }
            potential[root] = Some(T::zero());
            let mut queue = VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                let px = potential[x].expect("queued vertices carry a potential");
                // diff_uv = p_u - p_v
                for &id in &self.out_adj[x] {
                    let y = self.edges[id].1;
                    if potential[y].is_none() {
                        potential[y] = Some(px - diff[id]);
                        queue.push_back(y);
                    }
                }
                for &id in &self.in_adj[x] {
                    let y = self.edges[id].0;
                    if potential[y].is_none() {
                        potential[y] = Some(px + diff[id]);
                        queue.push_back(y);
                    }
                }
            }
        }
        let p: Vec<T> = potential.into_iter().map(|x| x.unwrap_or_else(T::zero)).collect();
        Ok(self
            .edges
            .iter()
            .zip(&diff)
            .map(|(&(u, v), &d)| (d - (p[u] - p[v])).abs())
            .fold(T::zero(), T::max))
    }

    /// `α ∼ γ` up to `tol · max(1, weight scale)`. Different edge sets are never equivalent.
    pub fn equivalent(&self, other: &Self, tol: T) -> bool {
        let scale = T::one().max(self.scale()).max(other.scale());
        match self.equivalence_residual(other) {
            Ok(r) => r <= tol * scale,
            Err(_) => false,
        }
    }
}

/// Per-vertex maxima and imbalances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VertexStats<T> {
    pub out_max: T,
    pub in_max: T,
    pub rho: T,
    pub rho_raise: T,
    pub rho_lower: T,
}

impl<T: Scalar> VertexStats<T> {
    pub fn from_maxima(out_max: T, in_max: T) -> Self {
        let rho_raise = (out_max - in_max).max(T::zero());
        let rho_lower = (in_max - out_max).max(T::zero());
        Self { out_max, in_max, rho: rho_raise + rho_lower, rho_raise, rho_lower }
    }
}

/// Global imbalances: the maxima of the per-vertex values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Imbalance<T> {
    pub rho: T,
    pub rho_raise: T,
    pub rho_lower: T,
}

impl<T: Scalar> Imbalance<T> {
    pub fn from_stats<'a, I: Iterator<Item = &'a VertexStats<T>>>(stats: I) -> Self {
        stats.fold(
            Self { rho: T::zero(), rho_raise: T::zero(), rho_lower: T::zero() },
            |acc, s| Self {
                rho: acc.rho.max(s.rho),
                rho_raise: acc.rho_raise.max(s.rho_raise),
                rho_lower: acc.rho_lower.max(s.rho_lower),
            },
        )
    }
}

/// Accumulated log-scaling per vertex; `exp(p_v)` is the diagonal of `D`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingVector<T>(pub Vec<T>);

impl<T: Scalar> ScalingVector<T> {
    pub fn zeros(n: usize) -> Self {
        Self(vec![T::zero(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `α′_uv = α_uv + p_v − p_u`, the log-domain image of `D⁻¹AD`.
    pub fn apply(&self, alpha: &GraphFunction<T>) -> Result<GraphFunction<T>, GraphError> {
        if self.0.len() != alpha.n() {
            return Err(GraphError::DimensionMismatch { expected: alpha.n(), found: self.0.len() });
        }
        let p = &self.0;
        let weights = alpha.edges().map(|(u, v, w)| w + p[v] - p[u]).collect();
        alpha.with_weights(weights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{path_graph, ln};

    #[test]
    fn rejects_bad_input() {
        assert_eq!(GraphFunction::<f64>::new(0, []), Err(GraphError::EmptyMatrix));
        assert!(matches!(
            GraphFunction::new(2, [(0, 2, 1.0)]),
            Err(GraphError::VertexOutOfRange { vertex: 2, n: 2 })
        ));
        assert!(matches!(
            GraphFunction::new(1, [(0, 0, 1.0), (0, 0, 2.0)]),
            Err(GraphError::DuplicateEdge { u: 0, v: 0 })
        ));
        assert!(matches!(
            GraphFunction::new(1, [(0, 0, f64::NAN)]),
            Err(GraphError::NonFiniteWeight { .. })
        ));
        match GraphFunction::new(2, [(0, 1, 0.0)]) {
            Err(GraphError::MatrixNotIrreducible { components }) => assert_eq!(components.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn vertex_stats_on_path() {
        let a = path_graph();
        let s = a.vertex_stats(1).unwrap();
        assert_eq!(s.out_max, ln(8.0));
        assert_eq!(s.in_max, ln(2.0));
        assert!((s.rho_raise - ln(4.0)).abs() < 1e-15);
        assert_eq!(s.rho_lower, 0.0);
        let s = a.vertex_stats(0).unwrap();
        assert_eq!(s.rho_raise, 0.0);
        assert!((s.rho_lower - ln(4.0)).abs() < 1e-15);
        assert!(a.vertex_stats(4).is_err());
    }

    #[test]
    fn uniform_cycle_is_balanced() {
        let g = GraphFunction::new(3, [(0, 1, 0.7), (1, 2, 0.7), (2, 0, 0.7)]).unwrap();
        assert!(g.all_stats().iter().all(|s| s.rho == 0.0));
    }

    #[test]
    fn shift_examples() {
        let a = path_graph();
        assert_eq!(a.shift(&[], 0.3).unwrap(), a);
        assert_eq!(a.shift(&[0, 1, 2, 3], 0.3).unwrap(), a);
        let s = a.shift(&[1], -ln(2.0)).unwrap();
        let close = |x: f64, y: f64| (x - y).abs() < 1e-15;
        assert!(close(s.get(0, 1).unwrap(), ln(4.0)));
        assert!(close(s.get(2, 1).unwrap(), ln(2.0)));
        assert!(close(s.get(1, 0).unwrap(), ln(4.0)));
        assert!(close(s.get(1, 2).unwrap(), 0.0));
        assert!(a.shift(&[9], 1.0).is_err());
    }

    #[test]
    fn equivalence_detects_cycle_change() {
        let a = path_graph();
        let shifted = a.shift(&[0, 2], 1.25).unwrap();
        assert!(a.equivalent(&shifted, 1e-9));
        let id = a.edge_id(0, 1).unwrap();
        let mut w = a.weights().to_vec();
        w[id] += 1.0;
        let perturbed = a.with_weights(w).unwrap();
        assert!(!a.equivalent(&perturbed, 1e-9));
        let other = GraphFunction::new(2, [(0, 1, 0.0), (1, 0, 0.0)]).unwrap();
        assert!(!a.equivalent(&other, 1e-9));
        assert_eq!(a.equivalence_residual(&other), Err(GraphError::EdgeSetMismatch));
    }

    #[test]
    fn irreducibility() {
        let cycle = GraphFunction::new(5, (0..5).map(|i| (i, (i + 1) % 5, 0.0))).unwrap();
        assert!(cycle.is_irreducible());
        let two = GraphFunction::new_unchecked(
            4,
            [(0, 1, 0.0), (1, 0, 0.0), (2, 3, 0.0), (3, 2, 0.0)],
        )
        .unwrap();
        assert!(!two.is_irreducible());
        assert_eq!(two.components().len(), 2);
        assert!(path_graph().is_irreducible());
    }

    #[test]
    fn scaling_vector_matches_shift() {
        let a = path_graph();
        let p = ScalingVector(vec![0.5, -0.25, 0.0, 1.0]);
        let b = p.apply(&a).unwrap();
        assert!(a.equivalent(&b, 1e-12));
        assert_eq!(b.get(0, 1).unwrap(), a.get(0, 1).unwrap() - 0.25 - 0.5);
    }

    #[test]
    fn transpose_swaps_maxima() {
        let a = path_graph();
        let t = a.transpose();
        for v in 0..4 {
            assert_eq!(a.out_max(v), t.in_max(v));
            assert_eq!(a.in_max(v), t.out_max(v));
        }
        assert_eq!(t.transpose(), a);
    }
}
