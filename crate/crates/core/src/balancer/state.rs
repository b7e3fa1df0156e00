use crate::error::{BalanceError, GraphError};
use crate::graph::{GraphFunction, Imbalance, VertexStats};
use crate::scalar::Scalar;

/// Which one-vertex operation to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    /// Standard balancing: always equalize max in and max out.
    Balance,
    /// Balance only when the max outgoing weight exceeds the max incoming one.
    Raise,
    /// Balance only when the max incoming weight exceeds the max outgoing one.
    Lower,
}

impl Op {
    pub fn name(self) -> &'static str {
        match self {
            Op::Balance => "balance",
            Op::Raise => "raise",
            Op::Lower => "lower",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "balance" => Some(Op::Balance),
            "raise" => Some(Op::Raise),
            "lower" => Some(Op::Lower),
            _ => None,
        }
    }

    /// Signed change of the vertex potential: `(out − in)/2`, censored by the op kind.
    pub fn amount<T: Scalar>(self, stats: &VertexStats<T>) -> T {
        let two = T::lit(2.0);
        match self {
            Op::Balance => (stats.out_max - stats.in_max) / two,
            Op::Raise => stats.rho_raise / two,
            Op::Lower => -(stats.rho_lower / two),
        }
    }

    /// The imbalance this op drives to zero.
    pub fn measure<T: Scalar>(self, imb: &Imbalance<T>) -> T {
        match self {
            Op::Balance => imb.rho,
            Op::Raise => imb.rho_raise,
            Op::Lower => imb.rho_lower,
        }
    }
}

/// Adds `amount` to every non-loop in-edge of `v` and subtracts it from
/// every non-loop out-edge. Self-loops are untouched.
pub(crate) fn shift_vertex<T: Scalar>(weights: &mut [T], g: &GraphFunction<T>, v: usize, amount: T) {
    for &id in g.in_edges(v) {
        if g.endpoints(id).0 != v {
            weights[id] = weights[id] + amount;
        }
    }
    for &id in g.out_edges(v) {
        if g.endpoints(id).1 != v {
            weights[id] = weights[id] - amount;
        }
    }
}

/// Counts of the per-step monotonicity audit: a lowering step must not
/// increase any raising imbalance and a raising step must not increase
/// any lowering imbalance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepAudit {
    pub checked: u64,
    pub violations: u64,
}

/// A graph function under balancing, with cached per-vertex maxima and the
/// accumulated raising, lowering and total scaling vectors.
#[derive(Clone, Debug)]
pub struct BalanceState<T> {
    graph: GraphFunction<T>,
    weights: Vec<T>,
    out_max: Vec<T>,
    in_max: Vec<T>,
    raised: Vec<T>,
    lowered: Vec<T>,
    scaling: Vec<T>,
    audit: Option<StepAudit>,
    audit_slack: T,
    ops: u64,
}

impl<T: Scalar> BalanceState<T> {
    pub fn new(graph: GraphFunction<T>) -> Result<Self, BalanceError> {
        if !graph.is_irreducible() {
            return Err(GraphError::MatrixNotIrreducible { components: graph.components() }.into());
        }
        let n = graph.n();
        let out_max = (0..n).map(|v| graph.out_max(v)).collect();
        let in_max = (0..n).map(|v| graph.in_max(v)).collect();
        let weights = graph.weights().to_vec();
        // a few ulps of the weight scale; weights never exceed the initial maximum
        let audit_slack = T::epsilon() * T::lit(16.0) * T::one().max(graph.scale());
        Ok(Self {
            graph,
            weights,
            out_max,
            in_max,
            raised: vec![T::zero(); n],
            lowered: vec![T::zero(); n],
            scaling: vec![T::zero(); n],
            audit: None,
            audit_slack,
            ops: 0,
        })
    }

    /// Turns on the per-step monotonicity audit.
    pub fn enable_step_audit(&mut self) {
        self.audit.get_or_insert_with(StepAudit::default);
    }

    pub fn step_audit(&self) -> Option<StepAudit> {
        self.audit
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn ops(&self) -> u64 {
        self.ops
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Snapshot of the current graph function.
    pub fn graph(&self) -> GraphFunction<T> {
        self.graph.with_weights(self.weights.clone()).expect("balancing keeps weights finite")
    }

    pub fn into_graph(mut self) -> GraphFunction<T> {
        self.graph.weights_mut().copy_from_slice(&self.weights);
        self.graph
    }

    /// Edge structure (weights are those of the initial function).
    pub fn structure(&self) -> &GraphFunction<T> {
        &self.graph
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

    pub fn stats(&self, v: usize) -> VertexStats<T> {
        VertexStats::from_maxima(self.out_max[v], self.in_max[v])
    }

    pub fn imbalance(&self) -> Imbalance<T> {
        let stats: Vec<_> = (0..self.n()).map(|v| self.stats(v)).collect();
        Imbalance::from_stats(stats.iter())
    }

    /// Sum of the raising imbalances over all vertices.
    pub fn total_rho_raise(&self) -> T {
        (0..self.n()).map(|v| self.stats(v).rho_raise).sum()
    }

    /// Applies `op` at `v` and returns the signed potential change
    /// (zero when the op is censored or the vertex is already balanced).
    pub fn apply(&mut self, v: usize, op: Op) -> T {
        self.ops += 1;
        let amount = op.amount(&self.stats(v));
        if amount == T::zero() {
            return amount;
        }
        let before = self.audit.map(|_| self.audit_snapshot(v, op));
        self.shift_at(v, amount);
        match op {
            Op::Raise => self.raised[v] = self.raised[v] + amount,
            Op::Lower => self.lowered[v] = self.lowered[v] - amount,
            Op::Balance => {}
        }
        self.scaling[v] = self.scaling[v] + amount;
        if let Some(before) = before {
            self.audit_compare(op, &before);
        }
        amount
    }

    /// Raw potential shift at `v`, keeping the cached maxima exact.
    pub(crate) fn shift_at(&mut self, v: usize, amount: T) {
        let g = &self.graph;
        let mut dirty_out = Vec::new();
        let mut dirty_in = Vec::new();
        for &id in g.in_edges(v) {
            let u = g.endpoints(id).0;
            if u == v {
                continue;
            }
            let old = self.weights[id];
            let new = old + amount;
            self.weights[id] = new;
            if new > self.out_max[u] {
                self.out_max[u] = new;
            } else if old == self.out_max[u] && new < old {
                dirty_out.push(u);
            }
        }
        for &id in g.out_edges(v) {
            let w = g.endpoints(id).1;
            if w == v {
                continue;
            }
            let old = self.weights[id];
            let new = old - amount;
            self.weights[id] = new;
            if new > self.in_max[w] {
                self.in_max[w] = new;
            } else if old == self.in_max[w] && new < old {
                dirty_in.push(w);
            }
        }
        for u in dirty_out {
            self.out_max[u] = self.max_over(g.out_edges(u));
        }
        for w in dirty_in {
            self.in_max[w] = self.max_over(g.in_edges(w));
        }
        self.out_max[v] = self.max_over(g.out_edges(v));
        self.in_max[v] = self.max_over(g.in_edges(v));
    }

    fn max_over(&self, ids: &[usize]) -> T {
        ids.iter().fold(T::neg_infinity(), |m, &id| m.max(self.weights[id]))
    }

    /// Vertices whose imbalance an op at `v` can touch, with the guarded
    /// one-sided imbalance of each before the op.
    fn audit_snapshot(&self, v: usize, op: Op) -> Vec<(usize, T)> {
        let g = &self.graph;
        let guarded = |x: usize| match op {
            Op::Lower => self.stats(x).rho_raise,
            Op::Raise => self.stats(x).rho_lower,
            Op::Balance => T::zero(),
        };
        let mut verts = vec![v];
        verts.extend(g.in_edges(v).iter().map(|&id| g.endpoints(id).0));
        verts.extend(g.out_edges(v).iter().map(|&id| g.endpoints(id).1));
        verts.sort_unstable();
        verts.dedup();
        verts.into_iter().map(|x| (x, guarded(x))).collect()
    }

    fn audit_compare(&mut self, op: Op, before: &[(usize, T)]) {
        if op == Op::Balance {
            return;
        }
        let slack = self.audit_slack;
        let mut violations = 0;
        for &(x, old) in before {
            let s = self.stats(x);
            let new = if op == Op::Lower { s.rho_raise } else { s.rho_lower };
            if new > old + slack {
                violations += 1;
            }
        }
        if let Some(a) = self.audit.as_mut() {
            a.checked += 1;
            a.violations += violations;
        }
    }
}

/// One balancing operation on a standalone graph function.
fn apply_pure<T: Scalar>(
    alpha: &GraphFunction<T>,
    v: usize,
    op: Op,
) -> Result<(GraphFunction<T>, T), BalanceError> {
    let stats = alpha.vertex_stats(v)?;
    let amount = op.amount(&stats);
    if !amount.is_finite() {
        return Err(BalanceError::InvalidParameter(format!(
            "vertex {v} lacks an incoming or outgoing edge"
        )));
    }
    if amount == T::zero() {
        return Ok((alpha.clone(), amount));
    }
    let mut weights = alpha.weights().to_vec();
    shift_vertex(&mut weights, alpha, v, amount);
    Ok((alpha.with_weights(weights)?, amount))
}

/// Balances at `v`: equivalent to shifting by `(in − out)/2` at `{v}`.
/// Returns the new function and the signed potential change `(out − in)/2`.
pub fn balance_at<T: Scalar>(alpha: &GraphFunction<T>, v: usize) -> Result<(GraphFunction<T>, T), BalanceError> {
    apply_pure(alpha, v, Op::Balance)
}

/// Raises `v` by `ρ_v^R / 2` if its raising imbalance is positive.
pub fn raise_at<T: Scalar>(alpha: &GraphFunction<T>, v: usize) -> Result<(GraphFunction<T>, T), BalanceError> {
    apply_pure(alpha, v, Op::Raise)
}

/// Lowers `v` by `ρ_v^L / 2` if its lowering imbalance is positive. The
/// returned amount is the (non-positive) potential change.
pub fn lower_at<T: Scalar>(alpha: &GraphFunction<T>, v: usize) -> Result<(GraphFunction<T>, T), BalanceError> {
    apply_pure(alpha, v, Op::Lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{ln, path_graph, path_graph_b1, path_graph_b2};
    use crate::graph::GraphFunction;
    use rand::{Rng, SeedableRng};

    fn assert_close(a: &GraphFunction<f64>, b: &GraphFunction<f64>, tol: f64) {
        assert!(a.same_edge_set(b));
        for (x, y) in a.weights().iter().zip(b.weights()) {
            assert!((x - y).abs() <= tol, "{x} vs {y}");
        }
    }

    #[test]
    fn balancing_ends_gives_b1_and_inner_gives_b2() {
        let a = path_graph();
        let (g, _) = balance_at(&a, 0).unwrap();
        let (g, _) = balance_at(&g, 3).unwrap();
        assert_close(&g, &path_graph_b1(), 1e-12);
        let (g, _) = balance_at(&a, 1).unwrap();
        let (g, _) = balance_at(&g, 3).unwrap();
        assert_close(&g, &path_graph_b2(), 1e-12);
    }

    #[test]
    fn balanced_vertex_is_fixed_point() {
        let b2 = path_graph_b2();
        let (g, amount) = balance_at(&b2, 2).unwrap();
        assert_eq!(amount, 0.0);
        assert_eq!(g, b2);
    }

    #[test]
    fn balance_equals_shift() {
        let a = path_graph();
        let s = a.vertex_stats(2).unwrap();
        let (g, amount) = balance_at(&a, 2).unwrap();
        assert_eq!(amount, (s.out_max - s.in_max) / 2.0);
        assert_eq!(g, a.shift(&[2], (s.in_max - s.out_max) / 2.0).unwrap());
    }

    #[test]
    fn self_loop_unchanged() {
        let g = GraphFunction::new(2, [(0, 0, 0.5), (0, 1, 3.0), (1, 0, -1.0)]).unwrap();
        let (h, amount) = balance_at(&g, 0).unwrap();
        // the loop counts toward both maxima: out 3, in 0.5
        assert_eq!(amount, 1.25);
        assert_eq!(h.get(0, 0), Some(0.5));
        assert_eq!(h.get(0, 1), Some(1.75));
        assert_eq!(h.get(1, 0), Some(0.25));
    }

    #[test]
    fn raise_examples() {
        let a = path_graph();
        let (g, amount) = raise_at(&a, 1).unwrap();
        assert!((amount - ln(2.0)).abs() < 1e-15);
        let expect = [((0, 1), ln(4.0)), ((1, 0), ln(4.0)), ((1, 2), 0.0), ((2, 1), ln(2.0)), ((2, 3), ln(2.0)), ((3, 2), ln(8.0))];
        for ((u, v), w) in expect {
            assert!((g.get(u, v).unwrap() - w).abs() < 1e-15, "({u},{v})");
        }
        let (g, _) = raise_at(&g, 3).unwrap();
        assert_close(&g, &path_graph_b2(), 1e-15);
        // vertex 0 has a lowering imbalance: raising is censored
        let (g, amount) = raise_at(&a, 0).unwrap();
        assert_eq!(amount, 0.0);
        assert_eq!(g, a);
    }

    #[test]
    fn lower_examples() {
        let a = path_graph();
        let (g, amount) = lower_at(&a, 0).unwrap();
        assert!((amount + ln(2.0)).abs() < 1e-15);
        assert!((g.get(0, 1).unwrap() - ln(4.0)).abs() < 1e-15);
        assert!((g.get(1, 0).unwrap() - ln(4.0)).abs() < 1e-15);
        let (g, amount) = lower_at(&a, 1).unwrap();
        assert_eq!(amount, 0.0);
        assert_eq!(g, a);
    }

    #[test]
    fn lowering_is_raising_on_transpose() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 5;
        let mut edges: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, (i + 1) % n, rng.gen_range(-3.0..3.0))).collect();
        for _ in 0..6 {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if !edges.iter().any(|e| e.0 == u && e.1 == v) {
                edges.push((u, v, rng.gen_range(-3.0..3.0)));
            }
        }
        let g = GraphFunction::new(n, edges).unwrap();
        for v in 0..n {
            let (low, a) = lower_at(&g, v).unwrap();
            let (up, b) = raise_at(&g.transpose(), v).unwrap();
            assert_eq!(low, up.transpose());
            assert_eq!(a, -b);
        }
    }

    #[test]
    fn incremental_maxima_match_recomputation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 7;
        let mut edges: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, (i + 1) % n, rng.gen_range(-5.0..5.0))).collect();
        for _ in 0..15 {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if !edges.iter().any(|e| e.0 == u && e.1 == v) {
                edges.push((u, v, rng.gen_range(-5.0..5.0)));
            }
        }
        let mut state = BalanceState::new(GraphFunction::new(n, edges).unwrap()).unwrap();
        for _ in 0..2000 {
            let op = [Op::Balance, Op::Raise, Op::Lower][rng.gen_range(0..3)];
            state.apply(rng.gen_range(0..n), op);
            let g = state.graph();
            for v in 0..n {
                assert_eq!(state.stats(v), g.vertex_stats(v).unwrap());
            }
        }
    }

    #[test]
    fn state_rejects_reducible() {
        let g = GraphFunction::new_unchecked(2, [(0, 1, 0.0), (0, 0, 0.0), (1, 1, 0.0)]).unwrap();
        assert!(BalanceState::new(g).is_err());
    }
}
