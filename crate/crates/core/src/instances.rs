//! Random and structured strongly connected instances.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::GraphFunction;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Directed `n`-cycle with one edge of weight `ρ` and the rest 0.
    Cycle,
    /// Two directed cycles sharing vertex 0, lengths `⌈n/2⌉` and `⌊n/2⌋ + 1`.
    TwoCyclesSharedVertex,
    /// Random Hamiltonian cycle plus `2n` random extra edges, weights uniform in `[0, ρ]`.
    SparseRandom,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Cycle => "cycle",
            Family::TwoCyclesSharedVertex => "two-cycles-shared-vertex",
            Family::SparseRandom => "sparse-random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "cycle" => Some(Family::Cycle),
            "two-cycles-shared-vertex" | "two-cycles" => Some(Family::TwoCyclesSharedVertex),
            "sparse-random" | "random" => Some(Family::SparseRandom),
            _ => None,
        }
    }

    /// Smallest supported size.
    pub fn min_n(self) -> usize {
        match self {
            Family::Cycle => 2,
            Family::TwoCyclesSharedVertex => 3,
            Family::SparseRandom => 2,
        }
    }

    pub fn generate<T: Scalar, R: Rng + ?Sized>(self, n: usize, rho: f64, rng: &mut R) -> Result<GraphFunction<T>, GraphError> {
        match self {
            Family::Cycle => heavy_cycle(n, rho),
            Family::TwoCyclesSharedVertex => two_cycles(n, rho),
            Family::SparseRandom => random_strongly_connected(n, 2 * n, 0.0, rho, rng),
        }
    }
}

/// Directed cycle `0 → 1 → … → n−1 → 0` with `(n−1, 0)` weighted `rho`.
pub fn heavy_cycle<T: Scalar>(n: usize, rho: f64) -> Result<GraphFunction<T>, GraphError> {
    if n < 2 {
        return Err(GraphError::DimensionMismatch { expected: 2, found: n });
    }
    GraphFunction::new(n, (0..n).map(|i| (i, (i + 1) % n, T::lit(if i == n - 1 { rho } else { 0.0 }))))
}

/// Cycles `0 → 1 → … → k−1 → 0` and `0 → k → … → n−1 → 0` with
/// `k = ⌈n/2⌉`; the edge closing the first cycle weighs `rho`.
pub fn two_cycles<T: Scalar>(n: usize, rho: f64) -> Result<GraphFunction<T>, GraphError> {
    if n < 3 {
        return Err(GraphError::DimensionMismatch { expected: 3, found: n });
    }
    let k = n.div_ceil(2);
    let mut edges = Vec::with_capacity(n + 1);
    for i in 0..k {
        let next = if i + 1 == k { 0 } else { i + 1 };
        edges.push((i, next, T::lit(if i + 1 == k { rho } else { 0.0 })));
    }
    let mut prev = 0;
    for v in k..n {
        edges.push((prev, v, T::zero()));
        prev = v;
    }
    edges.push((prev, 0, T::zero()));
    GraphFunction::new(n, edges)
}

/// A random Hamiltonian cycle plus up to `extra` distinct random edges
/// (self-loops allowed), all weights uniform in `[lo, hi]`.
pub fn random_strongly_connected<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    extra: usize,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> Result<GraphFunction<T>, GraphError> {
    if n == 0 {
        return Err(GraphError::EmptyMatrix);
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut present = std::collections::HashSet::new();
    let mut edges = Vec::with_capacity(n + extra);
    let weight = |rng: &mut R| T::lit(if hi > lo { rng.gen_range(lo..=hi) } else { lo });
    for i in 0..n {
        let (u, v) = (perm[i], perm[(i + 1) % n]);
        if present.insert((u, v)) {
            edges.push((u, v, weight(rng)));
        }
    }
    let target = edges.len() + extra.min(n * n - edges.len());
    while edges.len() < target {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if present.insert((u, v)) {
            edges.push((u, v, weight(rng)));
        }
    }
    GraphFunction::new(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn families_are_irreducible_with_controlled_imbalance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        for n in [3, 4, 7, 16] {
            for fam in [Family::Cycle, Family::TwoCyclesSharedVertex, Family::SparseRandom] {
                let g: GraphFunction<f64> = fam.generate(n, 4.0, &mut rng).unwrap();
                assert!(g.is_irreducible());
                assert_eq!(g.n(), n);
                if fam != Family::SparseRandom {
                    assert_eq!(g.imbalance().rho, 4.0);
                    assert_eq!(g.edge_count(), if fam == Family::Cycle { n } else { n + 1 });
                }
            }
        }
    }

    #[test]
    fn random_edge_counts() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let g: GraphFunction<f64> = random_strongly_connected(10, 20, 0.0, 1.0, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 30);
        let full: GraphFunction<f64> = random_strongly_connected(3, 100, 0.0, 1.0, &mut rng).unwrap();
        assert_eq!(full.edge_count(), 9);
        assert!(g.weights().iter().all(|&w| (0.0..=1.0).contains(&w)));
    }

    #[test]
    fn parse_names() {
        for fam in [Family::Cycle, Family::TwoCyclesSharedVertex, Family::SparseRandom] {
            assert_eq!(Family::parse(fam.name()), Some(fam));
        }
    }
}
