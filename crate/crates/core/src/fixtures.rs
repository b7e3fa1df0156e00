//! Small reference instances shared by tests, docs and the CLI examples.
//!
//! The bidirected 4-path `A` below is the standard example of an input
//! whose balanced limit depends on the order of operations: balancing at
//! the two end vertices (0 and 3) gives `B1`, balancing at 1 then 3 gives `B2`.

use crate::graph::{from_matrix, GraphFunction};

pub fn ln(x: f64) -> f64 {
    x.ln()
}

pub fn path_matrix() -> Vec<Vec<f64>> {
    vec![
        vec![0.0, 2.0, 0.0, 0.0],
        vec![8.0, 0.0, 2.0, 0.0],
        vec![0.0, 1.0, 0.0, 2.0],
        vec![0.0, 0.0, 8.0, 0.0],
    ]
}

pub fn path_matrix_b1() -> Vec<Vec<f64>> {
    vec![
        vec![0.0, 4.0, 0.0, 0.0],
        vec![4.0, 0.0, 2.0, 0.0],
        vec![0.0, 1.0, 0.0, 4.0],
        vec![0.0, 0.0, 4.0, 0.0],
    ]
}

pub fn path_matrix_b2() -> Vec<Vec<f64>> {
    vec![
        vec![0.0, 4.0, 0.0, 0.0],
        vec![4.0, 0.0, 1.0, 0.0],
        vec![0.0, 2.0, 0.0, 4.0],
        vec![0.0, 0.0, 4.0, 0.0],
    ]
}

pub fn path_graph() -> GraphFunction<f64> {
    from_matrix(&path_matrix()).expect("path example is irreducible")
}

pub fn path_graph_b1() -> GraphFunction<f64> {
    from_matrix(&path_matrix_b1()).expect("path example is irreducible")
}

pub fn path_graph_b2() -> GraphFunction<f64> {
    from_matrix(&path_matrix_b2()).expect("path example is irreducible")
}

/// Directed cycle `0 → 1 → … → n−1 → 0` with the given log-weights.
pub fn cycle(weights: &[f64]) -> GraphFunction<f64> {
    let n = weights.len();
    GraphFunction::new(n, weights.iter().enumerate().map(|(i, &w)| (i, (i + 1) % n, w)))
        .expect("a cycle is strongly connected")
}
