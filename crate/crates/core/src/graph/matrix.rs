//! Conversion between matrices and graph functions, and the similarity
//! scaling `D⁻¹AD`.

use super::{GraphFunction, ScalingVector};
use crate::error::GraphError;
use crate::scalar::{Entry, Scalar};

/// Square sparse matrix in coordinate form (0-based indices).
#[derive(Clone, Debug, PartialEq)]
pub struct CooMatrix<E> {
    pub n: usize,
    pub entries: Vec<(usize, usize, E)>,
}

impl<E: Copy> CooMatrix<E> {
    pub fn from_dense<T: Scalar>(rows: &[Vec<E>]) -> Result<Self, GraphError>
    where
        E: Entry<T>,
    {
        let n = check_square(rows)?;
        let entries = rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &e)| (i, j, e)))
            .filter(|(_, _, e)| !e.is_zero_entry())
            .collect();
        Ok(Self { n, entries })
    }

    /// Dense `n × n` rows, filling absent entries with `zero`.
    pub fn to_dense(&self, zero: E) -> Vec<Vec<E>> {
        let mut rows = vec![vec![zero; self.n]; self.n];
        for &(i, j, e) in &self.entries {
            rows[i][j] = e;
        }
        rows
    }
}

fn check_square<E>(rows: &[Vec<E>]) -> Result<usize, GraphError> {
    let n = rows.len();
    if n == 0 {
        return Err(GraphError::EmptyMatrix);
    }
    for row in rows {
        if row.len() != n {
            return Err(GraphError::NotSquare { rows: n, cols: row.len() });
        }
    }
    Ok(n)
}

/// `α_ij = log |a_ij|` for every non-zero entry, diagonal included.
pub fn from_matrix<T: Scalar, E: Entry<T>>(rows: &[Vec<E>]) -> Result<GraphFunction<T>, GraphError> {
    from_coo(&CooMatrix::from_dense(rows)?)
}

pub fn from_coo<T: Scalar, E: Entry<T>>(m: &CooMatrix<E>) -> Result<GraphFunction<T>, GraphError> {
    if m.n == 0 {
        return Err(GraphError::EmptyMatrix);
    }
    GraphFunction::new(
        m.n,
        m.entries
            .iter()
            .filter(|(_, _, e)| !e.is_zero_entry())
            .map(|&(i, j, e)| (i, j, e.magnitude().ln())),
    )
}

/// Multiplies entry `(i, j)` by `exp(p_j − p_i)`. Diagonal entries and the
/// spectrum are unchanged.
pub fn apply_scaling<T: Scalar, E: Entry<T>>(
    rows: &[Vec<E>],
    p: &ScalingVector<T>,
) -> Result<Vec<Vec<E>>, GraphError> {
    let n = check_square(rows)?;
    if p.len() != n {
        return Err(GraphError::DimensionMismatch { expected: n, found: p.len() });
    }
    Ok(rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, e)| if i == j { *e } else { e.scaled((p.0[j] - p.0[i]).exp()) })
                .collect()
        })
        .collect())
}

pub fn apply_scaling_coo<T: Scalar, E: Entry<T>>(
    m: &CooMatrix<E>,
    p: &ScalingVector<T>,
) -> Result<CooMatrix<E>, GraphError> {
    if p.len() != m.n {
        return Err(GraphError::DimensionMismatch { expected: m.n, found: p.len() });
    }
    let entries = m
        .entries
        .iter()
        .map(|&(i, j, e)| (i, j, if i == j { e } else { e.scaled((p.0[j] - p.0[i]).exp()) }))
        .collect();
    Ok(CooMatrix { n: m.n, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{path_graph, path_matrix_b1, path_matrix, ln};
    use num_complex::Complex64;

    #[test]
    fn path_example_edges() {
        let g: GraphFunction<f64> = from_matrix(&path_matrix()).unwrap();
        let expected = [
            ((0, 1), ln(2.0)),
            ((1, 0), ln(8.0)),
            ((1, 2), ln(2.0)),
            ((2, 1), 0.0),
            ((2, 3), ln(2.0)),
            ((3, 2), ln(8.0)),
        ];
        assert_eq!(g.edge_count(), expected.len());
        for ((u, v), w) in expected {
            assert_eq!(g.get(u, v), Some(w));
        }
        assert_eq!(g, path_graph());
    }

    #[test]
    fn one_by_one_self_loop() {
        let g: GraphFunction<f64> = from_matrix(&[vec![5.0]]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.get(0, 0), Some(ln(5.0)));
    }

    #[test]
    fn reducible_reports_components() {
        let err = from_matrix::<f64, f64>(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap_err();
        match err {
            GraphError::MatrixNotIrreducible { mut components } => {
                components.sort();
                assert_eq!(components, vec![vec![0], vec![1]]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(from_matrix::<f64, f64>(&[]), Err(GraphError::EmptyMatrix));
        assert!(matches!(
            from_matrix::<f64, f64>(&[vec![1.0, 2.0], vec![3.0]]),
            Err(GraphError::NotSquare { .. })
        ));
    }

    #[test]
    fn complex_and_negative_use_magnitudes() {
        let m = vec![
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, -2.0)],
            vec![Complex64::new(-3.0, 4.0), Complex64::new(0.0, 0.0)],
        ];
        let g: GraphFunction<f64> = from_matrix(&m).unwrap();
        assert_eq!(g.get(0, 1), Some(ln(2.0)));
        assert_eq!(g.get(1, 0), Some(ln(5.0)));
        let neg: GraphFunction<f64> = from_matrix(&[vec![0.0, -2.0], vec![8.0, 0.0]]).unwrap();
        assert_eq!(neg.get(0, 1), Some(ln(2.0)));
    }

    #[test]
    fn scaling_reproduces_b1() {
        // balancing at index 1 moves p_1 by (out - in)/2 = ½·log(2/8); at 4 by ½·log(8/2)
        let p = ScalingVector(vec![0.5 * (2.0f64 / 8.0).ln(), 0.0, 0.0, 0.5 * (8.0f64 / 2.0).ln()]);
        let scaled = apply_scaling(&path_matrix(), &p).unwrap();
        let b1 = path_matrix_b1();
        for i in 0..4 {
            for j in 0..4 {
                assert!((scaled[i][j] - b1[i][j]).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn identity_and_constant_scalings() {
        let a = path_matrix();
        assert_eq!(apply_scaling(&a, &ScalingVector::zeros(4)).unwrap(), a);
        assert_eq!(apply_scaling(&a, &ScalingVector(vec![1.5; 4])).unwrap(), a);
        assert!(matches!(
            apply_scaling(&a, &ScalingVector::zeros(3)),
            Err(GraphError::DimensionMismatch { expected: 4, found: 3 })
        ));
    }

    #[test]
    fn coo_round_trip() {
        let a = path_matrix();
        let coo = CooMatrix::<f64>::from_dense::<f64>(&a).unwrap();
        assert_eq!(coo.entries.len(), 6);
        assert_eq!(coo.to_dense(0.0), a);
        let p = ScalingVector(vec![0.1, 0.2, -0.3, 0.0]);
        let dense = apply_scaling(&a, &p).unwrap();
        assert_eq!(apply_scaling_coo(&coo, &p).unwrap().to_dense(0.0), dense);
    }
}
