use thiserror::Error;

fn fmt_components(components: &[Vec<usize>]) -> String {
    components
        .iter()
        .map(|c| {
            let inner: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            format!("{{{}}}", inner.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Structural and input errors raised while building or comparing graph functions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("matrix is empty")]
    EmptyMatrix,
    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },
    #[error(
        "matrix is not irreducible: {} strongly connected components {}",
        components.len(),
        fmt_components(components)
    )]
    MatrixNotIrreducible { components: Vec<Vec<usize>> },
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("duplicate edge ({u},{v})")]
    DuplicateEdge { u: usize, v: usize },
    #[error("edge ({u},{v}) has a non-finite weight")]
    NonFiniteWeight { u: usize, v: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("graph functions are defined on different edge sets")]
    EdgeSetMismatch,
}

/// Errors from the balancing routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BalanceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("target imbalance {target} not reached; final imbalance {imbalance}")]
    TargetNotReached { target: f64, imbalance: f64 },
    #[error("trace does not replay: {0}")]
    ReplayMismatch(String),
}

/// Errors from the diagnostics engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagnosticsError {
    #[error(transparent)]
    Balance(#[from] BalanceError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("raising-limit oracle exceeded its budget of {budget} operations (residual {residual})")]
    OracleBudgetExceeded { budget: u64, residual: f64 },
    #[error("chart is inconsistent with the graph function: residual {residual} on edge ({u},{v})")]
    InconsistentChart { u: usize, v: usize, residual: f64 },
}

/// Errors from the unique-balance checker.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum UbError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Balance(#[from] BalanceError),
    #[error("representative is not balanced: imbalance {imbalance} exceeds {tau}")]
    NotBalanced { imbalance: f64, tau: f64 },
}
