//! Max-norm matrix balancing by iterated diagonal similarity scaling.
//!
//! The crate works on the log-domain image of an irreducible matrix, a
//! [`GraphFunction`], and provides the classic one-vertex balancing
//! iteration, the two-phase raising/lowering variant with its operation
//! budget, a unique-balance decision procedure, and diagnostics that
//! evaluate the height/level/momentum quantities of a raising run and
//! check the inequalities relating them.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the file formats
//! and the command-line tool use.

pub mod balancer;
pub mod bench;
pub mod diagnostics;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod instances;
pub mod io;
pub mod scalar;
pub mod ub;

pub use balancer::{BalanceTrace, ScheduleKind, ScheduleSpec, StopRule};
pub use error::{BalanceError, DiagnosticsError, GraphError, UbError};
pub use graph::{GraphFunction, Imbalance, Order, ScalingVector, VertexStats};
pub use scalar::{Entry, Scalar};

pub type GraphFunction64 = GraphFunction<f64>;
pub type GraphFunction32 = GraphFunction<f32>;
