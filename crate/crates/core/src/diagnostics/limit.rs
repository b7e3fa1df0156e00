use crate::balancer::{compute_t, BalanceState, Op, ScheduleKind, Scheduler};
use crate::error::DiagnosticsError;
use crate::graph::GraphFunction;
use crate::scalar::Scalar;

/// Numerical stand-in for the limit of an infinite fair raising sequence.
///
/// `r_star` is the accumulated raising at the oracle's stopping point and
/// `alpha_r` the function reached there. `oracle_epsilon` bounds the
/// distance from the true limit: every component of `r_star` is within
/// `oracle_epsilon` below the true value.
#[derive(Clone, Debug, PartialEq)]
pub struct RaisingLimit<T> {
    pub r_star: Vec<T>,
    pub alpha_r: GraphFunction<T>,
    pub oracle_epsilon: T,
    pub ops: u64,
}

impl<T: Scalar> RaisingLimit<T> {
    /// Limit of the function reached after raising by `raised` from the
    /// same initial function: the remaining raising `r* − r(t)`.
    pub fn rebase(&self, raised: &[T]) -> Result<Self, DiagnosticsError> {
        if raised.len() != self.r_star.len() {
            return Err(crate::error::GraphError::DimensionMismatch {
                expected: self.r_star.len(),
                found: raised.len(),
            }
            .into());
        }
        let r_star = self.r_star.iter().zip(raised).map(|(&s, &r)| (s - r).max(T::zero())).collect();
        Ok(Self { r_star, alpha_r: self.alpha_r.clone(), oracle_epsilon: self.oracle_epsilon, ops: self.ops })
    }
}

/// Default oracle target: `1e−12` relative to the weight scale.
pub fn default_oracle_epsilon<T: Scalar>(alpha: &GraphFunction<T>) -> T {
    T::lit(1e-12) * T::one().max(alpha.scale())
}

/// Runs a cyclic raising schedule to approximate the raising limit.
pub fn raising_limit<T: Scalar>(alpha: &GraphFunction<T>, oracle_epsilon: T) -> Result<RaisingLimit<T>, DiagnosticsError> {
    raising_limit_with(alpha, oracle_epsilon, ScheduleKind::Cyclic { start: 0 })
}

/// Raises in the given order, checking after each sweep of `n` operations
/// the bound `(n − 1)·Σ_v ρ_v^R` on the distance to the limit. Stops once
/// the bound is at most `oracle_epsilon`. If the bound stops improving at
/// the rounding floor `8 n² u·max(1, scale)` the oracle accepts it and
/// reports that floor as its epsilon instead.
pub fn raising_limit_with<T: Scalar>(
    alpha: &GraphFunction<T>,
    oracle_epsilon: T,
    schedule: ScheduleKind,
) -> Result<RaisingLimit<T>, DiagnosticsError> {
    if !(oracle_epsilon > T::zero()) {
        return Err(crate::error::BalanceError::InvalidParameter(format!(
            "oracle epsilon must be positive, got {oracle_epsilon}"
        ))
        .into());
    }
    let n = alpha.n();
    let mut state = BalanceState::new(alpha.clone())?;
    let mut scheduler = Scheduler::new(schedule, n);
    let nf = T::lit(n as f64);
    let bound = |s: &BalanceState<T>| (nf - T::one()) * s.total_rho_raise();
    let floor = T::lit(8.0) * nf * nf * T::epsilon() * T::one().max(alpha.scale());
    let rho = alpha.imbalance().rho.to_f64_lossy();
    let delta = if n > 1 { 1.0 / n as f64 } else { 0.5 };
    let budget = compute_t(n, rho, oracle_epsilon.to_f64_lossy(), delta)?.saturating_mul(10).max(n as u64);

    const PATIENCE: u32 = 50;
    let mut best = bound(&state);
    let mut stale = 0;
    let mut ops = 0u64;
    while best > oracle_epsilon {
        if ops >= budget {
            return Err(DiagnosticsError::OracleBudgetExceeded { budget, residual: best.to_f64_lossy() });
        }
        for _ in 0..n {
            let v = scheduler.next(&state, Op::Raise);
            state.apply(v, Op::Raise);
        }
        ops += n as u64;
        let b = bound(&state);
        if b < best {
            best = b;
            stale = 0;
        } else {
            stale += 1;
            if stale >= PATIENCE {
                if best <= floor {
                    break;
                }
                return Err(DiagnosticsError::OracleBudgetExceeded { budget: ops, residual: best.to_f64_lossy() });
            }
        }
    }
    let residual = bound(&state);
    Ok(RaisingLimit {
        r_star: state.raised().to_vec(),
        oracle_epsilon: oracle_epsilon.max(residual),
        ops,
        alpha_r: state.into_graph(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{ln, path_graph, path_graph_b2};

    #[test]
    fn path_limit() {
        let lim = raising_limit(&path_graph(), 1e-12).unwrap();
        let expect = [0.0, ln(2.0), 0.0, ln(2.0)];
        for (r, e) in lim.r_star.iter().zip(expect) {
            assert!((r - e).abs() <= 10.0 * lim.oracle_epsilon);
        }
        for (a, b) in lim.alpha_r.weights().iter().zip(path_graph_b2().weights()) {
            assert!((a - b).abs() <= 10.0 * lim.oracle_epsilon);
        }
    }

    #[test]
    fn balanced_input_has_zero_limit() {
        let b2 = path_graph_b2();
        let lim = raising_limit(&b2, 1e-12).unwrap();
        assert!(lim.r_star.iter().all(|&r| r == 0.0));
        assert_eq!(lim.alpha_r, b2);
        assert_eq!(lim.ops, 0);
    }

    #[test]
    fn seeds_agree() {
        let g = crate::fixtures::cycle(&[0.0, 3.0, -1.0, 7.0, 2.0]);
        let a = raising_limit_with(&g, 1e-12, ScheduleKind::UniformRandom { seed: 1 }).unwrap();
        let b = raising_limit_with(&g, 1e-12, ScheduleKind::UniformRandom { seed: 2 }).unwrap();
        let tol = 10.0 * a.oracle_epsilon.max(b.oracle_epsilon);
        for (x, y) in a.r_star.iter().zip(&b.r_star) {
            assert!((x - y).abs() <= tol, "{x} vs {y}");
        }
    }

    #[test]
    fn rejects_bad_epsilon() {
        assert!(raising_limit(&path_graph(), 0.0).is_err());
    }
}
