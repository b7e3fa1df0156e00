//! Operation counts of two-phase balancing over instance families.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::balancer::{compute_t, two_phase_balance, Discipline, ScheduleKind, ScheduleSpec};
use crate::error::BalanceError;
use crate::graph::GraphFunction;
use crate::instances::Family;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub family: Family,
    pub sizes: Vec<usize>,
    pub reps: usize,
    pub rho: f64,
    pub epsilon: f64,
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide.
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSample {
    pub n: usize,
    pub rep: usize,
    pub seed: u64,
    pub ops: u64,
    pub nontrivial_ops: u64,
    pub reached: bool,
    /// `2·compute_t` for the instance.
    pub bound: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub family: Family,
    pub sizes: Vec<usize>,
    pub reps: usize,
    pub rho: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub median_ops: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub samples: Vec<BenchSample>,
}

impl BenchResult {
    pub fn all_reached(&self) -> bool {
        self.samples.iter().all(|s| s.reached)
    }

    pub fn within_bound(&self) -> bool {
        self.samples.iter().all(|s| s.ops <= s.bound)
    }

    /// Raw samples as CSV: `n,rep,seed,ops,nontrivial_ops,reached,bound`.
    pub fn samples_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for s in &self.samples {
            w.serialize(s)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
    }
}

/// Per-run seed; stable in the base seed, size and repetition.
pub fn run_seed(base: u64, n: usize, rep: usize) -> u64 {
    let mut z = base ^ ((n as u64) << 32) ^ rep as u64;
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn median(xs: &mut [u64]) -> f64 {
    xs.sort_unstable();
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2] as f64
    } else {
        (xs[k / 2 - 1] as f64 + xs[k / 2] as f64) / 2.0
    }
}

/// Least-squares fit of `y = slope·x + intercept`.
pub fn fit_line(points: &[(f64, f64)]) -> (f64, f64) {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    (slope, my - slope * mx)
}

fn run_one(cfg: &BenchConfig, n: usize, rep: usize) -> Result<BenchSample, BalanceError> {
    let seed = run_seed(cfg.seed, n, rep);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: GraphFunction<f64> = cfg.family.generate(n, cfg.rho, &mut rng)?;
    if !g.is_irreducible() {
        return Err(crate::error::GraphError::MatrixNotIrreducible { components: g.components() }.into());
    }
    let spec = ScheduleSpec { kind: ScheduleKind::UniformRandom { seed }, discipline: Discipline::TwoPhase };
    let (_, trace) = two_phase_balance(&g, cfg.epsilon, spec, None)?;
    let t = compute_t(n, g.imbalance().rho, cfg.epsilon, 1.0 / n as f64)?;
    Ok(BenchSample {
        n,
        rep,
        seed,
        ops: trace.ops,
        nontrivial_ops: trace.steps.len() as u64,
        reached: trace.reached(),
        bound: t.saturating_mul(2),
    })
}

/// Runs every (size, repetition) pair, concurrently when `workers != 1`.
/// Results are ordered by size and repetition whatever the scheduling.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchResult, BalanceError> {
    if cfg.reps == 0 || cfg.sizes.is_empty() {
        return Err(BalanceError::InvalidParameter("bench needs at least one size and one repetition".into()));
    }
    if let Some(&n) = cfg.sizes.iter().find(|&&n| n < cfg.family.min_n()) {
        return Err(BalanceError::InvalidParameter(format!("size {n} is below the {} minimum", cfg.family.name())));
    }
    if !(cfg.epsilon > 0.0) || !(cfg.rho >= 0.0) {
        return Err(BalanceError::InvalidParameter("epsilon must be positive and rho non-negative".into()));
    }
    let jobs: Vec<(usize, usize)> = cfg.sizes.iter().flat_map(|&n| (0..cfg.reps).map(move |r| (n, r))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| BalanceError::InvalidParameter(e.to_string()))?;
    let mut samples = pool.install(|| jobs.par_iter().map(|&(n, r)| run_one(cfg, n, r)).collect::<Result<Vec<_>, _>>())?;
    samples.sort_by_key(|s| (s.n, s.rep));

    let median_ops: Vec<f64> = cfg
        .sizes
        .iter()
        .map(|&n| median(&mut samples.iter().filter(|s| s.n == n).map(|s| s.ops).collect::<Vec<_>>()))
        .collect();
    let points: Vec<(f64, f64)> =
        cfg.sizes.iter().zip(&median_ops).map(|(&n, &m)| ((n as f64).ln(), m.max(1.0).ln())).collect();
    let (slope, intercept) = fit_line(&points);
    Ok(BenchResult {
        family: cfg.family,
        sizes: cfg.sizes.clone(),
        reps: cfg.reps,
        rho: cfg.rho,
        epsilon: cfg.epsilon,
        seed: cfg.seed,
        median_ops,
        slope,
        intercept,
        samples,
    })
}
