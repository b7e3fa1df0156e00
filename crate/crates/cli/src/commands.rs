use std::fmt::Display;
use std::path::Path;

use balancekit::balancer::{
    classic_balance_with, compute_t, two_phase_balance_with, verify_replay, BalanceOptions, BalanceTrace,
    Discipline,
};
use balancekit::bench::{run_bench, BenchConfig};
use balancekit::diagnostics::{
    audit_bounds, chart, default_oracle_epsilon, potential_series, raising_limit, AuditReport, SeriesOptions,
};
use balancekit::instances::Family;
use balancekit::io::{
    canonical_numbers, chart_to_json, num, read_graph_json, read_matrix, read_trace, series_to_csv, to_json_string,
    trace_to_jsonl, ub_report_to_json, write_graph_json, write_matrix, Format, IoError, MatrixData,
};
use balancekit::ub::{find_distinct_limits, is_ub, is_ub_balanced, Verdict};
use balancekit::{BalanceError, DiagnosticsError, GraphError, GraphFunction64, ScheduleKind, ScheduleSpec, UbError};
use serde_json::{json, Value};

use crate::{Algo, AnalyzeArgs, BalanceArgs, BenchArgs, InputArgs, ReplayArgs, ScheduleArg, ScheduleArgs, UbArgs};

pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl Failure {
    fn input(msg: impl Display) -> Self {
        Failure { code: 1, msg: msg.to_string() }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::input(e)
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::input(e)
    }
}

impl From<BalanceError> for Failure {
    fn from(e: BalanceError) -> Self {
        let code = match e {
            BalanceError::TargetNotReached { .. } => 2,
            BalanceError::ReplayMismatch(_) => 2,
            _ => 1,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl From<DiagnosticsError> for Failure {
    fn from(e: DiagnosticsError) -> Self {
        let code = match e {
            DiagnosticsError::OracleBudgetExceeded { .. } => 3,
            _ => 1,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl From<UbError> for Failure {
    fn from(e: UbError) -> Self {
        Failure::input(e)
    }
}

type Outcome = Result<u8, Failure>;

struct Input {
    graph: GraphFunction64,
    matrix: Option<MatrixData>,
    format: Format,
}

fn load(args: &InputArgs) -> Result<Input, Failure> {
    let format = match &args.format {
        Some(s) => Format::parse(s).ok_or_else(|| Failure::input(format!("unrecognized format `{s}`")))?,
        None => Format::detect(&args.input).ok_or_else(|| {
            Failure::input(format!("cannot tell the format of {}; pass --format", args.input.display()))
        })?,
    };
    let (graph, matrix) = match format {
        Format::GraphJson => (read_graph_json(&args.input)?, None),
        _ => {
            let m = read_matrix(&args.input, Some(format))?;
            (m.to_graph()?, Some(m))
        }
    };
    Ok(Input { graph, matrix, format })
}

fn out_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn schedule(args: &ScheduleArgs, n: usize) -> Result<ScheduleKind, Failure> {
    Ok(match args.schedule {
        ScheduleArg::Random => ScheduleKind::UniformRandom { seed: args.seed },
        ScheduleArg::Greedy => ScheduleKind::GreedyMaxImbalance,
        ScheduleArg::Cyclic => {
            if args.start == 0 || args.start > n {
                return Err(Failure::input(format!("--start must be in 1..={n}, got {}", args.start)));
            }
            ScheduleKind::Cyclic { start: args.start - 1 }
        }
    })
}

fn default_delta(n: usize) -> f64 {
    if n > 1 {
        1.0 / n as f64
    } else {
        0.5
    }
}

fn imbalance_json(t: &BalanceTrace<f64>, initial: bool) -> Value {
    let i = if initial { t.initial_imbalance } else { t.final_imbalance };
    json!({"rho": num(i.rho), "rho_raise": num(i.rho_raise), "rho_lower": num(i.rho_lower)})
}

pub fn balance(a: &BalanceArgs) -> Outcome {
    if !(a.epsilon > 0.0) {
        return Err(Failure::input("--epsilon must be positive"));
    }
    let input = load(&a.input)?;
    let g = &input.graph;
    let n = g.n();
    let kind = schedule(&a.schedule, n)?;
    let options = BalanceOptions { audit_steps: a.audit_steps, max_ops: a.max_ops, ..Default::default() };
    let (out, trace) = match a.algo {
        Algo::TwoPhase => {
            let spec = ScheduleSpec { kind, discipline: Discipline::TwoPhase };
            two_phase_balance_with(g, a.epsilon, spec, a.delta, &options)?
        }
        Algo::Classic => {
            let spec = ScheduleSpec { kind, discipline: Discipline::Classic };
            let delta = a.delta.unwrap_or(default_delta(n));
            let max_ops = match a.max_ops {
                Some(m) => m,
                None => compute_t(n, g.imbalance().rho, a.epsilon, delta)?.saturating_mul(4).max(1),
            };
            classic_balance_with(g, a.epsilon, spec, max_ops, &options)?
        }
    };

    out_dir(&a.out_dir)?;
    let balanced = match &input.matrix {
        Some(m) => {
            let name = format!("balanced.{}", input.format.extension());
            write_matrix(&a.out_dir.join(&name), &m.scaled(&trace.scaling_vector())?, input.format)?;
            name
        }
        None => {
            let name = "balanced.json".to_string();
            write_graph_json(&a.out_dir.join(&name), &out)?;
            name
        }
    };
    write(&a.out_dir.join("trace.jsonl"), &trace_to_jsonl(&trace)?)?;
    let residual = out.equivalence_residual(g)?;
    let phases: Vec<Value> = trace
        .phases
        .iter()
        .map(|p| json!({"phase": p.op.name(), "ops": p.ops, "max_ops": p.max_ops, "residual": num(p.residual), "reached": p.reached}))
        .collect();
    let summary = json!({
        "command": "balance",
        "input_digest": g.digest(),
        "n": n,
        "edges": g.edge_count(),
        "algo": match a.algo { Algo::TwoPhase => "two-phase", Algo::Classic => "classic" },
        "schedule": serde_json::to_value(trace.schedule).map_err(Failure::input)?,
        "seed": a.schedule.seed,
        "epsilon": num(a.epsilon),
        "delta": trace.delta.map_or(Value::Null, num),
        "T": trace.budget,
        "ops": trace.ops,
        "nontrivial_ops": trace.steps.len(),
        "stop": trace.stop,
        "reached": trace.reached(),
        "rho": num(trace.final_imbalance.rho),
        "rho_raise": num(trace.final_imbalance.rho_raise),
        "rho_lower": num(trace.final_imbalance.rho_lower),
        "initial_imbalance": imbalance_json(&trace, true),
        "phases": phases,
        "equivalence_residual": num(residual),
        "final_digest": trace.final_digest,
        "step_audit": trace.step_audit.map(|s| json!({"checked": s.checked, "violations": s.violations})),
        "outputs": {"balanced": balanced, "trace": "trace.jsonl"},
    });
    write(&a.out_dir.join("summary.json"), &to_json_string(&summary)?)?;
    println!(
        "{} after {} operations ({} non-trivial): rho = {:.6e}, rho_raise = {:.6e}, rho_lower = {:.6e}",
        if trace.reached() { "target reached" } else { "target NOT reached" },
        trace.ops,
        trace.steps.len(),
        trace.final_imbalance.rho,
        trace.final_imbalance.rho_raise,
        trace.final_imbalance.rho_lower,
    );
    if let Some(s) = trace.step_audit {
        println!("step audit: {} checks, {} violations", s.checked, s.violations);
    }
    match trace.check_reached() {
        Ok(()) => Ok(0),
        Err(e) => {
            eprintln!("{e}");
            Ok(2)
        }
    }
}

pub fn analyze(a: &AnalyzeArgs) -> Outcome {
    if !(a.epsilon > 0.0) {
        return Err(Failure::input("--epsilon must be positive"));
    }
    let input = load(&a.input)?;
    let g = &input.graph;
    let n = g.n();
    let oracle_eps = a.oracle_epsilon.unwrap_or_else(|| default_oracle_epsilon(g));
    let limit = raising_limit(g, oracle_eps)?;
    let mut c = chart(g, &limit)?;
    if a.corrupt_chart {
        let bump = 1.0 + g.scale();
        c.m.iter_mut().for_each(|m| *m += bump);
    }
    let initial = audit_bounds(g, &c)?;

    let spec = ScheduleSpec { kind: schedule(&a.schedule, n)?, discipline: Discipline::TwoPhase };
    let (_, trace) = two_phase_balance_with(g, a.epsilon, spec, None, &BalanceOptions::default())?;
    let every = a.sample_every.unwrap_or(n as u64).max(1);
    let opts = SeriesOptions { oracle_epsilon: Some(oracle_eps), phi: a.phi, audit: true, recompute: false };
    let series = potential_series(&trace, g, every, &opts)?;

    let mut all = AuditReport::new(initial.slack);
    all.merge(&initial);
    all.merge(&series.audit);

    out_dir(&a.out_dir)?;
    let mut chart_json = chart_to_json(&c);
    chart_json["r_star"] = Value::Array(limit.r_star.iter().map(|&x| num(x)).collect());
    chart_json["seed"] = json!(a.schedule.seed);
    write(&a.out_dir.join("chart.json"), &to_json_string(&chart_json)?)?;
    let audit = json!({
        "input_digest": g.digest(),
        "seed": a.schedule.seed,
        "passed": all.passed(),
        "failing": all.failing(),
        "chart": serde_json::to_value(&initial).map_err(Failure::input)?,
        "series": serde_json::to_value(&series.audit).map_err(Failure::input)?,
        "samples": series.samples.len(),
        "oracle_epsilon": num(series.oracle_epsilon),
    });
    write(&a.out_dir.join("audit.json"), &to_json_string(&canonical_numbers(audit))?)?;
    write(&a.out_dir.join("series.csv"), &series_to_csv(&series)?)?;

    println!("heights y = {}", c.y.iter().map(|y| format!("{y:.6e}")).collect::<Vec<_>>().join(", "));
    println!("h = {:.6e}, psi = {:.6e}, {} samples", c.h, c.psi, series.samples.len());
    if all.passed() {
        println!("audit passed: {} checks over {} states", all.checks.len(), all.states);
        Ok(0)
    } else {
        for f in all.failing() {
            let check = all.get(f).expect("failing check exists");
            eprintln!(
                "audit failed: {f} ({} of {} instances, worst margin {:.3e})",
                check.violations,
                check.checked,
                check.min_margin.unwrap_or(f64::NAN)
            );
        }
        Ok(2)
    }
}

pub fn ubcheck(a: &UbArgs) -> Outcome {
    let input = load(&a.input)?;
    let g = &input.graph;
    let mut report = if a.assume_balanced {
        let tau = a.tau.unwrap_or(1e-9 * g.scale().max(1.0));
        is_ub_balanced(g, tau)?
    } else {
        is_ub(g, a.epsilon, a.tau, a.seed)?
    };
    if a.find_distinct > 0 {
        let eps = report.epsilon.unwrap_or(1e-10 * g.scale().max(1.0));
        report.distinct_limits = find_distinct_limits(g, eps, a.find_distinct)?;
    }
    out_dir(&a.out_dir)?;
    let mut v = ub_report_to_json(&report);
    v["seed"] = json!(a.seed);
    v["input_digest"] = json!(g.digest());
    write(&a.out_dir.join("ub.json"), &to_json_string(&v)?)?;
    println!("verdict: {}", report.verdict.name());
    if let Some(w) = report.witness_threshold {
        println!("witness threshold: {w:.16e}");
        let comps: Vec<String> = report
            .witness_components
            .iter()
            .map(|c| format!("{{{}}}", c.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        println!("components (1-based): {}", comps.join(" "));
    }
    if let Some(note) = &report.note {
        println!("note: {note}");
    }
    if report.distinct_limits.is_some() {
        println!("found two balancing runs with different limits");
    }
    Ok(match report.verdict {
        Verdict::Ub => 0,
        Verdict::NotUb => 4,
        Verdict::Indeterminate => 5,
    })
}

pub fn bench(a: &BenchArgs) -> Outcome {
    let family = Family::parse(&a.family).ok_or_else(|| Failure::input(format!("unknown family `{}`", a.family)))?;
    let cfg = BenchConfig {
        family,
        sizes: a.sizes.clone(),
        reps: a.reps,
        rho: a.rho,
        epsilon: a.epsilon,
        seed: a.seed,
        workers: a.workers,
    };
    let r = run_bench(&cfg)?;
    out_dir(&a.out_dir)?;
    write(&a.out_dir.join("bench.json"), &to_json_string(&r)?)?;
    write(&a.out_dir.join("bench.csv"), &r.samples_csv().map_err(Failure::input)?)?;
    for (n, m) in r.sizes.iter().zip(&r.median_ops) {
        println!("n = {n:>5}: median ops {m}");
    }
    println!("log-log slope {:.4}, intercept {:.4}", r.slope, r.intercept);
    if !r.all_reached() {
        eprintln!("warning: some runs did not reach the target");
    }
    if !r.within_bound() {
        eprintln!("warning: some runs exceeded twice the step-count bound");
    }
    Ok(0)
}

pub fn replay(a: &ReplayArgs) -> Outcome {
    let input = load(&a.input)?;
    let trace: BalanceTrace<f64> = read_trace(&a.trace)?;
    let g = verify_replay(&trace, &input.graph)?;
    println!("replay matches: {} steps, final digest {}", trace.steps.len(), g.digest());
    Ok(0)
}
