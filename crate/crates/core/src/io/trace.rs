//! Trace files: a header line, one line per recorded step, and a summary
//! line. A file without its summary line is treated as truncated.

use std::path::Path;

use serde_json::{json, Value};

use super::json::imbalance_json;
use super::{get_f64, get_u64, num, read_file, write_file, IoError};
use crate::balancer::{BalanceTrace, Op, PhaseSummary, ScheduleKind, ScheduleSpec, Step, StepAudit, StopCause};
use crate::graph::Imbalance;
use crate::scalar::Scalar;

fn n2v<T: Scalar>(x: T) -> Value {
    num(x.to_f64_lossy())
}

fn vec_json<T: Scalar>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(|&x| n2v(x)).collect())
}

pub fn trace_to_jsonl<T: Scalar>(trace: &BalanceTrace<T>) -> Result<String, IoError> {
    let seed = match trace.schedule.kind {
        ScheduleKind::UniformRandom { seed } => json!(seed),
        _ => Value::Null,
    };
    let header = json!({
        "type": "header",
        "n": trace.n,
        "schedule": serde_json::to_value(trace.schedule)?,
        "seed": seed,
        "epsilon": n2v(trace.epsilon),
        "delta": trace.delta.map_or(Value::Null, n2v),
        "T": trace.budget,
        "initial_digest": trace.initial_digest,
        "steps_recorded": trace.steps_recorded,
    });
    let mut out = serde_json::to_string(&header)?;
    out.push('\n');
    for s in &trace.steps {
        let line = json!({"t": s.t, "phase": s.op.name(), "v": s.v, "amount": n2v(s.amount)});
        out.push_str(&serde_json::to_string(&line)?);
        out.push('\n');
    }
    let phases: Vec<Value> = trace
        .phases
        .iter()
        .map(|p| {
            json!({"phase": p.op.name(), "ops": p.ops, "max_ops": p.max_ops, "residual": n2v(p.residual), "reached": p.reached})
        })
        .collect();
    let summary = json!({
        "type": "summary",
        "ops": trace.ops,
        "stop": trace.stop,
        "phases": phases,
        "initial_imbalance": imbalance_json(&trace.initial_imbalance),
        "final_imbalance": imbalance_json(&trace.final_imbalance),
        "raising": vec_json(&trace.raising),
        "lowering": vec_json(&trace.lowering),
        "scaling": vec_json(&trace.scaling),
        "final_digest": trace.final_digest,
        "step_audit": trace.step_audit.map(|a| json!({"checked": a.checked, "violations": a.violations})),
    });
    out.push_str(&serde_json::to_string(&summary)?);
    out.push('\n');
    Ok(out)
}

pub fn write_trace<T: Scalar>(path: &Path, trace: &BalanceTrace<T>) -> Result<(), IoError> {
    write_file(path, &trace_to_jsonl(trace)?)
}

fn get_str<'a>(v: &'a Value, key: &str, line: usize) -> Result<&'a str, IoError> {
    v.get(key).and_then(Value::as_str).ok_or_else(|| IoError::parse(line, format!("missing string field `{key}`")))
}

fn get_vec<T: Scalar>(v: &Value, key: &str, line: usize) -> Result<Vec<T>, IoError> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| IoError::parse(line, format!("missing array `{key}`")))?
        .iter()
        .map(|x| x.as_f64().map(T::lit).ok_or_else(|| IoError::parse(line, format!("non-numeric entry in `{key}`"))))
        .collect()
}

fn get_imbalance<T: Scalar>(v: &Value, key: &str, line: usize) -> Result<Imbalance<T>, IoError> {
    let i = v.get(key).ok_or_else(|| IoError::parse(line, format!("missing field `{key}`")))?;
    Ok(Imbalance {
        rho: T::lit(get_f64(i, "rho", line)?),
        rho_raise: T::lit(get_f64(i, "rho_raise", line)?),
        rho_lower: T::lit(get_f64(i, "rho_lower", line)?),
    })
}

fn get_op(v: &Value, line: usize) -> Result<Op, IoError> {
    let name = get_str(v, "phase", line)?;
    Op::parse(name).ok_or_else(|| IoError::parse(line, format!("unknown phase `{name}`")))
}

pub fn parse_trace<T: Scalar>(text: &str) -> Result<BalanceTrace<T>, IoError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    let (hl, h) = lines.next().ok_or_else(|| IoError::parse(1, "empty trace"))?;
    let h: Value = serde_json::from_str(h).map_err(|e| IoError::parse(hl, e.to_string()))?;
    if h.get("type").and_then(Value::as_str) != Some("header") {
        return Err(IoError::parse(hl, "first line is not a trace header"));
    }
    let n = get_u64(&h, "n", hl)? as usize;
    let schedule: ScheduleSpec = serde_json::from_value(h.get("schedule").cloned().unwrap_or(Value::Null))
        .map_err(|e| IoError::parse(hl, format!("bad schedule: {e}")))?;
    let epsilon = T::lit(get_f64(&h, "epsilon", hl)?);
    let delta = match h.get("delta") {
        None | Some(Value::Null) => None,
        Some(_) => Some(T::lit(get_f64(&h, "delta", hl)?)),
    };
    let budget = h.get("T").and_then(Value::as_u64);
    let initial_digest = get_str(&h, "initial_digest", hl)?.to_string();
    let steps_recorded = h.get("steps_recorded").and_then(Value::as_bool).unwrap_or(true);

    let mut steps = Vec::new();
    let mut summary = None;
    for (line, l) in lines {
        if summary.is_some() {
            return Err(IoError::parse(line, "content after the summary line"));
        }
        let v: Value = serde_json::from_str(l).map_err(|e| IoError::parse(line, e.to_string()))?;
        if v.get("type").and_then(Value::as_str) == Some("summary") {
            summary = Some((line, v));
            continue;
        }
        let s = Step {
            t: get_u64(&v, "t", line)?,
            op: get_op(&v, line)?,
            v: get_u64(&v, "v", line)? as usize,
            amount: T::lit(get_f64(&v, "amount", line)?),
        };
        if s.v >= n {
            return Err(IoError::parse(line, format!("vertex {} outside 0..{n}", s.v)));
        }
        if steps.last().is_some_and(|p: &Step<T>| p.t >= s.t) {
            return Err(IoError::parse(line, "step indices are not increasing"));
        }
        steps.push(s);
    }
    let last = text.lines().count();
    let (sl, s) = summary.ok_or_else(|| IoError::parse(last, "trace ends without a summary line (truncated?)"))?;
    let stop: StopCause = serde_json::from_value(s.get("stop").cloned().unwrap_or(Value::Null))
        .map_err(|e| IoError::parse(sl, format!("bad stop cause: {e}")))?;
    let phases = s
        .get("phases")
        .and_then(Value::as_array)
        .ok_or_else(|| IoError::parse(sl, "missing array `phases`"))?
        .iter()
        .map(|p| {
            Ok(PhaseSummary {
                op: get_op(p, sl)?,
                ops: get_u64(p, "ops", sl)?,
                max_ops: get_u64(p, "max_ops", sl)?,
                residual: T::lit(get_f64(p, "residual", sl)?),
                reached: p.get("reached").and_then(Value::as_bool).ok_or_else(|| IoError::parse(sl, "missing `reached`"))?,
            })
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    let step_audit = match s.get("step_audit") {
        None | Some(Value::Null) => None,
        Some(a) => Some(StepAudit { checked: get_u64(a, "checked", sl)?, violations: get_u64(a, "violations", sl)? }),
    };
    Ok(BalanceTrace {
        n,
        schedule,
        epsilon,
        delta,
        budget,
        initial_digest,
        final_digest: get_str(&s, "final_digest", sl)?.to_string(),
        steps,
        steps_recorded,
        phases,
        ops: get_u64(&s, "ops", sl)?,
        stop,
        initial_imbalance: get_imbalance(&s, "initial_imbalance", sl)?,
        final_imbalance: get_imbalance(&s, "final_imbalance", sl)?,
        raising: get_vec(&s, "raising", sl)?,
        lowering: get_vec(&s, "lowering", sl)?,
        scaling: get_vec(&s, "scaling", sl)?,
        step_audit,
    })
}

pub fn read_trace<T: Scalar>(path: &Path) -> Result<BalanceTrace<T>, IoError> {
    parse_trace(&read_file(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balancer::{classic_balance, replay, two_phase_balance, Discipline};
    use crate::fixtures::{cycle, path_graph};

    fn spec(seed: u64) -> ScheduleSpec {
        ScheduleSpec { kind: ScheduleKind::UniformRandom { seed }, discipline: Discipline::TwoPhase }
    }

    #[test]
    fn jsonl_round_trip_replays() {
        let a = cycle(&[0.3, -1.7, 2.9, 0.0, 5.5]);
        let (b, trace) = two_phase_balance(&a, 1e-9, spec(3), None).unwrap();
        let text = trace_to_jsonl(&trace).unwrap();
        let back: BalanceTrace<f64> = parse_trace(&text).unwrap();
        assert_eq!(back, trace);
        assert_eq!(replay(&back, &a).unwrap(), b);
        assert_eq!(trace_to_jsonl(&back).unwrap(), text);
    }

    #[test]
    fn classic_cyclic_round_trip() {
        let a = path_graph();
        let s = ScheduleSpec { kind: ScheduleKind::Cyclic { start: 3 }, discipline: Discipline::Classic };
        let (_, trace) = classic_balance(&a, 1e-12, s, 10_000).unwrap();
        let back: BalanceTrace<f64> = parse_trace(&trace_to_jsonl(&trace).unwrap()).unwrap();
        assert_eq!(back, trace);
        assert!(text_header_has_seed(&trace_to_jsonl(&trace).unwrap()).is_null());
    }

    fn text_header_has_seed(text: &str) -> Value {
        let h: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        h["seed"].clone()
    }

    #[test]
    fn truncated_trace_is_a_parse_error() {
        let a = path_graph();
        let (_, trace) = two_phase_balance(&a, 1e-9, spec(1), None).unwrap();
        let text = trace_to_jsonl(&trace).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        let cut = lines[..lines.len() - 1].join("\n");
        assert!(matches!(parse_trace::<f64>(&cut), Err(IoError::Parse { .. })));
        let half = &text[..text.len() / 2];
        assert!(matches!(parse_trace::<f64>(half), Err(IoError::Parse { .. })));
        assert!(parse_trace::<f64>("").is_err());
        assert_eq!(text_header_has_seed(&text), json!(1));
    }
}
