use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::{canonical_numbers, fmt_num, get_f64, get_u64, num, read_file, write_file, IoError};
use crate::diagnostics::{HeightLevelChart, PotentialSeries};
use crate::graph::{GraphFunction, Imbalance};
use crate::scalar::Scalar;
use crate::ub::UbReport;

/// Pretty JSON with canonical numbers and a trailing newline.
pub fn to_json_string<S: Serialize>(value: &S) -> Result<String, IoError> {
    let v = canonical_numbers(serde_json::to_value(value)?);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

fn nums<T: Scalar>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(|x| num(x.to_f64_lossy())).collect())
}

pub(crate) fn imbalance_json<T: Scalar>(i: &Imbalance<T>) -> Value {
    json!({
        "rho": num(i.rho.to_f64_lossy()),
        "rho_raise": num(i.rho_raise.to_f64_lossy()),
        "rho_lower": num(i.rho_lower.to_f64_lossy()),
    })
}

/// `{"n": …, "edges": [{"u", "v", "w"}]}` with 0-based vertices and log-domain weights.
pub fn graph_to_json<T: Scalar>(g: &GraphFunction<T>) -> Value {
    let edges: Vec<Value> = g.edges().map(|(u, v, w)| json!({"u": u, "v": v, "w": num(w.to_f64_lossy())})).collect();
    json!({"n": g.n(), "edges": edges})
}

pub fn graph_from_json<T: Scalar>(v: &Value) -> Result<GraphFunction<T>, IoError> {
    let n = get_u64(v, "n", 1)? as usize;
    let edges = v
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| IoError::parse(1, "missing array `edges`"))?;
    let mut out = Vec::with_capacity(edges.len());
    for e in edges {
        let w = get_f64(e, "w", 1)?;
        out.push((get_u64(e, "u", 1)? as usize, get_u64(e, "v", 1)? as usize, T::lit(w)));
    }
    Ok(GraphFunction::new(n, out)?)
}

pub fn read_graph_json<T: Scalar>(path: &Path) -> Result<GraphFunction<T>, IoError> {
    let v: Value = serde_json::from_str(&read_file(path)?)?;
    graph_from_json(&v)
}

pub fn write_graph_json<T: Scalar>(path: &Path, g: &GraphFunction<T>) -> Result<(), IoError> {
    write_file(path, &to_json_string(&graph_to_json(g))?)
}

pub fn chart_to_json<T: Scalar>(c: &HeightLevelChart<T>) -> Value {
    let f = |x: T| num(x.to_f64_lossy());
    json!({
        "y": nums(&c.y),
        "x": nums(&c.x),
        "m": nums(&c.m),
        "z": nums(&c.z),
        "rho_raise": nums(&c.rho),
        "tier": c.tier,
        "s_size": c.s_size,
        "rho_s": nums(&c.rho_s),
        "y_min": f(c.y_min),
        "y_max": f(c.y_max),
        "h": f(c.h),
        "psi": f(c.psi),
        "residual": f(c.residual),
        "oracle_epsilon": f(c.oracle_epsilon),
        "tie_tolerance": f(c.tie_tolerance),
        "alpha_raised": graph_to_json(&c.alpha_r),
    })
}

pub fn ub_report_to_json<T: Scalar>(r: &UbReport<T>) -> Value {
    let mut m = Map::new();
    m.insert("verdict".into(), json!(r.verdict.name()));
    m.insert("witness_threshold".into(), r.witness_threshold.map_or(Value::Null, |w| num(w.to_f64_lossy())));
    m.insert("witness_components".into(), json!(r.witness_components));
    m.insert("grouping_tolerance".into(), num(r.grouping_tolerance.to_f64_lossy()));
    m.insert("epsilon".into(), r.epsilon.map_or(Value::Null, |e| num(e.to_f64_lossy())));
    m.insert("thresholds_checked".into(), json!(r.thresholds_checked));
    m.insert("balanced_representative".into(), graph_to_json(&r.balanced_representative));
    if let Some((a, b)) = &r.distinct_limits {
        m.insert("distinct_limits".into(), json!([graph_to_json(a), graph_to_json(b)]));
    }
    if let Some(note) = &r.note {
        m.insert("note".into(), json!(note));
    }
    Value::Object(m)
}

/// One row per sample: `t,psi,h,sum_rho_raise,phi`; `phi` is empty when not evaluated.
pub fn series_to_csv(s: &PotentialSeries) -> Result<String, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "psi", "h", "sum_rho_raise", "phi"])?;
    for p in &s.samples {
        w.write_record([
            p.t.to_string(),
            fmt_num(p.psi),
            fmt_num(p.h),
            fmt_num(p.sum_rho_raise),
            p.phi.map(fmt_num).unwrap_or_default(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::Format(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}
