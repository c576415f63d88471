//! CSV and JSON renderings of traces, chains and staircase samples.

use serde_json::{json, Value};

use crate::scalar::Scalar;
use crate::witness::{BisectionTrace, EpsilonChain};

/// Column order shared by trace and chain CSV files.
pub const TRACE_HEADER: [&str; 6] = ["n", "a_n", "b_n", "f_a_n", "f_b_n", "slope"];
pub const STAIRCASE_HEADER: [&str; 2] = ["x", "f"];

fn csv_string<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is utf-8")
}

pub fn trace_csv<T: Scalar>(trace: &BisectionTrace<T>) -> String {
    let rows = (0..trace.a_seq.len()).map(|n| {
        vec![
            n.to_string(),
            trace.a_seq[n].to_string(),
            trace.b_seq[n].to_string(),
            trace.fa_seq[n].to_string(),
            trace.fb_seq[n].to_string(),
            trace.slopes[n].to_string(),
        ]
    });
    csv_string(&TRACE_HEADER, rows)
}

/// One row per step `[t_i, t_{i+1}]`.
pub fn chain_csv<T: Scalar>(chain: &EpsilonChain<T>) -> String {
    let rows = (0..chain.step_slopes.len()).map(|i| {
        vec![
            i.to_string(),
            chain.knots[i].to_string(),
            chain.knots[i + 1].to_string(),
            chain.values[i].to_string(),
            chain.values[i + 1].to_string(),
            chain.step_slopes[i].to_string(),
        ]
    });
    csv_string(&TRACE_HEADER, rows)
}

pub fn staircase_csv<T: Scalar>(points: &[(T, T)]) -> String {
    csv_string(&STAIRCASE_HEADER, points.iter().map(|(x, y)| vec![x.to_string(), y.to_string()]))
}

fn to_json_list<T: Scalar>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(Scalar::to_json).collect())
}

pub fn trace_json<T: Scalar>(trace: &BisectionTrace<T>) -> Value {
    json!({
        "rule": trace.rule,
        "measure": trace.measure,
        "levels": trace.levels,
        "d": trace.d.to_json(),
        "c": trace.c.to_json(),
        "slope_floor": trace.slope_floor().to_json(),
        "stationary": trace.stationary,
        "deriv_check": trace.deriv_check,
        "a_seq": to_json_list(&trace.a_seq),
        "b_seq": to_json_list(&trace.b_seq),
        "f_a_seq": to_json_list(&trace.fa_seq),
        "f_b_seq": to_json_list(&trace.fb_seq),
        "slopes": to_json_list(&trace.slopes),
    })
}

pub fn chain_json<T: Scalar>(chain: &EpsilonChain<T>) -> Value {
    json!({
        "kind": chain.kind,
        "m_bound": chain.m_bound.to_json(),
        "epsilon": chain.epsilon.to_json(),
        "rise": chain.rise().to_json(),
        "certified_bound": chain.certified_bound().to_json(),
        "certifies": chain.certifies(),
        "knots": to_json_list(&chain.knots),
        "values": to_json_list(&chain.values),
        "step_slopes": to_json_list(&chain.step_slopes),
    })
}
