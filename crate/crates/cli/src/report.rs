//! JSON renderings of library reports.

use num_rational::Ratio;
use serde_json::{json, Value};
use sgc_core::bounds::BoundsReport;
use sgc_core::keyspace::ReceiverSet;
use sgc_core::oracle::OracleReport;
use sgc_core::scheme::VerifyReport;

/// Integers as JSON numbers, proper fractions as `"5/3"` strings.
pub fn ratio(r: Ratio<i64>) -> Value {
    if r.is_integer() {
        json!(r.to_integer())
    } else {
        json!(fraction(r))
    }
}

/// `5`, or `5/3` for a proper fraction.
pub fn fraction(r: Ratio<i64>) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn set(u: ReceiverSet) -> Value {
    json!(u.iter().collect::<Vec<_>>())
}

pub fn bounds(report: &BoundsReport) -> Value {
    let witness = report.bw_lower.witness.as_ref().map(|w| {
        json!({
            "eavesdropper": w.eavesdropper,
            "group": set(w.group),
            "given": w.given.iter().map(|&u| set(u)).collect::<Vec<_>>(),
        })
    });
    json!({
        "rate_upper": report.rate_upper,
        "C": report.exact.as_ref().map(|e| ratio(e.c)),
        "beta_star": report.exact.as_ref().and_then(|e| e.beta_star).map(ratio),
        "setting": report.exact.as_ref().map(|e| e.setting.to_string()),
        "rate_for_bw": ratio(report.rate_for_bw),
        "bw_lower": ratio(report.bw_lower.value),
        "bw_lower_heuristic": report.bw_lower.heuristic,
        "bw_witness": witness,
        "gap": report.gap,
    })
}

fn oracle(o: &OracleReport) -> Value {
    json!({
        "states": o.states.to_string(),
        "decoding": o.decoding.iter().map(|d| json!({
            "receiver": d.receiver,
            "residual_bits": d.residual_bits,
            "decoder_ok": d.decoder_ok,
        })).collect::<Vec<_>>(),
        "leakage_bits": o.leakage_bits.iter().map(|&(e, b)| json!({
            "receiver": e,
            "bits": b,
        })).collect::<Vec<_>>(),
        "passed": o.passed(),
    })
}

/// `skipped` carries the reason when an oracle run was requested but not
/// performed.
pub fn verify(p: u64, report: &VerifyReport, skipped: Option<&str>) -> Value {
    json!({
        "p": p,
        "correctness": report.correctness.iter().map(|&(k, ok)| json!({
            "receiver": k,
            "decodes": ok,
        })).collect::<Vec<_>>(),
        "leakage": report.leakage.iter().map(|&(e, l)| json!({
            "receiver": e,
            "symbols": l,
        })).collect::<Vec<_>>(),
        "oracle": report.oracle.as_ref().map(oracle),
        "oracle_skipped": skipped,
        "failing_receivers": report.failing_receivers(),
        "passed": report.passed() && report.oracle.as_ref().is_none_or(OracleReport::passed),
    })
}

/// Pretty JSON that keeps arrays of scalars on one line, so matrices read
/// row by row.
pub fn pretty(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            let parts: Vec<String> = items
                .iter()
                .map(|x| serde_json::to_string(x).expect("json value"))
                .collect();
            out.push('[');
            out.push_str(&parts.join(", "));
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(item, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&serde_json::to_string(k).expect("string key"));
                out.push_str(": ");
                write_value(item, depth + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        scalar => out.push_str(&serde_json::to_string(scalar).expect("json value")),
    }
}
