//! Text, CSV and JSON renderings of command results.
//!
//! Every float goes through [`g17`], including inside JSON, so all three
//! formats carry the same 17 significant digits.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;
use spinmr::analysis::{MagnitudeCell, SweepRow, ThresholdCell, ThresholdResult};
use spinmr::closed_form::{CrossValidation, Verdict};
use spinmr::format::{g17, sweep_csv_line, SWEEP_CSV_HEADER};

pub const THRESHOLD_CSV_HEADER: &str =
    "two_j,gamma,condition,lambda_th,persists_to_zero,bracket_lo,bracket_hi,iterations";
pub const REPRODUCE_CSV_HEADER: &str =
    "table,two_j,lambda,gamma,condition,computed,reference,deviation,within_tol,persists_to_zero";
pub const FORMULA_CSV_HEADER: &str =
    "formula,reading,two_j,lambda,gamma,closed_value,simulator_value,discrepancy,verdict";

/// Pretty JSON with two-space indentation and `%.17g` floats.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types serialize");
    let mut out = String::new();
    write_json(&mut out, &v, 0);
    out.push('\n');
    out
}

fn write_json(out: &mut String, v: &Value, depth: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), ..) => write!(out, "{u}").unwrap(),
            (None, Some(i), _) => write!(out, "{i}").unwrap(),
            (.., Some(f)) => out.push_str(&g17(f)),
            _ => out.push_str(&n.to_string()),
        },
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_json(out, item, depth + 1);
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
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_json(out, item, depth + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(g17).unwrap_or_default()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_CSV_HEADER}\n");
    for r in rows {
        out.push_str(&sweep_csv_line(r));
        out.push('\n');
    }
    out
}

pub fn sweep_text(rows: &[SweepRow]) -> String {
    let mut out = format!(
        "{:>5} {:>24} {:>24} {:>24} {:>24} {:>24} {:>24}\n",
        "two_j", "lambda", "gamma", "k_lgi", "lgi_violation", "k_wlgi", "k_nsit"
    );
    for r in rows {
        writeln!(
            out,
            "{:>5} {:>24} {:>24} {:>24} {:>24} {:>24} {:>24}",
            r.two_j,
            g17(r.lambda),
            g17(r.gamma),
            g17(r.k_lgi),
            g17(r.lgi_violation),
            g17(r.k_wlgi),
            g17(r.k_nsit)
        )
        .unwrap();
    }
    out
}

pub fn evaluate_text(r: &SweepRow) -> String {
    let mut out = String::new();
    writeln!(out, "two_j          {}", r.two_j).unwrap();
    for (name, v) in [
        ("lambda", r.lambda),
        ("gamma", r.gamma),
        ("k_lgi", r.k_lgi),
        ("lgi_violation", r.lgi_violation),
        ("k_wlgi", r.k_wlgi),
        ("k_nsit", r.k_nsit),
    ] {
        writeln!(out, "{name:<14} {}", g17(v)).unwrap();
    }
    out
}

pub fn threshold_csv(results: &[ThresholdResult]) -> String {
    let mut out = format!("{THRESHOLD_CSV_HEADER}\n");
    for r in results {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.two_j,
            g17(r.gamma),
            r.condition,
            opt(r.lambda_th),
            r.persists_to_zero,
            g17(r.bracket.0),
            g17(r.bracket.1),
            r.iterations
        )
        .unwrap();
    }
    out
}

pub fn threshold_text(results: &[ThresholdResult]) -> String {
    let mut out = String::new();
    for r in results {
        let what = match r.lambda_th {
            None => "no violation for any admissible lambda".to_string(),
            Some(_) if r.persists_to_zero => {
                format!("lambda_th = 0 (violated down to {}, numerically zero below)", g17(r.bracket.1))
            }
            Some(v) => format!("lambda_th = {} in [{}, {}]", g17(v), g17(r.bracket.0), g17(r.bracket.1)),
        };
        writeln!(out, "two_j = {} gamma = {} {:<4} {}", r.two_j, g17(r.gamma), r.condition, what).unwrap();
    }
    out
}

pub fn reproduce_csv(thresholds: &[ThresholdCell], magnitudes: &[(&str, &[MagnitudeCell])]) -> String {
    let mut out = format!("{REPRODUCE_CSV_HEADER}\n");
    for c in thresholds {
        writeln!(
            out,
            "{},{},,{},{},{},{},{},{},{}",
            c.table,
            c.two_j,
            g17(c.gamma),
            c.condition,
            opt(c.computed),
            g17(c.reference),
            g17(c.deviation),
            c.within_tol,
            c.persists_to_zero
        )
        .unwrap();
    }
    for (label, cells) in magnitudes {
        for c in cells.iter() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},",
                label,
                c.two_j,
                g17(c.lambda),
                g17(c.gamma),
                c.condition,
                g17(c.computed),
                g17(c.reference),
                g17(c.deviation),
                c.within_tol
            )
            .unwrap();
        }
    }
    out
}

fn flag(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "OUT OF TOLERANCE"
    }
}

pub fn reproduce_text(thresholds: &[ThresholdCell], magnitudes: &[(&str, &[MagnitudeCell])]) -> String {
    let mut out = String::new();
    let mut table = 0;
    for c in thresholds {
        if c.table != table {
            table = c.table;
            writeln!(out, "table {table}: threshold sharpness (tolerance ±0.01)").unwrap();
            writeln!(
                out,
                "  {:>5} {:>8} {:<5} {:>10} {:>9} {:>10}  status",
                "two_j", "gamma", "cond", "computed", "reference", "deviation"
            )
            .unwrap();
        }
        let computed = match c.computed {
            None => "none".to_string(),
            Some(_) if c.persists_to_zero => "0 (→0)".to_string(),
            Some(v) => format!("{v:.6}"),
        };
        writeln!(
            out,
            "  {:>5} {:>8.6} {:<5} {:>10} {:>9} {:>+10.6}  {}",
            c.two_j,
            c.gamma,
            c.condition.to_string(),
            computed,
            c.reference,
            c.deviation,
            flag(c.within_tol)
        )
        .unwrap();
    }
    for (label, cells) in magnitudes {
        writeln!(out, "table {label}: violation magnitudes (tolerance ±0.001)").unwrap();
        writeln!(
            out,
            "  {:>5} {:>6} {:>10} {:<5} {:>10} {:>9} {:>10}  status",
            "two_j", "lambda", "gamma", "cond", "computed", "reference", "deviation"
        )
        .unwrap();
        for c in cells.iter() {
            writeln!(
                out,
                "  {:>5} {:>6} {:>10.6} {:<5} {:>10.6} {:>9} {:>+10.6}  {}",
                c.two_j,
                c.lambda,
                c.gamma,
                c.condition.to_string(),
                c.computed,
                c.reference,
                c.deviation,
                flag(c.within_tol)
            )
            .unwrap();
        }
    }
    // Only the printed-γ tables count; the exact-γ rerun is for comparison.
    let canonical: Vec<&MagnitudeCell> =
        magnitudes.iter().filter(|(label, _)| *label == "3").flat_map(|(_, c)| c.iter()).collect();
    let total = thresholds.len() + canonical.len();
    let bad = thresholds.iter().filter(|c| !c.within_tol).count()
        + canonical.iter().filter(|c| !c.within_tol).count();
    writeln!(out, "{} of {} cells within tolerance", total - bad, total).unwrap();
    out
}

pub fn formulas_csv(cv: &CrossValidation) -> String {
    let mut out = format!("{FORMULA_CSV_HEADER}\n");
    for r in &cv.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.formula,
            r.reading,
            r.two_j,
            g17(r.lambda),
            g17(r.gamma),
            g17(r.closed_value),
            g17(r.simulator_value),
            g17(r.discrepancy),
            if r.verdict == Verdict::Match { "match" } else { "mismatch" }
        )
        .unwrap();
    }
    out
}

pub fn formulas_text(cv: &CrossValidation) -> String {
    let mut out = String::new();
    writeln!(out, "closed-form cross-validation (tolerance {})", g17(cv.tolerance)).unwrap();
    writeln!(out, "candidate readings, scored on the small-spin grid:").unwrap();
    for r in &cv.readings {
        writeln!(
            out,
            "  {:<15} {:<58} {:>3}/{:<3} max |Δ| = {:.3e}",
            r.formula.to_string(),
            r.reading,
            r.matches,
            r.total,
            r.max_discrepancy
        )
        .unwrap();
    }
    writeln!(out, "selected readings:").unwrap();
    for s in &cv.summary {
        writeln!(
            out,
            "  {:<15} {:<58} {:>3}/{:<3} match, max |Δ| = {:.3e}",
            s.formula.to_string(),
            s.reading,
            s.matches,
            s.total,
            s.max_discrepancy
        )
        .unwrap();
    }
    writeln!(out, "residual diagnosis:").unwrap();
    for d in &cv.diagnoses {
        writeln!(out, "  {:<15} {}", d.formula.to_string(), d.describe()).unwrap();
        let per_spin: Vec<String> =
            d.max_residual_by_two_j.iter().map(|(t, r)| format!("two_j={t}: {r:.3e}")).collect();
        writeln!(out, "  {:<15} max residual by spin: {}", "", per_spin.join(", ")).unwrap();
    }
    writeln!(out, "points:").unwrap();
    for r in &cv.rows {
        writeln!(
            out,
            "  {:<15} two_j={:<3} lambda={:<10.6} gamma={:<10.6} closed={:<22} simulator={:<22} |Δ|={:.3e} {}",
            r.formula.to_string(),
            r.two_j,
            r.lambda,
            r.gamma,
            g17(r.closed_value),
            g17(r.simulator_value),
            r.discrepancy,
            if r.verdict == Verdict::Match { "match" } else { "MISMATCH" }
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_uses_g17_floats() {
        #[derive(Serialize)]
        struct S {
            a: f64,
            b: u32,
            c: Option<f64>,
            d: Vec<f64>,
            e: &'static str,
        }
        let s = to_json(&S { a: 0.1, b: 3, c: None, d: vec![], e: "x\"y" });
        assert_eq!(s, "{\n  \"a\": 0.10000000000000001,\n  \"b\": 3,\n  \"c\": null,\n  \"d\": [],\n  \"e\": \"x\\\"y\"\n}\n");
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"].as_f64(), Some(0.1));
    }
}
