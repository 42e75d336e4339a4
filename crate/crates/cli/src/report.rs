//! Report assembly and the three output formats.

use std::time::Duration;

use marc_core::distopt::{OptResult, ParamChain};
use marc_core::feasibility::ConditionReport;
use serde_json::{json, Map, Value};

pub const TOOL: &str = "marc";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Bumped whenever a CSV header changes.
pub const CSV_VERSION: u32 = 1;
pub const CONDITION_HEADER: [&str; 7] =
    ["scheme", "id", "lhs_bits", "rhs_bits", "margin_bits", "satisfied", "boundary"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Structured,
    Csv,
}

/// Everything a command produces. Timing goes to the text form only, so the
/// structured form of a repeated run is byte-identical.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: Value,
    pub digest: String,
    pub result: Value,
    pub text: String,
    pub csv: String,
    pub elapsed: Duration,
}

/// `-0.0` becomes `0.0`; the sign of a zero margin carries no information.
pub fn num(x: f64) -> Value {
    json!(if x == 0.0 { 0.0 } else { x })
}

/// Fixed 12-decimal rendering for tables.
pub fn fixed(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// Up to five decimals without trailing zeros, e.g. `1.58496` or `1.5`.
pub fn short(x: f64) -> String {
    let s = format!("{x:.5}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

pub fn emit(report: &Report, format: Format) -> String {
    match format {
        Format::Structured => {
            let doc = json!({
                "tool": { "name": TOOL, "version": VERSION },
                "command": report.command,
                "scenario_digest": report.digest,
                "result": report.result,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => report.csv.clone(),
        Format::Text => {
            let name = report.command.get("name").and_then(Value::as_str).unwrap_or("?");
            let mut s =
                format!("{TOOL} {VERSION}  {name}  scenario {}\n\n", &report.digest[..16.min(report.digest.len())]);
            s.push_str(&report.text);
            if !s.ends_with('\n') {
                s.push('\n');
            }
            s.push_str(&format!("\nelapsed {:.3} s\n", report.elapsed.as_secs_f64()));
            s
        }
    }
}

pub fn conditions_json(r: &ConditionReport) -> Value {
    let conditions: Vec<Value> = r
        .conditions
        .iter()
        .map(|c| {
            json!({
                "id": c.id,
                "lhs_bits": num(c.lhs),
                "rhs_bits": num(c.rhs),
                "margin_bits": num(c.margin),
                "satisfied": c.satisfied,
                "boundary": c.boundary,
            })
        })
        .collect();
    json!({
        "scheme": r.scheme.name(),
        "overall": r.overall,
        "min_margin_bits": num(r.min_margin),
        "conditions": conditions,
        "notes": r.notes,
    })
}

/// Aligned table, one line per condition in evaluation order.
pub fn conditions_text(r: &ConditionReport) -> String {
    let mut rows = vec![["id", "lhs_bits", "rhs_bits", "margin_bits", "satisfied", "boundary"].map(String::from)];
    for c in &r.conditions {
        rows.push([
            c.id.clone(),
            fixed(c.lhs),
            fixed(c.rhs),
            fixed(c.margin),
            c.satisfied.to_string(),
            c.boundary.to_string(),
        ]);
    }
    let widths: Vec<usize> = (0..6).map(|i| rows.iter().map(|r| r[i].len()).max().unwrap_or(0)).collect();
    let mut s = format!("scheme {}  overall {}  min margin {} bits\n", r.scheme.name(), r.overall, fixed(r.min_margin));
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(i, c)| if i == 0 { format!("{c:<w$}", w = widths[i]) } else { format!("{c:>w$}", w = widths[i]) })
            .collect();
        s.push_str(cells.join("  ").trim_end());
        s.push('\n');
    }
    for n in &r.notes {
        s.push_str(&format!("note: {n}\n"));
    }
    s
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}

/// Full-precision shortest round-trip rendering.
pub fn exact(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:?}")
}

pub fn conditions_csv(reports: &[&ConditionReport]) -> String {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .flat_map(|r| {
            r.conditions.iter().map(|c| {
                vec![
                    r.scheme.name().to_string(),
                    c.id.clone(),
                    exact(c.lhs),
                    exact(c.rhs),
                    exact(c.margin),
                    c.satisfied.to_string(),
                    c.boundary.to_string(),
                ]
            })
        })
        .collect();
    csv_string(&CONDITION_HEADER, &rows)
}

pub fn quantities_csv(quantities: &[(String, f64)]) -> String {
    let rows: Vec<Vec<String>> = quantities.iter().map(|(k, v)| vec![k.clone(), exact(*v)]).collect();
    csv_string(&["quantity", "value_bits"], &rows)
}

pub fn quantities_text(quantities: &[(String, f64)]) -> String {
    let w = quantities.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    quantities.iter().map(|(k, v)| format!("{k:<w$}  {}\n", fixed(*v))).collect()
}

pub fn quantities_json(quantities: &[(String, f64)]) -> Value {
    let mut m = Map::new();
    for (k, v) in quantities {
        m.insert(k.clone(), num(*v));
    }
    Value::Object(m)
}

pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    csv_string(header, rows)
}

pub fn chain_json(c: &ParamChain) -> Value {
    let blocks: Vec<Vec<Value>> = c.blocks.iter().map(|b| b.iter().map(|&x| num(x)).collect()).collect();
    json!({ "family": c.family.name(), "blocks": blocks })
}

pub fn opt_json(r: &OptResult, method: &str) -> Value {
    json!({
        "method": method,
        "best_value_bits": num(r.best_value),
        "best_chain": chain_json(&r.best),
        "trace": r.trace.iter().map(|&v| num(v)).collect::<Vec<_>>(),
        "envelope": r.envelope().iter().map(|&v| num(v)).collect::<Vec<_>>(),
        "evaluations": r.evaluations,
    })
}
