//! Ledger export as NDJSON and CSV.
//!
//! Every number is written with 17 significant digits (`{:.16e}`), which
//! round-trips any f64 exactly. Non-finite values become `null` in NDJSON
//! and `NaN`/`inf` in CSV.

use std::io::{self, BufRead, Write};

use super::{DiagnosticsError, DiagnosticsRecord};

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_number(x: f64) -> String {
    if x.is_finite() {
        format_number(x)
    } else {
        "null".to_string()
    }
}

/// One record as a single JSON object line (no trailing newline).
pub fn record_to_json(r: &DiagnosticsRecord) -> String {
    let vals = r.values();
    let mut out = String::from("{");
    for (i, name) in DiagnosticsRecord::COLUMNS.iter().enumerate() {
        if name.starts_with("lemma22_") {
            if name.ends_with('1') {
                let terms: Vec<String> = r.lemma22_terms.iter().map(|v| json_number(*v)).collect();
                out.push_str(&format!("\"lemma22_terms\":[{}],", terms.join(",")));
            }
            continue;
        }
        out.push_str(&format!("\"{name}\":{},", json_number(vals[i])));
    }
    out.pop();
    out.push('}');
    out
}

pub fn write_ndjson<W: Write>(mut w: W, records: &[DiagnosticsRecord]) -> io::Result<()> {
    for r in records {
        writeln!(w, "{}", record_to_json(r))?;
    }
    Ok(())
}

pub fn csv_header() -> String {
    DiagnosticsRecord::COLUMNS.join(",")
}

pub fn record_to_csv(r: &DiagnosticsRecord) -> String {
    r.values().iter().map(|v| format_number(*v)).collect::<Vec<_>>().join(",")
}

pub fn write_csv<W: Write>(mut w: W, records: &[DiagnosticsRecord]) -> io::Result<()> {
    writeln!(w, "{}", csv_header())?;
    for r in records {
        writeln!(w, "{}", record_to_csv(r))?;
    }
    Ok(())
}

pub fn read_ndjson<R: BufRead>(r: R) -> Result<Vec<DiagnosticsRecord>, DiagnosticsError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line)
            .map_err(|e| DiagnosticsError::Parse(format!("ledger line {}: {e}", i + 1)))?;
        out.push(rec);
    }
    Ok(out)
}
