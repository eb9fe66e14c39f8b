//! Minimal CSV emission and the response-file reader.
//!
//! Reals are written in their shortest round-trip form so that files re-read
//! bit-exactly and re-runs are byte-identical.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_real(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// A CSV document with leading `#` comment lines.
#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            comments: Vec::new(),
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) -> &mut Self {
        self.comments.push(line.into());
        self
    }

    pub fn push_reals(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&x| fmt_real(x)).collect());
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }
}

/// Reads a two-column `t,r` table on a uniform grid starting at `t = 0`.
///
/// Returns the spacing and the samples.
pub fn parse_response_csv(text: &str) -> Result<(f64, Vec<f64>)> {
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut header_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols != ["t", "r"] {
                return Err(Error::Parse { line: line_no, msg: "expected header 't,r'".into() });
            }
            header_seen = true;
            continue;
        }
        let mut it = line.split(',');
        let (Some(t), Some(r), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse { line: line_no, msg: "expected two columns".into() });
        };
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse { line: line_no, msg: format!("invalid real '{}'", s.trim()) })
        };
        times.push(parse(t)?);
        values.push(parse(r)?);
    }
    if !header_seen {
        return Err(Error::Parse { line: 0, msg: "missing header".into() });
    }
    if times.len() < 2 {
        return Err(Error::Parse { line: 0, msg: "need at least two samples".into() });
    }
    if times[0] != 0.0 {
        return Err(Error::GridMismatch("response must start at t=0".into()));
    }
    let n = times.len() - 1;
    let dt = times[n] / n as f64;
    if !(dt > 0.0) {
        return Err(Error::GridMismatch("non-increasing times".into()));
    }
    for (j, &t) in times.iter().enumerate() {
        if (t - j as f64 * dt).abs() > 1e-9 * times[n].max(1.0) {
            return Err(Error::GridMismatch(format!("non-uniform spacing at sample {j}")));
        }
    }
    Ok((dt, values))
}
