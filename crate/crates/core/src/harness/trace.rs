//! Fixed-schema CSV traces.
//!
//! Header: `k,time_s,f,e_k,f_k,alpha_k,eps_k,delta_l,u_norm`. Fields that
//! do not apply (terminal rows, non-level methods) are left empty.

use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

pub const CSV_HEADER: &str = "k,time_s,f,e_k,f_k,alpha_k,eps_k,delta_l,u_norm";

/// One trace row including the progress metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub time_s: f64,
    pub f: f64,
    pub e: f64,
    pub f_rel: f64,
    pub alpha: Option<f64>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub u_norm: Option<f64>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.17e}")).unwrap_or_default()
}

/// Renders the trace as CSV text.
pub fn to_csv(rows: &[TraceRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.6e},{:.17e},{:.17e},{:.17e},{},{},{},{}",
            r.k,
            r.time_s,
            r.f,
            r.e,
            r.f_rel,
            fmt_opt(r.alpha),
            fmt_opt(r.eps),
            fmt_opt(r.delta),
            fmt_opt(r.u_norm),
        );
    }
    out
}

pub fn write_csv(path: &Path, rows: &[TraceRow]) -> Result<()> {
    std::fs::write(path, to_csv(rows))?;
    Ok(())
}

/// Parses a trace written by [`to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(Error::Format {
                path: "<csv>".into(),
                reason: format!("unexpected header {other:?}"),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Format {
                path: "<csv>".into(),
                reason: format!("row {i} has {} fields, expected 9", fields.len()),
            });
        }
        let req = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Format {
                path: "<csv>".into(),
                reason: format!("bad number '{s}' in row {i}"),
            })
        };
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                req(s).map(Some)
            }
        };
        rows.push(TraceRow {
            k: fields[0].parse().map_err(|_| Error::Format {
                path: "<csv>".into(),
                reason: format!("bad index '{}' in row {i}", fields[0]),
            })?,
            time_s: req(fields[1])?,
            f: req(fields[2])?,
            e: req(fields[3])?,
            f_rel: req(fields[4])?,
            alpha: opt(fields[5])?,
            eps: opt(fields[6])?,
            delta: opt(fields[7])?,
            u_norm: opt(fields[8])?,
        });
    }
    Ok(rows)
}

/// Writes a human-readable run summary next to the CSV.
pub fn summary_text(s: &super::Summary) -> String {
    let cross = |c: &Option<super::Crossing>| match c {
        Some(c) => format!("k={} t={:.3}s", c.k, c.time_s),
        None => "not reached".into(),
    };
    format!(
        "method {}\niterations {}\ntotal_time_s {:.3}\nf_best {:.12e}\nf_rel_best {:.6e}\ne_final {:.6e}\ne<=1e-2 {}\ne<=1e-3 {}\nmetrics {}\n",
        s.method,
        s.iterations,
        s.total_time_s,
        s.f_best,
        s.f_rel_best,
        s.e_final,
        cross(&s.cross_1e2),
        cross(&s.cross_1e3),
        if s.absolute_metrics { "absolute (reference norm or value too small)" } else { "relative" },
    )
}
