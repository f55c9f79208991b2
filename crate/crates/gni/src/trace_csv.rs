//! Per-run trace files: `iter,V,gradV_norm,gradf_norm,gradf_p1..gradf_pN,wall_ms`.
//!
//! Floats are written with the shortest representation that parses back to
//! the same value.

use std::fmt::Write as _;
use std::path::Path;

use gni_core::solvers::TraceRecord;

use crate::error::{Error, IoContext, Result};

pub fn header(players: usize) -> String {
    let mut h = String::from("iter,V,gradV_norm,gradf_norm");
    for p in 1..=players {
        write!(h, ",gradf_p{p}").unwrap();
    }
    h.push_str(",wall_ms\n");
    h
}

pub fn render(records: &[TraceRecord], players: usize) -> String {
    let mut out = header(players);
    for r in records {
        debug_assert_eq!(r.per_player.len(), players);
        write!(out, "{},{},{},{}", r.iter, r.merit, r.merit_grad_norm, r.grad_norm).unwrap();
        for v in &r.per_player {
            write!(out, ",{v}").unwrap();
        }
        writeln!(out, ",{}", r.wall_ms).unwrap();
    }
    out
}

pub fn emit_csv(records: &[TraceRecord], players: usize, path: &Path) -> Result<()> {
    std::fs::write(path, render(records, players)).at(path)
}

pub fn parse(text: &str, path: &Path) -> Result<Vec<TraceRecord>> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines();
    let head = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
    let cols: Vec<&str> = head.split(',').collect();
    let players = cols.len().checked_sub(5).ok_or_else(|| err(1, "too few columns".into()))?;
    if head != header(players).trim_end() {
        return Err(err(1, format!("unexpected header '{head}'")));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols.len() {
                return Err(err(i + 2, format!("expected {} fields, found {}", cols.len(), fields.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| err(i + 2, format!("bad number '{s}'")));
            Ok(TraceRecord {
                iter: fields[0].parse().map_err(|_| err(i + 2, format!("bad iteration '{}'", fields[0])))?,
                merit: num(fields[1])?,
                merit_grad_norm: num(fields[2])?,
                grad_norm: num(fields[3])?,
                per_player: fields[4..4 + players].iter().map(|s| num(s)).collect::<Result<_>>()?,
                wall_ms: num(fields[4 + players])?,
            })
        })
        .collect()
}

pub fn read_csv(path: &Path) -> Result<Vec<TraceRecord>> {
    let text = std::fs::read_to_string(path).at(path)?;
    parse(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(iter: usize, v: f64) -> TraceRecord {
        TraceRecord {
            iter,
            merit: v,
            merit_grad_norm: v * 3.0,
            grad_norm: 0.1 + v,
            per_player: vec![v, 1.0 / 3.0],
            wall_ms: 0.0,
        }
    }

    #[test]
    fn empty_trace_is_header_only() {
        assert_eq!(render(&[], 2), "iter,V,gradV_norm,gradf_norm,gradf_p1,gradf_p2,wall_ms\n");
    }

    #[test]
    fn round_trips_exactly() {
        let recs = vec![record(0, 1e-300), record(1, 0.1 + 0.2), record(2, f64::NAN), record(3, f64::INFINITY)];
        let back = parse(&render(&recs, 2), Path::new("t.csv")).unwrap();
        assert_eq!(back.len(), recs.len());
        for (a, b) in recs.iter().zip(&back) {
            assert_eq!(a.iter, b.iter);
            assert_eq!(a.merit.to_bits(), b.merit.to_bits());
            assert_eq!(a.per_player[1].to_bits(), b.per_player[1].to_bits());
        }
    }

    #[test]
    fn reports_bad_rows() {
        let text = "iter,V,gradV_norm,gradf_norm,gradf_p1,wall_ms\n0,1,2,3,x,0\n";
        let e = parse(text, Path::new("t.csv")).unwrap_err().to_string();
        assert!(e.contains("t.csv:2") && e.contains("bad number"), "{e}");
        assert!(parse("iter,V\n", Path::new("t.csv")).is_err());
    }
}
