use std::fmt::Write as _;
use std::path::Path;

use super::{ErrorRecord, RunFlag};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "method,dim,N,alpha,tau,err_L2Hm1,wall_seconds,flag";

/// One header line plus one row per record; floats carry 17 significant
/// digits so values round-trip exactly.
pub fn to_csv_string(records: &[ErrorRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.method, r.dim, r.n, r.alpha, r.tau, r.err0, r.wall_seconds, r.flag
        );
    }
    out
}

pub fn write_csv(path: &Path, records: &[ErrorRecord]) -> Result<()> {
    std::fs::write(path, to_csv_string(records))?;
    Ok(())
}

fn csv_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Csv {
        line,
        msg: msg.into(),
    }
}

/// Parses the exact schema written by [`to_csv_string`]. Blank lines are
/// skipped; at least one data row is required.
pub fn parse_csv(text: &str) -> Result<Vec<ErrorRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        Some((_, h)) => {
            return Err(csv_err(
                1,
                format!("expected header '{CSV_HEADER}', got '{}'", h.trim()),
            ))
        }
        None => return Err(csv_err(1, "empty file")),
    }
    let mut records = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 8 {
            return Err(csv_err(
                lineno,
                format!("expected 8 columns, got {}", cols.len()),
            ));
        }
        let float = |j: usize, name: &str| {
            cols[j]
                .parse::<f64>()
                .map_err(|_| csv_err(lineno, format!("bad {name} '{}'", cols[j])))
        };
        let int = |j: usize, name: &str| {
            cols[j]
                .parse::<usize>()
                .map_err(|_| csv_err(lineno, format!("bad {name} '{}'", cols[j])))
        };
        if cols[0].is_empty() {
            return Err(csv_err(lineno, "empty method"));
        }
        let flag = match cols[7] {
            "ok" => RunFlag::Ok,
            "blowup" => RunFlag::Blowup,
            other => return Err(csv_err(lineno, format!("bad flag '{other}'"))),
        };
        let rec = ErrorRecord {
            method: cols[0].to_string(),
            dim: int(1, "dim")?,
            n: int(2, "N")?,
            alpha: float(3, "alpha")?,
            tau: float(4, "tau")?,
            err0: float(5, "err_L2Hm1")?,
            wall_seconds: float(6, "wall_seconds")?,
            flag,
        };
        if flag == RunFlag::Ok && !(rec.err0 >= 0.0 && rec.err0.is_finite()) {
            return Err(csv_err(lineno, "error must be finite and non-negative"));
        }
        if rec.tau.is_nan() || rec.tau <= 0.0 {
            return Err(csv_err(lineno, "tau must be positive"));
        }
        records.push(rec);
    }
    if records.is_empty() {
        return Err(csv_err(2, "no data rows"));
    }
    Ok(records)
}

pub fn read_csv(path: &Path) -> Result<Vec<ErrorRecord>> {
    parse_csv(&std::fs::read_to_string(path)?)
}
