//! Structured export of sweep records (JSON and CSV).

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Result, Sp2Error};
use crate::grid::ReachRecord;
use crate::pulse::OptimStatus;

/// Fixed CSV column order.
pub const CSV_HEADER: [&str; 9] = [
    "c", "T", "theta", "z", "phi", "status", "epsilon", "seed", "wall_time",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ExportFormat {
    type Err = Sp2Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ExportFormat::Json),
            "csv" => Ok(ExportFormat::Csv),
            other => Err(Sp2Error::Domain(format!("unknown format '{other}'"))),
        }
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Sp2Error {
    Sp2Error::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn export(records: &[ReachRecord], path: &Path, format: ExportFormat) -> Result<()> {
    match format {
        ExportFormat::Json => export_json(records, path),
        ExportFormat::Csv => export_csv(records, path),
    }
}

pub fn export_json(records: &[ReachRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, records).map_err(|e| Sp2Error::Serde(e.to_string()))?;
    w.write_all(b"\n").map_err(|e| io_err(path, e))?;
    Ok(())
}

pub fn import_json(path: &Path) -> Result<Vec<ReachRecord>> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| Sp2Error::Serde(e.to_string()))
}

pub fn export_csv(records: &[ReachRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(CSV_HEADER)
        .map_err(|e| Sp2Error::Serde(e.to_string()))?;
    for r in records {
        w.write_record([
            format_float(r.c),
            format_float(r.t),
            format_float(r.theta),
            format_float(r.z),
            format_float(r.phi),
            r.status.to_string(),
            format_float(r.epsilon),
            r.seed.to_string(),
            format_float(r.wall_time),
        ])
        .map_err(|e| Sp2Error::Serde(e.to_string()))?;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

/// Shortest round-trippable f64 representation.
fn format_float(v: f64) -> String {
    let mut buf = ryu_like(v);
    if !buf.contains('.') && !buf.contains('e') && !buf.contains("inf") && !buf.contains("NaN") {
        buf.push_str(".0");
    }
    buf
}

fn ryu_like(v: f64) -> String {
    // {:?} on f64 prints the shortest representation that parses back exactly
    format!("{v:?}")
}

pub fn import_csv(path: &Path) -> Result<Vec<ReachRecord>> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::Reader::from_reader(BufReader::new(file));
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Sp2Error::Serde(e.to_string()))?;
        if row.len() != CSV_HEADER.len() {
            return Err(Sp2Error::Serde(format!(
                "expected {} columns, got {}",
                CSV_HEADER.len(),
                row.len()
            )));
        }
        let f = |i: usize| -> Result<f64> {
            row[i]
                .parse()
                .map_err(|e| Sp2Error::Serde(format!("column {}: {e}", CSV_HEADER[i])))
        };
        let status = match &row[5] {
            "reached" => OptimStatus::Reached,
            "local_minimum" => OptimStatus::LocalMinimum,
            "time_limit" => OptimStatus::TimeLimit,
            other => return Err(Sp2Error::Serde(format!("unknown status '{other}'"))),
        };
        out.push(ReachRecord {
            c: f(0)?,
            t: f(1)?,
            theta: f(2)?,
            z: f(3)?,
            phi: f(4)?,
            status,
            epsilon: f(6)?,
            seed: row[7]
                .parse()
                .map_err(|e| Sp2Error::Serde(format!("column seed: {e}")))?,
            wall_time: f(8)?,
            pulse: None,
        });
    }
    Ok(out)
}
