use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use lattice_green::checks::Check;
use lattice_green::EstimateKind;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorDescriptor {
    pub kind: EstimateKind,
    pub bound: f64,
}

/// One evaluated Green's function value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub domain: String,
    pub x: Vec<i64>,
    pub y: Vec<i64>,
    pub value: f64,
    pub error: ErrorDescriptor,
    pub method: &'static str,
    pub wall_time_s: f64,
}

const CSV_HEADER: [&str; 8] = [
    "domain",
    "x",
    "y",
    "value",
    "error_kind",
    "error_bound",
    "method",
    "wall_time_s",
];

fn join(c: &[i64]) -> String {
    c.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

/// Shortest representation that parses back to the same value.
fn f64_field(v: f64) -> String {
    format!("{v:?}")
}

pub fn open(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Writes `records` as CSV with a header (also when empty) or as JSON: a
/// single object when `single`, otherwise an array.
pub fn write_records(
    mut w: impl Write,
    records: &[Record],
    format: Format,
    single: bool,
) -> io::Result<()> {
    match format {
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            csv.write_record(CSV_HEADER)?;
            for r in records {
                csv.write_record([
                    r.domain.clone(),
                    join(&r.x),
                    join(&r.y),
                    f64_field(r.value),
                    r.error.kind.to_string(),
                    f64_field(r.error.bound),
                    r.method.to_string(),
                    f64_field(r.wall_time_s),
                ])?;
            }
            csv.flush()?;
        }
        Format::Json => {
            if single && records.len() == 1 {
                serde_json::to_writer_pretty(&mut w, &records[0])?;
            } else {
                serde_json::to_writer_pretty(&mut w, records)?;
            }
            writeln!(w)?;
        }
    }
    w.flush()
}

pub fn write_checks(mut w: impl Write, checks: &[Check], format: Option<Format>) -> io::Result<()> {
    match format {
        None => {
            for c in checks {
                writeln!(w, "{c}")?;
            }
        }
        Some(Format::Csv) => {
            let mut csv = csv::Writer::from_writer(&mut w);
            csv.write_record(["check", "passed", "detail"])?;
            for c in checks {
                csv.write_record([
                    c.name.as_str(),
                    if c.passed { "true" } else { "false" },
                    &c.detail,
                ])?;
            }
            csv.flush()?;
        }
        Some(Format::Json) => {
            #[derive(Serialize)]
            struct Row<'a> {
                check: &'a str,
                passed: bool,
                detail: &'a str,
            }
            let rows: Vec<Row> = checks
                .iter()
                .map(|c| Row {
                    check: &c.name,
                    passed: c.passed,
                    detail: &c.detail,
                })
                .collect();
            serde_json::to_writer_pretty(&mut w, &rows)?;
            writeln!(w)?;
        }
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> Record {
        Record {
            domain: "half(d=3)".into(),
            x: vec![0, 1, -2],
            y: vec![0, 0, 0],
            value: 0.1 + 0.2,
            error: ErrorDescriptor {
                kind: EstimateKind::Quadrature,
                bound: 1e-11,
            },
            method: "formula",
            wall_time_s: 0.5,
        }
    }

    #[test]
    fn csv_flattens_error() {
        let mut buf = Vec::new();
        write_records(&mut buf, &[record()], Format::Csv, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "half(d=3),\"0,1,-2\",\"0,0,0\",0.30000000000000004,quadrature,1e-11,formula,0.5"
        );
    }

    #[test]
    fn json_nests_error() {
        let mut buf = Vec::new();
        write_records(&mut buf, &[record()], Format::Json, true).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["error"]["kind"], "quadrature");
        assert_eq!(v["value"].as_f64(), Some(0.1 + 0.2));
        assert_eq!(v["x"], serde_json::json!([0, 1, -2]));
    }

    #[test]
    fn empty_table_has_header() {
        let mut buf = Vec::new();
        write_records(&mut buf, &[], Format::Csv, false).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1);
        let mut buf = Vec::new();
        write_records(&mut buf, &[], Format::Json, false).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim(), "[]");
    }
}
