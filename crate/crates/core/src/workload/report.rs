use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use super::BenchResult;

pub const CSV_HEADER: [&str; 6] = ["workload", "variant", "threads", "ops_per_sec", "failed_addedge", "false_positives"];

/// One parsed CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub workload: String,
    pub variant: String,
    pub threads: usize,
    pub ops_per_sec: f64,
    pub failed_addedge: u64,
    pub false_positives: u64,
}

impl From<&BenchResult> for CsvRow {
    fn from(r: &BenchResult) -> Self {
        CsvRow {
            workload: r.workload.clone(),
            variant: r.variant.clone(),
            threads: r.threads,
            ops_per_sec: r.ops_per_sec,
            failed_addedge: r.failed_add_edge,
            false_positives: r.false_positives,
        }
    }
}

/// Writes the header and one row per result.
pub fn emit_csv<W: Write>(out: W, results: &[BenchResult]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in results {
        w.write_record([
            r.workload.clone(),
            r.variant.clone(),
            r.threads.to_string(),
            format!("{:.3}", r.ops_per_sec),
            r.failed_add_edge.to_string(),
            r.false_positives.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(path: &Path, results: &[BenchResult]) -> csv::Result<()> {
    emit_csv(File::create(path)?, results)
}

pub fn parse_csv<R: Read>(input: R) -> csv::Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(io::Error::new(io::ErrorKind::InvalidData, format!("unexpected header {header:?}")).into());
    }
    let bad = |what: &str, v: &str| -> csv::Error { io::Error::new(io::ErrorKind::InvalidData, format!("bad {what} {v:?}")).into() };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        rows.push(CsvRow {
            workload: field(0).to_string(),
            variant: field(1).to_string(),
            threads: field(2).parse().map_err(|_| bad("threads", field(2)))?,
            ops_per_sec: field(3).parse().map_err(|_| bad("ops_per_sec", field(3)))?,
            failed_addedge: field(4).parse().map_err(|_| bad("failed_addedge", field(4)))?,
            false_positives: field(5).parse().map_err(|_| bad("false_positives", field(5)))?,
        });
    }
    Ok(rows)
}
