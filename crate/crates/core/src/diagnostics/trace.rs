use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CostEstimate;
use crate::driver::{IterationRecord, SolveOutcome, SolveStatus, Variant};
use crate::error::{Error, Result};
use crate::oracle::OracleMode;

/// Column names of the trace CSV, in order.
pub const TRACE_COLUMNS: [&str; 12] = [
    "iter",
    "mu",
    "rp_norm",
    "rd_norm",
    "alpha",
    "eps_q",
    "s_nu_inf",
    "kappa_Y",
    "kappa_Zhat",
    "kappa_MNES",
    "partition_size_1",
    "wall_time_us",
];

/// Writes one header line and one line per record.
pub fn write_trace<W: Write>(out: W, records: &[IterationRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(TRACE_COLUMNS)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_trace<R: Read>(input: R) -> Result<Vec<IterationRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != TRACE_COLUMNS {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected trace header {header:?}"),
        });
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn save_trace(path: &Path, records: &[IterationRecord]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_trace(file, records)
}

pub fn load_trace(path: &Path) -> Result<Vec<IterationRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_trace(file)
}

/// End-of-run report written as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub problem_id: String,
    pub mode: OracleMode,
    pub variant: Variant,
    pub seed: u64,
    pub status: SolveStatus,
    pub iterations: usize,
    pub final_mu: f64,
    pub final_infeasibility: f64,
    /// Smallest certificate margin seen; negative values are violations.
    pub worst_margin: Option<f64>,
    pub margin_violations: usize,
    pub omega_star: f64,
    pub gamma2: f64,
    pub message: Option<String>,
    /// Query-cost estimate for the run, when its inputs are valid.
    pub query_cost: Option<CostEstimate>,
}

impl SolveSummary {
    pub fn new(problem_id: impl Into<String>, mode: OracleMode, variant: Variant, seed: u64, out: &SolveOutcome) -> Self {
        Self {
            problem_id: problem_id.into(),
            mode,
            variant,
            seed,
            status: out.status,
            iterations: out.records.len(),
            final_mu: out.final_mu,
            final_infeasibility: out.final_infeasibility,
            worst_margin: out.worst_margin,
            margin_violations: out.margin_violations,
            omega_star: out.omega_star,
            gamma2: out.gamma2,
            message: out.message.clone(),
            query_cost: None,
        }
    }
}

/// Writes `value` as pretty JSON followed by a newline.
pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer_pretty(&mut file, value)?;
    writeln!(file).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(iter: usize, kappa_zhat: f64) -> IterationRecord {
        IterationRecord {
            iter,
            mu: 0.1 / (iter + 1) as f64,
            rp_norm: 1.0 / 3.0,
            rd_norm: 2e-300,
            alpha: 0.999_9,
            eps_q: 0.0,
            s_nu_inf: 5e-17,
            kappa_y: 1.234_567_890_123e7,
            kappa_zhat,
            kappa_mnes: f64::MAX,
            partition_size_1: iter % 3,
            wall_time_us: 42,
        }
    }

    fn same(a: &IterationRecord, b: &IterationRecord) -> bool {
        let f = |r: &IterationRecord| {
            [r.mu, r.rp_norm, r.rd_norm, r.alpha, r.eps_q, r.s_nu_inf, r.kappa_y, r.kappa_zhat, r.kappa_mnes]
                .map(f64::to_bits)
        };
        f(a) == f(b) && a.iter == b.iter && a.partition_size_1 == b.partition_size_1 && a.wall_time_us == b.wall_time_us
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let rows = vec![record(0, f64::NAN), record(1, 3.5), record(2, f64::INFINITY)];
        let mut buf = Vec::new();
        write_trace(&mut buf, &rows).unwrap();
        let back = read_trace(buf.as_slice()).unwrap();
        assert_eq!(back.len(), rows.len());
        assert!(rows.iter().zip(&back).all(|(a, b)| same(a, b)));
    }

    #[test]
    fn header_is_written_once_with_fixed_columns() {
        let mut buf = Vec::new();
        write_trace(&mut buf, &[record(0, 1.0), record(1, 2.0)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], TRACE_COLUMNS.join(","));
        assert_eq!(lines.len(), 3);
        assert!(lines.iter().all(|l| l.split(',').count() == 12));

        let mut empty = Vec::new();
        write_trace(&mut empty, &[]).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap().lines().count(), 1);
    }

    #[test]
    fn wrong_header_is_rejected() {
        let err = read_trace("iter,mu\n0,1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
