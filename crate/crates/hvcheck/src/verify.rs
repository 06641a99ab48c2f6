//! Per-prime comparison of point counts against the newform eigenvalues.

use std::io::Write;

use hvcheck_core::pointcount::{s_identity_check, trace_h3, CountResult, Parameter};
use hvcheck_core::primes_up_to;
use hvcheck_core::zeta::{check_modularity, EulerSplit};
use thiserror::Error;

use crate::datasource::{eigenvalue_pair, DataError, Snapshot};
use crate::engine::{self, EngineError};

/// Primes with published counts.
pub const TABLE_PRIMES: [u64; 8] = [3, 11, 13, 17, 19, 29, 31, 113];

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub pmax: u64,
    /// Count over `F_{p^2}` only for `p` up to this bound.
    pub skip_square_above: Option<u64>,
    /// Every good prime up to `pmax` rather than the table primes.
    pub all_primes: bool,
    pub threads: usize,
}

impl VerifyOptions {
    pub fn new(pmax: u64) -> Self {
        VerifyOptions { pmax, skip_square_above: None, all_primes: false, threads: 1 }
    }

    pub fn primes(&self) -> Vec<u64> {
        if self.all_primes {
            primes_up_to(self.pmax).into_iter().filter(|&p| p != 2 && p != 7).collect()
        } else {
            TABLE_PRIMES.into_iter().filter(|&p| p <= self.pmax).collect()
        }
    }

    fn squares(&self, p: u64) -> bool {
        self.skip_square_above.is_none_or(|b| p <= b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyRow {
    pub p: u64,
    pub a_p: i64,
    pub b_p: i64,
    pub first: CountResult,
    pub second: Option<CountResult>,
    pub t1: i64,
    pub t2: Option<i64>,
    pub split: Option<EulerSplit>,
    /// `S = -(a_p + 5 p b_p + 4p + 12)`
    pub s_identity: bool,
    /// the same with `p b_p` in place of `5 p b_p`
    pub s_identity_unscaled: bool,
    pub failure: Option<String>,
}

impl VerifyRow {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.s_identity
    }
}

pub fn verify_prime(p: u64, snapshot: &Snapshot, squares: bool, threads: usize) -> Result<VerifyRow, VerifyError> {
    let (a_p, b_p) = eigenvalue_pair(snapshot, p)?;
    let first = engine::count(p, 1, Parameter::MINUS_SEVEN, threads)?;
    let t1 = trace_h3(p, 1, first.total).map_err(EngineError::from)?;
    let s = first.char_sum;
    let mut row = VerifyRow {
        p,
        a_p,
        b_p,
        first,
        second: None,
        t1,
        t2: None,
        split: None,
        s_identity: s_identity_check(p, a_p, b_p, s),
        s_identity_unscaled: s == -(a_p + p as i64 * b_p + 4 * p as i64 + 12),
        failure: None,
    };
    if squares {
        let second = engine::count(p, 2, Parameter::MINUS_SEVEN, threads)?;
        let report = check_modularity(p, first.total, second.total, a_p, b_p);
        row.second = Some(second);
        row.t2 = Some(report.t2);
        row.split = report.split;
        row.failure = report.failure.map(|d| d.to_string());
    } else {
        match EulerSplit::from_first_trace(p, t1, b_p) {
            Ok(split) if split.u == a_p => row.split = Some(split),
            Ok(split) => row.failure = Some(format!("weight-4 eigenvalue: counted {}, expected {a_p}", split.u)),
            Err(e) => row.failure = Some(e.to_string()),
        }
    }
    if row.failure.is_none() && !row.s_identity {
        row.failure = Some(format!("character sum {s} fails the trace identity"));
    }
    Ok(row)
}

pub fn run(opts: &VerifyOptions, snapshot: &Snapshot) -> Result<Vec<VerifyRow>, VerifyError> {
    opts.primes().into_iter().map(|p| verify_prime(p, snapshot, opts.squares(p), opts.threads)).collect()
}

pub fn all_passed(rows: &[VerifyRow]) -> bool {
    rows.iter().all(VerifyRow::passed)
}

const COLUMNS: [&str; 11] =
    ["p", "b_p", "a_p", "a_p+5pb_p", "second_trace", "count_p", "count_p2", "char_sum", "u", "v", "status"];

fn fields(r: &VerifyRow) -> [String; 11] {
    let opt = |x: Option<i64>| x.map_or_else(|| "-".into(), |x| x.to_string());
    [
        r.p.to_string(),
        r.b_p.to_string(),
        r.a_p.to_string(),
        r.t1.to_string(),
        opt(r.t2),
        r.first.total.to_string(),
        opt(r.second.map(|c| c.total as i64)),
        r.first.char_sum.to_string(),
        opt(r.split.map(|s| s.u)),
        opt(r.split.map(|s| s.v)),
        if r.passed() { "pass".into() } else { "FAIL".into() },
    ]
}

/// Fixed-width table with one row per prime and a note per failure.
pub fn write_text(rows: &[VerifyRow], out: &mut (impl Write + ?Sized)) -> Result<(), VerifyError> {
    let body: Vec<[String; 11]> = rows.iter().map(fields).collect();
    let widths: Vec<usize> = (0..COLUMNS.len())
        .map(|i| body.iter().map(|r| r[i].len()).chain([COLUMNS[i].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ")
    };
    writeln!(out, "{}", line(&COLUMNS.map(String::from)))?;
    for r in &body {
        writeln!(out, "{}", line(r))?;
    }
    for r in rows {
        if let Some(f) = &r.failure {
            writeln!(out, "p = {}: {f}", r.p)?;
        }
    }
    let scaled = rows.iter().filter(|r| r.s_identity).count();
    let unscaled = rows.iter().filter(|r| r.s_identity_unscaled).count();
    writeln!(
        out,
        "character sum identity S = -(a_p + 5p b_p + 4p + 12): {scaled}/{n} rows; with p b_p in place of 5p b_p: {unscaled}/{n} rows",
        n = rows.len()
    )?;
    writeln!(out, "{}", if all_passed(rows) { "verify: pass" } else { "verify: FAIL" })?;
    Ok(())
}

pub fn write_csv(rows: &[VerifyRow], out: impl Write) -> Result<(), VerifyError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record(fields(r))?;
    }
    w.flush()?;
    Ok(())
}
