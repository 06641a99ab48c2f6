//! Parallel, resumable driver around [`CountKernel`].
//!
//! A checkpoint is a text file: one header line identifying the job, then one
//! line `<chunk_index> <chunk_sum> <running_total>` per finished chunk, in
//! completion order.

use std::fmt::Write as _;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use hvcheck_core::pointcount::{Chunking, CountError, CountKernel, CountResult, Parameter};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Count(#[from] CountError),
    #[error("checkpoint i/o: {0}")]
    Io(#[from] io::Error),
    #[error("checkpoint line {line}: {reason}")]
    Corrupt { line: usize, reason: String },
    #[error("checkpoint belongs to another job (found {found:?}, expected {expected:?})")]
    Stale { expected: String, found: String },
    #[error("invalid chunking for q = {0}")]
    Chunking(u64),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error("solution sum overflowed")]
    Overflow,
}

/// How the outer indices are split.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum ChunkPlan {
    /// One chunk per outer value (per leading coordinate over `F_{p^2}`).
    #[default]
    Standard,
    Uniform(usize),
    Explicit(Vec<Range<u32>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountJob {
    pub p: u64,
    pub power: u32,
    pub t: Parameter,
    pub threads: usize,
    pub checkpoint: Option<PathBuf>,
    pub chunking: ChunkPlan,
    /// Stop after this many newly finished chunks.
    pub stop_after: Option<usize>,
}

impl CountJob {
    pub fn new(p: u64, power: u32) -> Self {
        CountJob {
            p,
            power,
            t: Parameter::MINUS_SEVEN,
            threads: 1,
            checkpoint: None,
            chunking: ChunkPlan::Standard,
            stop_after: None,
        }
    }

    pub fn threads(mut self, n: usize) -> Self {
        self.threads = n.max(1);
        self
    }

    pub fn parameter(mut self, t: Parameter) -> Self {
        self.t = t;
        self
    }

    pub fn checkpoint(mut self, path: impl Into<PathBuf>) -> Self {
        self.checkpoint = Some(path.into());
        self
    }

    pub fn chunking(mut self, plan: ChunkPlan) -> Self {
        self.chunking = plan;
        self
    }

    pub fn stop_after(mut self, k: usize) -> Self {
        self.stop_after = Some(k);
        self
    }
}

/// A finished chunk as written to the checkpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChunkRecord {
    pub index: usize,
    pub sum: u64,
    pub running: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Complete(CountResult),
    Interrupted { done: usize, chunks: usize },
}

impl Outcome {
    pub fn result(&self) -> Option<&CountResult> {
        match self {
            Outcome::Complete(r) => Some(r),
            Outcome::Interrupted { .. } => None,
        }
    }
}

fn plan_chunks(kernel: &CountKernel, plan: &ChunkPlan) -> Result<Chunking, EngineError> {
    match plan {
        ChunkPlan::Standard => Ok(Chunking::standard(kernel)),
        ChunkPlan::Uniform(n) => Ok(Chunking::uniform(kernel.q(), *n)),
        ChunkPlan::Explicit(r) => {
            Chunking::from_ranges(kernel.q(), r.clone()).ok_or(EngineError::Chunking(kernel.q()))
        }
    }
}

/// Header line identifying job, field and chunk boundaries.
pub fn header(kernel: &CountKernel, chunks: &Chunking) -> String {
    let modulus = match kernel.modulus() {
        Some((b, c)) => format!("{b},{c}"),
        None => "none".into(),
    };
    let mut ends = String::new();
    for (i, r) in chunks.ranges().iter().enumerate() {
        if i > 0 {
            ends.push(',');
        }
        write!(ends, "{}", r.end).expect("write to string");
    }
    format!(
        "hvcheck-checkpoint p={} power={} t={} modulus={} ends={}",
        kernel.p(),
        kernel.power(),
        kernel.parameter(),
        modulus,
        ends
    )
}

/// Finished chunks recorded in a checkpoint.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Checkpoint {
    pub records: Vec<ChunkRecord>,
}

impl Checkpoint {
    pub fn running_total(&self) -> u64 {
        self.records.last().map_or(0, |r| r.running)
    }

    /// Parses and validates `text` against the expected header. A final line
    /// without a newline is treated as an interrupted write and dropped.
    pub fn parse(text: &str, expected_header: &str, chunks: usize) -> Result<Self, EngineError> {
        let complete = if text.ends_with('\n') {
            text
        } else {
            &text[..text.rfind('\n').map_or(0, |i| i + 1)]
        };
        let mut lines = complete.lines();
        let Some(found) = lines.next() else {
            return Ok(Checkpoint::default());
        };
        if found != expected_header {
            return Err(EngineError::Stale { expected: expected_header.into(), found: found.into() });
        }
        let mut seen = vec![false; chunks];
        let mut records = Vec::new();
        let mut running = 0u64;
        for (n, line) in lines.enumerate() {
            let line_no = n + 2;
            let bad = |reason: &str| EngineError::Corrupt { line: line_no, reason: reason.into() };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [i, s, r] = fields[..] else {
                return Err(bad("expected three fields"));
            };
            let index: usize = i.parse().map_err(|_| bad("chunk index"))?;
            let sum: u64 = s.parse().map_err(|_| bad("chunk sum"))?;
            let total: u64 = r.parse().map_err(|_| bad("running total"))?;
            if index >= chunks {
                return Err(bad("chunk index out of range"));
            }
            if std::mem::replace(&mut seen[index], true) {
                return Err(bad("duplicate chunk"));
            }
            running = running.checked_add(sum).ok_or(EngineError::Overflow)?;
            if running != total {
                return Err(bad("running total does not match"));
            }
            records.push(ChunkRecord { index, sum, running });
        }
        Ok(Checkpoint { records })
    }

    pub fn load(path: &Path, expected_header: &str, chunks: usize) -> Result<Self, EngineError> {
        match fs::read_to_string(path) {
            Ok(text) => Self::parse(&text, expected_header, chunks),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Checkpoint::default()),
            Err(e) => Err(e.into()),
        }
    }
}

struct Sink {
    out: Option<BufWriter<File>>,
    running: u64,
    records: Vec<ChunkRecord>,
}

/// Rewrites the checkpoint with only validated lines, then opens it for append.
fn reopen(path: &Path, header: &str, cp: &Checkpoint) -> Result<BufWriter<File>, EngineError> {
    let tmp = path.with_extension("tmp");
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        writeln!(w, "{header}")?;
        for r in &cp.records {
            writeln!(w, "{} {} {}", r.index, r.sum, r.running)?;
        }
        w.flush()?;
        w.get_ref().sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(BufWriter::new(OpenOptions::new().append(true).open(path)?))
}

/// Runs the job; `progress` sees each chunk as it is recorded.
pub fn run(job: &CountJob, progress: Option<&(dyn Fn(ChunkRecord) + Sync)>) -> Result<Outcome, EngineError> {
    let kernel = CountKernel::new(job.p, job.power, job.t)?;
    let chunks = plan_chunks(&kernel, &job.chunking)?;
    let header = header(&kernel, &chunks);

    let previous = match &job.checkpoint {
        Some(path) => Checkpoint::load(path, &header, chunks.len())?,
        None => Checkpoint::default(),
    };
    let out = match &job.checkpoint {
        Some(path) => Some(reopen(path, &header, &previous)?),
        None => None,
    };
    let mut done = vec![false; chunks.len()];
    for r in &previous.records {
        done[r.index] = true;
    }
    let pending: Vec<usize> = (0..chunks.len()).filter(|&i| !done[i]).collect();
    let todo = &pending[..job.stop_after.map_or(pending.len(), |k| k.min(pending.len()))];

    let sink = Mutex::new(Sink { out, running: previous.running_total(), records: previous.records });
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(job.threads.max(1))
        .build()
        .map_err(|e| EngineError::Pool(e.to_string()))?;
    pool.install(|| {
        todo.par_iter().try_for_each(|&index| -> Result<(), EngineError> {
            let sum = kernel.range_sum(chunks.ranges()[index].clone());
            let mut s = sink.lock().expect("checkpoint writer poisoned");
            s.running = s.running.checked_add(sum).ok_or(EngineError::Overflow)?;
            let record = ChunkRecord { index, sum, running: s.running };
            if let Some(w) = s.out.as_mut() {
                writeln!(w, "{index} {sum} {}", record.running)?;
                w.flush()?;
            }
            s.records.push(record);
            if let Some(f) = progress {
                f(record);
            }
            Ok(())
        })
    })?;

    let sink = sink.into_inner().expect("checkpoint writer poisoned");
    if sink.records.len() < chunks.len() {
        return Ok(Outcome::Interrupted { done: sink.records.len(), chunks: chunks.len() });
    }
    Ok(Outcome::Complete(kernel.finish(sink.running)?))
}

/// Runs to completion without a checkpoint.
pub fn count(p: u64, power: u32, t: Parameter, threads: usize) -> Result<CountResult, EngineError> {
    match run(&CountJob::new(p, power).parameter(t).threads(threads), None)? {
        Outcome::Complete(r) => Ok(r),
        Outcome::Interrupted { .. } => unreachable!("no stop requested"),
    }
}

/// Available hardware threads.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(count(3, 1, Parameter::MINUS_SEVEN, 2).unwrap().total, 590);
        assert_eq!(count(3, 2, Parameter::MINUS_SEVEN, 2).unwrap().total, 4860);
        assert_eq!(count(11, 1, Parameter::MINUS_SEVEN, 1).unwrap().total, 7300);
        assert!(matches!(count(7, 1, Parameter::MINUS_SEVEN, 1), Err(EngineError::Count(_))));
    }

    #[test]
    fn header_lists_job() {
        let k = CountKernel::new(5, 2, Parameter::MINUS_SEVEN).unwrap();
        let h = header(&k, &Chunking::uniform(25, 3));
        assert_eq!(h, "hvcheck-checkpoint p=5 power=2 t=-7 modulus=1,1 ends=9,17,25");
    }

    #[test]
    fn parse_rejects_bad_lines() {
        let h = "H";
        assert_eq!(Checkpoint::parse("", h, 4).unwrap(), Checkpoint::default());
        let ok = Checkpoint::parse("H\n2 10 10\n0 5 15\n", h, 4).unwrap();
        assert_eq!(ok.running_total(), 15);
        assert_eq!(Checkpoint::parse("H\n2 10 10\n0 5", h, 4).unwrap().records.len(), 1);
        assert!(matches!(Checkpoint::parse("G\n", h, 4), Err(EngineError::Stale { .. })));
        for bad in ["H\n2 10 11\n", "H\n9 1 1\n", "H\n1 1 1\n1 1 2\n", "H\n1 x 1\n", "H\n1 1\n"] {
            assert!(matches!(Checkpoint::parse(bad, h, 4), Err(EngineError::Corrupt { line: _, .. })), "{bad:?}");
        }
    }
}
