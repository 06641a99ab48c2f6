//! Command-line interface. [`run`] is the whole program minus process setup,
//! so it can be driven in-process.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hvcheck_core::pointcount::{trace_h3, Parameter};

use crate::datasource::{crosscheck_eigenvalues, OnlineClient, OnlineConfig, Snapshot, Source};
use crate::engine::{self, ChunkPlan, CountJob, Outcome};
use crate::report::{self, Report};
use crate::sweep;
use crate::verify::{self, VerifyOptions};

/// Every check passed.
pub const EXIT_PASS: i32 = 0;
/// A check failed or an error occurred.
pub const EXIT_FAIL: i32 = 1;
/// A count stopped early on request; resume from the checkpoint.
pub const EXIT_INCOMPLETE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hvcheck", version, about = "Point counts and modularity checks for the Hulek-Verrill fibre at phi = -1/7")]
pub struct Cli {
    /// Snapshot file (default: $HVCHECK_SNAPSHOT, else the bundled copy)
    #[arg(long, global = true)]
    pub snapshot: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count points over F_p or F_{p^2}
    Count(CountArgs),
    /// Compare counts with the newform eigenvalues prime by prime
    Verify(VerifyArgs),
    /// Mod-5 monodromy group checks
    Monodromy {
        #[arg(value_enum)]
        mode: MonodromyMode,
        #[arg(long, default_value_t = engine::default_threads())]
        threads: usize,
    },
    /// Recover the Picard-Fuchs recurrence from period coefficients
    Pf {
        #[arg(long, default_value_t = 40)]
        nmax: usize,
    },
    /// Stratified boundary count
    Boundary {
        #[arg(long)]
        p: u64,
    },
    /// Eliminate residual characters
    Charelim {
        #[arg(long, default_value_t = engine::default_threads())]
        threads: usize,
    },
    /// Database records
    Lmfdb {
        #[command(subcommand)]
        command: LmfdbCommand,
    },
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub power: u32,
    /// Fibre parameter as num/den
    #[arg(long, default_value = "-7", allow_hyphen_values = true)]
    pub t: Parameter,
    #[arg(long, default_value_t = engine::default_threads())]
    pub threads: usize,
    /// Record finished chunks here and resume from it
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Split the outer loop into this many chunks instead of the default
    #[arg(long)]
    pub chunks: Option<usize>,
    /// Stop after this many newly finished chunks
    #[arg(long)]
    pub stop_after: Option<usize>,
    /// Print each finished chunk to stderr
    #[arg(long)]
    pub progress: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 31)]
    pub pmax: u64,
    /// Only count over F_{p^2} for p up to this bound
    #[arg(long)]
    pub skip_square_above: Option<u64>,
    /// All good primes up to pmax, not just the tabulated ones
    #[arg(long)]
    pub all_primes: bool,
    #[arg(long, default_value_t = engine::default_threads())]
    pub threads: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MonodromyMode {
    Structure,
    Normalizer,
    Exhaustive,
}

#[derive(Debug, Subcommand)]
pub enum LmfdbCommand {
    /// Print one record as JSON
    Fetch {
        #[arg(long)]
        label: String,
        /// Query the LMFDB API instead of the snapshot
        #[arg(long)]
        online: bool,
        /// JSON file overriding endpoints and retry policy
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Naive traces of 14.a4 against the weight-2 eigenvalues
    Crosscheck {
        #[arg(long, default_value_t = 200)]
        pmax: u64,
    },
}

fn load_snapshot(cli: &Cli) -> Result<Snapshot, String> {
    match &cli.snapshot {
        Some(path) => Snapshot::load(path),
        None => Snapshot::from_env(),
    }
    .map_err(|e| e.to_string())
}

fn emit(report: &Report, out: &mut dyn Write) -> i32 {
    let mut buf = Vec::new();
    report.write(&mut buf).expect("write to memory");
    let _ = out.write_all(&buf);
    if report.passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAIL
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let io = |e: std::io::Error| e.to_string();
    match &cli.command {
        Command::Count(args) => count(args, out, err),
        Command::Verify(args) => {
            let snapshot = load_snapshot(cli)?;
            let opts = VerifyOptions {
                pmax: args.pmax,
                skip_square_above: args.skip_square_above,
                all_primes: args.all_primes,
                threads: args.threads,
            };
            let rows = verify::run(&opts, &snapshot).map_err(|e| e.to_string())?;
            match args.format {
                Format::Text => verify::write_text(&rows, out),
                Format::Csv => verify::write_csv(&rows, &mut *out),
            }
            .map_err(|e| e.to_string())?;
            Ok(if verify::all_passed(&rows) { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Monodromy { mode, threads } => Ok(match mode {
            MonodromyMode::Structure => emit(&report::monodromy_structure(), out),
            MonodromyMode::Normalizer => emit(&report::normalizer(), out),
            MonodromyMode::Exhaustive => {
                let step = 1usize << 20;
                let progress = |n: usize| {
                    if n % step < 1 << 16 {
                        eprintln!("swept {n} of {}", hvcheck_core::monodromy::SP4_ORDER);
                    }
                };
                let s = sweep::exhaustive(*threads, Some(&progress)).map_err(|e| e.to_string())?;
                emit(&report::exhaustive(&s), out)
            }
        }),
        Command::Pf { nmax } => Ok(emit(&report::picard_fuchs(*nmax), out)),
        Command::Boundary { p } => Ok(emit(&report::boundary(*p), out)),
        Command::Charelim { threads } => Ok(emit(&report::charelim(*threads), out)),
        Command::Lmfdb { command } => match command {
            LmfdbCommand::Fetch { label, online, config } => {
                let snapshot = load_snapshot(cli)?;
                let mut source = if *online {
                    let config = match config {
                        Some(path) => OnlineConfig::load(path).map_err(|e| e.to_string())?,
                        None => OnlineConfig::default(),
                    };
                    Source::Online { client: OnlineClient::new(config), cache: snapshot }
                } else {
                    Source::Offline(snapshot)
                };
                let json = if label.split('.').count() == 4 {
                    serde_json::to_string_pretty(&source.fetch_newform(label).map_err(|e| e.to_string())?)
                } else {
                    serde_json::to_string_pretty(&source.fetch_curve(label).map_err(|e| e.to_string())?)
                }
                .map_err(|e| e.to_string())?;
                writeln!(out, "{json}").map_err(io)?;
                Ok(EXIT_PASS)
            }
            LmfdbCommand::Crosscheck { pmax } => {
                let snapshot = load_snapshot(cli)?;
                let c = crosscheck_eigenvalues(&snapshot, *pmax).map_err(|e| e.to_string())?;
                writeln!(out, "checked {} primes, skipped {:?}", c.checked.len(), c.skipped).map_err(io)?;
                for (p, expected, counted) in &c.mismatches {
                    writeln!(out, "mismatch at p = {p}: eigenvalue {expected}, a_p(14.a4) = {counted}").map_err(io)?;
                }
                let _ = err;
                writeln!(out, "crosscheck: {}", if c.passed() { "pass" } else { "FAIL" }).map_err(io)?;
                Ok(if c.passed() { EXIT_PASS } else { EXIT_FAIL })
            }
        },
    }
}

fn count(args: &CountArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let io = |e: std::io::Error| e.to_string();
    let mut job = CountJob::new(args.p, args.power).parameter(args.t).threads(args.threads);
    if let Some(path) = &args.checkpoint {
        job = job.checkpoint(path);
    }
    if let Some(n) = args.chunks {
        job = job.chunking(ChunkPlan::Uniform(n));
    }
    if let Some(k) = args.stop_after {
        job = job.stop_after(k);
    }
    let show = |r: engine::ChunkRecord| eprintln!("chunk {} {} {}", r.index, r.sum, r.running);
    let progress: Option<&(dyn Fn(engine::ChunkRecord) + Sync)> = if args.progress { Some(&show) } else { None };
    match engine::run(&job, progress).map_err(|e| e.to_string())? {
        Outcome::Complete(r) => {
            writeln!(out, "p = {}, power = {}, t = {}", args.p, args.power, args.t).map_err(io)?;
            writeln!(out, "S = {}", r.char_sum).map_err(io)?;
            writeln!(out, "solution_sum = {}", r.solution_sum).map_err(io)?;
            writeln!(out, "total = {}", r.total).map_err(io)?;
            if let Ok(trace) = trace_h3(args.p, args.power, r.total) {
                writeln!(out, "trace = {trace}").map_err(io)?;
            }
            Ok(EXIT_PASS)
        }
        Outcome::Interrupted { done, chunks } => {
            writeln!(err, "stopped after {done} of {chunks} chunks; rerun with the same checkpoint to resume").map_err(io)?;
            Ok(EXIT_INCOMPLETE)
        }
    }
}
