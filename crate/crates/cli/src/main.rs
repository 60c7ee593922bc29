use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use mutlock::bench::{self, BenchConfig, BenchRecord, LockKind};
use mutlock::model::{self, Policy, SimConfig};
use mutlock::report::{self, Table};
use mutlock::{default_max_sws, DEFAULT_PERIOD};

/// Exit code when `report` finds no rows.
const EXIT_EMPTY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "mutlock",
    version,
    about = "Mutable lock toolkit: slot model, lock benchmark, reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the slot model of a waiting policy.
    Sim(SimArgs),
    /// Run the lock benchmark.
    Bench(BenchArgs),
    /// Aggregate benchmark CSV files.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Spin,
    Sleep,
    Hybrid,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TraceFormat {
    Text,
    Csv,
}

#[derive(clap::Args)]
struct SimArgs {
    #[arg(long, default_value_t = 3)]
    threads: usize,
    #[arg(long, value_enum, default_value = "hybrid")]
    policy: PolicyArg,
    /// Spinning window size (hybrid only).
    #[arg(long, default_value_t = 1)]
    sws: usize,
    #[arg(long, default_value_t = 1)]
    cs_slots: u32,
    #[arg(long, default_value_t = 1)]
    wake_slots: u32,
    /// Print the per-slot timeline.
    #[arg(long, value_enum, num_args = 0..=1, default_missing_value = "text")]
    trace: Option<TraceFormat>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LockArg {
    Mutlock,
    Ttas,
    Mcs,
    Sleep,
    AdaptiveSleep,
}

impl From<LockArg> for LockKind {
    fn from(l: LockArg) -> Self {
        match l {
            LockArg::Mutlock => LockKind::Mutlock,
            LockArg::Ttas => LockKind::Ttas,
            LockArg::Mcs => LockKind::Mcs,
            LockArg::Sleep => LockKind::Sleep,
            LockArg::AdaptiveSleep => LockKind::AdaptiveSleep,
        }
    }
}

#[derive(clap::Args)]
struct BenchArgs {
    /// Locks to measure; repeat or comma-separate for several.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "mutlock")]
    lock: Vec<LockArg>,
    /// Thread counts; repeat or comma-separate for several.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    threads: Vec<usize>,
    /// Critical section lower bound (µs).
    #[arg(long, default_value_t = 0.0)]
    csl: f64,
    /// Critical section upper bound (µs, exclusive).
    #[arg(long, default_value_t = 3.7)]
    csu: f64,
    #[arg(long, default_value_t = 0.0)]
    ncsl: f64,
    #[arg(long, default_value_t = 3.7)]
    ncsu: f64,
    /// Measured seconds per run.
    #[arg(long, default_value_t = 1.0)]
    duration: f64,
    #[arg(long, default_value_t = 1)]
    runs: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pin workers to cores round-robin.
    #[arg(long)]
    pin: bool,
    /// Oracle period of the mutable lock.
    #[arg(long = "K", default_value_t = DEFAULT_PERIOD)]
    period: u32,
    /// Window ceiling of the mutable lock (default: core count).
    #[arg(long)]
    max_sws: Option<u32>,
    /// Write rows to this file instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Md,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Throughput,
    Cpu,
    Ratio,
    Ptexp,
}

#[derive(clap::Args)]
struct ReportArgs {
    #[arg(long, num_args = 1.., required = true)]
    input: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "md")]
    format: Format,
    #[arg(long, value_enum, default_value = "throughput")]
    metric: Metric,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Sim(a) => sim(a).map(|_| ExitCode::SUCCESS),
        Command::Bench(a) => run_bench(a).map(|_| ExitCode::SUCCESS),
        Command::Report(a) => run_report(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn sim(a: SimArgs) -> Result<()> {
    let config = SimConfig {
        threads: a.threads,
        policy: match a.policy {
            PolicyArg::Spin => Policy::SpinOnly,
            PolicyArg::Sleep => Policy::SleepOnly,
            PolicyArg::Hybrid => Policy::Hybrid,
        },
        sws: a.sws,
        cs_slots: a.cs_slots,
        wake_slots: a.wake_slots,
    };
    let trace = model::simulate(&config)?;
    let mut out = io::stdout().lock();
    match a.trace {
        Some(TraceFormat::Csv) => {
            out.write_all(trace.render_csv().as_bytes())?;
            return Ok(());
        }
        Some(TraceFormat::Text) => out.write_all(trace.render_text().as_bytes())?,
        None => {}
    }
    writeln!(
        out,
        "policy={} threads={} sws={}",
        config.policy, config.threads, config.sws
    )?;
    writeln!(out, "completion_slot={}", trace.completion_slot)?;
    writeln!(out, "cs_slots={}", trace.cs_slots)?;
    writeln!(out, "wasted_spin_slots={}", trace.wasted_spin_slots)?;
    writeln!(out, "wasted_wake_slots={}", trace.wasted_wake_slots)?;
    writeln!(
        out,
        "throughput_cs_per_slot={:.4}",
        trace.throughput::<f64>()
    )?;
    writeln!(out, "waste_fraction={:.4}", trace.waste_fraction::<f64>())?;
    Ok(())
}

fn run_bench(a: BenchArgs) -> Result<()> {
    if !(a.duration > 0.0 && a.duration.is_finite()) {
        bail!("--duration must be a positive number of seconds");
    }
    let mut records: Vec<BenchRecord> = Vec::new();
    for &threads in &a.threads {
        for &lock in &a.lock {
            let mut c = BenchConfig::new(lock.into(), threads)
                .cs(a.csl, a.csu)
                .ncs(a.ncsl, a.ncsu)
                .duration(Duration::from_secs_f64(a.duration));
            c.runs = a.runs;
            c.seed = a.seed;
            c.pin = a.pin;
            c.period = a.period;
            c.max_sws = a.max_sws.unwrap_or_else(default_max_sws);
            for (rec, res) in bench::run_series(&c)? {
                if res.violations > 0 {
                    bail!(
                        "{} at {} threads: mutual exclusion violated {} times",
                        c.lock,
                        threads,
                        res.violations
                    );
                }
                eprintln!(
                    "{:>14} threads={:<3} run={} throughput={:.0}/s sync_cpu={:.3}s",
                    c.lock, threads, rec.run, rec.throughput_cs_per_s, rec.sync_cpu_s
                );
                records.push(rec);
            }
        }
    }
    match &a.csv {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            bench::write_csv(f, &records)?;
        }
        None => bench::write_csv(io::stdout().lock(), &records)?,
    }
    Ok(())
}

fn run_report(a: ReportArgs) -> Result<ExitCode> {
    let mut records = Vec::new();
    for path in &a.input {
        records.extend(report::read_csv_file(path)?);
    }
    if records.is_empty() {
        eprintln!("error: {}", report::ReportError::Empty);
        return Ok(ExitCode::from(EXIT_EMPTY));
    }
    let rows = report::aggregate::<f64>(&records)?;
    let table: Table = match a.metric {
        Metric::Throughput => report::pivot(&rows, |r| r.mean_throughput),
        Metric::Cpu => report::pivot(&rows, |r| r.mean_sync_cpu),
        Metric::Ptexp => {
            let pt = report::pt_exp(&rows, LockKind::Ttas.name(), LockKind::Sleep.name())?;
            report::pivot(&pt, |r| r.mean_throughput)
        }
        Metric::Ratio => {
            let mut all = rows.clone();
            // PT-EXP joins the comparison when its inputs are present
            if let Ok(pt) = report::pt_exp(&rows, LockKind::Ttas.name(), LockKind::Sleep.name()) {
                all.extend(pt);
            }
            let ratios = report::ratio_to_optimum(&all);
            for r in ratios.iter().filter(|r| r.ratio.is_none()) {
                eprintln!(
                    "warning: {} lacks thread counts {:?}",
                    r.lock, r.missing_threads
                );
            }
            report::ratio_table(&ratios)
        }
    };
    let text = match a.format {
        Format::Csv => table.to_csv(),
        Format::Md => table.to_markdown(),
    };
    io::stdout().write_all(text.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}
