//! Derived metrics over lockbench CSV output: per-configuration means, each
//! lock's throughput relative to the best lock, and the expected throughput of
//! picking the pure spin lock or the pure sleep lock at random (PT-EXP).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::bench::BenchRecord;
use crate::scalar::{self, Scalar};

/// Column order of bench CSV files.
pub const CSV_COLUMNS: [&str; 12] = [
    "lock",
    "threads",
    "csl_us",
    "csu_us",
    "ncsl_us",
    "ncsu_us",
    "run",
    "seed",
    "wall_s",
    "cs_count",
    "throughput_cs_per_s",
    "sync_cpu_s",
];

/// Lock name of the synthetic PT-EXP rows.
pub const PT_EXP: &str = "pt_exp";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReportError {
    #[error("{source_name}: line {line}: {message}")]
    Malformed {
        source_name: String,
        line: u64,
        message: String,
    },
    #[error("{source_name}: {message}")]
    Io {
        source_name: String,
        message: String,
    },
    #[error("no benchmark rows in input")]
    Empty,
    #[error("PT-EXP at {threads} threads needs a `{lock}` row")]
    MissingPtExpInput { threads: usize, lock: String },
    #[error("value {0} cannot be represented")]
    Unrepresentable(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow<T> {
    pub lock: String,
    pub threads: usize,
    pub mean_throughput: T,
    pub mean_sync_cpu: T,
    pub run_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LockRatio<T> {
    pub lock: String,
    /// `None` when the lock lacks some thread count the others cover.
    pub ratio: Option<T>,
    pub missing_threads: Vec<usize>,
}

/// Reads bench CSV rows. `source_name` labels error messages.
pub fn read_records<R: io::Read>(
    reader: R,
    source_name: &str,
) -> Result<Vec<BenchRecord>, ReportError> {
    let malformed = |line: u64, message: String| ReportError::Malformed {
        source_name: source_name.to_owned(),
        line,
        message,
    };
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| malformed(1, e.to_string()))?
        .clone();
    if headers.iter().ne(CSV_COLUMNS) {
        return Err(malformed(
            1,
            format!("expected header `{}`", CSV_COLUMNS.join(",")),
        ));
    }
    let mut out = Vec::new();
    for row in rdr.deserialize::<BenchRecord>() {
        match row {
            Ok(r) => out.push(r),
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                return Err(malformed(line, e.to_string()));
            }
        }
    }
    Ok(out)
}

pub fn read_csv_file(path: &Path) -> Result<Vec<BenchRecord>, ReportError> {
    let name = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|e| ReportError::Io {
        source_name: name.clone(),
        message: e.to_string(),
    })?;
    read_records(io::BufReader::new(file), &name)
}

fn to_scalar<T: Scalar>(v: f64) -> Result<T, ReportError> {
    T::from_f64(v).ok_or(ReportError::Unrepresentable(v))
}

/// Groups rows by `(lock, threads)` and averages throughput and sync CPU.
///
/// Values are summed in sorted order, so the result does not depend on the
/// order of the input rows. Output is sorted by lock, then threads.
pub fn aggregate<T: Scalar>(records: &[BenchRecord]) -> Result<Vec<AggregateRow<T>>, ReportError> {
    type Samples = (Vec<f64>, Vec<f64>);
    let mut groups: BTreeMap<(&str, usize), Samples> = BTreeMap::new();
    for r in records {
        let g = groups.entry((r.lock.as_str(), r.threads)).or_default();
        g.0.push(r.throughput_cs_per_s);
        g.1.push(r.sync_cpu_s);
    }
    groups
        .into_iter()
        .map(|((lock, threads), (mut tput, mut cpu))| {
            tput.sort_by(f64::total_cmp);
            cpu.sort_by(f64::total_cmp);
            let run_count = tput.len();
            let tput = tput
                .into_iter()
                .map(to_scalar)
                .collect::<Result<Vec<T>, _>>()?;
            let cpu = cpu
                .into_iter()
                .map(to_scalar)
                .collect::<Result<Vec<T>, _>>()?;
            Ok(AggregateRow {
                lock: lock.to_owned(),
                threads,
                mean_throughput: scalar::mean(tput).expect("group is non-empty"),
                mean_sync_cpu: scalar::mean(cpu).expect("group is non-empty"),
                run_count,
            })
        })
        .collect()
}

/// Per-lock mean, over thread counts, of `throughput / best throughput at that
/// thread count`.
///
/// Where every lock has zero throughput each lock scores 1 at that count.
pub fn ratio_to_optimum<T: Scalar>(rows: &[AggregateRow<T>]) -> Vec<LockRatio<T>> {
    let mut by_threads: BTreeMap<usize, Vec<&AggregateRow<T>>> = BTreeMap::new();
    for r in rows {
        by_threads.entry(r.threads).or_default().push(r);
    }
    let optimum: BTreeMap<usize, T> = by_threads
        .iter()
        .map(|(&t, rs)| {
            (
                t,
                scalar::max(rs.iter().map(|r| r.mean_throughput)).expect("non-empty"),
            )
        })
        .collect();
    let locks: BTreeSet<&str> = rows.iter().map(|r| r.lock.as_str()).collect();

    locks
        .into_iter()
        .map(|lock| {
            let mut per_count = Vec::new();
            let mut missing = Vec::new();
            for (&threads, rs) in &by_threads {
                match rs.iter().find(|r| r.lock == lock) {
                    Some(r) => {
                        let best = optimum[&threads];
                        per_count.push(if best.is_zero() {
                            T::one()
                        } else {
                            r.mean_throughput / best
                        });
                    }
                    None => missing.push(threads),
                }
            }
            LockRatio {
                lock: lock.to_owned(),
                ratio: if missing.is_empty() {
                    scalar::mean(per_count)
                } else {
                    None
                },
                missing_threads: missing,
            }
        })
        .collect()
}

/// Synthetic PT-EXP rows: per thread count, the mean of the `spin_lock` and
/// `sleep_lock` rows.
pub fn pt_exp<T: Scalar>(
    rows: &[AggregateRow<T>],
    spin_lock: &str,
    sleep_lock: &str,
) -> Result<Vec<AggregateRow<T>>, ReportError> {
    let find =
        |lock: &str, threads: usize| rows.iter().find(|r| r.lock == lock && r.threads == threads);
    let counts: BTreeSet<usize> = rows
        .iter()
        .filter(|r| r.lock == spin_lock || r.lock == sleep_lock)
        .map(|r| r.threads)
        .collect();
    if counts.is_empty() {
        return Err(ReportError::MissingPtExpInput {
            threads: rows.first().map_or(0, |r| r.threads),
            lock: spin_lock.to_owned(),
        });
    }
    let two = T::one() + T::one();
    counts
        .into_iter()
        .map(|threads| {
            let missing = |lock: &str| ReportError::MissingPtExpInput {
                threads,
                lock: lock.to_owned(),
            };
            let spin = find(spin_lock, threads).ok_or_else(|| missing(spin_lock))?;
            let sleep = find(sleep_lock, threads).ok_or_else(|| missing(sleep_lock))?;
            Ok(AggregateRow {
                lock: PT_EXP.to_owned(),
                threads,
                mean_throughput: (spin.mean_throughput + sleep.mean_throughput) / two,
                mean_sync_cpu: (spin.mean_sync_cpu + sleep.mean_sync_cpu) / two,
                run_count: spin.run_count.min(sleep.run_count),
            })
        })
        .collect()
}

/// A rendered result: header plus string cells.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn to_markdown(&self) -> String {
        let cols = self.headers.len();
        let mut width: Vec<usize> = self.headers.iter().map(|h| h.len().max(3)).collect();
        for r in &self.rows {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.len());
            }
        }
        let line = |cells: &[String]| {
            let mut s = String::from("|");
            for (i, w) in width.iter().enumerate() {
                let c = cells.get(i).map_or("", String::as_str);
                let _ = write!(s, " {c:>w$} |");
            }
            s.push('\n');
            s
        };
        let mut out = line(&self.headers);
        out.push('|');
        for w in &width {
            let _ = write!(out, "{}:|", "-".repeat(w + 1));
        }
        out.push('\n');
        for r in &self.rows {
            debug_assert_eq!(r.len(), cols);
            out.push_str(&line(r));
        }
        out
    }
}

/// Threads down, locks across.
pub fn pivot<T: Scalar>(rows: &[AggregateRow<T>], value: impl Fn(&AggregateRow<T>) -> T) -> Table {
    let locks: BTreeSet<&str> = rows.iter().map(|r| r.lock.as_str()).collect();
    let counts: BTreeSet<usize> = rows.iter().map(|r| r.threads).collect();
    let mut headers = vec!["threads".to_owned()];
    headers.extend(locks.iter().map(|l| (*l).to_owned()));
    let rows = counts
        .into_iter()
        .map(|t| {
            let mut cells = vec![t.to_string()];
            for l in &locks {
                cells.push(
                    rows.iter()
                        .find(|r| r.threads == t && r.lock == *l)
                        .map_or_else(String::new, |r| value(r).to_string()),
                );
            }
            cells
        })
        .collect();
    Table { headers, rows }
}

pub fn ratio_table<T: Scalar>(ratios: &[LockRatio<T>]) -> Table {
    Table {
        headers: vec!["lock".into(), "ratio".into(), "missing_threads".into()],
        rows: ratios
            .iter()
            .map(|r| {
                vec![
                    r.lock.clone(),
                    r.ratio.map_or_else(String::new, |v| v.to_string()),
                    r.missing_threads
                        .iter()
                        .map(usize::to_string)
                        .collect::<Vec<_>>()
                        .join(" "),
                ]
            })
            .collect(),
    }
}
