//! Seeded sweeps over (N, k, seed) cells with parallel workers and
//! deterministic, incrementally written output tables.
//!
//! Cells run concurrently; the collector is the only writer. Finished cells
//! are buffered until every earlier cell (in sweep order) has been written,
//! so `sweep.csv` grows incrementally yet its final content is independent
//! of scheduling. Failed cells become tagged rows and do not stop the sweep.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;

use catperc::metrics::{CpReport, Phase};

use crate::config::SweepConfig;
use crate::error::{HarnessError, Result};
use crate::pipeline::{csv_row, run_id, run_pipeline, RunRecord, CSV_HEADER};

/// Environment variable selecting the worker count (default: available
/// parallelism).
pub const WORKERS_ENV: &str = "CATPERC_WORKERS";

/// Compact per-cell result kept for summaries.
#[derive(Debug, Clone)]
pub struct CellStats {
    pub report: CpReport<f64>,
    pub final_accuracy: f64,
    pub reached: bool,
}

#[derive(Debug, Clone)]
pub enum CellOutcome {
    Done(CellStats),
    Failed { message: String },
}

/// One sweep.csv row plus the cell identity it came from.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub run_id: String,
    pub csv: String,
    pub outcome: CellOutcome,
}

/// Per-(N, k) aggregate over the runs that reached the accuracy criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub k: usize,
    pub runs: usize,
    pub reached: usize,
    pub failed: usize,
    pub mean_sp_b: f64,
    pub se_sp_b: f64,
    pub mean_sp_w: f64,
    pub se_sp_w: f64,
    pub mean_d_within_u: f64,
    pub se_d_within_u: f64,
    pub mean_d_between_u: f64,
    pub se_d_between_u: f64,
    pub mean_d_within_s: f64,
    pub se_d_within_s: f64,
    pub mean_d_between_s: f64,
    pub se_d_between_s: f64,
}

pub const SUMMARY_HEADER: &str = "n,k,runs,reached,failed,mean_sp_b,se_sp_b,mean_sp_w,se_sp_w,mean_d_within_u,se_d_within_u,mean_d_between_u,se_d_between_u,mean_d_within_s,se_d_within_s,mean_d_between_s,se_d_between_s";

impl SummaryRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.k,
            self.runs,
            self.reached,
            self.failed,
            self.mean_sp_b,
            self.se_sp_b,
            self.mean_sp_w,
            self.se_sp_w,
            self.mean_d_within_u,
            self.se_d_within_u,
            self.mean_d_between_u,
            self.se_d_between_u,
            self.mean_d_within_s,
            self.se_d_within_s,
            self.mean_d_between_s,
            self.se_d_between_s,
        )
    }
}

/// Everything a finished sweep produced.
#[derive(Debug)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub summaries: Vec<SummaryRow>,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
}

fn worker_count() -> usize {
    if let Ok(raw) = std::env::var(WORKERS_ENV) {
        if let Ok(n) = raw.parse::<usize>() {
            if n >= 1 {
                return n;
            }
        }
        eprintln!("ignoring invalid {WORKERS_ENV}={raw:?}");
    }
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Runs every cell of the sweep, writing `sweep.csv` and `summary.csv`
/// under `out_dir`.
pub fn run_sweep(sweep: &SweepConfig, out_dir: &Path) -> Result<SweepOutput> {
    std::fs::create_dir_all(out_dir)?;
    let cells = sweep.cells();
    if cells.is_empty() {
        return Err(HarnessError::Config("sweep has no (N, k, seed) cells".into()));
    }
    let csv_path = out_dir.join("sweep.csv");
    let mut writer = BufWriter::new(File::create(&csv_path)?);
    writeln!(writer, "{CSV_HEADER}")?;
    writer.flush()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot build worker pool: {e}")))?;

    let (tx, rx) = mpsc::channel::<(usize, std::result::Result<Box<RunRecord>, String>)>();
    let total = cells.len();
    let mut rows: Vec<SweepRow> = Vec::with_capacity(total);

    std::thread::scope(|scope| -> Result<()> {
        let cells_ref = &cells;
        scope.spawn(move || {
            pool.install(|| {
                use rayon::prelude::*;
                cells_ref
                    .par_iter()
                    .enumerate()
                    .for_each_with(tx, |tx, (index, &(n, k, seed))| {
                        let result = sweep
                            .build_run(n, k, seed)
                            .and_then(|cfg| run_pipeline(&cfg, None))
                            .map(Box::new)
                            .map_err(|e| e.to_string());
                        // The receiver only hangs up on write errors; at
                        // that point dropping results is fine.
                        let _ = tx.send((index, result));
                    });
            });
        });

        // Reassembly buffer: write strictly in cell order as results land.
        let mut pending: BTreeMap<usize, std::result::Result<Box<RunRecord>, String>> =
            BTreeMap::new();
        let mut next = 0usize;
        for (index, result) in rx {
            pending.insert(index, result);
            while let Some(result) = pending.remove(&next) {
                let (n, k, seed) = cells[next];
                let row = match result {
                    Ok(record) => {
                        let csv = csv_row(&record, record.config.probe);
                        eprintln!(
                            "[{}/{}] {} sp_b={:.4} sp_w={:.4} acc={:.3}",
                            next + 1,
                            total,
                            record.run_id,
                            record.report().sp_b,
                            record.report().sp_w,
                            record.sup_report.final_accuracy
                        );
                        SweepRow {
                            n,
                            k,
                            seed,
                            run_id: record.run_id.clone(),
                            csv,
                            outcome: CellOutcome::Done(CellStats {
                                report: *record.report(),
                                final_accuracy: record.sup_report.final_accuracy,
                                reached: record.reached_criterion,
                            }),
                        }
                    }
                    Err(message) => {
                        let id = sweep
                            .build_run(n, k, seed)
                            .map(|cfg| run_id(&cfg))
                            .unwrap_or_else(|_| format!("n{n}-k{k}-s{seed}"));
                        eprintln!("[{}/{}] {id} FAILED: {message}", next + 1, total);
                        // Keep the row parseable: no commas or newlines in
                        // the failure tag.
                        let tag: String = message
                            .chars()
                            .map(|c| if c == ',' || c == '\n' { ';' } else { c })
                            .collect();
                        let csv = format!(
                            "{id},{n},{k},{},{},{seed},{},failed({tag})",
                            sweep.a,
                            sweep.b,
                            sweep.probe.name()
                        );
                        SweepRow {
                            n,
                            k,
                            seed,
                            run_id: id,
                            csv,
                            outcome: CellOutcome::Failed { message },
                        }
                    }
                };
                writeln!(writer, "{}", row.csv)?;
                writer.flush()?;
                rows.push(row);
                next += 1;
            }
        }
        Ok(())
    })?;

    let summaries = summarize(sweep, &rows);
    let summary_path = out_dir.join("summary.csv");
    let mut sw = BufWriter::new(File::create(&summary_path)?);
    writeln!(sw, "{SUMMARY_HEADER}")?;
    for s in &summaries {
        writeln!(sw, "{}", s.csv())?;
    }
    sw.flush()?;

    Ok(SweepOutput {
        rows,
        summaries,
        csv_path,
        summary_path,
    })
}

/// Aggregates rows per (N, k) cell group. Runs that failed or missed the
/// accuracy criterion are counted but excluded from the trend statistics.
pub fn summarize(sweep: &SweepConfig, rows: &[SweepRow]) -> Vec<SummaryRow> {
    let mut summaries = Vec::new();
    for &n in &sweep.n_values {
        for k in sweep.k_grid(n) {
            let group: Vec<&SweepRow> =
                rows.iter().filter(|r| r.n == n && r.k == k).collect();
            if group.is_empty() {
                continue;
            }
            let mut sp_b = Vec::new();
            let mut sp_w = Vec::new();
            let mut d_wu = Vec::new();
            let mut d_bu = Vec::new();
            let mut d_ws = Vec::new();
            let mut d_bs = Vec::new();
            let mut reached = 0usize;
            let mut failed = 0usize;
            for row in &group {
                match &row.outcome {
                    CellOutcome::Done(stats) => {
                        if stats.reached {
                            reached += 1;
                            sp_b.push(stats.report.sp_b);
                            sp_w.push(stats.report.sp_w);
                            d_wu.push(stats.report.within_mean(Phase::Unsupervised));
                            d_bu.push(stats.report.between(Phase::Unsupervised));
                            d_ws.push(stats.report.within_mean(Phase::Supervised));
                            d_bs.push(stats.report.between(Phase::Supervised));
                        }
                    }
                    CellOutcome::Failed { .. } => failed += 1,
                }
            }
            let (mean_sp_b, se_sp_b) = mean_and_se(&sp_b);
            let (mean_sp_w, se_sp_w) = mean_and_se(&sp_w);
            let (mean_d_within_u, se_d_within_u) = mean_and_se(&d_wu);
            let (mean_d_between_u, se_d_between_u) = mean_and_se(&d_bu);
            let (mean_d_within_s, se_d_within_s) = mean_and_se(&d_ws);
            let (mean_d_between_s, se_d_between_s) = mean_and_se(&d_bs);
            summaries.push(SummaryRow {
                n,
                k,
                runs: group.len(),
                reached,
                failed,
                mean_sp_b,
                se_sp_b,
                mean_sp_w,
                se_sp_w,
                mean_d_within_u,
                se_d_within_u,
                mean_d_between_u,
                se_d_between_u,
                mean_d_within_s,
                se_d_within_s,
                mean_d_between_s,
                se_d_between_s,
            });
        }
    }
    summaries
}
