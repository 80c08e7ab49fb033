//! Timed experiment runner deriving speedup and efficiency tables.
//!
//! Timing always uses the engine's own wall clock, which starts after the
//! dataset is in memory, so generation and file I/O never leak into the
//! numbers. Each cell of a sweep is measured as the median of several
//! repeats after one discarded warm-up run, and cells execute strictly one
//! at a time so timed runs never contend with each other.

use serde::Serialize;

use crate::core::Dataset;
use crate::engine::{run, ClusterParams, Strategy};
use crate::{Error, Result};

/// One timed engine run.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub dataset: String,
    pub n: usize,
    pub dim: usize,
    pub k: usize,
    pub strategy: Strategy,
    pub threads: usize,
    pub seed: u64,
    pub repeat: usize,
    pub wall_time_s: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub const BENCH_CSV_HEADER: &str =
    "dataset,n,dim,k,strategy,threads,seed,repeat,wall_time_s,iterations,converged";

impl BenchRecord {
    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.dataset,
            self.n,
            self.dim,
            self.k,
            self.strategy,
            self.threads,
            self.seed,
            self.repeat,
            self.wall_time_s,
            self.iterations,
            self.converged
        )
    }
}

/// Render records as CSV with the fixed header row.
pub fn records_to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(BENCH_CSV_HEADER);
    out.push('\n');
    for record in records {
        out.push_str(&record.csv_row());
        out.push('\n');
    }
    out
}

/// Time `repeats` engine runs on one configuration, after a discarded
/// warm-up run. All records carry identical configuration fields.
pub fn time_run(
    dataset_name: &str,
    ds: &Dataset,
    params: &ClusterParams,
    repeats: usize,
) -> Result<Vec<BenchRecord>> {
    if repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be at least 1".into()));
    }
    run(ds, params)?; // warm-up: first-touch page faults distort small timings
    let mut records = Vec::with_capacity(repeats);
    for repeat in 0..repeats {
        let result = run(ds, params)?;
        records.push(BenchRecord {
            dataset: dataset_name.to_string(),
            n: ds.n(),
            dim: ds.dim(),
            k: params.k,
            strategy: params.strategy,
            threads: if params.strategy == Strategy::Serial { 1 } else { params.threads },
            seed: params.seed,
            repeat,
            wall_time_s: result.wall_time,
            iterations: result.iterations,
            converged: result.converged,
        });
    }
    Ok(records)
}

/// Speedup of a parallel time over the serial baseline.
pub fn speedup(t_serial: f64, t_parallel: f64) -> Result<f64> {
    let positive = |t: f64| t.is_finite() && t > 0.0;
    if !positive(t_serial) || !positive(t_parallel) {
        return Err(Error::InvalidConfig(format!(
            "speedup requires positive times, got {t_serial} and {t_parallel}"
        )));
    }
    Ok(t_serial / t_parallel)
}

/// Fraction of linear scaling achieved at `p` threads.
pub fn efficiency(psi: f64, p: usize) -> f64 {
    debug_assert!(psi > 0.0 && p >= 1);
    psi / p as f64
}

/// Median of a non-empty sample; the mean of the two middle elements for
/// even counts.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty sample");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    }
}

/// One (p, median time, speedup, efficiency) row of a speedup table.
#[derive(Debug, Clone, Serialize)]
pub struct SpeedupRow {
    pub threads: usize,
    pub median_time_s: f64,
    pub speedup: f64,
    pub efficiency: f64,
}

/// Speedup/efficiency table for one dataset and strategy against the serial
/// baseline measured by the same binary on the same data and seed.
#[derive(Debug, Clone, Serialize)]
pub struct SpeedupReport {
    pub dataset: String,
    pub k: usize,
    pub strategy: Strategy,
    /// Serial baseline with `wall_time_s` set to the median over repeats.
    pub baseline: BenchRecord,
    pub rows: Vec<SpeedupRow>,
}

/// A grid cell that failed, with the cell coordinates preserved.
#[derive(Debug, Clone, Serialize)]
pub struct SweepFailure {
    pub dataset: String,
    pub k: usize,
    pub strategy: Strategy,
    pub threads: usize,
    pub error: String,
}

/// The requested cross-product for [`scaling_sweep`].
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub ks: Vec<usize>,
    pub strategies: Vec<Strategy>,
    pub threads: Vec<usize>,
    pub repeats: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

/// Everything a sweep produces: raw records, per-cell failures, and the
/// derived speedup tables.
#[derive(Debug, Clone, Serialize)]
pub struct SweepOutput {
    pub records: Vec<BenchRecord>,
    pub failures: Vec<SweepFailure>,
    pub reports: Vec<SpeedupReport>,
}

/// Run the full (dataset x k x strategy x threads) grid, median-aggregated.
///
/// A serial baseline is always timed for every (dataset, k) pair — speedups
/// are never derived from anything but this binary's own serial strategy on
/// the same data and seed. Cell failures are recorded and the sweep
/// continues.
pub fn scaling_sweep(datasets: &[(String, Dataset)], grid: &SweepGrid) -> Result<SweepOutput> {
    if datasets.is_empty() || grid.ks.is_empty() || grid.strategies.is_empty() {
        return Err(Error::InvalidConfig("sweep grid must be non-empty".into()));
    }
    if grid.repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be at least 1".into()));
    }
    let parallel_strategies: Vec<Strategy> = grid
        .strategies
        .iter()
        .copied()
        .filter(|&s| s != Strategy::Serial)
        .collect();
    if !parallel_strategies.is_empty() && grid.threads.is_empty() {
        return Err(Error::InvalidConfig(
            "thread grid must be non-empty for parallel strategies".into(),
        ));
    }

    let mut output = SweepOutput {
        records: Vec::new(),
        failures: Vec::new(),
        reports: Vec::new(),
    };

    for (name, ds) in datasets {
        for &k in &grid.ks {
            let base_params = ClusterParams {
                k,
                tolerance: grid.tolerance,
                max_iterations: grid.max_iterations,
                seed: grid.seed,
                strategy: Strategy::Serial,
                threads: 1,
            };
            let baseline = match time_run(name, ds, &base_params, grid.repeats) {
                Ok(records) => {
                    let med = median(
                        &records.iter().map(|r| r.wall_time_s).collect::<Vec<_>>(),
                    );
                    let mut summary = records[0].clone();
                    summary.repeat = 0;
                    summary.wall_time_s = med;
                    output.records.extend(records);
                    Some(summary)
                }
                Err(err) => {
                    output.failures.push(SweepFailure {
                        dataset: name.clone(),
                        k,
                        strategy: Strategy::Serial,
                        threads: 1,
                        error: err.to_string(),
                    });
                    None
                }
            };

            for &strategy in &parallel_strategies {
                let mut rows = Vec::new();
                for &threads in &grid.threads {
                    let params = base_params.clone().with_strategy(strategy, threads);
                    match time_run(name, ds, &params, grid.repeats) {
                        Ok(records) => {
                            let med = median(
                                &records.iter().map(|r| r.wall_time_s).collect::<Vec<_>>(),
                            );
                            output.records.extend(records);
                            if let Some(baseline) = &baseline {
                                let psi = speedup(baseline.wall_time_s, med)?;
                                rows.push(SpeedupRow {
                                    threads,
                                    median_time_s: med,
                                    speedup: psi,
                                    efficiency: efficiency(psi, threads),
                                });
                            }
                        }
                        Err(err) => {
                            output.failures.push(SweepFailure {
                                dataset: name.clone(),
                                k,
                                strategy,
                                threads,
                                error: err.to_string(),
                            });
                        }
                    }
                }
                if let (Some(baseline), false) = (&baseline, rows.is_empty()) {
                    output.reports.push(SpeedupReport {
                        dataset: name.clone(),
                        k,
                        strategy,
                        baseline: baseline.clone(),
                        rows,
                    });
                }
            }
        }
    }
    Ok(output)
}
