use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use lloydlab::bench::{records_to_csv, scaling_sweep, SweepGrid, SweepOutput};
use lloydlab::core::Dataset;
use lloydlab::datagen;
use lloydlab::dataio::{FILE_BENCH, FILE_META, FILE_SPEEDUP};
use lloydlab::engine::Strategy;
use serde_json::json;

use crate::cli::BenchArgs;

pub const FILE_SPEEDUP_FIG: &str = "speedup_vs_threads.csv";
pub const FILE_EFFICIENCY_FIG: &str = "efficiency_vs_threads.csv";
pub const FILE_TIME_FIG: &str = "time_vs_n.csv";

pub fn execute(args: BenchArgs) -> Result<ExitCode> {
    if args.repeats == 0 {
        bail!("--repeats must be at least 1");
    }
    if args.repeats == 1 {
        eprintln!("warning: --repeats 1 gives noisy single-shot timings");
    }
    let strategies: Vec<Strategy> = args
        .strategies
        .iter()
        .map(|s| s.parse())
        .collect::<lloydlab::Result<_>>()?;

    // Datasets are generated up front; the engine's own clock keeps
    // generation out of the timings.
    let mut datasets: Vec<(String, Dataset)> = Vec::new();
    for name in &args.presets {
        let preset = datagen::preset(name)?;
        eprintln!("generating {name} (n={}, dim={})", preset.n, preset.spec.dim);
        let (ds, _) = datagen::sample(&preset.spec, preset.n)?;
        datasets.push((name.clone(), ds));
    }

    let grid = SweepGrid {
        ks: vec![args.k],
        strategies,
        threads: args.threads.clone(),
        repeats: args.repeats,
        seed: args.seed,
        tolerance: args.tolerance,
        max_iterations: args.max_iterations,
    };
    let output = scaling_sweep(&datasets, &grid)?;

    for failure in &output.failures {
        eprintln!(
            "cell failed: dataset={} k={} strategy={} threads={}: {}",
            failure.dataset, failure.k, failure.strategy, failure.threads, failure.error
        );
    }
    if output.records.is_empty() {
        bail!("every grid cell failed");
    }

    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    fs::write(args.out.join(FILE_BENCH), records_to_csv(&output.records))?;
    fs::write(
        args.out.join(FILE_SPEEDUP),
        serde_json::to_string_pretty(&output.reports)?,
    )?;
    write_figure_data(&args.out, &output)?;

    let meta = json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "command": "bench",
        "presets": args.presets,
        "k": args.k,
        "strategies": args.strategies,
        "threads": args.threads,
        "repeats": args.repeats,
        "seed": args.seed,
        "tolerance": args.tolerance,
        "max_iterations": args.max_iterations,
    });
    fs::write(args.out.join(FILE_META), serde_json::to_string_pretty(&meta)?)?;

    println!(
        "bench complete: {} records, {} speedup tables, {} failed cells -> {}",
        output.records.len(),
        output.reports.len(),
        output.failures.len(),
        args.out.display()
    );
    for report in &output.reports {
        for row in &report.rows {
            println!(
                "  {} k={} {} p={}: median {:.6}s speedup {:.3} efficiency {:.3}",
                report.dataset,
                report.k,
                report.strategy,
                row.threads,
                row.median_time_s,
                row.speedup,
                row.efficiency
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Plot-ready tables: speedup vs threads, efficiency vs threads, and median
/// time vs dataset size.
fn write_figure_data(dir: &Path, output: &SweepOutput) -> Result<()> {
    let mut speedup_csv = String::from("dataset,k,strategy,threads,speedup\n");
    let mut efficiency_csv = String::from("dataset,k,strategy,threads,efficiency\n");
    let mut time_csv = String::from("dataset,n,dim,k,strategy,threads,median_time_s\n");

    for report in &output.reports {
        let base = &report.baseline;
        time_csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            base.dataset, base.n, base.dim, base.k, base.strategy, base.threads, base.wall_time_s
        ));
        for row in &report.rows {
            speedup_csv.push_str(&format!(
                "{},{},{},{},{}\n",
                report.dataset, report.k, report.strategy, row.threads, row.speedup
            ));
            efficiency_csv.push_str(&format!(
                "{},{},{},{},{}\n",
                report.dataset, report.k, report.strategy, row.threads, row.efficiency
            ));
            time_csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                report.dataset,
                base.n,
                base.dim,
                report.k,
                report.strategy,
                row.threads,
                row.median_time_s
            ));
        }
    }

    fs::write(dir.join(FILE_SPEEDUP_FIG), speedup_csv)?;
    fs::write(dir.join(FILE_EFFICIENCY_FIG), efficiency_csv)?;
    fs::write(dir.join(FILE_TIME_FIG), time_csv)?;
    Ok(())
}
