use std::process::ExitCode;

use anyhow::Result;
use lloydlab::dataio::{self, ResultBundle};
use lloydlab::engine::{self, ClusterParams};

use crate::cli::ClusterArgs;

pub fn execute(args: ClusterArgs) -> Result<ExitCode> {
    let strategy = args.strategy.parse()?;
    let dataset = dataio::read_dataset(&args.input, None)?;
    let params = ClusterParams {
        k: args.k,
        tolerance: args.tolerance,
        max_iterations: args.max_iterations,
        seed: args.seed,
        strategy,
        threads: args.threads,
    };

    let result = engine::run(&dataset, &params)?;
    let bundle = ResultBundle::from_run(&dataset, Some(&args.input), &params, &result)?;
    bundle.write(&args.out)?;
    dataio::write_plot_data(&args.out, &dataset, &result.assignments, &result.centroids)?;

    println!(
        "strategy={} threads={} iterations={} converged={} shift_error={:e} objective={:.6} wall_time_s={:.6}",
        params.strategy,
        params.threads,
        result.iterations,
        result.converged,
        bundle.meta.final_shift_error,
        bundle.meta.final_objective,
        result.wall_time
    );
    if !result.converged {
        eprintln!(
            "warning: not converged after {} iterations (last shift error {:e})",
            result.iterations, bundle.meta.final_shift_error
        );
    }
    Ok(ExitCode::SUCCESS)
}
