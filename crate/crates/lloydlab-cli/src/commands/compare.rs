use std::process::ExitCode;

use anyhow::Result;
use lloydlab::compare::compare_bundles;
use lloydlab::dataio::ResultBundle;

use crate::cli::CompareArgs;

pub fn execute(args: CompareArgs) -> Result<ExitCode> {
    let left = ResultBundle::read(&args.a)?;
    let right = ResultBundle::read(&args.b)?;
    let report = compare_bundles(&left, &right)?;

    println!(
        "agreement={:.4}% ({}/{} points) centroid_linf={:e} mapping={:?}",
        report.agreement * 100.0,
        report.matching_points,
        report.total_points,
        report.centroid_linf,
        report.mapping
    );
    if report.is_equivalent() {
        println!("bundles are equivalent");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("bundles differ");
        Ok(ExitCode::from(1))
    }
}
