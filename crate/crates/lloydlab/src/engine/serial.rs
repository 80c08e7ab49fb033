//! Single-threaded reference implementation of the iteration loop.

use std::time::Instant;

use crate::core::{centroid_shift_error, Assignments, Dataset};
use crate::Result;

use super::{
    accumulate_chunk, assign_chunk, centroids_from_sums, init_centroids, ClusterParams,
    ClusteringResult, LoopState,
};

pub(crate) fn run_with_hook(
    ds: &Dataset,
    params: &ClusterParams,
    mut hook: impl FnMut(usize, &Assignments),
) -> Result<ClusteringResult> {
    let k = params.k;
    let dim = ds.dim();
    let mut centroids = init_centroids(ds, k, params.seed)?;
    let mut assignments = Assignments::zeroed(ds.n(), k);
    let mut state = LoopState::new(params);
    let mut sums = vec![0.0f64; k * dim];
    let mut counts = vec![0usize; k];
    let mut iteration = 0usize;

    let started = Instant::now();
    loop {
        iteration += 1;
        let (changed, objective) = assign_chunk(ds, &centroids, 0, &mut assignments.labels);
        hook(iteration, &assignments);

        sums.fill(0.0);
        counts.fill(0);
        accumulate_chunk(ds, &assignments.labels, 0, &mut sums, &mut counts);
        let next = centroids_from_sums(&sums, &counts, &centroids)?;
        let shift = centroid_shift_error(&centroids, &next)?;
        centroids = next;

        if state.record(iteration, shift, objective, changed) {
            break;
        }
    }
    let wall_time = started.elapsed().as_secs_f64();

    Ok(ClusteringResult {
        centroids,
        assignments,
        iterations: iteration,
        shift_trace: state.shift_trace,
        objective_trace: state.objective_trace,
        wall_time,
        converged: state.converged,
        parallel_regions: 0,
    })
}
