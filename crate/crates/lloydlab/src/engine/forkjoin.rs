//! Fork-per-step strategy: every iteration forks one parallel region for
//! the assignment step and a second for the accumulation step, joining each
//! before moving on. No worker state survives between iterations.
//!
//! Join handles are folded in spawn order (ascending worker id), so the
//! reduction is as reproducible as the persistent strategy's ordered merge:
//! at equal thread counts the two produce bit-identical centers.

use std::thread;
use std::time::Instant;

use crate::core::{centroid_shift_error, Assignments, Dataset};
use crate::Result;

use super::{
    accumulate_chunk, assign_chunk, centroids_from_sums, chunk_ranges, init_centroids,
    split_label_chunks, ClusterParams, ClusteringResult, LoopState,
};

pub(crate) fn run(ds: &Dataset, params: &ClusterParams) -> Result<ClusteringResult> {
    let k = params.k;
    let dim = ds.dim();
    let mut centroids = init_centroids(ds, k, params.seed)?;
    let mut assignments = Assignments::zeroed(ds.n(), k);
    let ranges = chunk_ranges(ds.n(), params.threads);
    let mut state = LoopState::new(params);
    let mut iteration = 0usize;
    let mut regions = 0usize;

    let started = Instant::now();
    loop {
        iteration += 1;

        // Region 1: data-parallel assignment map over point chunks.
        let assign_outcomes: Vec<(usize, f64)> = {
            let current = &centroids;
            thread::scope(|scope| {
                let chunks = split_label_chunks(&mut assignments.labels, &ranges);
                let handles: Vec<_> = chunks
                    .into_iter()
                    .zip(&ranges)
                    .map(|(labels, range)| {
                        let start = range.start;
                        scope.spawn(move || assign_chunk(ds, current, start, labels))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|handle| handle.join().expect("worker panicked"))
                    .collect()
            })
        };
        regions += 1;
        let mut changed = 0usize;
        let mut objective = 0.0f64;
        for (chunk_changed, chunk_objective) in assign_outcomes {
            changed += chunk_changed;
            objective += chunk_objective;
        }

        // Region 2: per-worker partial sums, reduced in worker order.
        let partials: Vec<(Vec<f64>, Vec<usize>)> = {
            let labels = &assignments.labels;
            thread::scope(|scope| {
                let handles: Vec<_> = ranges
                    .iter()
                    .map(|range| {
                        let range = range.clone();
                        scope.spawn(move || {
                            let mut sums = vec![0.0f64; k * dim];
                            let mut counts = vec![0usize; k];
                            accumulate_chunk(
                                ds,
                                &labels[range.clone()],
                                range.start,
                                &mut sums,
                                &mut counts,
                            );
                            (sums, counts)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|handle| handle.join().expect("worker panicked"))
                    .collect()
            })
        };
        regions += 1;
        let mut sums = vec![0.0f64; k * dim];
        let mut counts = vec![0usize; k];
        for (local_sums, local_counts) in &partials {
            for (acc, local) in sums.iter_mut().zip(local_sums) {
                *acc += *local;
            }
            for (acc, local) in counts.iter_mut().zip(local_counts) {
                *acc += *local;
            }
        }

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
        parallel_regions: regions,
    })
}
