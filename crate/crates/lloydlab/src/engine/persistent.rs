//! Persistent-worker strategy: the thread team is spawned once before the
//! iteration loop and kept alive until convergence.
//!
//! Each iteration, every worker assigns its contiguous chunk of points and
//! accumulates local per-cluster sums, then merges them into the global
//! accumulator inside a critical section entered in ascending worker order.
//! A barrier separates the merge from the master phase, where worker 0
//! computes the new centers and the shift error and publishes the stop
//! decision; a second barrier separates that from the next iteration.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Barrier, Condvar, Mutex};
use std::thread;
use std::time::Instant;

use crate::core::{centroid_shift_error, Assignments, Centroids, Dataset};
use crate::Result;

use super::{
    accumulate_chunk, assign_chunk, centroids_from_sums, chunk_ranges, init_centroids,
    split_label_chunks, ClusterParams, ClusteringResult, LoopState,
};

struct MergeState {
    /// Which worker may merge next; workers enter in ascending id order.
    turn: usize,
    sums: Vec<f64>,
    counts: Vec<usize>,
    changed: usize,
    objective: f64,
}

impl MergeState {
    fn new(k: usize, dim: usize) -> Self {
        Self {
            turn: 0,
            sums: vec![0.0; k * dim],
            counts: vec![0; k],
            changed: 0,
            objective: 0.0,
        }
    }

    fn reset(&mut self) {
        self.turn = 0;
        self.sums.fill(0.0);
        self.counts.fill(0);
        self.changed = 0;
        self.objective = 0.0;
    }
}

struct Shared {
    /// Centers read by every worker at the top of an iteration and
    /// rewritten by the master between the two barriers.
    centroids: Mutex<Centroids>,
    merge: Mutex<MergeState>,
    merge_turns: Condvar,
    barrier: Barrier,
    stop: AtomicBool,
}

struct MasterData {
    centroids: Centroids,
    iterations: usize,
    state: LoopState,
}

pub(crate) fn run(ds: &Dataset, params: &ClusterParams) -> Result<ClusteringResult> {
    let workers = params.threads;
    let init = init_centroids(ds, params.k, params.seed)?;
    let mut assignments = Assignments::zeroed(ds.n(), params.k);
    let ranges = chunk_ranges(ds.n(), workers);

    let shared = Shared {
        centroids: Mutex::new(init),
        merge: Mutex::new(MergeState::new(params.k, ds.dim())),
        merge_turns: Condvar::new(),
        barrier: Barrier::new(workers),
        stop: AtomicBool::new(false),
    };

    let started = Instant::now();
    let master = thread::scope(|scope| {
        let chunks = split_label_chunks(&mut assignments.labels, &ranges);
        let mut handles = Vec::with_capacity(workers);
        for (worker_id, (labels, range)) in chunks.into_iter().zip(&ranges).enumerate() {
            let shared = &shared;
            let start = range.start;
            handles.push(
                scope.spawn(move || worker_loop(ds, params, worker_id, start, labels, shared)),
            );
        }
        let mut master = None;
        for handle in handles {
            if let Some(outcome) = handle.join().expect("worker panicked") {
                master = Some(outcome);
            }
        }
        master.expect("worker 0 always reports the master outcome")
    })?;
    let wall_time = started.elapsed().as_secs_f64();

    Ok(ClusteringResult {
        centroids: master.centroids,
        assignments,
        iterations: master.iterations,
        shift_trace: master.state.shift_trace,
        objective_trace: master.state.objective_trace,
        wall_time,
        converged: master.state.converged,
        parallel_regions: 1,
    })
}

fn worker_loop(
    ds: &Dataset,
    params: &ClusterParams,
    worker_id: usize,
    start: usize,
    labels: &mut [u32],
    shared: &Shared,
) -> Option<Result<MasterData>> {
    let k = params.k;
    let dim = ds.dim();
    let mut local_sums = vec![0.0f64; k * dim];
    let mut local_counts = vec![0usize; k];
    // Worker 0 doubles as the master: it owns the previous centers and the
    // traces on top of its share of the assignment work.
    let mut master_state = (worker_id == 0).then(|| {
        let prev = shared.centroids.lock().unwrap().clone();
        (prev, LoopState::new(params))
    });
    let mut iteration = 0usize;

    loop {
        iteration += 1;
        let current = shared.centroids.lock().unwrap().clone();
        let (changed, objective) = assign_chunk(ds, &current, start, labels);
        local_sums.fill(0.0);
        local_counts.fill(0);
        accumulate_chunk(ds, labels, start, &mut local_sums, &mut local_counts);

        // Critical section: fold local partials into the global accumulator.
        // The turn counter enforces ascending worker order, so the global
        // sums see the same addition order every run.
        {
            let mut merge = shared.merge.lock().unwrap();
            while merge.turn != worker_id {
                merge = shared.merge_turns.wait(merge).unwrap();
            }
            for (acc, local) in merge.sums.iter_mut().zip(&local_sums) {
                *acc += *local;
            }
            for (acc, local) in merge.counts.iter_mut().zip(&local_counts) {
                *acc += *local;
            }
            merge.changed += changed;
            merge.objective += objective;
            merge.turn += 1;
            shared.merge_turns.notify_all();
        }
        shared.barrier.wait();

        if let Some((prev, state)) = master_state.as_mut() {
            let step = {
                let mut merge = shared.merge.lock().unwrap();
                let next = centroids_from_sums(&merge.sums, &merge.counts, prev)
                    .and_then(|next| centroid_shift_error(prev, &next).map(|shift| (next, shift)));
                let totals = (merge.changed, merge.objective);
                merge.reset();
                next.map(|pair| (pair, totals))
            };
            match step {
                Ok(((next, shift), (total_changed, total_objective))) => {
                    let done = state.record(iteration, shift, total_objective, total_changed);
                    *shared.centroids.lock().unwrap() = next.clone();
                    *prev = next;
                    shared.stop.store(done, Ordering::Release);
                }
                Err(err) => {
                    shared.stop.store(true, Ordering::Release);
                    shared.barrier.wait();
                    return Some(Err(err));
                }
            }
        }
        shared.barrier.wait();
        if shared.stop.load(Ordering::Acquire) {
            break;
        }
    }

    master_state.map(|(prev, state)| {
        Ok(MasterData {
            centroids: prev,
            iterations: iteration,
            state,
        })
    })
}
