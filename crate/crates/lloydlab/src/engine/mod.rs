//! Lloyd's algorithm with three interchangeable execution strategies.
//!
//! The iteration is always the same: assign every point to its nearest
//! center, recompute each center as the mean of its members, then compare
//! the summed squared center movement `E` against the tolerance. The
//! strategies differ only in how the work is scheduled:
//!
//! * [`Strategy::Serial`] — single-threaded reference implementation.
//! * [`Strategy::Persistent`] — workers spawned once before the loop,
//!   synchronized by barriers each iteration, with local partials merged
//!   into global accumulators inside an ordered critical section.
//! * [`Strategy::ForkJoin`] — a fresh parallel region forked for the
//!   assignment step and another for the accumulation step of every
//!   iteration, joined immediately after.
//!
//! All three share the same per-chunk kernels and merge partial sums in
//! ascending worker order, so a fixed `(dataset, params)` pair reproduces
//! centroids and assignments bit-for-bit run to run, and `threads = 1`
//! degenerates to the exact serial arithmetic.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::core::{
    nearest_centroid_with_distance, Assignments, Centroids, ConvergenceState, Dataset,
};
use crate::rng;
use crate::{Error, Result};

mod forkjoin;
mod persistent;
mod serial;

/// Execution strategy for [`run`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Serial,
    Persistent,
    ForkJoin,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Serial => write!(f, "serial"),
            Strategy::Persistent => write!(f, "persistent"),
            Strategy::ForkJoin => write!(f, "forkjoin"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "serial" => Ok(Strategy::Serial),
            "persistent" => Ok(Strategy::Persistent),
            "forkjoin" => Ok(Strategy::ForkJoin),
            other => Err(Error::InvalidConfig(format!(
                "unknown strategy '{other}' (expected serial, persistent, or forkjoin)"
            ))),
        }
    }
}

/// Configuration for one clustering run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterParams {
    /// Number of clusters to produce.
    pub k: usize,
    /// Stop once the summed squared center shift falls below this.
    pub tolerance: f64,
    /// Hard cap on iterations; hitting it is reported, not an error.
    pub max_iterations: usize,
    /// Seed for the initial center selection.
    pub seed: u64,
    pub strategy: Strategy,
    /// Worker count for the parallel strategies; ignored for serial.
    pub threads: usize,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_ITERATIONS: usize = 500;

impl ClusterParams {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            seed,
            strategy: Strategy::Serial,
            threads: 1,
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy, threads: usize) -> Self {
        self.strategy = strategy;
        self.threads = threads;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    /// Check the parameters against a concrete dataset.
    pub fn validate(&self, ds: &Dataset) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if self.k > ds.n() {
            return Err(Error::InvalidConfig(format!(
                "k = {} exceeds dataset size n = {}",
                self.k,
                ds.n()
            )));
        }
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be a positive finite number, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(Error::InvalidConfig("threads must be at least 1".into()));
        }
        Ok(())
    }
}

/// Everything produced by one clustering run.
///
/// For a fixed `(dataset, params)` pair every field except `wall_time` is
/// reproduced bit-for-bit across repeated runs.
#[derive(Debug, Clone)]
pub struct ClusteringResult {
    pub centroids: Centroids,
    pub assignments: Assignments,
    /// Number of assign/update iterations performed.
    pub iterations: usize,
    /// Shift error `E` per iteration; length equals `iterations`.
    pub shift_trace: Vec<f64>,
    /// Objective per iteration, measured during the assignment step as the
    /// sum of winning squared distances. Non-increasing by Lloyd's descent
    /// property (up to floating-point reassociation).
    pub objective_trace: Vec<f64>,
    /// Seconds spent in the iteration loop (worker spawn included for the
    /// persistent strategy); excludes data loading and initialization.
    pub wall_time: f64,
    /// True iff the final shift error fell below the tolerance.
    pub converged: bool,
    /// Number of parallel regions forked: 0 for serial, 1 for persistent,
    /// two per iteration for fork-join.
    pub parallel_regions: usize,
}

/// Pick `k` initial centers by sampling dataset points uniformly without
/// replacement, deterministically from `seed`.
pub fn init_centroids(ds: &Dataset, k: usize, seed: u64) -> Result<Centroids> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if k > ds.n() {
        return Err(Error::InvalidConfig(format!(
            "cannot select {k} initial centers from {} points",
            ds.n()
        )));
    }
    let mut generator = rng::seeded(seed);
    let picks = rng::sample_without_replacement(&mut generator, ds.n(), k);
    let mut centers = Vec::with_capacity(k * ds.dim());
    for &idx in &picks {
        centers.extend_from_slice(ds.point(idx));
    }
    Centroids::new(centers, ds.dim())
}

/// Reassign every point to its nearest center, returning how many labels
/// changed versus the previous contents of `a`.
pub fn assign_step(ds: &Dataset, c: &Centroids, a: &mut Assignments) -> Result<usize> {
    crate::core::check_shapes(ds, c, a)?;
    let (changed, _) = assign_chunk(ds, c, 0, &mut a.labels);
    Ok(changed)
}

/// Recompute each center as the mean of its assigned points. An empty
/// cluster keeps its previous center. Returns the new centers and the
/// member count per cluster.
pub fn update_step(
    ds: &Dataset,
    a: &Assignments,
    k: usize,
    prev: &Centroids,
) -> Result<(Centroids, Vec<usize>)> {
    if a.k() != k || prev.k() != k {
        return Err(Error::InvalidConfig(format!(
            "k mismatch: requested {k}, assignments {}, previous centroids {}",
            a.k(),
            prev.k()
        )));
    }
    crate::core::check_shapes(ds, prev, a)?;
    let dim = ds.dim();
    let mut sums = vec![0.0; k * dim];
    let mut counts = vec![0usize; k];
    accumulate_chunk(ds, &a.labels, 0, &mut sums, &mut counts);
    let next = centroids_from_sums(&sums, &counts, prev)?;
    Ok((next, counts))
}

/// Run Lloyd's algorithm to convergence under the configured strategy.
///
/// The loop stops when the shift error drops below the tolerance, when an
/// assignment pass changes no labels, or at `max_iterations`, whichever
/// comes first. Failing to converge within the cap is not an error; the
/// result reports `converged = false`.
pub fn run(ds: &Dataset, params: &ClusterParams) -> Result<ClusteringResult> {
    params.validate(ds)?;
    match params.strategy {
        Strategy::Serial => serial::run_with_hook(ds, params, |_, _| {}),
        Strategy::Persistent => persistent::run(ds, params),
        Strategy::ForkJoin => forkjoin::run(ds, params),
    }
}

/// Like [`run`] for the serial strategy, invoking `observer` with the
/// iteration number and the fresh assignments after every assignment pass.
/// Intended for verification harnesses that need per-iteration state.
pub fn run_observed(
    ds: &Dataset,
    params: &ClusterParams,
    observer: impl FnMut(usize, &Assignments),
) -> Result<ClusteringResult> {
    params.validate(ds)?;
    if params.strategy != Strategy::Serial {
        return Err(Error::InvalidConfig(
            "run_observed only supports the serial strategy".into(),
        ));
    }
    serial::run_with_hook(ds, params, observer)
}

/// Split `[0, n)` into `p` contiguous chunks of ceiling size; trailing
/// chunks may be empty when `p` does not divide `n`.
pub fn chunk_ranges(n: usize, p: usize) -> Vec<Range<usize>> {
    assert!(p >= 1, "at least one chunk required");
    let chunk = n.div_ceil(p);
    (0..p)
        .map(|c| {
            let start = (c * chunk).min(n);
            let end = ((c + 1) * chunk).min(n);
            start..end
        })
        .collect()
}

/// Assign labels for the points covered by `labels` (a window starting at
/// dataset index `start`), returning the changed count and the sum of
/// winning squared distances.
pub(crate) fn assign_chunk(
    ds: &Dataset,
    c: &Centroids,
    start: usize,
    labels: &mut [u32],
) -> (usize, f64) {
    let mut changed = 0usize;
    let mut objective = 0.0f64;
    for (offset, slot) in labels.iter_mut().enumerate() {
        let (best, dist) = nearest_centroid_with_distance(ds.point(start + offset), c);
        let best = best as u32;
        if *slot != best {
            *slot = best;
            changed += 1;
        }
        objective += dist;
    }
    (changed, objective)
}

/// Accumulate per-cluster coordinate sums and member counts for the points
/// covered by `labels` (a window starting at dataset index `start`).
pub(crate) fn accumulate_chunk(
    ds: &Dataset,
    labels: &[u32],
    start: usize,
    sums: &mut [f64],
    counts: &mut [usize],
) {
    let dim = ds.dim();
    for (offset, &label) in labels.iter().enumerate() {
        let point = ds.point(start + offset);
        let cluster = label as usize;
        counts[cluster] += 1;
        let dst = &mut sums[cluster * dim..(cluster + 1) * dim];
        for (acc, &coord) in dst.iter_mut().zip(point) {
            *acc += coord;
        }
    }
}

/// Divide accumulated sums by counts; clusters with no members keep their
/// previous center so K never shrinks.
pub(crate) fn centroids_from_sums(
    sums: &[f64],
    counts: &[usize],
    prev: &Centroids,
) -> Result<Centroids> {
    let dim = prev.dim();
    let k = prev.k();
    debug_assert_eq!(sums.len(), k * dim);
    debug_assert_eq!(counts.len(), k);
    let mut centers = Vec::with_capacity(k * dim);
    for cluster in 0..k {
        if counts[cluster] == 0 {
            centers.extend_from_slice(prev.center(cluster));
        } else {
            let count = counts[cluster] as f64;
            for d in 0..dim {
                centers.push(sums[cluster * dim + d] / count);
            }
        }
    }
    Centroids::new(centers, dim)
}

/// Shared per-iteration bookkeeping: records traces and decides whether to
/// stop. The zero-reassignment rule only applies from the second iteration
/// on, because the first pass counts changes against the synthetic initial
/// label buffer rather than a real assignment.
pub(crate) struct LoopState {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub shift_trace: Vec<f64>,
    pub objective_trace: Vec<f64>,
    pub converged: bool,
}

impl LoopState {
    pub fn new(params: &ClusterParams) -> Self {
        Self {
            tolerance: params.tolerance,
            max_iterations: params.max_iterations,
            shift_trace: Vec::new(),
            objective_trace: Vec::new(),
            converged: false,
        }
    }

    /// Record one finished iteration; returns true when the loop should stop.
    pub fn record(&mut self, iteration: usize, shift_error: f64, objective: f64, changed: usize) -> bool {
        self.shift_trace.push(shift_error);
        self.objective_trace.push(objective);
        let state = ConvergenceState::new(iteration, shift_error, self.tolerance);
        self.converged = state.converged;
        state.converged || (iteration >= 2 && changed == 0) || iteration >= self.max_iterations
    }
}

/// Split a label buffer into per-chunk mutable windows matching `ranges`.
/// Ranges must be contiguous and ascending from zero, as produced by
/// [`chunk_ranges`].
pub(crate) fn split_label_chunks<'a>(
    mut labels: &'a mut [u32],
    ranges: &[Range<usize>],
) -> Vec<&'a mut [u32]> {
    let mut chunks = Vec::with_capacity(ranges.len());
    let mut consumed = 0usize;
    for range in ranges {
        debug_assert_eq!(range.start, consumed, "ranges must be contiguous from 0");
        let (head, tail) = labels.split_at_mut(range.len());
        chunks.push(head);
        labels = tail;
        consumed += range.len();
    }
    chunks
}
