//! Shared value types and the distance/objective primitives every engine
//! strategy builds on.
//!
//! Points and centers are stored point-major in flat `f64` buffers: the
//! assignment step streams points sequentially, so that layout is the hot
//! path. All types reject non-finite coordinates at construction; an argmin
//! over NaN is ill-defined, so bad values are stopped at the door instead
//! of propagated.

use crate::{Error, Result};

/// A dataset of `n` points of dimension `dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<f64>,
    n: usize,
    dim: usize,
}

impl Dataset {
    /// Build a dataset from a flat coordinate buffer of length `n * dim`.
    pub fn new(points: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidData("dimension must be at least 1".into()));
        }
        if points.is_empty() || !points.len().is_multiple_of(dim) {
            return Err(Error::InvalidData(format!(
                "coordinate buffer of length {} is not a positive multiple of dim {dim}",
                points.len()
            )));
        }
        if let Some(pos) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite coordinate {} at flat index {pos}",
                points[pos]
            )));
        }
        let n = points.len() / dim;
        Ok(Self { points, n, dim })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coordinates of point `i`.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// The flat coordinate buffer.
    pub fn coords(&self) -> &[f64] {
        &self.points
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }
}

/// K cluster centers for one iteration, stored row-major like [`Dataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct Centroids {
    centers: Vec<f64>,
    k: usize,
    dim: usize,
}

impl Centroids {
    /// Build a centroid set from a flat buffer of length `k * dim`.
    pub fn new(centers: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidData("dimension must be at least 1".into()));
        }
        if centers.is_empty() || !centers.len().is_multiple_of(dim) {
            return Err(Error::InvalidData(format!(
                "center buffer of length {} is not a positive multiple of dim {dim}",
                centers.len()
            )));
        }
        if let Some(pos) = centers.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite center coordinate {} at flat index {pos}",
                centers[pos]
            )));
        }
        let k = centers.len() / dim;
        Ok(Self { centers, k, dim })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coordinates of center `j`.
    pub fn center(&self, j: usize) -> &[f64] {
        &self.centers[j * self.dim..(j + 1) * self.dim]
    }

    /// The flat center buffer.
    pub fn coords(&self) -> &[f64] {
        &self.centers
    }

    pub fn iter_centers(&self) -> impl Iterator<Item = &[f64]> {
        self.centers.chunks_exact(self.dim)
    }
}

/// Per-point cluster indicators: `labels[i]` is the cluster of point `i`,
/// always `< k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignments {
    pub(crate) labels: Vec<u32>,
    k: usize,
}

impl Assignments {
    /// Build from explicit labels, validating every label against `k`.
    pub fn new(labels: Vec<u32>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidData("k must be at least 1".into()));
        }
        if labels.is_empty() {
            return Err(Error::InvalidData("assignments must be non-empty".into()));
        }
        if let Some(pos) = labels.iter().position(|&l| l as usize >= k) {
            return Err(Error::InvalidData(format!(
                "label {} at index {pos} is out of range for k={k}",
                labels[pos]
            )));
        }
        Ok(Self { labels, k })
    }

    /// All points assigned to cluster 0; the engine overwrites this on the
    /// first assignment pass.
    pub(crate) fn zeroed(n: usize, k: usize) -> Self {
        Self {
            labels: vec![0; n],
            k,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i] as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }
}

/// Per-iteration shift error and the resulting stop decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceState {
    pub iteration: usize,
    pub shift_error: f64,
    pub tolerance: f64,
    pub converged: bool,
}

impl ConvergenceState {
    /// Record the shift error of one iteration; `converged` is derived as
    /// `shift_error < tolerance`.
    pub fn new(iteration: usize, shift_error: f64, tolerance: f64) -> Self {
        debug_assert!(shift_error >= 0.0);
        debug_assert!(tolerance > 0.0);
        Self {
            iteration,
            shift_error,
            tolerance,
            converged: shift_error < tolerance,
        }
    }
}

/// Squared L2 distance between two points of equal dimension.
///
/// Panics if the dimensions differ; the engine validates shapes once per
/// run before entering the hot loop.
#[inline]
pub fn squared_l2(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "squared_l2: dimension mismatch");
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let diff = x - y;
        acc += diff * diff;
    }
    acc
}

/// Index of the center closest to `x` in squared L2 distance.
///
/// Ties resolve to the lowest cluster index so that results are
/// deterministic across strategies. Panics on dimension mismatch.
#[inline]
pub fn nearest_centroid(x: &[f64], centroids: &Centroids) -> usize {
    assert_eq!(x.len(), centroids.dim(), "nearest_centroid: dimension mismatch");
    let mut best = 0usize;
    let mut best_dist = squared_l2(x, centroids.center(0));
    for j in 1..centroids.k() {
        let dist = squared_l2(x, centroids.center(j));
        if dist < best_dist {
            best_dist = dist;
            best = j;
        }
    }
    best
}

/// Like [`nearest_centroid`], but also returns the winning squared distance.
#[inline]
pub(crate) fn nearest_centroid_with_distance(x: &[f64], centroids: &Centroids) -> (usize, f64) {
    let mut best = 0usize;
    let mut best_dist = squared_l2(x, centroids.center(0));
    for j in 1..centroids.k() {
        let dist = squared_l2(x, centroids.center(j));
        if dist < best_dist {
            best_dist = dist;
            best = j;
        }
    }
    (best, best_dist)
}

/// Clustering objective: the sum over all points of the squared distance to
/// their assigned center.
pub fn compute_objective(ds: &Dataset, c: &Centroids, a: &Assignments) -> Result<f64> {
    check_shapes(ds, c, a)?;
    let mut total = 0.0;
    for (i, point) in ds.iter_points().enumerate() {
        total += squared_l2(point, c.center(a.label(i)));
    }
    Ok(total)
}

/// Convergence statistic: the sum over clusters of the squared distance
/// between consecutive-iteration centers.
pub fn centroid_shift_error(prev: &Centroids, next: &Centroids) -> Result<f64> {
    if prev.k() != next.k() || prev.dim() != next.dim() {
        return Err(Error::InvalidConfig(format!(
            "centroid shapes differ: {}x{} vs {}x{}",
            prev.k(),
            prev.dim(),
            next.k(),
            next.dim()
        )));
    }
    let mut total = 0.0;
    for (p, n) in prev.iter_centers().zip(next.iter_centers()) {
        total += squared_l2(p, n);
    }
    Ok(total)
}

pub(crate) fn check_shapes(ds: &Dataset, c: &Centroids, a: &Assignments) -> Result<()> {
    if ds.dim() != c.dim() {
        return Err(Error::InvalidConfig(format!(
            "dataset dim {} does not match centroid dim {}",
            ds.dim(),
            c.dim()
        )));
    }
    if a.len() != ds.n() {
        return Err(Error::InvalidConfig(format!(
            "assignment count {} does not match dataset size {}",
            a.len(),
            ds.n()
        )));
    }
    if a.k() != c.k() {
        return Err(Error::InvalidConfig(format!(
            "assignment k {} does not match centroid k {}",
            a.k(),
            c.k()
        )));
    }
    Ok(())
}
