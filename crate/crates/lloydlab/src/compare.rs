//! Comparing clusterings whose cluster numbering may differ.
//!
//! Two runs of the same algorithm can produce identical partitions with
//! permuted cluster indices, so comparison first matches centers greedily
//! by nearest pair (exact assignment is unnecessary at the small K used
//! here), then measures label agreement under that mapping.

use serde::Serialize;

use crate::core::{squared_l2, Assignments, Centroids};
use crate::dataio::ResultBundle;
use crate::{Error, Result};

/// Greedy nearest-pair matching: repeatedly pair the globally closest
/// (unmatched left, unmatched right) centers. Returns `mapping` such that
/// left cluster `i` corresponds to right cluster `mapping[i]`. Ties break
/// toward the lowest index pair, so the mapping is deterministic.
pub fn greedy_match(left: &Centroids, right: &Centroids) -> Result<Vec<usize>> {
    if left.k() != right.k() || left.dim() != right.dim() {
        return Err(Error::InvalidConfig(format!(
            "cannot match centroid sets of shape {}x{} and {}x{}",
            left.k(),
            left.dim(),
            right.k(),
            right.dim()
        )));
    }
    let k = left.k();
    let mut mapping = vec![usize::MAX; k];
    let mut left_free = vec![true; k];
    let mut right_free = vec![true; k];
    for _ in 0..k {
        let mut best = (usize::MAX, usize::MAX);
        let mut best_dist = f64::INFINITY;
        for i in (0..k).filter(|&i| left_free[i]) {
            for j in (0..k).filter(|&j| right_free[j]) {
                let dist = squared_l2(left.center(i), right.center(j));
                if dist < best_dist {
                    best_dist = dist;
                    best = (i, j);
                }
            }
        }
        let (i, j) = best;
        mapping[i] = j;
        left_free[i] = false;
        right_free[j] = false;
    }
    Ok(mapping)
}

/// Largest absolute coordinate difference over matched center pairs.
pub fn centroid_linf(left: &Centroids, right: &Centroids, mapping: &[usize]) -> f64 {
    let mut worst = 0.0f64;
    for (i, &j) in mapping.iter().enumerate() {
        for (a, b) in left.center(i).iter().zip(right.center(j)) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

/// Outcome of comparing two result bundles.
#[derive(Debug, Clone, Serialize)]
pub struct BundleComparison {
    /// Left cluster `i` corresponds to right cluster `mapping[i]`.
    pub mapping: Vec<usize>,
    pub total_points: usize,
    pub matching_points: usize,
    /// Fraction of points whose labels agree under the mapping.
    pub agreement: f64,
    /// L-infinity distance between matched centers.
    pub centroid_linf: f64,
}

impl BundleComparison {
    /// The contract for "same clustering": full label agreement and centers
    /// within 1e-6 of each other.
    pub fn is_equivalent(&self) -> bool {
        self.matching_points == self.total_points && self.centroid_linf <= 1e-6
    }
}

/// Compare two clusterings of the same dataset.
pub fn compare_assignments(
    left: &Assignments,
    right: &Assignments,
    left_centroids: &Centroids,
    right_centroids: &Centroids,
) -> Result<BundleComparison> {
    if left.len() != right.len() {
        return Err(Error::InvalidConfig(format!(
            "assignment lengths differ: {} vs {}",
            left.len(),
            right.len()
        )));
    }
    let mapping = greedy_match(left_centroids, right_centroids)?;
    let matching_points = (0..left.len())
        .filter(|&i| mapping[left.label(i)] == right.label(i))
        .count();
    Ok(BundleComparison {
        centroid_linf: centroid_linf(left_centroids, right_centroids, &mapping),
        total_points: left.len(),
        matching_points,
        agreement: matching_points as f64 / left.len() as f64,
        mapping,
    })
}

/// Compare two on-disk result bundles.
pub fn compare_bundles(left: &ResultBundle, right: &ResultBundle) -> Result<BundleComparison> {
    compare_assignments(
        &left.assignments,
        &right.assignments,
        &left.centroids,
        &right.centroids,
    )
}
