//! Reproducible synthetic datasets drawn from Gaussian mixtures.
//!
//! A [`MixtureSpec`] fully determines its output: the same spec, seed, and
//! sample count produce bit-identical coordinates on every run. Each point
//! consumes a fixed number of generator draws (one uniform for the component
//! choice, then two per coordinate for the normal), so the stream never
//! shifts between points.

use serde::{Deserialize, Serialize};

use crate::core::{Assignments, Dataset};
use crate::rng;
use crate::{Error, Result};

/// Covariance of one mixture component: a full symmetric matrix, or just
/// the diagonal as a shorthand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Covariance {
    Diagonal(Vec<f64>),
    Full(Vec<Vec<f64>>),
}

impl Covariance {
    /// Identity covariance of dimension `dim`.
    pub fn identity(dim: usize) -> Self {
        Covariance::Diagonal(vec![1.0; dim])
    }

    fn to_dense(&self, dim: usize) -> Result<Vec<f64>> {
        match self {
            Covariance::Diagonal(diag) => {
                if diag.len() != dim {
                    return Err(Error::InvalidConfig(format!(
                        "diagonal covariance has {} entries, expected {dim}",
                        diag.len()
                    )));
                }
                let mut dense = vec![0.0; dim * dim];
                for (i, &v) in diag.iter().enumerate() {
                    dense[i * dim + i] = v;
                }
                Ok(dense)
            }
            Covariance::Full(rows) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(Error::InvalidConfig(format!(
                        "covariance must be a {dim}x{dim} matrix"
                    )));
                }
                let mut dense = Vec::with_capacity(dim * dim);
                for row in rows {
                    dense.extend_from_slice(row);
                }
                for i in 0..dim {
                    for j in 0..i {
                        if (dense[i * dim + j] - dense[j * dim + i]).abs() > 1e-12 {
                            return Err(Error::InvalidConfig(
                                "covariance matrix is not symmetric".into(),
                            ));
                        }
                    }
                }
                Ok(dense)
            }
        }
    }
}

/// One Gaussian component of a mixture.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: Vec<f64>,
    pub cov: Covariance,
}

impl MixtureComponent {
    /// Spherical component: identity covariance scaled by `sigma^2`.
    pub fn spherical(weight: f64, mean: Vec<f64>, sigma: f64) -> Self {
        let dim = mean.len();
        Self {
            weight,
            mean,
            cov: Covariance::Diagonal(vec![sigma * sigma; dim]),
        }
    }
}

/// A seeded Gaussian mixture in `dim` dimensions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub dim: usize,
    pub seed: u64,
    pub components: Vec<MixtureComponent>,
}

impl MixtureSpec {
    /// Validate the spec and pre-factor each component covariance.
    fn compile(&self) -> Result<CompiledMixture> {
        if self.dim == 0 {
            return Err(Error::InvalidConfig("mixture dim must be at least 1".into()));
        }
        if self.components.is_empty() {
            return Err(Error::InvalidConfig(
                "mixture needs at least one component".into(),
            ));
        }
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "component weights sum to {total}, expected 1"
            )));
        }
        let mut compiled = Vec::with_capacity(self.components.len());
        let mut cumulative = 0.0;
        for (idx, comp) in self.components.iter().enumerate() {
            if comp.weight <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "component {idx} weight {} must be positive",
                    comp.weight
                )));
            }
            if comp.mean.len() != self.dim {
                return Err(Error::InvalidConfig(format!(
                    "component {idx} mean has dim {}, expected {}",
                    comp.mean.len(),
                    self.dim
                )));
            }
            let dense = comp.cov.to_dense(self.dim)?;
            let chol = cholesky(&dense, self.dim).ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "component {idx} covariance is not positive-definite \
                     (a zero covariance is rejected; use a small diagonal instead)"
                ))
            })?;
            cumulative += comp.weight;
            compiled.push(CompiledComponent {
                cumulative_weight: cumulative,
                mean: comp.mean.clone(),
                chol,
            });
        }
        // Guard the final bucket against rounding in the cumulative sum.
        compiled.last_mut().expect("non-empty").cumulative_weight = f64::INFINITY;
        Ok(CompiledMixture {
            dim: self.dim,
            components: compiled,
        })
    }
}

struct CompiledComponent {
    cumulative_weight: f64,
    mean: Vec<f64>,
    /// Lower-triangular Cholesky factor, row-major `dim x dim`.
    chol: Vec<f64>,
}

struct CompiledMixture {
    dim: usize,
    components: Vec<CompiledComponent>,
}

/// Lower-triangular Cholesky factor of a dense symmetric matrix, or `None`
/// if the matrix is not positive-definite.
fn cholesky(matrix: &[f64], dim: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let mut sum = matrix[i * dim + j];
            for p in 0..j {
                sum -= l[i * dim + p] * l[j * dim + p];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i * dim + i] = sum.sqrt();
            } else {
                l[i * dim + j] = sum / l[j * dim + j];
            }
        }
    }
    Some(l)
}

/// Draw `n` points from the mixture along with the component each point
/// came from. Identical `(spec, n)` pairs, seed included, yield bit-identical
/// output.
pub fn sample(spec: &MixtureSpec, n: usize) -> Result<(Dataset, Assignments)> {
    if n == 0 {
        return Err(Error::InvalidConfig("sample count must be at least 1".into()));
    }
    let mixture = spec.compile()?;
    let dim = mixture.dim;
    let mut generator = rng::seeded(spec.seed);
    let mut coords = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    let mut z = vec![0.0; dim];
    for _ in 0..n {
        let pick = rng::unit_uniform(&mut generator);
        let comp_idx = mixture
            .components
            .iter()
            .position(|c| pick < c.cumulative_weight)
            .expect("cumulative weights cover [0,1)");
        let comp = &mixture.components[comp_idx];
        for slot in z.iter_mut() {
            *slot = rng::standard_normal(&mut generator);
        }
        for row in 0..dim {
            let mut value = comp.mean[row];
            let chol_row = &comp.chol[row * dim..row * dim + row + 1];
            for (factor, noise) in chol_row.iter().zip(&z) {
                value += factor * noise;
            }
            coords.push(value);
        }
        labels.push(comp_idx as u32);
    }
    let dataset = Dataset::new(coords, dim)?;
    let truth = Assignments::new(labels, mixture.components.len())?;
    Ok((dataset, truth))
}

/// A named built-in mixture with its default sample count.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub n: usize,
    pub spec: MixtureSpec,
}

/// Built-in benchmark mixtures: 2D datasets at 100k/200k/500k points with
/// eight well-separated components, and 3D datasets at 100k through 1M with
/// four. Components sit on a coarse grid with unit variances and at least
/// 6-sigma separation, so the true clusters are recoverable.
pub fn builtin_presets() -> Vec<Preset> {
    let grid_2d: [(f64, f64); 8] = [
        (0.0, 0.0),
        (8.0, 0.0),
        (16.0, 0.0),
        (0.0, 8.0),
        (16.0, 8.0),
        (0.0, 16.0),
        (8.0, 16.0),
        (16.0, 16.0),
    ];
    let spec_2d = |seed: u64| MixtureSpec {
        dim: 2,
        seed,
        components: grid_2d
            .iter()
            .map(|&(x, y)| MixtureComponent::spherical(1.0 / 8.0, vec![x, y], 1.0))
            .collect(),
    };

    let grid_3d: [(f64, f64, f64); 4] = [
        (0.0, 0.0, 0.0),
        (8.0, 0.0, 0.0),
        (0.0, 8.0, 0.0),
        (0.0, 0.0, 8.0),
    ];
    let spec_3d = |seed: u64| MixtureSpec {
        dim: 3,
        seed,
        components: grid_3d
            .iter()
            .map(|&(x, y, z)| MixtureComponent::spherical(0.25, vec![x, y, z], 1.0))
            .collect(),
    };

    vec![
        Preset { name: "2d-100k", n: 100_000, spec: spec_2d(201) },
        Preset { name: "2d-200k", n: 200_000, spec: spec_2d(202) },
        Preset { name: "2d-500k", n: 500_000, spec: spec_2d(205) },
        Preset { name: "3d-100k", n: 100_000, spec: spec_3d(301) },
        Preset { name: "3d-200k", n: 200_000, spec: spec_3d(302) },
        Preset { name: "3d-400k", n: 400_000, spec: spec_3d(304) },
        Preset { name: "3d-800k", n: 800_000, spec: spec_3d(308) },
        Preset { name: "3d-1m", n: 1_000_000, spec: spec_3d(310) },
    ]
}

/// Look up a built-in preset by name.
pub fn preset(name: &str) -> Result<Preset> {
    builtin_presets()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| {
            let known: Vec<&str> = builtin_presets().iter().map(|p| p.name).collect();
            Error::NotFound(format!(
                "unknown preset '{name}'; available: {}",
                known.join(", ")
            ))
        })
}
