//! File formats for datasets, results, and plot-ready cluster dumps.
//!
//! Datasets are CSV with one point per line and no header; floats are
//! serialized in shortest round-trip decimal form, so write-then-read
//! reproduces coordinates bit-exactly and golden files stay stable across
//! platforms. Result bundles use fixed file names inside an output
//! directory so downstream tooling never guesses.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::core::{Assignments, Centroids, Dataset};
use crate::engine::{ClusterParams, ClusteringResult};
use crate::{Error, Result};

pub const FILE_DATASET: &str = "dataset.csv";
pub const FILE_ASSIGNMENTS: &str = "assignments.csv";
pub const FILE_CENTROIDS: &str = "centroids.csv";
pub const FILE_TRACE: &str = "trace.csv";
pub const FILE_META: &str = "meta.json";
pub const FILE_BENCH: &str = "bench.csv";
pub const FILE_SPEEDUP: &str = "speedup.json";

/// Descriptor for a dataset CSV on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetFile {
    pub path: PathBuf,
    pub dim: usize,
    pub has_labels: bool,
}

impl DatasetFile {
    /// Read the file, returning the coordinates and, when present, the
    /// trailing integer labels.
    pub fn read(&self) -> Result<(Dataset, Option<Assignments>)> {
        if self.has_labels {
            let (ds, labels) = read_labeled_dataset(&self.path, Some(self.dim))?;
            Ok((ds, Some(labels)))
        } else {
            Ok((read_dataset(&self.path, Some(self.dim))?, None))
        }
    }
}

/// SHA-256 over the dataset shape and raw coordinate bits, hex-encoded.
/// Stable across platforms for bit-identical data.
pub fn dataset_sha256(ds: &Dataset) -> String {
    let mut hasher = Sha256::new();
    hasher.update((ds.n() as u64).to_le_bytes());
    hasher.update((ds.dim() as u64).to_le_bytes());
    for coord in ds.coords() {
        hasher.update(coord.to_bits().to_le_bytes());
    }
    hex::encode(hasher.finalize())
}

/// Write a dataset as CSV, appending each point's true label as a final
/// integer column when `labels` is given.
pub fn write_dataset(path: &Path, ds: &Dataset, labels: Option<&Assignments>) -> Result<()> {
    if let Some(labels) = labels {
        if labels.len() != ds.n() {
            return Err(Error::InvalidConfig(format!(
                "label count {} does not match dataset size {}",
                labels.len(),
                ds.n()
            )));
        }
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for (i, point) in ds.iter_points().enumerate() {
        write_point(&mut out, point).map_err(|e| Error::io(path, e))?;
        if let Some(labels) = labels {
            write!(out, ",{}", labels.label(i)).map_err(|e| Error::io(path, e))?;
        }
        writeln!(out).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

fn write_point(out: &mut impl Write, point: &[f64]) -> std::io::Result<()> {
    for (d, coord) in point.iter().enumerate() {
        if d > 0 {
            write!(out, ",")?;
        }
        write!(out, "{coord}")?;
    }
    Ok(())
}

/// Read a dataset CSV where every column is a coordinate. Rejects ragged
/// rows and non-finite values, citing the offending 1-based line.
pub fn read_dataset(path: &Path, expected_dim: Option<usize>) -> Result<Dataset> {
    let (coords, dim, _) = read_rows(path, expected_dim, false)?;
    Dataset::new(coords, dim)
}

/// Read a dataset CSV whose final column is an integer label.
pub fn read_labeled_dataset(
    path: &Path,
    expected_dim: Option<usize>,
) -> Result<(Dataset, Assignments)> {
    let (coords, dim, labels) = read_rows(path, expected_dim, true)?;
    let ds = Dataset::new(coords, dim)?;
    let k = labels.iter().copied().max().unwrap_or(0) as usize + 1;
    let labels = Assignments::new(labels, k)?;
    Ok((ds, labels))
}

fn read_rows(
    path: &Path,
    expected_dim: Option<usize>,
    with_labels: bool,
) -> Result<(Vec<f64>, usize, Vec<u32>)> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut coords = Vec::new();
    let mut labels = Vec::new();
    let mut dim: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            return Err(parse_err(line_no, "empty row".into()));
        }
        let fields: Vec<&str> = line.split(',').collect();
        let value_count = if with_labels {
            fields
                .len()
                .checked_sub(1)
                .filter(|&c| c > 0)
                .ok_or_else(|| {
                    parse_err(line_no, "expected at least one coordinate and a label".into())
                })?
        } else {
            fields.len()
        };
        match dim {
            None => {
                if let Some(expected) = expected_dim {
                    if value_count != expected {
                        return Err(parse_err(
                            line_no,
                            format!("expected {expected} coordinates, found {value_count}"),
                        ));
                    }
                }
                dim = Some(value_count);
            }
            Some(d) if d != value_count => {
                return Err(parse_err(
                    line_no,
                    format!("ragged row: expected {d} columns, found {value_count}"),
                ));
            }
            _ => {}
        }
        for field in &fields[..value_count] {
            let value: f64 = field.trim().parse().map_err(|_| {
                parse_err(line_no, format!("cannot parse '{field}' as a number"))
            })?;
            if !value.is_finite() {
                return Err(parse_err(line_no, format!("non-finite value '{field}'")));
            }
            coords.push(value);
        }
        if with_labels {
            let field = fields[value_count];
            let label: u32 = field.trim().parse().map_err(|_| {
                parse_err(line_no, format!("cannot parse '{field}' as a label"))
            })?;
            labels.push(label);
        }
    }
    let dim = dim.ok_or_else(|| parse_err(1, "file contains no rows".into()))?;
    Ok((coords, dim, labels))
}

/// Write cluster labels, one integer per line.
pub fn write_assignments(path: &Path, a: &Assignments) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for i in 0..a.len() {
        writeln!(out, "{}", a.label(i)).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Read cluster labels written by [`write_assignments`]; `k` is taken from
/// the accompanying centroids.
pub fn read_assignments(path: &Path, k: usize) -> Result<Assignments> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut labels = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let label: u32 = line.trim().parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            message: format!("cannot parse '{line}' as a label"),
        })?;
        labels.push(label);
    }
    Assignments::new(labels, k)
}

/// Write centers as CSV, one center per line.
pub fn write_centroids(path: &Path, c: &Centroids) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for center in c.iter_centers() {
        write_point(&mut out, center).map_err(|e| Error::io(path, e))?;
        writeln!(out).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Read centers written by [`write_centroids`].
pub fn read_centroids(path: &Path) -> Result<Centroids> {
    let (coords, dim, _) = read_rows(path, None, false)?;
    Centroids::new(coords, dim)
}

/// Write the per-iteration trace with a `iteration,shift_error,objective`
/// header.
pub fn write_trace(path: &Path, shift_trace: &[f64], objective_trace: &[f64]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "iteration,shift_error,objective").map_err(|e| Error::io(path, e))?;
    for (idx, (shift, objective)) in shift_trace.iter().zip(objective_trace).enumerate() {
        writeln!(out, "{},{shift},{objective}", idx + 1).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Read a trace file back into (shift_trace, objective_trace).
pub fn read_trace(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing header".into()))?
        .map_err(|e| Error::io(path, e))?;
    if header.trim_end_matches('\r') != "iteration,shift_error,objective" {
        return Err(parse_err(1, format!("unexpected header '{header}'")));
    }
    let mut shifts = Vec::new();
    let mut objectives = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line.map_err(|e| Error::io(path, e))?;
        let fields: Vec<&str> = line.trim_end_matches('\r').split(',').collect();
        if fields.len() != 3 {
            return Err(parse_err(line_no, format!("expected 3 columns, found {}", fields.len())));
        }
        let shift: f64 = fields[1]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad shift_error '{}'", fields[1])))?;
        let objective: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad objective '{}'", fields[2])))?;
        shifts.push(shift);
        objectives.push(objective);
    }
    Ok((shifts, objectives))
}

/// Everything needed to identify the dataset a result came from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetMeta {
    /// Source path when the dataset came from a file.
    pub path: Option<String>,
    pub n: usize,
    pub dim: usize,
    pub sha256: String,
}

impl DatasetMeta {
    pub fn for_dataset(ds: &Dataset, path: Option<&Path>) -> Self {
        Self {
            path: path.map(|p| p.display().to_string()),
            n: ds.n(),
            dim: ds.dim(),
            sha256: dataset_sha256(ds),
        }
    }
}

/// Metadata JSON accompanying every clustering run: enough to reproduce the
/// run exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterRunMeta {
    pub tool_version: String,
    pub dataset: DatasetMeta,
    pub params: ClusterParams,
    pub iterations: usize,
    pub converged: bool,
    pub final_shift_error: f64,
    pub final_objective: f64,
    pub wall_time_s: f64,
    pub parallel_regions: usize,
}

/// On-disk result of one clustering run: assignments, centers, trace, and
/// metadata under fixed file names.
#[derive(Debug, Clone)]
pub struct ResultBundle {
    pub assignments: Assignments,
    pub centroids: Centroids,
    pub shift_trace: Vec<f64>,
    pub objective_trace: Vec<f64>,
    pub meta: ClusterRunMeta,
}

impl ResultBundle {
    /// Package a finished run. `final_objective` is recomputed against the
    /// final centers so the metadata reflects the clustering actually
    /// written to disk.
    pub fn from_run(
        ds: &Dataset,
        dataset_path: Option<&Path>,
        params: &ClusterParams,
        result: &ClusteringResult,
    ) -> Result<Self> {
        let final_objective =
            crate::core::compute_objective(ds, &result.centroids, &result.assignments)?;
        Ok(Self {
            assignments: result.assignments.clone(),
            centroids: result.centroids.clone(),
            shift_trace: result.shift_trace.clone(),
            objective_trace: result.objective_trace.clone(),
            meta: ClusterRunMeta {
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                dataset: DatasetMeta::for_dataset(ds, dataset_path),
                params: params.clone(),
                iterations: result.iterations,
                converged: result.converged,
                final_shift_error: result.shift_trace.last().copied().unwrap_or(0.0),
                final_objective,
                wall_time_s: result.wall_time,
                parallel_regions: result.parallel_regions,
            },
        })
    }

    /// Write assignments.csv, centroids.csv, trace.csv, and meta.json into
    /// `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_assignments(&dir.join(FILE_ASSIGNMENTS), &self.assignments)?;
        write_centroids(&dir.join(FILE_CENTROIDS), &self.centroids)?;
        write_trace(&dir.join(FILE_TRACE), &self.shift_trace, &self.objective_trace)?;
        let meta_path = dir.join(FILE_META);
        let json = serde_json::to_string_pretty(&self.meta)?;
        fs::write(&meta_path, json).map_err(|e| Error::io(&meta_path, e))?;
        Ok(())
    }

    /// Read a bundle previously written by [`ResultBundle::write`].
    pub fn read(dir: &Path) -> Result<Self> {
        let centroids = read_centroids(&dir.join(FILE_CENTROIDS))?;
        let assignments = read_assignments(&dir.join(FILE_ASSIGNMENTS), centroids.k())?;
        let (shift_trace, objective_trace) = read_trace(&dir.join(FILE_TRACE))?;
        let meta_path = dir.join(FILE_META);
        let meta_raw = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
        let meta: ClusterRunMeta = serde_json::from_str(&meta_raw)?;
        if meta.dataset.n != assignments.len() {
            return Err(Error::InvalidData(format!(
                "bundle metadata says n = {} but assignments.csv has {} rows",
                meta.dataset.n,
                assignments.len()
            )));
        }
        if meta.params.k != centroids.k() {
            return Err(Error::InvalidData(format!(
                "bundle metadata says k = {} but centroids.csv has {} rows",
                meta.params.k,
                centroids.k()
            )));
        }
        Ok(Self {
            assignments,
            centroids,
            shift_trace,
            objective_trace,
            meta,
        })
    }
}

/// Dump per-cluster member coordinates (`cluster_000.csv`, ...) plus a
/// centers file, ready for any external plotting tool. Empty clusters still
/// produce a zero-row file so K stays visible. Member files partition the
/// dataset.
pub fn write_plot_data(dir: &Path, ds: &Dataset, a: &Assignments, c: &Centroids) -> Result<()> {
    crate::core::check_shapes(ds, c, a)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut writers: Vec<BufWriter<File>> = Vec::with_capacity(c.k());
    for cluster in 0..c.k() {
        let path = dir.join(plot_member_file(cluster));
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        writers.push(BufWriter::new(file));
    }
    for (i, point) in ds.iter_points().enumerate() {
        let out = &mut writers[a.label(i)];
        write_point(out, point).map_err(|e| Error::io(dir, e))?;
        writeln!(out).map_err(|e| Error::io(dir, e))?;
    }
    for mut out in writers {
        out.flush().map_err(|e| Error::io(dir, e))?;
    }
    write_centroids(&dir.join(FILE_CENTROIDS), c)
}

/// Name of the member file for one cluster.
pub fn plot_member_file(cluster: usize) -> String {
    format!("cluster_{cluster:03}.csv")
}
