//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (visible with `--nocapture`).
//!
//! Criterion 6 (scaling trends) is soft: on machines with fewer than four
//! cores the measured numbers are reported without being asserted.

// The oracle is written as plain indexed loops on purpose.
#![allow(clippy::needless_range_loop)]

use std::fs;
use std::process::Command;

use lloydlab::bench::{scaling_sweep, SweepGrid};
use lloydlab::compare::{centroid_linf, greedy_match};
use lloydlab::core::{Centroids, Dataset};
use lloydlab::datagen::{preset, sample, MixtureComponent, MixtureSpec};
use lloydlab::engine::{assign_step, init_centroids, run, run_observed, ClusterParams, Strategy};
use lloydlab::rng;
use tempfile::tempdir;

// ---------------------------------------------------------------------
// Independent brute-force Lloyd oracle. Deliberately written from scratch
// against nested point vectors; shares no code with the engine path.
// ---------------------------------------------------------------------

struct OracleOutcome {
    labels_per_iteration: Vec<Vec<usize>>,
    centers: Vec<Vec<f64>>,
    iterations: usize,
}

fn oracle_lloyd(
    points: &[Vec<f64>],
    init: &[Vec<f64>],
    tolerance: f64,
    max_iterations: usize,
) -> OracleOutcome {
    let n = points.len();
    let k = init.len();
    let dim = points[0].len();
    let mut centers: Vec<Vec<f64>> = init.to_vec();
    let mut labels = vec![0usize; n];
    let mut trace = Vec::new();
    let mut iterations = 0usize;
    loop {
        iterations += 1;
        let mut changed = 0usize;
        for i in 0..n {
            let mut best = 0usize;
            let mut best_dist = f64::INFINITY;
            for c in 0..k {
                let mut dist = 0.0;
                for j in 0..dim {
                    let diff = points[i][j] - centers[c][j];
                    dist += diff * diff;
                }
                if dist < best_dist {
                    best_dist = dist;
                    best = c;
                }
            }
            if labels[i] != best {
                labels[i] = best;
                changed += 1;
            }
        }
        trace.push(labels.clone());

        let mut sums = vec![vec![0.0f64; dim]; k];
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[labels[i]] += 1;
            for j in 0..dim {
                sums[labels[i]][j] += points[i][j];
            }
        }
        let mut next = Vec::with_capacity(k);
        for c in 0..k {
            if counts[c] == 0 {
                next.push(centers[c].clone());
            } else {
                next.push(sums[c].iter().map(|s| s / counts[c] as f64).collect());
            }
        }
        let mut shift = 0.0;
        for c in 0..k {
            let mut cluster_shift = 0.0;
            for j in 0..dim {
                let diff = next[c][j] - centers[c][j];
                cluster_shift += diff * diff;
            }
            shift += cluster_shift;
        }
        centers = next;
        if shift < tolerance || (iterations >= 2 && changed == 0) || iterations >= max_iterations {
            break;
        }
    }
    OracleOutcome {
        labels_per_iteration: trace,
        centers,
        iterations,
    }
}

fn as_point_rows(ds: &Dataset) -> Vec<Vec<f64>> {
    ds.iter_points().map(|p| p.to_vec()).collect()
}

fn well_separated_3d(seed: u64) -> MixtureSpec {
    let means = [
        [0.0, 0.0, 0.0],
        [8.0, 0.0, 0.0],
        [0.0, 8.0, 0.0],
        [0.0, 0.0, 8.0],
    ];
    MixtureSpec {
        dim: 3,
        seed,
        components: means
            .iter()
            .map(|m| MixtureComponent::spherical(0.25, m.to_vec(), 1.0))
            .collect(),
    }
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

// ---------------------------------------------------------------------
// Criterion 1: serial engine matches the brute-force oracle exactly, at
// every iteration, over >= 50 random instances.
// ---------------------------------------------------------------------
#[test]
fn acceptance_1_oracle_equivalence() {
    let mut meta = rng::seeded(0xC1);
    let mut total_iterations = 0usize;
    for instance in 0..50 {
        let dim = 2 + (instance % 2);
        let k = [2usize, 4, 8][instance % 3];
        let n = 50 + rng::uniform_index(&mut meta, 951);
        let data_seed = instance as u64 * 31 + 1;
        let init_seed = instance as u64 * 17 + 5;

        // Uniform cube points: dense cluster boundaries stress exact
        // agreement harder than separated blobs.
        let mut gen = rng::seeded(data_seed);
        let coords: Vec<f64> = (0..n * dim).map(|_| rng::unit_uniform(&mut gen) * 10.0).collect();
        let ds = Dataset::new(coords, dim).unwrap();

        let params = ClusterParams::new(k, init_seed);
        let mut engine_trace: Vec<Vec<usize>> = Vec::new();
        let result = run_observed(&ds, &params, |_, a| {
            engine_trace.push((0..a.len()).map(|i| a.label(i)).collect());
        })
        .unwrap();

        let init = init_centroids(&ds, k, init_seed).unwrap();
        let init_rows: Vec<Vec<f64>> = init.iter_centers().map(|c| c.to_vec()).collect();
        let oracle = oracle_lloyd(
            &as_point_rows(&ds),
            &init_rows,
            params.tolerance,
            params.max_iterations,
        );

        assert_eq!(
            result.iterations, oracle.iterations,
            "instance {instance}: iteration counts diverge"
        );
        for (iteration, (engine, oracle_labels)) in
            engine_trace.iter().zip(&oracle.labels_per_iteration).enumerate()
        {
            assert_eq!(
                engine, oracle_labels,
                "instance {instance}: assignments diverge at iteration {}",
                iteration + 1
            );
        }
        for (c, oracle_center) in oracle.centers.iter().enumerate() {
            let worst = linf(result.centroids.center(c), oracle_center);
            assert!(worst <= 1e-12, "instance {instance}: center {c} off by {worst}");
        }
        total_iterations += result.iterations;
    }
    println!("ACCEPTANCE 1 oracle equivalence: PASS (50 instances, {total_iterations} iterations)");
}

// ---------------------------------------------------------------------
// Criterion 2: the objective trace never increases (1e-9 relative slack),
// for every strategy and thread count tested.
// ---------------------------------------------------------------------
#[test]
fn acceptance_2_monotone_objective() {
    let spec = well_separated_3d(11);
    let (ds, _) = sample(&spec, 20_000).unwrap();
    let mut checked = 0usize;
    for (strategy, thread_grid) in [
        (Strategy::Serial, &[1usize][..]),
        (Strategy::Persistent, &[1, 2, 4, 8][..]),
        (Strategy::ForkJoin, &[1, 2, 4, 8][..]),
    ] {
        for &threads in thread_grid {
            let params = ClusterParams::new(4, 3).with_strategy(strategy, threads);
            let result = run(&ds, &params).unwrap();
            for (t, window) in result.objective_trace.windows(2).enumerate() {
                assert!(
                    window[1] <= window[0] + 1e-9 * window[0].abs(),
                    "{strategy} p={threads}: objective rose at iteration {}: {} -> {}",
                    t + 1,
                    window[0],
                    window[1]
                );
            }
            checked += 1;
        }
    }
    println!("ACCEPTANCE 2 monotone objective: PASS ({checked} runs)");
}

// ---------------------------------------------------------------------
// Criterion 3: all strategies and thread counts produce identical final
// assignments and centers within 1e-9, on a 50k-point 3D dataset.
// ---------------------------------------------------------------------
#[test]
fn acceptance_3_strategy_agreement() {
    let spec = well_separated_3d(301);
    let (ds, _) = sample(&spec, 50_000).unwrap();
    let serial = run(&ds, &ClusterParams::new(4, 9)).unwrap();
    assert!(serial.converged);

    let mut compared = 0usize;
    for strategy in [Strategy::Persistent, Strategy::ForkJoin] {
        for threads in [1usize, 2, 4, 8] {
            let params = ClusterParams::new(4, 9).with_strategy(strategy, threads);
            let result = run(&ds, &params).unwrap();
            assert_eq!(
                result.assignments.labels(),
                serial.assignments.labels(),
                "{strategy} p={threads}: assignments differ from serial"
            );
            let worst = linf(result.centroids.coords(), serial.centroids.coords());
            assert!(worst <= 1e-9, "{strategy} p={threads}: centroid L-inf {worst}");
            compared += 1;
        }
    }
    println!("ACCEPTANCE 3 strategy agreement: PASS ({compared} parallel runs vs serial)");
}

// ---------------------------------------------------------------------
// Criterion 4: converged means the final shift error is below 1e-6 and a
// rerun from the converged centers reassigns nothing.
// ---------------------------------------------------------------------
#[test]
fn acceptance_4_convergence_contract() {
    let mut checked = 0usize;
    for seed in [1u64, 2, 3] {
        let spec = well_separated_3d(seed * 100);
        let (ds, _) = sample(&spec, 10_000).unwrap();
        for strategy in [Strategy::Serial, Strategy::Persistent, Strategy::ForkJoin] {
            let params = ClusterParams::new(4, seed).with_strategy(strategy, 4);
            let result = run(&ds, &params).unwrap();
            assert!(result.converged, "{strategy} seed {seed} did not converge");
            let final_shift = *result.shift_trace.last().unwrap();
            assert!(final_shift < 1e-6, "{strategy}: final E = {final_shift}");

            let mut relabeled = result.assignments.clone();
            let changed = assign_step(&ds, &result.centroids, &mut relabeled).unwrap();
            assert_eq!(changed, 0, "{strategy}: rerun moved {changed} points");
            checked += 1;
        }
    }
    println!("ACCEPTANCE 4 convergence contract: PASS ({checked} converged runs)");
}

// ---------------------------------------------------------------------
// Criterion 5: on a well-separated 4-component 3D mixture with N=100000,
// every strategy recovers the true component means within 0.1.
// ---------------------------------------------------------------------
#[test]
fn acceptance_5_ground_truth_recovery() {
    let spec = well_separated_3d(301);
    let truth = Centroids::new(
        spec.components.iter().flat_map(|c| c.mean.clone()).collect(),
        3,
    )
    .unwrap();
    let (ds, _) = sample(&spec, 100_000).unwrap();

    // The init seed starts inside the true optimum's basin; Lloyd's descent
    // cannot cross basins, so an unlucky initialization is out of scope.
    for strategy in [Strategy::Serial, Strategy::Persistent, Strategy::ForkJoin] {
        let params = ClusterParams::new(4, 7).with_strategy(strategy, 4);
        let result = run(&ds, &params).unwrap();
        assert!(result.converged, "{strategy} did not converge");
        let mapping = greedy_match(&result.centroids, &truth).unwrap();
        let worst = centroid_linf(&result.centroids, &truth, &mapping);
        assert!(worst < 0.1, "{strategy}: recovered centers off by {worst}");
    }
    println!("ACCEPTANCE 5 ground truth recovery: PASS (3 strategies, L-inf < 0.1)");
}

// ---------------------------------------------------------------------
// Criterion 6 (soft): speedup and efficiency trends on a 500k-point 2D
// dataset. Asserted only on machines with at least 4 cores; always printed.
// ---------------------------------------------------------------------
#[test]
fn acceptance_6_scaling_trends() {
    let cores = std::thread::available_parallelism().map(|c| c.get()).unwrap_or(1);
    let p = preset("2d-500k").unwrap();
    let (ds, _) = sample(&p.spec, p.n).unwrap();
    let grid = SweepGrid {
        ks: vec![8],
        strategies: vec![Strategy::Persistent],
        threads: vec![2, 4, 8],
        repeats: 3,
        seed: 1,
        tolerance: 1e-6,
        max_iterations: 500,
    };
    let output = scaling_sweep(&[("2d-500k".to_string(), ds)], &grid).unwrap();
    assert!(output.failures.is_empty());
    // Completion and convergence of the 500k runs are hard requirements even
    // where the timing trend is not.
    for record in &output.records {
        assert!(record.converged, "run {record:?} did not converge");
        assert!(record.wall_time_s > 0.0);
    }
    let report = &output.reports[0];
    let by_threads: Vec<(usize, f64, f64)> = report
        .rows
        .iter()
        .map(|r| (r.threads, r.speedup, r.efficiency))
        .collect();
    for (threads, psi, eps) in &by_threads {
        println!(
            "  measured: p={threads} speedup={psi:.3} efficiency={eps:.3} \
             (serial median {:.4}s)",
            report.baseline.wall_time_s
        );
    }

    if cores < 4 {
        println!(
            "ACCEPTANCE 6 scaling trends: REPORTED ONLY ({cores} cores < 4; \
             soft criterion not asserted on constrained hardware)"
        );
        return;
    }
    let psi2 = by_threads[0].1;
    let psi4 = by_threads[1].1;
    assert!(psi2 > 1.2, "speedup at p=2 is {psi2}, expected > 1.2");
    assert!(psi4 > psi2, "speedup did not grow: p=2 {psi2} vs p=4 {psi4}");
    for pair in by_threads.windows(2) {
        assert!(
            pair[1].2 <= pair[0].2 + 1e-12,
            "efficiency increased from p={} to p={}",
            pair[0].0,
            pair[1].0
        );
    }
    println!("ACCEPTANCE 6 scaling trends: PASS ({cores} cores)");
}

// ---------------------------------------------------------------------
// Criterion 7: repeating any command with identical flags and seeds yields
// bit-identical dataset, assignment, and centroid files.
// ---------------------------------------------------------------------
#[test]
fn acceptance_7_cli_determinism() {
    let dir = tempdir().unwrap();
    let spec_path = dir.path().join("spec.json");
    fs::write(
        &spec_path,
        r#"{"dim": 2, "seed": 77, "components": [
            {"weight": 0.4, "mean": [0.0, 0.0], "cov": [1.0, 1.0]},
            {"weight": 0.6, "mean": [10.0, 4.0], "cov": [[1.0, 0.2], [0.2, 1.0]]}
        ]}"#,
    )
    .unwrap();

    let gen_out = [dir.path().join("g1"), dir.path().join("g2")];
    for out in &gen_out {
        let status = Command::new(env!("CARGO_BIN_EXE_lloydlab"))
            .args([
                "gen", "--spec", spec_path.to_str().unwrap(), "--n", "5000",
                "--out", out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let dataset = gen_out[0].join("dataset.csv");
    assert_eq!(
        fs::read(&dataset).unwrap(),
        fs::read(gen_out[1].join("dataset.csv")).unwrap(),
        "gen is not byte-deterministic"
    );

    let cluster_out = [dir.path().join("c1"), dir.path().join("c2")];
    for out in &cluster_out {
        let status = Command::new(env!("CARGO_BIN_EXE_lloydlab"))
            .args([
                "cluster", "--in", dataset.to_str().unwrap(), "--k", "2",
                "--strategy", "persistent", "--threads", "4", "--seed", "5",
                "--out", out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    for file in ["assignments.csv", "centroids.csv", "trace.csv"] {
        assert_eq!(
            fs::read(cluster_out[0].join(file)).unwrap(),
            fs::read(cluster_out[1].join(file)).unwrap(),
            "cluster output {file} is not byte-deterministic"
        );
    }
    println!("ACCEPTANCE 7 determinism: PASS (gen + cluster byte-identical on repeat)");
}

// ---------------------------------------------------------------------
// Criterion 8: datasets survive a write/read round trip bit-exactly, and
// plot member files partition the dataset.
// ---------------------------------------------------------------------
#[test]
fn acceptance_8_io_round_trip_and_partition() {
    use lloydlab::dataio;

    let spec = well_separated_3d(88);
    let (ds, _) = sample(&spec, 20_000).unwrap();
    let dir = tempdir().unwrap();
    let csv = dir.path().join("ds.csv");
    dataio::write_dataset(&csv, &ds, None).unwrap();
    let back = dataio::read_dataset(&csv, Some(3)).unwrap();
    assert_eq!(ds.n(), back.n());
    for (a, b) in ds.coords().iter().zip(back.coords()) {
        assert_eq!(a.to_bits(), b.to_bits(), "round trip changed a coordinate");
    }

    let result = run(&ds, &ClusterParams::new(4, 7)).unwrap();
    let plot_dir = dir.path().join("plot");
    dataio::write_plot_data(&plot_dir, &ds, &result.assignments, &result.centroids).unwrap();

    let mut rows_seen = 0usize;
    for cluster in 0..4 {
        let content =
            fs::read_to_string(plot_dir.join(dataio::plot_member_file(cluster))).unwrap();
        let member_rows: Vec<&str> = content.lines().collect();
        // The file must contain exactly this cluster's members, in dataset
        // order, so the files are disjoint and cover everything.
        let expected: Vec<String> = (0..ds.n())
            .filter(|&i| result.assignments.label(i) == cluster)
            .map(|i| {
                ds.point(i)
                    .iter()
                    .map(|c| format!("{c}"))
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        assert_eq!(member_rows.len(), expected.len(), "cluster {cluster} row count");
        for (got, want) in member_rows.iter().zip(&expected) {
            assert_eq!(got, want, "cluster {cluster} contains a foreign row");
        }
        rows_seen += member_rows.len();
    }
    assert_eq!(rows_seen, ds.n(), "member files must partition the dataset");
    println!("ACCEPTANCE 8 io round trip + partition: PASS");
}
