//! Cross-strategy agreement: all execution strategies must produce the same
//! clustering for the same seed, and parallel runs must be reproducible at
//! every thread count.

use lloydlab::datagen::{sample, MixtureComponent, MixtureSpec};
use lloydlab::engine::{run, ClusterParams, Strategy};

fn mixture_2d(seed: u64) -> MixtureSpec {
    let centers = [
        (0.0, 0.0),
        (8.0, 0.0),
        (16.0, 0.0),
        (0.0, 8.0),
        (16.0, 8.0),
        (0.0, 16.0),
        (8.0, 16.0),
        (16.0, 16.0),
    ];
    MixtureSpec {
        dim: 2,
        seed,
        components: centers
            .iter()
            .map(|&(x, y)| MixtureComponent::spherical(0.125, vec![x, y], 1.0))
            .collect(),
    }
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn parallel_assignments_match_serial_and_centroids_stay_close() {
    let (ds, _) = sample(&mixture_2d(40), 10_000).unwrap();
    let serial = run(&ds, &ClusterParams::new(8, 123)).unwrap();
    assert!(serial.converged);

    for threads in [2usize, 4, 8] {
        for strategy in [Strategy::Persistent, Strategy::ForkJoin] {
            let params = ClusterParams::new(8, 123).with_strategy(strategy, threads);
            let result = run(&ds, &params).unwrap();
            assert_eq!(
                result.assignments.labels(),
                serial.assignments.labels(),
                "{strategy} p={threads}: assignments diverged from serial"
            );
            let worst = linf(result.centroids.coords(), serial.centroids.coords());
            assert!(
                worst <= 1e-9,
                "{strategy} p={threads}: centroid L-inf {worst} exceeds 1e-9"
            );
        }
    }
}

#[test]
fn persistent_and_forkjoin_agree_bitwise_at_equal_thread_counts() {
    // Both strategies fold the same per-chunk partials in the same order,
    // so at equal p their centers are not merely close but identical.
    let (ds, _) = sample(&mixture_2d(41), 6_000).unwrap();
    for threads in [2usize, 3, 5] {
        let persistent = run(
            &ds,
            &ClusterParams::new(8, 7).with_strategy(Strategy::Persistent, threads),
        )
        .unwrap();
        let forkjoin = run(
            &ds,
            &ClusterParams::new(8, 7).with_strategy(Strategy::ForkJoin, threads),
        )
        .unwrap();
        assert_eq!(persistent.assignments.labels(), forkjoin.assignments.labels());
        let same_bits = persistent
            .centroids
            .coords()
            .iter()
            .zip(forkjoin.centroids.coords())
            .all(|(a, b)| a.to_bits() == b.to_bits());
        assert!(same_bits, "p={threads}: centroid bits differ");
        assert_eq!(persistent.iterations, forkjoin.iterations);
    }
}

#[test]
fn independent_engines_can_run_concurrently() {
    let (ds_a, _) = sample(&mixture_2d(50), 4_000).unwrap();
    let (ds_b, _) = sample(&mixture_2d(51), 4_000).unwrap();
    let expected_a = run(&ds_a, &ClusterParams::new(8, 1).with_strategy(Strategy::Persistent, 2)).unwrap();
    let expected_b = run(&ds_b, &ClusterParams::new(8, 2).with_strategy(Strategy::ForkJoin, 2)).unwrap();

    let (got_a, got_b) = std::thread::scope(|scope| {
        let a = scope.spawn(|| {
            run(&ds_a, &ClusterParams::new(8, 1).with_strategy(Strategy::Persistent, 2)).unwrap()
        });
        let b = scope.spawn(|| {
            run(&ds_b, &ClusterParams::new(8, 2).with_strategy(Strategy::ForkJoin, 2)).unwrap()
        });
        (a.join().unwrap(), b.join().unwrap())
    });
    assert_eq!(got_a.assignments.labels(), expected_a.assignments.labels());
    assert_eq!(got_b.assignments.labels(), expected_b.assignments.labels());
    assert_eq!(got_a.centroids.coords(), expected_a.centroids.coords());
    assert_eq!(got_b.centroids.coords(), expected_b.centroids.coords());
}

#[test]
fn every_strategy_terminates_within_the_cap() {
    let (ds, _) = sample(&mixture_2d(42), 3_000).unwrap();
    for strategy in [Strategy::Serial, Strategy::Persistent, Strategy::ForkJoin] {
        let params = ClusterParams::new(8, 99)
            .with_strategy(strategy, 4)
            .with_max_iterations(500);
        let result = run(&ds, &params).unwrap();
        assert!(result.iterations <= 500);
        assert_eq!(result.shift_trace.len(), result.iterations);
        assert_eq!(result.objective_trace.len(), result.iterations);
        if result.converged {
            assert!(*result.shift_trace.last().unwrap() < params.tolerance);
        }
    }
}
