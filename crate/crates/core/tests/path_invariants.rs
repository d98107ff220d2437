use std::f64::consts::PI;

use proptest::prelude::*;

use windings_core::samplers::RngSeed;
use windings_core::stable_process::{
    exit_time, inverse_clock, winding_series, ComplexPoint, ConeSpec, PathBuilder, PathConfig, PlanarPath, StableIndex,
};

fn off_lattice(x: f64) -> f64 {
    (x - 2.0 * PI * (x / (2.0 * PI)).round()).abs()
}

fn simulated(alpha: f64, seed: u64, horizon: f64) -> PlanarPath {
    let config = PathConfig { horizon, base_step: horizon / 8.0, angle_cap: PI / 16.0, ..PathConfig::default() };
    PathBuilder::new(StableIndex::new(alpha).unwrap(), config)
        .unwrap()
        .generate(&mut RngSeed::new(seed).stream())
        .unwrap()
}

fn synthetic(steps: &[(f64, f64)]) -> Option<PlanarPath> {
    let mut z = ComplexPoint::new(1.0, 0.0);
    let mut points = vec![z];
    for &(dx, dy) in steps {
        z = z + ComplexPoint::new(dx, dy);
        if z.norm() < 1e-6 {
            return None;
        }
        points.push(z);
    }
    let times = (0..points.len()).map(|k| k as f64).collect();
    PlanarPath::from_points(StableIndex::new(1.0).unwrap(), times, points).ok()
}

fn assert_invariants(path: &PlanarPath) -> Result<(), TestCaseError> {
    let theta = path.theta();
    let clock = path.clock();
    let times = path.times();
    let start = path.points()[0].arg();
    for (k, z) in path.points().iter().enumerate() {
        prop_assert!(off_lattice(theta[k] - (z.arg() - start)) < 1e-9, "node {k}");
    }
    for w in clock.windows(2) {
        prop_assert!(w[1] > w[0]);
    }
    for k in 0..clock.len() {
        let a = inverse_clock(times, &clock, clock[k]).unwrap();
        prop_assert!((a - times[k]).abs() <= 1e-12 * times[k].abs().max(1.0));
    }
    for (c, d) in [(0.2, 0.5), (1.0, 3.0), (3.0, 3.5)] {
        let sym = exit_time(times, &theta, &ConeSpec::symmetric(c).unwrap()).unwrap().time_or_infinity();
        let two = exit_time(times, &theta, &ConeSpec::two_sided(d, c).unwrap()).unwrap().time_or_infinity();
        let one = exit_time(times, &theta, &ConeSpec::one_sided(c).unwrap()).unwrap().time_or_infinity();
        prop_assert!(sym <= two && two <= one, "c = {c}, d = {d}: {sym} {two} {one}");
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn simulated_paths(alpha in prop::sample::select(vec![0.3, 0.5, 0.8, 1.0, 1.3, 1.5, 1.9, 2.0]), seed in any::<u64>()) {
        assert_invariants(&simulated(alpha, seed, 1.0))?;
    }

    #[test]
    fn synthetic_paths(steps in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..80)) {
        if let Some(path) = synthetic(&steps) {
            assert_invariants(&path)?;
        }
    }

    #[test]
    fn winding_around_any_center_matches_its_argument(
        seed in any::<u64>(),
        cx in -3.0f64..3.0,
        cy in -3.0f64..3.0,
    ) {
        let path = simulated(1.2, seed, 2.0);
        let center = ComplexPoint::new(cx, cy);
        prop_assume!(path.points().iter().all(|z| (*z - center).norm() > 1e-6));
        let series = winding_series(&path, &[center]).unwrap();
        let start = (path.points()[0] - center).arg();
        for (k, z) in path.points().iter().enumerate() {
            prop_assert!(off_lattice(series[0][k] - ((*z - center).arg() - start)) < 1e-9);
        }
    }
}

#[test]
fn unit_circle_path_winds_once() {
    let n = 64;
    let points: Vec<ComplexPoint> =
        (0..=n).map(|k| ComplexPoint::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect();
    let times = (0..=n).map(|k| k as f64 / n as f64).collect();
    let path = PlanarPath::from_points(StableIndex::new(1.0).unwrap(), times, points).unwrap();
    let theta = path.theta();
    assert!((theta[n] - 2.0 * PI).abs() < 1e-12);
    let clock = path.clock();
    assert!((clock[n] - 1.0).abs() < 1e-12);
}

#[test]
fn same_seed_gives_same_path() {
    let (a, b) = (simulated(0.7, 42, 1.0), simulated(0.7, 42, 1.0));
    assert_eq!(a.times(), b.times());
    assert_eq!(a.theta(), b.theta());
    assert_ne!(a.theta(), simulated(0.7, 43, 1.0).theta());
}
