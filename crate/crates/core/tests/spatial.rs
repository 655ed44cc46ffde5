use fieldaoi::spatial::{distance_cdf, sample_points, DistanceLaw, PointSet};
use fieldaoi::rng::{stream, Purpose};
use fieldaoi::Error;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn torus_nearest_distance_is_exponential() {
    let (lambda_s, length) = (1.0, 1e5);
    let points = sample_points(lambda_s, length, 11).unwrap();
    let mut rng = stream(11, 0, 0, Purpose::Probes);
    let mut d: Vec<f64> = (0..10_000)
        .map(|_| points.nearest_torus(rng.random::<f64>() * length).unwrap().1)
        .collect();
    d.sort_by(f64::total_cmp);
    let n = d.len() as f64;
    // Nearest distance on the line is exp(2·lambda_s).
    let ks = d
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = 1.0 - (-2.0 * lambda_s * x).exp();
            (f - k as f64 / n).abs().max((f - (k + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks <= 0.02, "KS = {ks}");
}

#[test]
fn point_count_is_poisson() {
    let counts: Vec<f64> = (0..400).map(|s| sample_points(0.5, 100.0, s).unwrap().len() as f64).collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64;
    assert!((mean - 50.0).abs() < 1.5, "mean {mean}");
    assert!((var / mean - 1.0).abs() < 0.25, "dispersion {}", var / mean);
}

#[test]
fn sampling_is_deterministic() {
    assert_eq!(sample_points(2.0, 50.0, 3).unwrap(), sample_points(2.0, 50.0, 3).unwrap());
    assert_ne!(sample_points(2.0, 50.0, 3).unwrap(), sample_points(2.0, 50.0, 4).unwrap());
}

#[test]
fn nearest_queries() {
    let set = PointSet::from_locations(vec![9.0, 1.0, 5.0], 0.3, 10.0).unwrap();
    assert_eq!(set.locations(), &[1.0, 5.0, 9.0]);
    assert_eq!(set.nearest(3.0).unwrap(), (0, 2.0));
    assert_eq!(set.nearest(0.0).unwrap(), (0, 1.0));
    assert_eq!(set.nearest_torus(9.9).unwrap().0, 2);
    let (i, d) = set.nearest_torus(0.1).unwrap();
    assert_eq!(i, 0);
    assert!((d - 0.9).abs() < 1e-12);
    let (i, d) = PointSet::from_locations(vec![0.5, 9.5], 0.2, 10.0).unwrap().nearest_torus(0.0).unwrap();
    assert_eq!(i, 0);
    assert!((d - 0.5).abs() < 1e-12);
    let empty = PointSet::from_locations(vec![], 1.0, 1.0).unwrap();
    assert!(matches!(empty.nearest(0.5), Err(Error::NoSampler)));
    assert!(PointSet::from_locations(vec![2.0], 1.0, 1.0).is_err());
}

#[test]
fn distance_law() {
    let law = DistanceLaw::new(1.0, 1.0).unwrap();
    assert_eq!(law.rate(), 2.0);
    assert!((law.cdf(1.0).unwrap() - (1.0 - (-2.0f64).exp())).abs() < 1e-15);
    assert!((law.lst(1.0) - 2.0 / 3.0).abs() < 1e-15);
    assert!(distance_cdf(0.0, 1.0, 1.0).is_err());
}

proptest! {
    #[test]
    fn torus_distance_never_exceeds_line_distance(seed in 0u64..1000, y in 0.0f64..20.0) {
        let set = sample_points(0.5, 20.0, seed).unwrap();
        prop_assume!(!set.is_empty());
        let line = set.nearest(y).unwrap().1;
        let torus = set.nearest_torus(y).unwrap().1;
        prop_assert!(torus <= line + 1e-12);
        prop_assert!(torus <= 10.0);
        prop_assert!(set.locations().windows(2).all(|w| w[0] <= w[1]));
    }
}
