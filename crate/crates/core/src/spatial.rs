//! One-dimensional homogeneous Poisson sampling of sensor locations and the
//! law of the (scaled) nearest-sampler distance.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{non_negative, positive, Error, Result};
use crate::rng::SimRng;

/// Sampler locations on the segment `[0, L]`, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    locations: Vec<f64>,
    density: f64,
    length: f64,
}

impl PointSet {
    /// Wraps explicit locations; they are sorted and must lie in `[0, length]`.
    pub fn from_locations(mut locations: Vec<f64>, density: f64, length: f64) -> Result<Self> {
        let length = positive("length", length)?;
        if let Some(&bad) = locations
            .iter()
            .find(|x| !(0.0..=length).contains(*x))
        {
            return Err(Error::Domain {
                name: "location",
                value: bad,
                domain: "[0, length]",
            });
        }
        locations.sort_by(f64::total_cmp);
        Ok(Self {
            locations,
            density,
            length,
        })
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Distance from `y` to the closest sampler on the segment. Ties go to the
    /// lower-index point.
    pub fn nearest_distance(&self, y: f64) -> Result<f64> {
        self.nearest(y).map(|(_, d)| d)
    }

    /// Index and distance of the closest sampler on the segment.
    pub fn nearest(&self, y: f64) -> Result<(usize, f64)> {
        if self.locations.is_empty() {
            return Err(Error::NoSampler);
        }
        let i = self.locations.partition_point(|&x| x < y);
        let mut best = (usize::MAX, f64::INFINITY);
        for j in [i.wrapping_sub(1), i] {
            if let Some(&x) = self.locations.get(j) {
                let d = (y - x).abs();
                if d < best.1 || (d == best.1 && j < best.0) {
                    best = (j, d);
                }
            }
        }
        Ok(best)
    }

    /// Closest sampler under wrap-around distance on a circle of
    /// circumference `L`, which removes edge effects.
    pub fn nearest_torus(&self, y: f64) -> Result<(usize, f64)> {
        let n = self.locations.len();
        if n == 0 {
            return Err(Error::NoSampler);
        }
        let l = self.length;
        let i = self.locations.partition_point(|&x| x < y);
        let below = (i + n - 1) % n;
        let above = i % n;
        let mut best = (usize::MAX, f64::INFINITY);
        for j in [below, above] {
            let raw = (y - self.locations[j]).abs();
            let d = raw.min(l - raw);
            if d < best.1 || (d == best.1 && j < best.0) {
                best = (j, d);
            }
        }
        Ok(best)
    }
}

/// Draws `N ~ Poisson(lambda_s·L)` points i.i.d. uniform on `[0, L]`.
pub fn sample_points_with(lambda_s: f64, length: f64, rng: &mut SimRng) -> Result<PointSet> {
    let lambda_s = positive("lambda_s", lambda_s)?;
    let length = positive("length", length)?;
    let mean = lambda_s * length;
    let count = Poisson::new(mean)
        .map_err(|e| Error::Numerical(format!("poisson({mean}): {e}")))?
        .sample(rng) as usize;
    let locations: Vec<f64> = (0..count).map(|_| rng.random::<f64>() * length).collect();
    PointSet::from_locations(locations, lambda_s, length)
}

/// Deterministic in `seed`; uses the point-placement stream of replication 0.
pub fn sample_points(lambda_s: f64, length: f64, seed: u64) -> Result<PointSet> {
    let mut rng = crate::rng::stream(seed, 0, 0, crate::rng::Purpose::Points);
    sample_points_with(lambda_s, length, &mut rng)
}

/// Law of `D = b·d_min`, exponential with rate `2·lambda_s/b` on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceLaw {
    rate: f64,
}

impl DistanceLaw {
    pub fn new(lambda_s: f64, b: f64) -> Result<Self> {
        let rate = 2.0 * positive("lambda_s", lambda_s)? / positive("b", b)?;
        Ok(Self { rate })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        let x = non_negative("x", x)?;
        Ok(-(-self.rate * x).exp_m1())
    }

    /// `E[exp(-s·D)]`, valid for `s > -rate`.
    pub fn lst(&self, s: f64) -> f64 {
        self.rate / (s + self.rate)
    }
}

pub fn distance_cdf(lambda_s: f64, b: f64, x: f64) -> Result<f64> {
    DistanceLaw::new(lambda_s, b)?.cdf(x)
}

pub fn distance_lst(lambda_s: f64, b: f64, s: f64) -> Result<f64> {
    Ok(DistanceLaw::new(lambda_s, b)?.lst(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[f64], l: f64) -> PointSet {
        PointSet::from_locations(xs.to_vec(), 1.0, l).unwrap()
    }

    #[test]
    fn nearest_distance_examples() {
        let p = set(&[2.0, 5.0], 10.0);
        assert_eq!(p.nearest_distance(3.0).unwrap(), 1.0);
        assert_eq!(p.nearest_distance(5.0).unwrap(), 0.0);
        let q = set(&[0.0, 10.0], 10.0);
        assert_eq!(q.nearest_distance(4.9).unwrap(), 4.9);
        // exact tie goes to the lower index
        assert_eq!(p.nearest(3.5).unwrap(), (0, 1.5));
    }

    #[test]
    fn empty_set_has_no_sampler() {
        let p = set(&[], 10.0);
        assert_eq!(p.nearest_distance(1.0), Err(Error::NoSampler));
        assert_eq!(p.nearest_torus(1.0), Err(Error::NoSampler));
    }

    #[test]
    fn torus_wraps_around() {
        let p = set(&[1.0, 5.0], 10.0);
        assert_eq!(p.nearest_torus(9.5).unwrap(), (0, 1.5));
        assert_eq!(p.nearest(9.5).unwrap(), (1, 4.5));
        let single = set(&[3.0], 10.0);
        assert_eq!(single.nearest_torus(9.0).unwrap(), (0, 4.0));
    }

    #[test]
    fn rejects_points_outside_segment() {
        assert!(PointSet::from_locations(vec![11.0], 1.0, 10.0).is_err());
    }

    #[test]
    fn sampling_is_seeded_and_sorted() {
        let a = sample_points(0.1, 1000.0, 3).unwrap();
        let b = sample_points(0.1, 1000.0, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.locations().windows(2).all(|w| w[0] <= w[1]));
        assert!(a.locations().iter().all(|&x| (0.0..=1000.0).contains(&x)));
    }

    #[test]
    fn tiny_region_is_almost_always_empty() {
        let empty = (0..200)
            .filter(|&s| sample_points(1.0, 1e-9, s).unwrap().is_empty())
            .count();
        assert_eq!(empty, 200);
    }

    #[test]
    fn distance_law_examples() {
        assert!((distance_cdf(0.5, 1.0, 1.0).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert_eq!(distance_cdf(3.0, 2.0, 0.0).unwrap(), 0.0);
        assert_eq!(distance_lst(3.0, 2.0, 0.0).unwrap(), 1.0);
        assert!(distance_cdf(1.0, 1.0, -0.1).is_err());
    }
}
