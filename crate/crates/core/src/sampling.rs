//! Seeded point and vector sampling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::CMat;
use crate::metric::{Metric, SampleRegion};
use crate::point::ChartPoint;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sample count, seed and region used for a sample-based computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
    pub region: SampleRegion,
}

impl SampleSpec {
    pub fn new(count: usize, seed: u64, region: SampleRegion) -> Self {
        Self { count, seed, region }
    }

    /// Samples inside both the region and the metric's domain.
    pub fn points(&self, m: &dyn Metric) -> Vec<ChartPoint> {
        sample_where(m.dim(), &self.region, self.count, self.seed, |z| m.contains(z))
    }
}

/// Standard complex Gaussian vector.
pub fn gaussian_vector(rng: &mut SeededRng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let (a, b): (f64, f64) = (standard_normal(rng), standard_normal(rng));
            Complex64::new(a, b)
        })
        .collect()
}

fn standard_normal(rng: &mut SeededRng) -> f64 {
    rng.sample(StandardNormal)
}

/// Uniform points in the region, rejected until `accept` holds.
pub fn sample_where(
    n: usize,
    region: &SampleRegion,
    count: usize,
    seed: u64,
    accept: impl Fn(&[Complex64]) -> bool,
) -> Vec<ChartPoint> {
    let mut rng = rng(seed);
    let r = region.r_max;
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        assert!(
            attempts < 1_000_000 + 10_000 * count,
            "sampling region {region:?} rejects almost every point"
        );
        let z: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-r..r), rng.gen_range(-r..r)))
            .collect();
        if region.contains(&z) && accept(&z) {
            out.push(ChartPoint::new(z).expect("sampled coordinates are finite"));
        }
    }
    out
}

/// Uniform points in a region.
pub fn sample_region(n: usize, region: &SampleRegion, count: usize, seed: u64) -> Vec<ChartPoint> {
    sample_where(n, region, count, seed, |_| true)
}

/// Uniform points with every real coordinate in `[lo, hi)`, rejected until `accept` holds.
pub fn sample_box(
    n: usize,
    lo: f64,
    hi: f64,
    count: usize,
    seed: u64,
    accept: impl Fn(&[Complex64]) -> bool,
) -> Vec<ChartPoint> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 1_000_000 + 10_000 * count, "sampling box rejects almost every point");
        let z: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(lo..hi), rng.gen_range(lo..hi)))
            .collect();
        if accept(&z) {
            out.push(ChartPoint::new(z).expect("sampled coordinates are finite"));
        }
    }
    out
}

/// Random Hermitian matrix with standard Gaussian entries.
pub fn random_hermitian(rng: &mut SeededRng, n: usize) -> CMat {
    let a = CMat::from_fn(n, n, |_, _| {
        Complex64::new(standard_normal(rng), standard_normal(rng))
    });
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Random positive semidefinite matrix of the given rank (`B B^H`).
pub fn random_psd(rng: &mut SeededRng, n: usize, rank: usize) -> CMat {
    let b = CMat::from_fn(n, rank, |_, _| {
        Complex64::new(standard_normal(rng), standard_normal(rng))
    });
    &b * b.adjoint()
}

/// Random positive definite matrix, bounded away from singular.
pub fn random_pd(rng: &mut SeededRng, n: usize) -> CMat {
    random_psd(rng, n, n) + CMat::identity(n, n) * Complex64::new(0.1, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, hermitian_residual};

    #[test]
    fn samples_are_reproducible_and_in_region() {
        let region = SampleRegion::shell(0.5, 2.0);
        let a = sample_region(2, &region, 20, 7);
        let b = sample_region(2, &region, 20, 7);
        assert_eq!(a, b);
        assert!(a.iter().all(|p| region.contains(p.coords())));
        assert_ne!(a, sample_region(2, &region, 20, 8));
    }

    #[test]
    fn random_forms_have_requested_structure() {
        let mut r = rng(1);
        let h = random_hermitian(&mut r, 3);
        assert_eq!(hermitian_residual(&h), 0.0);
        let p = random_psd(&mut r, 3, 1);
        let ev = hermitian_eigenvalues(&p);
        assert!(ev[0].abs() < 1e-12 && ev[1].abs() < 1e-12 && ev[2] > 0.0);
        assert!(hermitian_eigenvalues(&random_pd(&mut r, 3))[0] >= 0.1 - 1e-12);
    }
}
