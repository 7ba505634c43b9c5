//! Hermitian metric fields and their point-wise derivative data.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{GeomError, Result};
use crate::linalg::{from_row_major, CMat, MetricAt};
use crate::point::format_point;
use crate::scalar::{Jet2, Scalar};
use crate::wirtinger::{eval_checked, jet2_field, ChartField, DiffEngineConfig};

/// Region `r_min < |z| < r_max` used for seeded sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRegion {
    pub r_min: f64,
    pub r_max: f64,
}

impl SampleRegion {
    pub fn ball(r_max: f64) -> Self {
        Self { r_min: 0.0, r_max }
    }

    pub fn shell(r_min: f64, r_max: f64) -> Self {
        Self { r_min, r_max }
    }

    pub fn contains(&self, z: &[Complex64]) -> bool {
        let r = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        r > self.r_min && r < self.r_max
    }

    pub fn intersect(&self, other: &SampleRegion) -> SampleRegion {
        SampleRegion {
            r_min: self.r_min.max(other.r_min),
            r_max: self.r_max.min(other.r_max),
        }
    }
}

/// A Hermitian metric `g_{i j̄}` on a chart. Outputs are the `n × n` entries
/// in row-major order; entry `(i, j)` is `g_{i j̄}`.
pub trait Metric: ChartField {
    /// Region where seeded samples keep FD stencils inside the domain.
    fn sample_region(&self) -> SampleRegion {
        SampleRegion::ball(1.0)
    }
}

pub type SharedMetric = Arc<dyn Metric>;

/// Metric matrix at `z`, with domain and finiteness checks.
pub fn metric_matrix(m: &dyn Metric, z: &[Complex64]) -> Result<CMat> {
    let vals = eval_checked(m, z)?;
    Ok(from_row_major(m.dim(), &vals))
}

/// Metric matrix and inverse at `z`; fails if `g(z)` is not positive definite.
pub fn metric_at(m: &dyn Metric, z: &[Complex64]) -> Result<MetricAt> {
    let g = metric_matrix(m, z)?;
    MetricAt::new(g, &format!("{} at {}", m.label(), format_point(z)))
}

/// Second-order jets of all metric entries at a point.
#[derive(Debug, Clone)]
pub struct MetricJets {
    n: usize,
    jets: Vec<Jet2>,
}

impl MetricJets {
    pub fn compute(m: &dyn Metric, z: &[Complex64], cfg: &DiffEngineConfig) -> Result<Self> {
        Ok(Self {
            n: m.dim(),
            jets: jet2_field(m, z, cfg)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn jet(&self, k: usize, l: usize) -> &Jet2 {
        &self.jets[k * self.n + l]
    }

    /// `g_{k l̄}`
    pub fn g(&self, k: usize, l: usize) -> Complex64 {
        self.jet(k, l).value
    }

    /// `∂_i g_{k l̄}`
    pub fn dg(&self, i: usize, k: usize, l: usize) -> Complex64 {
        self.jet(k, l).d[i]
    }

    /// `∂_j̄ g_{k l̄}`
    pub fn dbar_g(&self, j: usize, k: usize, l: usize) -> Complex64 {
        self.jet(k, l).dbar[j]
    }

    /// `∂_i ∂_j̄ g_{k l̄}`
    pub fn ddbar_g(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.jet(k, l).ddbar[i][j]
    }

    pub fn matrix(&self) -> CMat {
        CMat::from_fn(self.n, self.n, |k, l| self.g(k, l))
    }
}

/// Builds the full matrix from an upper-triangular generator, filling the
/// lower triangle by conjugate transposition.
pub(crate) fn hermitian_from_upper<S: Scalar>(
    n: usize,
    mut upper: impl FnMut(usize, usize) -> Result<S>,
) -> Result<Vec<S>> {
    let mut out = vec![S::real(0.0); n * n];
    for i in 0..n {
        for j in i..n {
            let v = upper(i, j)?;
            if i == j {
                let c = v.try_conj().expect("metric carriers support conjugation");
                out[i * n + i] = (v + c) * S::real(0.5);
            } else {
                out[i * n + j] = v;
                out[j * n + i] = v.try_conj().expect("metric carriers support conjugation");
            }
        }
    }
    Ok(out)
}

/// `c · g` for a positive constant `c`.
pub struct ScaledMetric {
    inner: SharedMetric,
    factor: f64,
}

impl ScaledMetric {
    pub fn new(inner: SharedMetric, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(GeomError::InvalidParameter(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        Ok(Self { inner, factor })
    }
}

impl ChartField for ScaledMetric {
    fn label(&self) -> String {
        format!("{}:scale={}", self.inner.label(), self.factor)
    }
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn outputs(&self) -> usize {
        self.inner.outputs()
    }
    fn contains(&self, z: &[Complex64]) -> bool {
        self.inner.contains(z)
    }
    fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok(self.inner.eval(z)?.into_iter().map(|v| v * self.factor).collect())
    }
    fn eval_jet(&self, z: &[Jet2]) -> Result<Vec<Jet2>> {
        let c = Jet2::real(self.factor);
        Ok(self.inner.eval_jet(z)?.into_iter().map(|v| v * c).collect())
    }
}

impl Metric for ScaledMetric {
    fn sample_region(&self) -> SampleRegion {
        self.inner.sample_region()
    }
}
