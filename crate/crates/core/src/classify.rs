//! Sample-based metric-type verdicts with numeric residuals.

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{for_each4, PointGeometry};
use crate::error::Result;
use crate::linalg::{max_abs, CMat};
use crate::metric::Metric;
use crate::point::ChartPoint;
use crate::sampling::SampleSpec;
use crate::wirtinger::{DiffEngineConfig, Engine};

/// Default verdict tolerance for an engine.
pub fn default_tolerance(cfg: &DiffEngineConfig) -> f64 {
    match cfg.engine {
        Engine::Jets => 1e-6,
        Engine::FiniteDifference => 1e-4,
    }
}

/// Pluriclosed defect by the curvature identity, with torsion written chart-invariantly:
///
/// `g_{p l̄}(R_{k j̄ i}^p − R_{i j̄ k}^p) + g_{p j̄}(R_{i l̄ k}^p − R_{k l̄ i}^p) + g_{p q̄} T^p_{ik} conj(T^q_{jl})`.
pub fn pluriclosed_identity_defect(geo: &PointGeometry) -> f64 {
    let n = geo.dim();
    let r = &geo.curvature;
    let g = &geo.metric.g;
    let t = &geo.torsion;
    let mut worst = 0.0f64;
    for_each4(n, |i, j, k, l| {
        let mut s = r.r(k, j, i, l) - r.r(i, j, k, l) + r.r(i, l, k, j) - r.r(k, l, i, j);
        for p in 0..n {
            for q in 0..n {
                s += g[(p, q)] * t.get(p, i, k) * t.get(q, j, l).conj();
            }
        }
        worst = worst.max(s.norm());
    });
    worst
}

/// Pluriclosed defect read directly off `∂∂̄ω`: the coefficient of
/// `dz_i ∧ dz_k ∧ dz̄_j ∧ dz̄_l`, up to a constant factor.
pub fn pluriclosed_direct_defect(geo: &PointGeometry) -> f64 {
    let n = geo.dim();
    let h = |a: usize, b: usize, c: usize, d: usize| geo.jets.ddbar_g(a, b, c, d);
    let mut worst = 0.0f64;
    for_each4(n, |i, j, k, l| {
        let s = h(k, l, i, j) - h(i, l, k, j) - h(k, j, i, l) + h(i, j, k, l);
        worst = worst.max(s.norm());
    });
    worst
}

pub fn kahler_like_defect(geo: &PointGeometry) -> f64 {
    let n = geo.dim();
    let r = &geo.curvature;
    let mut worst = 0.0f64;
    for_each4(n, |i, j, k, l| {
        let v = r.r(i, j, k, l);
        worst = worst.max((v - r.r(k, j, i, l)).norm()).max((v - r.r(i, l, k, j)).norm());
    });
    worst
}

/// Best-fit `λ = tr_g Ric⁽²⁾ / n` and `max |Ric⁽²⁾ − λ g|` at one point.
pub fn einstein_point_fit(geo: &PointGeometry) -> (f64, f64) {
    let lambda = geo.ricci.scalar2 / geo.dim() as f64;
    let res = max_abs(&(&geo.ricci.ric2 - &geo.metric.g * crate::linalg::c64(lambda, 0.0)));
    (lambda, res)
}

/// All per-point defects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleDefects {
    pub torsion: f64,
    pub tau: f64,
    pub pluriclosed_identity: f64,
    pub pluriclosed_direct: f64,
    pub kahler_like: f64,
    pub lambda: f64,
    pub einstein_pointwise: f64,
}

impl SampleDefects {
    pub fn from_geometry(geo: &PointGeometry) -> Self {
        let (lambda, einstein_pointwise) = einstein_point_fit(geo);
        Self {
            torsion: geo.torsion.max_norm(),
            tau: geo.torsion.tau_max_norm(),
            pluriclosed_identity: pluriclosed_identity_defect(geo),
            pluriclosed_direct: pluriclosed_direct_defect(geo),
            kahler_like: kahler_like_defect(geo),
            lambda,
            einstein_pointwise,
        }
    }
}

pub fn sample_defects(
    m: &dyn Metric,
    samples: &[ChartPoint],
    cfg: &DiffEngineConfig,
) -> Result<Vec<SampleDefects>> {
    samples
        .par_iter()
        .map(|p| Ok(SampleDefects::from_geometry(&PointGeometry::compute(m, p.coords(), cfg)?)))
        .collect()
}

fn max_of(d: &[SampleDefects], f: impl Fn(&SampleDefects) -> f64) -> f64 {
    d.iter().map(f).fold(0.0, f64::max)
}

pub fn kahler_residual(m: &dyn Metric, samples: &[ChartPoint], cfg: &DiffEngineConfig) -> Result<f64> {
    Ok(max_of(&sample_defects(m, samples, cfg)?, |d| d.torsion))
}

pub fn balanced_residual(m: &dyn Metric, samples: &[ChartPoint], cfg: &DiffEngineConfig) -> Result<f64> {
    Ok(max_of(&sample_defects(m, samples, cfg)?, |d| d.tau))
}

pub fn pluriclosed_residual(m: &dyn Metric, samples: &[ChartPoint], cfg: &DiffEngineConfig) -> Result<f64> {
    Ok(max_of(&sample_defects(m, samples, cfg)?, |d| d.pluriclosed_identity))
}

/// The same defect computed from `∂∂̄ω` directly.
pub fn pluriclosed_direct_residual(
    m: &dyn Metric,
    samples: &[ChartPoint],
    cfg: &DiffEngineConfig,
) -> Result<f64> {
    Ok(max_of(&sample_defects(m, samples, cfg)?, |d| d.pluriclosed_direct))
}

pub fn kahler_like_residual(m: &dyn Metric, samples: &[ChartPoint], cfg: &DiffEngineConfig) -> Result<f64> {
    Ok(max_of(&sample_defects(m, samples, cfg)?, |d| d.kahler_like))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EinsteinFit {
    pub lambda: f64,
    /// Worst point-wise misfit plus the spread of point-wise λ.
    pub residual: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

fn einstein_from(d: &[SampleDefects]) -> EinsteinFit {
    let lambda_min = d.iter().map(|s| s.lambda).fold(f64::INFINITY, f64::min);
    let lambda_max = d.iter().map(|s| s.lambda).fold(f64::NEG_INFINITY, f64::max);
    let lambda = d.iter().map(|s| s.lambda).sum::<f64>() / d.len().max(1) as f64;
    let spread = if d.is_empty() { 0.0 } else { lambda_max - lambda_min };
    EinsteinFit {
        lambda,
        residual: max_of(d, |s| s.einstein_pointwise) + spread,
        lambda_min,
        lambda_max,
    }
}

pub fn einstein_fit(m: &dyn Metric, samples: &[ChartPoint], cfg: &DiffEngineConfig) -> Result<EinsteinFit> {
    Ok(einstein_from(&sample_defects(m, samples, cfg)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn new(residual: f64, tolerance: f64) -> Self {
        Self {
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub metric: String,
    pub dim: usize,
    pub engine: &'static str,
    pub sample_count: usize,
    pub seed: u64,
    pub r_min: f64,
    pub r_max: f64,
    pub kahler: Verdict,
    pub balanced: Verdict,
    pub pluriclosed: Verdict,
    /// Largest point-wise gap between the identity and direct pluriclosed defects.
    pub pluriclosed_route_gap: f64,
    pub pluriclosed_direct_residual: f64,
    pub kahler_like: Verdict,
    pub einstein: Verdict,
    pub lambda: f64,
}

/// Runs every classifier over one shared set of samples.
pub fn classify(
    m: &dyn Metric,
    spec: &SampleSpec,
    cfg: &DiffEngineConfig,
    tol: f64,
) -> Result<ClassificationReport> {
    let samples = spec.points(m);
    classify_points(m, &samples, spec, cfg, tol)
}

pub fn classify_points(
    m: &dyn Metric,
    samples: &[ChartPoint],
    spec: &SampleSpec,
    cfg: &DiffEngineConfig,
    tol: f64,
) -> Result<ClassificationReport> {
    let d = sample_defects(m, samples, cfg)?;
    let fit = einstein_from(&d);
    Ok(ClassificationReport {
        metric: m.label(),
        dim: m.dim(),
        engine: cfg.engine.as_str(),
        sample_count: samples.len(),
        seed: spec.seed,
        r_min: spec.region.r_min,
        r_max: spec.region.r_max,
        kahler: Verdict::new(max_of(&d, |s| s.torsion), tol),
        balanced: Verdict::new(max_of(&d, |s| s.tau), tol),
        pluriclosed: Verdict::new(max_of(&d, |s| s.pluriclosed_identity), tol),
        pluriclosed_route_gap: max_of(&d, |s| (s.pluriclosed_identity - s.pluriclosed_direct).abs()),
        pluriclosed_direct_residual: max_of(&d, |s| s.pluriclosed_direct),
        kahler_like: Verdict::new(max_of(&d, |s| s.kahler_like), tol),
        einstein: Verdict::new(fit.residual, tol),
        lambda: fit.lambda,
    })
}

/// `max |Ric⁽²⁾ − c · target|` over samples.
pub fn prescribed_ricci_residual(
    m: &dyn Metric,
    target: &(dyn Fn(&[num_complex::Complex64]) -> Result<CMat> + Sync),
    c: f64,
    samples: &[ChartPoint],
    cfg: &DiffEngineConfig,
) -> Result<f64> {
    let worst = samples
        .par_iter()
        .map(|p| {
            let geo = PointGeometry::compute(m, p.coords(), cfg)?;
            let t = target(p.coords())?;
            Ok(max_abs(&(&geo.ricci.ric2 - t * crate::linalg::c64(c, 0.0))))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}
