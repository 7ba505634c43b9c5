//! Curvature functionals (HSC, HBC, RBC, SBC), the complex curvature
//! operator 𝔎 and its spectrum.
//!
//! Hermitian forms passed to the functionals carry raised indices `ξ^{α β̄}`;
//! forms acted on by 𝔎 carry lowered indices `ξ_{p q̄}`. Both are contracted
//! against `R_{α β̄ γ δ̄}` through [`contract`].

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::curvature::{for_each4, CurvatureTensor, PointGeometry};
use crate::error::{GeomError, Result};
use crate::linalg::{c64, general_eigenvalues, hermitian_eigenvalues, hermitian_residual, max_abs, symmetric_eigen, CMat, MetricAt, RMat};
use crate::metric::Metric;
use crate::point::ChartPoint;
use crate::sampling::{gaussian_vector, random_psd, rng, SeededRng};
use crate::wirtinger::DiffEngineConfig;

/// Self-adjointness threshold for the realified operator.
pub const SELF_ADJOINT_TOL: f64 = 1e-8;

/// A Hermitian `n × n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForm {
    xi: CMat,
    eigenvalues: Vec<f64>,
}

impl HermitianForm {
    /// Accepts matrices Hermitian up to rounding and symmetrizes them exactly.
    pub fn new(xi: CMat) -> Result<Self> {
        if xi.nrows() != xi.ncols() || xi.nrows() == 0 {
            return Err(GeomError::DimensionMismatch("form must be a nonempty square matrix".into()));
        }
        if hermitian_residual(&xi) > 1e-12 * max_abs(&xi).max(1.0) {
            return Err(GeomError::InvalidParameter("form is not Hermitian".into()));
        }
        let xi = (&xi + xi.adjoint()) * c64(0.5, 0.0);
        let eigenvalues = hermitian_eigenvalues(&xi);
        Ok(Self { xi, eigenvalues })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(CMat::identity(n, n)).expect("identity is Hermitian")
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self::new(CMat::from_fn(n, n, |i, j| c64(if i == j { d[i] } else { 0.0 }, 0.0)))
            .expect("real diagonal is Hermitian")
    }

    /// `u u^H`.
    pub fn rank_one(u: &[Complex64]) -> Self {
        let v = DVector::from_column_slice(u);
        Self::new(&v * v.adjoint()).expect("rank-one products are Hermitian")
    }

    pub fn matrix(&self) -> &CMat {
        &self.xi
    }

    pub fn dim(&self) -> usize {
        self.xi.nrows()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    fn scale(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.abs()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.scale() == 0.0
    }

    pub fn is_psd(&self) -> bool {
        self.eigenvalues[0] >= -1e-12 * self.scale().max(f64::MIN_POSITIVE)
    }

    pub fn is_pd(&self) -> bool {
        self.eigenvalues[0] > 1e-12 * self.scale()
    }
}

/// `Σ R_{i j̄ k l̄} A^{i j̄} B^{k l̄}` for raised forms `A`, `B`.
pub fn contract(r: &CurvatureTensor, a: &CMat, b: &CMat) -> Complex64 {
    let n = r.dim();
    let mut s = c64(0.0, 0.0);
    for_each4(n, |i, j, k, l| s += r.r(i, j, k, l) * a[(i, j)] * b[(k, l)]);
    s
}

/// `Σ_{i j} R_{i j̄ k l̄} A^{i j̄}` as a lowered form in `(k, l)`.
pub fn contract_first(r: &CurvatureTensor, a: &CMat) -> CMat {
    let n = r.dim();
    let mut out = CMat::zeros(n, n);
    for_each4(n, |i, j, k, l| out[(k, l)] += r.r(i, j, k, l) * a[(i, j)]);
    out
}

/// `ξ^{i j̄} = g^{i q̄} g^{p j̄} ξ_{p q̄}`.
pub fn raise(metric: &MetricAt, lower: &CMat) -> CMat {
    &metric.ginv * lower.transpose() * &metric.ginv
}

/// Inverse of `raise`.
pub fn lower(metric: &MetricAt, upper: &CMat) -> CMat {
    (metric.g.transpose() * upper * metric.g.transpose()).transpose()
}

/// Metric Hilbert–Schmidt norm squared of a raised form, `g_{k q̄} g_{p l̄} ξ^{k l̄} ξ^{p q̄}`.
pub fn hs_norm_sqr(metric: &MetricAt, upper: &CMat) -> f64 {
    let g = &metric.g;
    let n = metric.dim();
    let mut s = c64(0.0, 0.0);
    for_each4(n, |k, l, p, q| s += upper[(k, l)] * g[(k, q)] * upper[(p, q)] * g[(p, l)]);
    s.re
}

/// `⟨ξ, η⟩_g` for lowered forms.
pub fn inner_lower(metric: &MetricAt, xi: &CMat, eta: &CMat) -> f64 {
    let up = raise(metric, eta);
    let n = metric.dim();
    let mut s = c64(0.0, 0.0);
    for k in 0..n {
        for l in 0..n {
            s += xi[(k, l)] * up[(k, l)];
        }
    }
    s.re
}

pub fn hsc_at(geo: &PointGeometry, v: &[Complex64]) -> Result<f64> {
    hbc_at(geo, v, v)
}

pub fn hbc_at(geo: &PointGeometry, u: &[Complex64], v: &[Complex64]) -> Result<f64> {
    let n = geo.dim();
    if u.len() != n || v.len() != n {
        return Err(GeomError::DimensionMismatch(format!("vectors must have {n} components")));
    }
    let (nu, nv) = (geo.metric.norm_sqr(u), geo.metric.norm_sqr(v));
    if !(nu > 0.0 && nv > 0.0) {
        return Err(GeomError::ZeroVector);
    }
    let a = HermitianForm::rank_one(u);
    let b = HermitianForm::rank_one(v);
    Ok(contract(&geo.curvature, a.matrix(), b.matrix()).re / (nu * nv))
}

/// Real bisectional curvature of a raised psd form.
pub fn rbc_at(geo: &PointGeometry, xi: &HermitianForm) -> Result<f64> {
    if xi.dim() != geo.dim() {
        return Err(GeomError::DimensionMismatch("form dimension differs from the chart".into()));
    }
    if xi.is_zero() {
        return Err(GeomError::ZeroForm);
    }
    if !xi.is_psd() {
        return Err(GeomError::NotPsd);
    }
    Ok(rbc_quotient(geo, xi.matrix()))
}

/// `R(ξ, ξ) / |ξ|²` without the sign restriction on `ξ`.
pub fn rbc_quotient(geo: &PointGeometry, upper: &CMat) -> f64 {
    contract(&geo.curvature, upper, upper).re / hs_norm_sqr(&geo.metric, upper)
}

/// Schwarz bisectional curvature `R(ξ, ξ⁻¹)` of a raised pd form.
pub fn sbc_at(geo: &PointGeometry, xi: &HermitianForm) -> Result<f64> {
    if xi.dim() != geo.dim() {
        return Err(GeomError::DimensionMismatch("form dimension differs from the chart".into()));
    }
    if !xi.is_pd() {
        return Err(GeomError::NotPd);
    }
    let inv = xi
        .matrix()
        .clone()
        .try_inverse()
        .ok_or(GeomError::NotPd)?;
    let inv_up = &geo.metric.ginv * inv * &geo.metric.ginv;
    Ok(contract(&geo.curvature, xi.matrix(), &inv_up).re)
}

fn geometry(m: &dyn Metric, p: &ChartPoint, cfg: &DiffEngineConfig) -> Result<PointGeometry> {
    PointGeometry::compute(m, p.coords(), cfg)
}

pub fn hsc(m: &dyn Metric, p: &ChartPoint, v: &[Complex64], cfg: &DiffEngineConfig) -> Result<f64> {
    hsc_at(&geometry(m, p, cfg)?, v)
}

pub fn hbc(m: &dyn Metric, p: &ChartPoint, u: &[Complex64], v: &[Complex64], cfg: &DiffEngineConfig) -> Result<f64> {
    hbc_at(&geometry(m, p, cfg)?, u, v)
}

pub fn rbc(m: &dyn Metric, p: &ChartPoint, xi: &HermitianForm, cfg: &DiffEngineConfig) -> Result<f64> {
    rbc_at(&geometry(m, p, cfg)?, xi)
}

pub fn sbc(m: &dyn Metric, p: &ChartPoint, xi: &HermitianForm, cfg: &DiffEngineConfig) -> Result<f64> {
    sbc_at(&geometry(m, p, cfg)?, xi)
}

/// Standard orthonormal basis of Hermitian matrices under the Frobenius product:
/// `E_ii`, `(E_ij + E_ji)/√2`, `i(E_ij − E_ji)/√2`.
pub fn hermitian_basis(n: usize) -> Vec<CMat> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut e = CMat::zeros(n, n);
        e[(i, i)] = c64(1.0, 0.0);
        out.push(e);
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut e = CMat::zeros(n, n);
            e[(i, j)] = c64(s, 0.0);
            e[(j, i)] = c64(s, 0.0);
            out.push(e);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut e = CMat::zeros(n, n);
            e[(i, j)] = c64(0.0, s);
            e[(j, i)] = c64(0.0, -s);
            out.push(e);
        }
    }
    out
}

/// 𝔎 realified on Hermitian forms, in a basis orthonormal for `⟨·,·⟩_g`.
#[derive(Debug, Clone)]
pub struct CurvatureOperator {
    pub point: Vec<Complex64>,
    pub metric: MetricAt,
    /// Lowered basis forms `L B_b L^H` with `g = L L^H`.
    pub basis: Vec<CMat>,
    /// `matrix[(a, b)] = ⟨ξ_a, 𝔎 ξ_b⟩_g`.
    pub matrix: RMat,
    curvature: CurvatureTensor,
}

impl CurvatureOperator {
    pub fn from_geometry(geo: &PointGeometry) -> Result<Self> {
        let n = geo.dim();
        let chol = geo
            .metric
            .g
            .clone()
            .cholesky()
            .ok_or_else(|| GeomError::NotPositiveDefinite(crate::point::format_point(&geo.point)))?;
        let l = chol.l();
        let basis: Vec<CMat> = hermitian_basis(n).iter().map(|b| &l * b * l.adjoint()).collect();
        let images: Vec<CMat> = basis
            .iter()
            .map(|b| contract_first(&geo.curvature, &raise(&geo.metric, b)))
            .collect();
        let d = basis.len();
        let matrix = RMat::from_fn(d, d, |a, b| inner_lower(&geo.metric, &basis[a], &images[b]));
        Ok(Self {
            point: geo.point.clone(),
            metric: geo.metric.clone(),
            basis,
            matrix,
            curvature: geo.curvature.clone(),
        })
    }

    /// `𝔎(ξ)_{k l̄} = R_{i j̄ k l̄} g^{p j̄} g^{i q̄} ξ_{p q̄}` for a lowered form.
    pub fn apply(&self, lower_form: &CMat) -> CMat {
        contract_first(&self.curvature, &raise(&self.metric, lower_form))
    }

    /// Coordinates of a lowered form in the operator basis.
    pub fn coordinates(&self, lower_form: &CMat) -> DVector<f64> {
        DVector::from_iterator(
            self.basis.len(),
            self.basis.iter().map(|b| inner_lower(&self.metric, b, lower_form)),
        )
    }

    /// `⟨𝔎ξ, ξ⟩_g / |ξ|²_g` for a lowered form.
    pub fn rayleigh_quotient(&self, lower_form: &CMat) -> f64 {
        inner_lower(&self.metric, &self.apply(lower_form), lower_form)
            / inner_lower(&self.metric, lower_form, lower_form)
    }

    pub fn self_adjoint_residual(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }
}

pub fn curvature_operator(m: &dyn Metric, p: &ChartPoint, cfg: &DiffEngineConfig) -> Result<CurvatureOperator> {
    CurvatureOperator::from_geometry(&geometry(m, p, cfg)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    pub self_adjoint_residual: f64,
    /// Whether the symmetric solver was used.
    pub self_adjoint: bool,
}

impl Spectrum {
    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("operators are nonempty")
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Eigenvalues of 𝔎. A symmetric realification uses the symmetric solver; an
/// operator that is not self-adjoint falls back to the general solver and is
/// accepted only if its spectrum is real.
pub fn operator_spectrum(k: &CurvatureOperator) -> Result<Spectrum> {
    let residual = k.self_adjoint_residual();
    let scale = k.matrix.amax().max(1.0);
    if residual <= SELF_ADJOINT_TOL {
        let (eigenvalues, _) = symmetric_eigen(&k.matrix);
        return Ok(Spectrum {
            eigenvalues,
            self_adjoint_residual: residual,
            self_adjoint: true,
        });
    }
    let ev = general_eigenvalues(&k.matrix)
        .ok_or_else(|| GeomError::EigenFailure("general eigen solver did not converge".into()))?;
    let worst_imag = ev.iter().map(|e| e.im.abs()).fold(0.0, f64::max);
    if worst_imag > 1e-8 * scale {
        return Err(GeomError::EigenFailure(format!(
            "operator is not self-adjoint (residual {residual:.3e}) and has complex eigenvalues (|Im| up to {worst_imag:.3e})"
        )));
    }
    let mut eigenvalues: Vec<f64> = ev.iter().map(|e| e.re).collect();
    eigenvalues.sort_by(|a, b| a.total_cmp(b));
    Ok(Spectrum {
        eigenvalues,
        self_adjoint_residual: residual,
        self_adjoint: false,
    })
}

fn normalized(metric: &MetricAt, v: Vec<Complex64>) -> Vec<Complex64> {
    let s = metric.norm_sqr(&v).sqrt();
    v.into_iter().map(|c| c / s).collect()
}

fn unit_vector(metric: &MetricAt, rng: &mut SeededRng) -> Vec<Complex64> {
    normalized(metric, gaussian_vector(rng, metric.dim()))
}

fn bump(v: &[Complex64], a: usize, h: f64) -> Vec<Complex64> {
    let mut w = v.to_vec();
    if a % 2 == 0 {
        w[a / 2].re += h;
    } else {
        w[a / 2].im += h;
    }
    w
}

/// Coordinate descent on the real coordinates of `(u, v)`; returns the best value found.
fn refine_pair(geo: &PointGeometry, mut u: Vec<Complex64>, mut v: Vec<Complex64>, mut best: f64) -> f64 {
    let n = geo.dim();
    let f = |u: &[Complex64], v: &[Complex64]| hbc_at(geo, u, v).unwrap_or(f64::INFINITY);
    let mut h = 0.25;
    let mut sweeps = 0;
    while h > 1e-9 && sweeps < 20_000 {
        sweeps += 1;
        let mut improved = false;
        for a in 0..4 * n {
            for s in [h, -h] {
                let (cu, cv) = if a < 2 * n {
                    (bump(&u, a, s), v.clone())
                } else {
                    (u.clone(), bump(&v, a - 2 * n, s))
                };
                let val = f(&cu, &cv);
                if val < best - 1e-14 * (1.0 + best.abs()) {
                    best = val;
                    u = normalized(&geo.metric, cu);
                    v = normalized(&geo.metric, cv);
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    best
}

/// Sampled estimate of the minimum of HBC over unit pairs; an upper bound on the true minimum.
pub fn bisectional_min_at(geo: &PointGeometry, n_samples: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut cands: Vec<(f64, Vec<Complex64>, Vec<Complex64>)> = (0..n_samples.max(1))
        .map(|_| {
            let u = unit_vector(&geo.metric, &mut rng);
            let v = unit_vector(&geo.metric, &mut rng);
            (hbc_at(geo, &u, &v).unwrap_or(f64::INFINITY), u, v)
        })
        .collect();
    // Coordinate pairs catch the minimisers of the model metrics exactly.
    let n = geo.dim();
    for i in 0..n {
        for j in 0..n {
            let e = |k: usize| {
                let mut w = vec![c64(0.0, 0.0); n];
                w[k] = c64(1.0, 0.0);
                w
            };
            cands.push((hbc_at(geo, &e(i), &e(j)).unwrap_or(f64::INFINITY), e(i), e(j)));
        }
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0));
    cands
        .into_iter()
        .take(3)
        .map(|(val, u, v)| refine_pair(geo, u, v, val))
        .fold(f64::INFINITY, f64::min)
}

pub fn bisectional_min(m: &dyn Metric, p: &ChartPoint, cfg: &DiffEngineConfig, n_samples: usize) -> Result<f64> {
    Ok(bisectional_min_at(&geometry(m, p, cfg)?, n_samples, 0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub max_eig: f64,
    pub bound: f64,
    pub b_min_estimate: f64,
    pub holds: bool,
    /// `max |Ric⁽²⁾ − g|` at the point.
    pub einstein_residual: f64,
    /// The sampled minimum is an upper bound on the true one, so `bound` may
    /// understate the exact bound; `holds` is therefore conservative.
    pub b_min_is_sampled: bool,
}

/// Checks `max spec 𝔎 ≤ max{1, 1 − n 𝓑_min}` at a point with `Ric⁽²⁾ = g`.
pub fn spectral_bound_check_at(geo: &PointGeometry, tol: f64, n_samples: usize, seed: u64) -> Result<BoundCheck> {
    let einstein_residual = max_abs(&(&geo.ricci.ric2 - &geo.metric.g));
    if einstein_residual > tol {
        return Err(GeomError::NotEinsteinNormalized(einstein_residual));
    }
    let spectrum = operator_spectrum(&CurvatureOperator::from_geometry(geo)?)?;
    let b_min = bisectional_min_at(geo, n_samples, seed);
    let bound = f64::max(1.0, 1.0 - geo.dim() as f64 * b_min);
    let max_eig = spectrum.max();
    Ok(BoundCheck {
        max_eig,
        bound,
        b_min_estimate: b_min,
        holds: max_eig <= bound + tol,
        einstein_residual,
        b_min_is_sampled: true,
    })
}

pub fn spectral_bound_check(m: &dyn Metric, p: &ChartPoint, cfg: &DiffEngineConfig, tol: f64) -> Result<BoundCheck> {
    spectral_bound_check_at(&geometry(m, p, cfg)?, tol, 200, 0)
}

/// Range of RBC over random psd forms of every rank.
pub fn rbc_range_at(geo: &PointGeometry, n_samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = rng(seed);
    let n = geo.dim();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in 0..n_samples.max(1) {
        let xi = random_psd(&mut rng, n, 1 + s % n);
        let v = rbc_quotient(geo, &xi);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}
