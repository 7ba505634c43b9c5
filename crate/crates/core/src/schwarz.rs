//! Pointwise verification of the Chern–Lu and Aubin–Yau identities for a
//! holomorphic map `f: (M, ω) → (N, ω̃)`.
//!
//! The left-hand Laplacians are always taken by finite differences of the
//! composite energy field, independently of the right-hand terms, which are
//! assembled from jets of the two metrics and of the map.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{get_map, get_metric};
use crate::curvature::{ConnectionCoefficients, PointGeometry};
use crate::error::{GeomError, Result};
use crate::linalg::{c64, max_abs, CMat};
use crate::maps::{HolomorphicMap, MapJet};
use crate::metric::{metric_at, Metric, SampleRegion};
use crate::point::{format_point, ChartPoint};
use crate::sampling::rng;
use crate::spectra::{contract, inner_lower, raise};
use crate::wirtinger::{jet2_scalar, DiffEngineConfig, Engine, FnField};

pub use crate::classify::prescribed_ricci_residual;

/// FD step for the composite left-hand side when the terms use jets.
pub const COMPOSITE_FD_STEP: f64 = 2e-3;

/// Precondition tolerance for the `Ric⁽²⁾ = f*ω̃` sub-check.
pub const SUBCHECK_PRECONDITION_TOL: f64 = 1e-6;

/// Relative margin kept between fixture points and region boundaries.
pub const SAFE_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchwarzIdentity {
    ChernLu,
    AubinYau,
}

impl SchwarzIdentity {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchwarzIdentity::ChernLu => "chern_lu",
            SchwarzIdentity::AubinYau => "aubin_yau",
        }
    }
}

/// `Ric⁽²⁾`-term against `|∂f|⁴ = |f*ω̃|²_ω` when `Ric⁽²⁾_ω = f*ω̃` at the point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EinsteinSubcheck {
    pub ricci_term: f64,
    pub energy_quartic: f64,
    pub residual: f64,
}

/// All terms of one identity at one point. `residual = |laplacian_lhs − (hessian_norm + ricci_term − curvature_term)|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchwarzReport {
    pub identity: SchwarzIdentity,
    /// Evaluation point: source side for Chern–Lu, target side for Aubin–Yau.
    pub point: Vec<[f64; 2]>,
    pub energy: f64,
    pub hessian_norm: f64,
    pub laplacian_lhs: f64,
    pub ricci_term: f64,
    pub curvature_term: f64,
    pub residual: f64,
    pub einstein_subcheck: Option<EinsteinSubcheck>,
}

impl SchwarzReport {
    fn new(
        identity: SchwarzIdentity,
        point: &[Complex64],
        energy: f64,
        hessian_norm: f64,
        laplacian_lhs: f64,
        ricci_term: f64,
        curvature_term: f64,
    ) -> Self {
        Self {
            identity,
            point: crate::point::pairs(point),
            energy,
            hessian_norm,
            laplacian_lhs,
            ricci_term,
            curvature_term,
            residual: (laplacian_lhs - (hessian_norm + ricci_term - curvature_term)).abs(),
            einstein_subcheck: None,
        }
    }
}

fn outside(field: &dyn Metric, z: &[Complex64]) -> GeomError {
    GeomError::DomainViolation {
        field: field.label(),
        point: format_point(z),
    }
}

fn check_dims(f: &dyn HolomorphicMap, source: &dyn Metric, target: &dyn Metric) -> Result<()> {
    if f.source_dim() != source.dim() || f.target_dim() != target.dim() {
        return Err(GeomError::DimensionMismatch(format!(
            "{} maps C^{} to C^{}, metrics have dimensions {} and {}",
            f.label(),
            f.source_dim(),
            f.target_dim(),
            source.dim(),
            target.dim()
        )));
    }
    Ok(())
}

/// Map jet at `p` after checking that `p` and `f(p)` lie in the two domains.
fn map_jet_checked(f: &dyn HolomorphicMap, source: &dyn Metric, target: &dyn Metric, p: &[Complex64]) -> Result<MapJet> {
    check_dims(f, source, target)?;
    if p.len() != source.dim() {
        return Err(GeomError::DimensionMismatch(format!("point must have {} coordinates", source.dim())));
    }
    if !source.contains(p) {
        return Err(outside(source, p));
    }
    let jet = f.jet(p)?;
    if !jet.is_finite() {
        return Err(GeomError::NonFinite(f.label()));
    }
    if !target.contains(&jet.value) {
        return Err(outside(target, &jet.value));
    }
    Ok(jet)
}

/// `h_{p q̄} = g̃_{α β̄} f_p^α conj(f_q^β)`.
fn pullback(gt: &CMat, jac: &CMat) -> CMat {
    jac.transpose() * gt * jac.map(|c| c.conj())
}

/// `P^{α β̄} = f_i^α g^{i j̄} conj(f_j^β)`.
fn pushforward_inverse(ginv: &CMat, jac: &CMat) -> CMat {
    jac * ginv * jac.adjoint()
}

fn energy_at(f: &dyn HolomorphicMap, source: &dyn Metric, target: &dyn Metric, p: &[Complex64]) -> Result<f64> {
    let jet = map_jet_checked(f, source, target, p)?;
    let gs = metric_at(source, p)?;
    let gt = metric_at(target, &jet.value)?;
    Ok(gs.trace(&pullback(&gt.g, &jet.jacobian)).re)
}

/// `|∂f|² = g^{i j̄} g̃_{α β̄} f_i^α conj(f_j^β)` at `p`.
pub fn energy(f: &dyn HolomorphicMap, source: &dyn Metric, target: &dyn Metric, p: &ChartPoint) -> Result<f64> {
    energy_at(f, source, target, p.coords())
}

/// `(∇̂_k ∂f)^α_ℓ = f^α_{kℓ} + Γ̃^α_{γρ} f_k^γ f_ℓ^ρ − Γ^m_{kℓ} f_m^α`, indexed `[α][(k, ℓ)]`.
pub fn covariant_hessian_from(gamma: &ConnectionCoefficients, gamma_t: &ConnectionCoefficients, jet: &MapJet) -> Vec<CMat> {
    let m = jet.jacobian.nrows();
    let n = jet.jacobian.ncols();
    let j = &jet.jacobian;
    (0..m)
        .map(|a| {
            CMat::from_fn(n, n, |k, l| {
                let mut s = jet.hessian[a][(k, l)];
                for g in 0..m {
                    for r in 0..m {
                        s += gamma_t.get(a, g, r) * j[(g, k)] * j[(r, l)];
                    }
                }
                for mm in 0..n {
                    s -= gamma.get(mm, k, l) * j[(a, mm)];
                }
                s
            })
        })
        .collect()
}

pub fn covariant_hessian(
    f: &dyn HolomorphicMap,
    source: &dyn Metric,
    target: &dyn Metric,
    p: &ChartPoint,
    cfg: &DiffEngineConfig,
) -> Result<Vec<CMat>> {
    let jet = map_jet_checked(f, source, target, p.coords())?;
    let gs = PointGeometry::compute(source, p.coords(), cfg)?;
    let gt = PointGeometry::compute(target, &jet.value, cfg)?;
    Ok(covariant_hessian_from(&gs.gamma, &gt.gamma, &jet))
}

/// `Σ A^{k q̄} B^{ℓ s̄} g̃_{σ ρ̄} H^σ_{kℓ} conj(H^ρ_{qs})`.
fn hessian_norm(a: &CMat, b: &CMat, gt: &CMat, h: &[CMat]) -> f64 {
    let n = a.nrows();
    let m = gt.nrows();
    let mut s = c64(0.0, 0.0);
    for sg in 0..m {
        for rh in 0..m {
            for k in 0..n {
                for q in 0..n {
                    for l in 0..n {
                        for ss in 0..n {
                            s += a[(k, q)] * b[(l, ss)] * gt[(sg, rh)] * h[sg][(k, l)] * h[rh][(q, ss)].conj();
                        }
                    }
                }
            }
        }
    }
    s.re
}

/// `Δ_ω u = g^{i j̄} ∂_i ∂_j̄ u` at `p`.
pub fn complex_laplacian(
    m: &dyn Metric,
    u: &dyn crate::wirtinger::ChartField,
    p: &ChartPoint,
    cfg: &DiffEngineConfig,
) -> Result<f64> {
    if !m.contains(p.coords()) {
        return Err(outside(m, p.coords()));
    }
    let metric = metric_at(m, p.coords())?;
    let jet = jet2_scalar(u, p, cfg)?;
    let n = m.dim();
    let mut s = c64(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            s += metric.ginv[(i, j)] * jet.ddbar[i][j];
        }
    }
    Ok(s.re)
}

/// Engine configuration for the composite left-hand side: always finite differences.
pub fn composite_config(cfg: &DiffEngineConfig) -> DiffEngineConfig {
    match cfg.engine {
        Engine::FiniteDifference => *cfg,
        Engine::Jets => DiffEngineConfig {
            engine: Engine::FiniteDifference,
            fd_step: COMPOSITE_FD_STEP,
            richardson_levels: 3,
        },
    }
}

/// Every term of `Δ_ω|∂f|² = |∇̂∂f|² + Ric⁽²⁾(f*ω̃) − R̃(f_*ω⁻¹, f_*ω⁻¹)` at `p`.
pub fn chern_lu_residual(
    f: &dyn HolomorphicMap,
    source: &dyn Metric,
    target: &dyn Metric,
    p: &ChartPoint,
    cfg: &DiffEngineConfig,
) -> Result<SchwarzReport> {
    let z = p.coords();
    let jet = map_jet_checked(f, source, target, z)?;
    let gs = PointGeometry::compute(source, z, cfg)?;
    let gt = PointGeometry::compute(target, &jet.value, cfg)?;
    let hess = covariant_hessian_from(&gs.gamma, &gt.gamma, &jet);
    let hess_norm = hessian_norm(&gs.metric.ginv, &gs.metric.ginv, &gt.metric.g, &hess);
    let h = pullback(&gt.metric.g, &jet.jacobian);
    let energy = gs.metric.trace(&h).re;
    let ricci_term = inner_lower(&gs.metric, &gs.ricci.ric2, &h);
    let push = pushforward_inverse(&gs.metric.ginv, &jet.jacobian);
    let curvature_term = contract(&gt.curvature, &push, &push).re;

    let n = source.dim();
    let field = FnField::new(format!("|∂{}|²", f.label()), n, 1, |w: &[Complex64]| {
        Ok(vec![c64(energy_at(f, source, target, w)?, 0.0)])
    });
    let lhs = complex_laplacian(source, &field, p, &composite_config(cfg))?;

    let mut report = SchwarzReport::new(SchwarzIdentity::ChernLu, z, energy, hess_norm, lhs, ricci_term, curvature_term);
    if max_abs(&(&gs.ricci.ric2 - &h)) <= SUBCHECK_PRECONDITION_TOL {
        let quartic = inner_lower(&gs.metric, &h, &h);
        report.einstein_subcheck = Some(EinsteinSubcheck {
            ricci_term,
            energy_quartic: quartic,
            residual: (ricci_term - quartic).abs(),
        });
    }
    Ok(report)
}

/// Terms of `Δ_ω̃ (|∂f|² ∘ f⁻¹) = |∇̂∂f ∘ f⁻¹|² − R̃ic⁽²⁾(f_*ω⁻¹) + R(…)` at a target point `q`.
///
/// The hessian norm contracts the derivative slot with `ω̃⁻¹` carried back by
/// `f⁻¹`; the source curvature term is
/// `R_{kℓ̄pq̄} g^{iq̄} g^{pj̄} g̃^{γδ̄} g̃_{αβ̄} f_i^α conj(f_j^β) (f⁻¹)^k_γ conj((f⁻¹)^ℓ_δ)`.
/// In the report `ricci_term` carries the minus sign and `curvature_term` is
/// the negated source term, so the common residual formula applies.
pub fn aubin_yau_residual(
    f: &dyn HolomorphicMap,
    source: &dyn Metric,
    target: &dyn Metric,
    q: &ChartPoint,
    cfg: &DiffEngineConfig,
) -> Result<SchwarzReport> {
    if !f.has_inverse() {
        return Err(GeomError::MissingInverse);
    }
    check_dims(f, source, target)?;
    let w = q.coords();
    if !target.contains(w) {
        return Err(outside(target, w));
    }
    let inv = f.inverse_jet(w)?;
    let p = inv.value.clone();
    let jet = map_jet_checked(f, source, target, &p)?;
    let gs = PointGeometry::compute(source, &p, cfg)?;
    let gt = PointGeometry::compute(target, w, cfg)?;
    let hess = covariant_hessian_from(&gs.gamma, &gt.gamma, &jet);
    let back = &inv.jacobian * &gt.metric.ginv * inv.jacobian.adjoint();
    let hess_norm = hessian_norm(&back, &gs.metric.ginv, &gt.metric.g, &hess);
    let h = pullback(&gt.metric.g, &jet.jacobian);
    let energy = gs.metric.trace(&h).re;
    let push = pushforward_inverse(&gs.metric.ginv, &jet.jacobian);
    let mut ric = c64(0.0, 0.0);
    for a in 0..target.dim() {
        for b in 0..target.dim() {
            ric += gt.ricci.ric2[(a, b)] * push[(a, b)];
        }
    }
    let ricci_term = -ric.re;
    let source_term = contract(&gs.curvature, &back, &raise(&gs.metric, &h)).re;

    let field = FnField::new(format!("|∂{}|²∘inverse", f.label()), target.dim(), 1, |v: &[Complex64]| {
        let pre = f.inverse_jet(v)?.value;
        Ok(vec![c64(energy_at(f, source, target, &pre)?, 0.0)])
    });
    let lhs = complex_laplacian(target, &field, q, &composite_config(cfg))?;
    Ok(SchwarzReport::new(SchwarzIdentity::AubinYau, w, energy, hess_norm, lhs, ricci_term, -source_term))
}

/// A fixture that could not be evaluated, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkipRecord {
    pub map: String,
    pub source: String,
    pub target: String,
    pub identity: SchwarzIdentity,
    pub reason: String,
}

/// Region shrunk by a relative margin on both radii.
pub fn with_margin(region: &SampleRegion, margin: f64) -> SampleRegion {
    SampleRegion {
        r_min: region.r_min * (1.0 + margin),
        r_max: region.r_max * (1.0 - margin),
    }
}

/// Seeded points for one identity: the evaluation side is sampled in its
/// shrunk region, and the image (Chern–Lu) or preimage (Aubin–Yau) must land
/// in the other shrunk region. Returns `Err(reason)` if too few points exist.
#[allow(clippy::too_many_arguments)]
pub fn safe_points(
    f: &dyn HolomorphicMap,
    source: &dyn Metric,
    source_region: &SampleRegion,
    target: &dyn Metric,
    target_region: &SampleRegion,
    identity: SchwarzIdentity,
    count: usize,
    seed: u64,
) -> std::result::Result<Vec<ChartPoint>, String> {
    use rand::Rng;
    let (sr, tr) = (with_margin(source_region, SAFE_MARGIN), with_margin(target_region, SAFE_MARGIN));
    let (eval_metric, eval_region, other_metric, other_region) = match identity {
        SchwarzIdentity::ChernLu => (source, sr, target, tr),
        SchwarzIdentity::AubinYau => (target, tr, source, sr),
    };
    let n = eval_metric.dim();
    let r = eval_region.r_max;
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    const ATTEMPTS: usize = 50_000;
    for _ in 0..ATTEMPTS {
        if out.len() == count {
            break;
        }
        let z: Vec<Complex64> = (0..n).map(|_| c64(rng.gen_range(-r..r), rng.gen_range(-r..r))).collect();
        if !eval_region.contains(&z) || !eval_metric.contains(&z) {
            continue;
        }
        let other = match identity {
            SchwarzIdentity::ChernLu => f.apply(&z),
            SchwarzIdentity::AubinYau => f.inverse_jet(&z).map(|j| j.value),
        };
        match other {
            Ok(w) if other_region.contains(&w) && other_metric.contains(&w) => {
                out.push(ChartPoint::new(z).map_err(|e| e.to_string())?);
            }
            _ => {}
        }
    }
    if out.len() < count {
        return Err(format!(
            "only {} of {count} points found with the point and its {} inside both shrunk sample regions",
            out.len(),
            if identity == SchwarzIdentity::ChernLu { "image" } else { "preimage" }
        ));
    }
    Ok(out)
}

pub const FIXTURE_MAPS: [&str; 4] = ["identity", "dilation", "linear:A=[[1,1],[0,1]]", "quadratic_poly"];
pub const FIXTURE_METRICS: [&str; 4] = ["flat", "fubini_study", "hyperbolic_ball", "hopf"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixtureCase {
    pub map: String,
    pub source: String,
    pub target: String,
}

/// The full map × source × target cross-product of the fixture catalog.
pub fn fixture_cases() -> Vec<FixtureCase> {
    let mut out = Vec::new();
    for map in FIXTURE_MAPS {
        for source in FIXTURE_METRICS {
            for target in FIXTURE_METRICS {
                out.push(FixtureCase {
                    map: map.into(),
                    source: source.into(),
                    target: target.into(),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct FixtureResult {
    pub case: FixtureCase,
    pub reports: Vec<SchwarzReport>,
    pub skip: Option<SkipRecord>,
}

/// Runs one identity on a fixture case. Non-invertible maps are skipped for
/// Aubin–Yau, as are cases with no safe points.
pub fn run_fixture(
    case: &FixtureCase,
    identity: SchwarzIdentity,
    count: usize,
    seed: u64,
    cfg: &DiffEngineConfig,
) -> Result<FixtureResult> {
    let f = get_map(&case.map)?;
    let source = get_metric(&case.source)?;
    let target = get_metric(&case.target)?;
    let skip = |reason: String| FixtureResult {
        case: case.clone(),
        reports: Vec::new(),
        skip: Some(SkipRecord {
            map: case.map.clone(),
            source: case.source.clone(),
            target: case.target.clone(),
            identity,
            reason,
        }),
    };
    if identity == SchwarzIdentity::AubinYau && !f.has_inverse() {
        return Ok(skip("map has no inverse".into()));
    }
    let points = match safe_points(
        f.as_ref(),
        source.metric.as_ref(),
        &source.region(),
        target.metric.as_ref(),
        &target.region(),
        identity,
        count,
        seed,
    ) {
        Ok(p) => p,
        Err(reason) => return Ok(skip(reason)),
    };
    let reports = points
        .par_iter()
        .map(|p| match identity {
            SchwarzIdentity::ChernLu => chern_lu_residual(f.as_ref(), source.metric.as_ref(), target.metric.as_ref(), p, cfg),
            SchwarzIdentity::AubinYau => aubin_yau_residual(f.as_ref(), source.metric.as_ref(), target.metric.as_ref(), p, cfg),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FixtureResult {
        case: case.clone(),
        reports,
        skip: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{Dilation, Flat, FubiniStudy, HyperbolicBall, Hopf, IdentityMap, QuadraticPoly};
    use crate::maps::ConstantMap;
    use crate::sampling::sample_region;
    use approx::assert_abs_diff_eq;

    fn pt(pairs: &[(f64, f64)]) -> ChartPoint {
        ChartPoint::from_pairs(pairs).unwrap()
    }

    #[test]
    fn energy_examples() {
        let id = IdentityMap::new(2);
        assert_abs_diff_eq!(energy(&id, &Flat::new(2), &Flat::new(2), &pt(&[(0.3, 0.1), (-0.2, 0.0)])).unwrap(), 2.0, epsilon = 1e-15);
        let d = Dilation::new(1, c64(2.0, 0.0)).unwrap();
        assert_abs_diff_eq!(energy(&d, &Flat::new(1), &Flat::new(1), &pt(&[(0.1, 0.2)])).unwrap(), 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(energy(&id, &Hopf::new(2), &Flat::new(2), &pt(&[(1.0, 0.0), (0.0, 0.0)])).unwrap(), 2.0, epsilon = 1e-15);
        let c = ConstantMap::new(2, vec![c64(0.1, 0.0), c64(0.0, 0.2)]);
        assert_eq!(energy(&c, &Flat::new(2), &FubiniStudy::new(2), &pt(&[(0.3, 0.0), (0.0, 0.0)])).unwrap(), 0.0);
        let q = QuadraticPoly::new(2);
        assert!(matches!(
            energy(&q, &Flat::new(2), &HyperbolicBall::new(2), &pt(&[(0.9, 0.0), (0.9, 0.0)])),
            Err(GeomError::DomainViolation { .. })
        ));
    }

    #[test]
    fn covariant_hessian_examples() {
        let cfg = DiffEngineConfig::jets();
        let id = IdentityMap::new(2);
        let h = covariant_hessian(&id, &FubiniStudy::new(2), &FubiniStudy::new(2), &pt(&[(0.3, 0.1), (-0.2, 0.4)]), &cfg).unwrap();
        assert!(h.iter().all(|m| max_abs(m) < 1e-14));
        let h = covariant_hessian(&id, &Flat::new(2), &FubiniStudy::new(2), &pt(&[(0.0, 0.0), (0.0, 0.0)]), &cfg).unwrap();
        assert!(h.iter().all(|m| max_abs(m) < 1e-14));
        // flat → hopf at (1, 0): Γ̃^α_{kℓ} = −φ_k δ_{ℓα} with φ_k = conj(z_k)/|z|²
        let h = covariant_hessian(&id, &Flat::new(2), &Hopf::new(2), &pt(&[(1.0, 0.0), (0.0, 0.0)]), &cfg).unwrap();
        for a in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let want = if k == 0 && l == a { -1.0 } else { 0.0 };
                    assert_abs_diff_eq!((h[a][(k, l)] - c64(want, 0.0)).norm(), 0.0, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn identity_hessian_is_connection_difference() {
        let cfg = DiffEngineConfig::jets();
        let id = IdentityMap::new(2);
        let (s, t) = (Hopf::new(2), FubiniStudy::new(2));
        for p in sample_region(2, &SampleRegion::shell(0.55, 0.95), 50, 4) {
            let h = covariant_hessian(&id, &s, &t, &p, &cfg).unwrap();
            let gs = crate::curvature::christoffel(&s, &p, &cfg).unwrap();
            let gt = crate::curvature::christoffel(&t, &p, &cfg).unwrap();
            for a in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let want = gt.get(a, k, l) - gs.get(a, k, l);
                        assert!((h[a][(k, l)] - want).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn laplacian_examples() {
        let cfg = DiffEngineConfig::finite_difference();
        let p = pt(&[(0.3, -0.2), (0.1, 0.5)]);
        let u = FnField::new("|z1|²", 2, 1, |z: &[Complex64]| Ok(vec![c64(z[0].norm_sqr(), 0.0)]));
        assert_abs_diff_eq!(complex_laplacian(&Flat::new(2), &u, &p, &cfg).unwrap(), 1.0, epsilon = 1e-8);
        let u = FnField::new("Re z1²", 2, 1, |z: &[Complex64]| Ok(vec![c64((z[0] * z[0]).re, 0.0)]));
        assert_abs_diff_eq!(complex_laplacian(&Flat::new(2), &u, &p, &cfg).unwrap(), 0.0, epsilon = 1e-8);
        let u = FnField::new("log|z|²", 2, 1, |z: &[Complex64]| {
            Ok(vec![c64(z.iter().map(|c| c.norm_sqr()).sum::<f64>().ln(), 0.0)])
        });
        assert_abs_diff_eq!(complex_laplacian(&Hopf::new(2), &u, &pt(&[(1.0, 0.0), (0.0, 0.0)]), &cfg).unwrap(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn chern_lu_examples() {
        let cfg = DiffEngineConfig::jets();
        let id = IdentityMap::new(2);
        let r = chern_lu_residual(&id, &Flat::new(2), &Flat::new(2), &pt(&[(0.1, 0.2), (0.3, 0.0)]), &cfg).unwrap();
        assert!(r.residual < 1e-8 && r.hessian_norm == 0.0 && r.ricci_term == 0.0 && r.curvature_term == 0.0);
        let r = chern_lu_residual(&id, &Flat::new(2), &FubiniStudy::new(2), &pt(&[(0.2, 0.0), (0.0, -0.1)]), &cfg).unwrap();
        assert!(r.residual <= 1e-5, "{r:?}");
        let q = QuadraticPoly::new(2);
        let (flat, hyp) = (Flat::new(2), HyperbolicBall::new(2));
        let pts = safe_points(&q, &flat, &flat.sample_region(), &hyp, &hyp.sample_region(), SchwarzIdentity::ChernLu, 20, 11).unwrap();
        for p in &pts {
            let r = chern_lu_residual(&q, &flat, &hyp, p, &cfg).unwrap();
            assert!(r.residual <= 1e-5, "{r:?}");
            assert!(r.curvature_term <= 0.0);
            assert!(r.ricci_term.abs() <= 1e-10);
        }
    }

    #[test]
    fn einstein_subcheck_on_hopf() {
        let cfg = DiffEngineConfig::jets();
        let id = IdentityMap::new(2);
        let r = chern_lu_residual(&id, &Hopf::new(2), &Hopf::new(2), &pt(&[(0.7, 0.2), (-0.3, 0.5)]), &cfg).unwrap();
        let sub = r.einstein_subcheck.expect("Ric⁽²⁾ = ω for hopf");
        assert!(sub.residual < 1e-12);
        assert_abs_diff_eq!(sub.energy_quartic, 2.0, epsilon = 1e-12);
        assert!(r.residual < 1e-6);
    }

    #[test]
    fn aubin_yau_examples() {
        let cfg = DiffEngineConfig::jets();
        let d = Dilation::new(1, c64(2.0, 0.0)).unwrap();
        let r = aubin_yau_residual(&d, &Flat::new(1), &Flat::new(1), &pt(&[(0.3, 0.1)]), &cfg).unwrap();
        assert!(r.residual <= 1e-10 && r.hessian_norm == 0.0 && r.ricci_term == 0.0 && r.curvature_term == 0.0);
        let lin = get_map("linear:A=[[1,1],[0,1]]").unwrap();
        let fs = FubiniStudy::new(2);
        for p in sample_region(2, &SampleRegion::ball(0.3), 5, 2) {
            let r = aubin_yau_residual(lin.as_ref(), &fs, &fs, &p, &cfg).unwrap();
            assert!(r.residual <= 1e-4, "{r:?}");
        }
        let q = QuadraticPoly::new(2);
        assert_eq!(
            aubin_yau_residual(&q, &Flat::new(2), &Flat::new(2), &pt(&[(0.1, 0.0), (0.0, 0.0)]), &cfg),
            Err(GeomError::MissingInverse)
        );
    }

    #[test]
    fn prescribed_ricci_examples() {
        let cfg = DiffEngineConfig::jets();
        let hopf = Hopf::new(2);
        let pts = sample_region(2, &hopf.sample_region(), 10, 1);
        let own = |z: &[Complex64]| crate::metric::metric_matrix(&Hopf::new(2), z);
        assert!(prescribed_ricci_residual(&hopf, &own, 1.0, &pts, &cfg).unwrap() <= 1e-6);
        let far: Vec<ChartPoint> = pts.into_iter().filter(|p| (p.norm_sqr() - 1.0).abs() > 0.5).collect();
        let flat = |_: &[Complex64]| Ok(CMat::identity(2, 2));
        assert!(prescribed_ricci_residual(&hopf, &flat, 1.0, &far, &cfg).unwrap() >= 0.5);
    }

    #[test]
    fn out_of_reach_fixture_is_skipped() {
        let case = FixtureCase {
            map: "dilation".into(),
            source: "hopf".into(),
            target: "hyperbolic_ball".into(),
        };
        let r = run_fixture(&case, SchwarzIdentity::ChernLu, 3, 0, &DiffEngineConfig::jets()).unwrap();
        assert!(r.reports.is_empty());
        assert!(r.skip.is_some());
    }
}
