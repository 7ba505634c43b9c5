//! Chern connection, torsion, curvature and the four Ricci traces at a point.
//!
//! Storage conventions: `Γ^k_{ij}` at `gamma.get(k, i, j)`, where `i` is the
//! derivative direction; `R_{i j̄ k l̄}` at `r(i, j, k, l)`.

use num_complex::Complex64;

use crate::error::{GeomError, Result};
use crate::linalg::{c64, from_row_major, max_abs, CMat, MetricAt};
use crate::metric::{Metric, MetricJets};
use crate::point::{format_point, ChartPoint};
use crate::scalar::{Jet2, Scalar};
use crate::wirtinger::{jet1_field, jet2_field, ChartField, DiffEngineConfig, Engine};

/// Relative tolerance for the two curvature routes when derivatives come from jets.
pub const CROSS_CHECK_JETS: f64 = 1e-8;
/// Relative tolerance for the two curvature routes under finite differences.
pub const CROSS_CHECK_FD: f64 = 1e-5;

pub fn cross_check_tolerance(cfg: &DiffEngineConfig) -> f64 {
    match cfg.engine {
        Engine::Jets => CROSS_CHECK_JETS,
        Engine::FiniteDifference => CROSS_CHECK_FD,
    }
}

fn zero() -> Complex64 {
    c64(0.0, 0.0)
}

/// `Γ^k_{ij}`, stored `[k][i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionCoefficients {
    n: usize,
    gamma: Vec<Complex64>,
}

impl ConnectionCoefficients {
    fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> Complex64) -> Self {
        let mut gamma = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    gamma.push(f(k, i, j));
                }
            }
        }
        Self { n, gamma }
    }

    /// `Γ^k_{ij} = Σ_l g^{k l̄} ∂_i g_{j l̄}`.
    pub fn from_jets(jets: &MetricJets, metric: &MetricAt) -> Self {
        let n = jets.dim();
        Self::from_fn(n, |k, i, j| {
            (0..n).map(|l| metric.ginv[(k, l)] * jets.dg(i, j, l)).sum()
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> Complex64 {
        self.gamma[(k * self.n + i) * self.n + j]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.gamma
    }

    pub fn max_norm(&self) -> f64 {
        self.gamma.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `T^k_{ij} = Γ^k_{ij} − Γ^k_{ji}` and `τ_i = Σ_k T^k_{ik}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionData {
    n: usize,
    torsion: Vec<Complex64>,
    pub tau: Vec<Complex64>,
}

impl TorsionData {
    pub fn from_connection(gamma: &ConnectionCoefficients) -> Self {
        let n = gamma.dim();
        let t = ConnectionCoefficients::from_fn(n, |k, i, j| gamma.get(k, i, j) - gamma.get(k, j, i));
        let tau = (0..n)
            .map(|i| (0..n).map(|k| t.get(k, i, k)).sum())
            .collect();
        Self {
            n,
            torsion: t.gamma,
            tau,
        }
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> Complex64 {
        self.torsion[(k * self.n + i) * self.n + j]
    }

    pub fn max_norm(&self) -> f64 {
        self.torsion.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn tau_max_norm(&self) -> f64 {
        self.tau.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn tau_norm(&self) -> f64 {
        self.tau.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// A rank-four array indexed `[a][b][c][d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<Complex64>,
}

impl Tensor4 {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        data.push(f(a, b, c, d));
                    }
                }
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> Complex64 {
        let n = self.n;
        self.data[((a * n + b) * n + c) * n + d]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &Tensor4) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Tensor4 {
        Tensor4 {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }
}

/// Chern curvature in all-lower form `R_{i j̄ k l̄}` and mixed form `R_{i j̄ k}^p`.
#[derive(Debug, Clone)]
pub struct CurvatureTensor {
    pub lower: Tensor4,
    pub mixed: Tensor4,
    /// Relative mismatch between the two computation routes.
    pub cross_check: f64,
}

impl CurvatureTensor {
    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    /// `R_{i j̄ k l̄}`
    pub fn r(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.lower.get(i, j, k, l)
    }

    /// `R_{i j̄ k}^p`
    pub fn r_mixed(&self, i: usize, j: usize, k: usize, p: usize) -> Complex64 {
        self.mixed.get(i, j, k, p)
    }

    pub fn max_norm(&self) -> f64 {
        self.lower.max_norm()
    }

    /// `max |R_{i j̄ k l̄} − conj(R_{j ī l k̄})|`.
    pub fn conjugate_symmetry_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for_each4(n, |i, j, k, l| {
            worst = worst.max((self.r(j, i, l, k) - self.r(i, j, k, l).conj()).norm());
        });
        worst
    }
}

pub(crate) fn for_each4(n: usize, mut f: impl FnMut(usize, usize, usize, usize)) {
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    f(i, j, k, l);
                }
            }
        }
    }
}

/// Route (b): `−∂_i∂_j̄ g_{k l̄} + Σ g^{p q̄} (∂_i g_{k q̄})(∂_j̄ g_{p l̄})`.
fn curvature_expanded(jets: &MetricJets, metric: &MetricAt) -> Tensor4 {
    let n = jets.dim();
    Tensor4::from_fn(n, |i, j, k, l| {
        let mut s = -jets.ddbar_g(i, j, k, l);
        for p in 0..n {
            for q in 0..n {
                s += metric.ginv[(p, q)] * jets.dg(i, k, q) * jets.dbar_g(j, p, l);
            }
        }
        s
    })
}

/// Route (a) on jets: `R_{i j̄ k}^p = −∂_j̄ Γ^p_{ik}` by the product rule, with
/// `∂_j̄ g⁻¹ = −g⁻¹ (∂_j̄ g)ᵀ g⁻¹` in the index-form inverse.
fn mixed_from_connection_jets(jets: &MetricJets, metric: &MetricAt) -> Tensor4 {
    let n = jets.dim();
    let dginv: Vec<CMat> = (0..n)
        .map(|j| {
            let dg = CMat::from_fn(n, n, |k, l| jets.dbar_g(j, k, l));
            -(&metric.ginv * dg.transpose() * &metric.ginv)
        })
        .collect();
    Tensor4::from_fn(n, |i, j, k, p| {
        let mut s = zero();
        for l in 0..n {
            s += dginv[j][(p, l)] * jets.dg(i, k, l) + metric.ginv[(p, l)] * jets.ddbar_g(i, j, k, l);
        }
        -s
    })
}

/// The connection as a chart field, for differentiating it with finite differences.
struct ChristoffelField<'a> {
    metric: &'a dyn Metric,
    cfg: DiffEngineConfig,
}

impl ChartField for ChristoffelField<'_> {
    fn label(&self) -> String {
        format!("Christoffel symbols of {}", self.metric.label())
    }
    fn dim(&self) -> usize {
        self.metric.dim()
    }
    fn outputs(&self) -> usize {
        self.metric.dim().pow(3)
    }
    fn contains(&self, z: &[Complex64]) -> bool {
        self.metric.contains(z)
    }
    fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.dim();
        let first = jet1_field(self.metric, z, &self.cfg)?;
        let g = CMat::from_fn(n, n, |k, l| first[k * n + l].value);
        let m = MetricAt::new(g, &format!("{} at {}", self.metric.label(), format_point(z)))?;
        Ok(ConnectionCoefficients::from_fn(n, |k, i, j| {
            (0..n).map(|l| m.ginv[(k, l)] * first[j * n + l].d[i]).sum()
        })
        .gamma)
    }
}

/// Route (a) under finite differences: `∂_j̄` of the FD Christoffel field.
fn mixed_from_connection_fd(m: &dyn Metric, z: &[Complex64], cfg: &DiffEngineConfig) -> Result<Tensor4> {
    let n = m.dim();
    let field = ChristoffelField { metric: m, cfg: *cfg };
    let jets = jet1_field(&field, z, cfg)?;
    Ok(Tensor4::from_fn(n, |i, j, k, p| -jets[(p * n + i) * n + k].dbar[j]))
}

fn lower_mixed(mixed: &Tensor4, metric: &MetricAt) -> Tensor4 {
    let n = mixed.dim();
    Tensor4::from_fn(n, |i, j, k, l| {
        (0..n).map(|p| mixed.get(i, j, k, p) * metric.g[(p, l)]).sum()
    })
}

fn raise_last(lower: &Tensor4, metric: &MetricAt) -> Tensor4 {
    let n = lower.dim();
    Tensor4::from_fn(n, |i, j, k, p| {
        (0..n).map(|l| lower.get(i, j, k, l) * metric.ginv[(p, l)]).sum()
    })
}

/// The four Chern Ricci traces.
#[derive(Debug, Clone)]
pub struct RicciSet {
    pub ric1: CMat,
    pub ric2: CMat,
    pub ric3: CMat,
    pub ric4: CMat,
    pub scalar2: f64,
}

impl RicciSet {
    pub fn from_curvature(r: &CurvatureTensor, metric: &MetricAt) -> Self {
        let n = r.dim();
        let h = &metric.ginv;
        let mut ric1 = CMat::zeros(n, n);
        let mut ric2 = CMat::zeros(n, n);
        let mut ric3 = CMat::zeros(n, n);
        let mut ric4 = CMat::zeros(n, n);
        for_each4(n, |i, j, k, l| {
            let v = r.r(i, j, k, l);
            ric1[(i, j)] += h[(k, l)] * v;
            ric2[(k, l)] += h[(i, j)] * v;
            ric3[(i, l)] += h[(k, j)] * v;
            ric4[(k, j)] += h[(i, l)] * v;
        });
        let scalar2 = metric.trace(&ric2).re;
        Self {
            ric1,
            ric2,
            ric3,
            ric4,
            scalar2,
        }
    }

    pub fn all(&self) -> [&CMat; 4] {
        [&self.ric1, &self.ric2, &self.ric3, &self.ric4]
    }

    pub fn max_norm(&self) -> f64 {
        self.all().iter().map(|m| max_abs(m)).fold(0.0, f64::max)
    }

    /// `max |ric4 − ric3^H|`.
    pub fn conjugacy_residual(&self) -> f64 {
        max_abs(&(&self.ric4 - self.ric3.adjoint()))
    }
}

/// Everything curvature-related at one point, computed from a single set of metric jets.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub point: Vec<Complex64>,
    pub metric: MetricAt,
    pub jets: MetricJets,
    pub gamma: ConnectionCoefficients,
    pub torsion: TorsionData,
    pub curvature: CurvatureTensor,
    pub ricci: RicciSet,
}

impl PointGeometry {
    pub fn compute(m: &dyn Metric, z: &[Complex64], cfg: &DiffEngineConfig) -> Result<Self> {
        let jets = MetricJets::compute(m, z, cfg)?;
        let metric = MetricAt::new(jets.matrix(), &format!("{} at {}", m.label(), format_point(z)))?;
        let gamma = ConnectionCoefficients::from_jets(&jets, &metric);
        let torsion = TorsionData::from_connection(&gamma);
        let curvature = curvature_checked(m, z, cfg, &jets, &metric)?;
        let ricci = RicciSet::from_curvature(&curvature, &metric);
        Ok(Self {
            point: z.to_vec(),
            metric,
            jets,
            gamma,
            torsion,
            curvature,
            ricci,
        })
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }
}

fn curvature_checked(
    m: &dyn Metric,
    z: &[Complex64],
    cfg: &DiffEngineConfig,
    jets: &MetricJets,
    metric: &MetricAt,
) -> Result<CurvatureTensor> {
    let lower = curvature_expanded(jets, metric);
    let alt = match cfg.engine {
        Engine::Jets => lower_mixed(&mixed_from_connection_jets(jets, metric), metric),
        Engine::FiniteDifference => lower_mixed(&mixed_from_connection_fd(m, z, cfg)?, metric),
    };
    let cross_check = lower.max_diff(&alt) / lower.max_norm().max(1.0);
    if !(cross_check <= cross_check_tolerance(cfg)) {
        return Err(GeomError::CrossCheckFailure(cross_check));
    }
    let mixed = raise_last(&lower, metric);
    Ok(CurvatureTensor {
        lower,
        mixed,
        cross_check,
    })
}

pub fn christoffel(m: &dyn Metric, p: &ChartPoint, cfg: &DiffEngineConfig) -> Result<ConnectionCoefficients> {
    let jets = MetricJets::compute(m, p.coords(), cfg)?;
    let metric = MetricAt::new(jets.matrix(), &format!("{} at {}", m.label(), format_point(p.coords())))?;
    Ok(ConnectionCoefficients::from_jets(&jets, &metric))
}

pub fn torsion(m: &dyn Metric, p: &ChartPoint, cfg: &DiffEngineConfig) -> Result<TorsionData> {
    Ok(TorsionData::from_connection(&christoffel(m, p, cfg)?))
}

/// Chern curvature computed by both routes; the expanded route is returned.
pub fn chern_curvature(m: &dyn Metric, p: &ChartPoint, cfg: &DiffEngineConfig) -> Result<CurvatureTensor> {
    let z = p.coords();
    let jets = MetricJets::compute(m, z, cfg)?;
    let metric = MetricAt::new(jets.matrix(), &format!("{} at {}", m.label(), format_point(z)))?;
    curvature_checked(m, z, cfg, &jets, &metric)
}

pub fn ricci_set(m: &dyn Metric, p: &ChartPoint, cfg: &DiffEngineConfig) -> Result<RicciSet> {
    let g = PointGeometry::compute(m, p.coords(), cfg)?;
    Ok(g.ricci)
}

/// `log det g` as a real scalar field.
pub struct LogDetField<'a> {
    pub metric: &'a dyn Metric,
}

/// Determinant of a Hermitian positive-definite matrix by elimination
/// without pivoting, on any scalar carrier.
fn det_generic<S: Scalar>(n: usize, mut a: Vec<S>) -> S {
    let mut det = S::real(1.0);
    for c in 0..n {
        let piv = a[c * n + c];
        det = det * piv;
        let inv = piv.recip();
        for r in c + 1..n {
            let f = a[r * n + c] * inv;
            for k in c..n {
                a[r * n + k] = a[r * n + k] - f * a[c * n + k];
            }
        }
    }
    det
}

impl ChartField for LogDetField<'_> {
    fn label(&self) -> String {
        format!("log det of {}", self.metric.label())
    }
    fn dim(&self) -> usize {
        self.metric.dim()
    }
    fn outputs(&self) -> usize {
        1
    }
    fn contains(&self, z: &[Complex64]) -> bool {
        self.metric.contains(z)
    }
    fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.dim();
        let g = from_row_major(n, &self.metric.eval(z)?);
        Ok(vec![c64(g.determinant().re.ln(), 0.0)])
    }
    fn eval_jet(&self, z: &[Jet2]) -> Result<Vec<Jet2>> {
        let n = self.dim();
        let det = det_generic(n, self.metric.eval_jet(z)?);
        let re = (det + det.try_conj().expect("jets support conjugation")) * Jet2::real(0.5);
        Ok(vec![re.ln()])
    }
}

/// `max |ric1_{i j̄} + ∂_i∂_j̄ log det g|`.
pub fn ric1_potential_check(m: &dyn Metric, p: &ChartPoint, cfg: &DiffEngineConfig) -> Result<f64> {
    let geo = PointGeometry::compute(m, p.coords(), cfg)?;
    ric1_potential_residual(m, &geo, cfg)
}

pub fn ric1_potential_residual(m: &dyn Metric, geo: &PointGeometry, cfg: &DiffEngineConfig) -> Result<f64> {
    let n = geo.dim();
    let jet = jet2_field(&LogDetField { metric: m }, &geo.point, cfg)?[0];
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((geo.ricci.ric1[(i, j)] + jet.ddbar[i][j]).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{get_metric, FubiniStudy, Hopf};
    use approx::assert_abs_diff_eq;

    fn pt(pairs: &[(f64, f64)]) -> ChartPoint {
        ChartPoint::from_pairs(pairs).unwrap()
    }

    fn d(a: usize, b: usize) -> f64 {
        if a == b {
            1.0
        } else {
            0.0
        }
    }

    #[test]
    fn flat_is_flat() {
        let m = get_metric("flat:n=3").unwrap();
        let p = pt(&[(0.3, 0.1), (-0.2, 0.5), (0.0, 0.4)]);
        for cfg in [DiffEngineConfig::jets(), DiffEngineConfig::finite_difference()] {
            let g = PointGeometry::compute(m.metric.as_ref(), p.coords(), &cfg).unwrap();
            assert_eq!(g.gamma.max_norm(), 0.0);
            assert!(g.curvature.max_norm() < 1e-10);
            assert!(g.ricci.max_norm() < 1e-10);
        }
    }

    #[test]
    fn hopf_christoffels_match_conformal_formula() {
        // Γ^k_{ij} = −φ_i δ_jk with φ_i = conj(z_i)/|z|²
        let m = Hopf::new(2);
        let z = [c64(0.6, -0.3), c64(0.2, 0.9)];
        let s: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        let gamma = christoffel(&m, &ChartPoint::new(z.to_vec()).unwrap(), &DiffEngineConfig::jets()).unwrap();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let want = -z[i].conj() / s * d(j, k);
                    assert_abs_diff_eq!((gamma.get(k, i, j) - want).norm(), 0.0, epsilon = 1e-14);
                }
            }
        }
        let at_unit = christoffel(&m, &pt(&[(1.0, 0.0), (0.0, 0.0)]), &DiffEngineConfig::jets()).unwrap();
        assert_eq!(at_unit.get(0, 0, 0), c64(-1.0, 0.0));
        assert_eq!(at_unit.get(1, 0, 1), c64(-1.0, 0.0));
        assert_eq!(at_unit.get(1, 1, 0), c64(0.0, 0.0));
    }

    #[test]
    fn hopf_curvature_and_torsion_closed_forms() {
        let n = 3;
        let m = Hopf::new(n);
        let z = [c64(0.5, 0.2), c64(-0.4, 0.1), c64(0.3, -0.6)];
        let s: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        let geo = PointGeometry::compute(&m, &z, &DiffEngineConfig::jets()).unwrap();
        let phi = |i: usize| z[i].conj() / s;
        let phi_ij = |i: usize, j: usize| c64(d(i, j) / s, 0.0) - z[i].conj() * z[j] / (s * s);
        for_each4(n, |i, j, k, l| {
            let want = phi_ij(i, j) * d(k, l) / s;
            assert_abs_diff_eq!((geo.curvature.r(i, j, k, l) - want).norm(), 0.0, epsilon = 1e-13);
        });
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let want = -phi(i) * d(j, k) + phi(j) * d(i, k);
                    assert_abs_diff_eq!((geo.torsion.get(k, i, j) - want).norm(), 0.0, epsilon = 1e-13);
                }
            }
        }
        for i in 0..n {
            let want = -phi(i) * (n as f64 - 1.0);
            assert_abs_diff_eq!((geo.torsion.tau[i] - want).norm(), 0.0, epsilon = 1e-13);
        }
        // Ric⁽²⁾ = (n − 1) g and Ric⁽¹⁾ = n ∂∂̄φ
        let g = &geo.metric.g;
        assert!(max_abs(&(&geo.ricci.ric2 - g * c64((n - 1) as f64, 0.0))) < 1e-12);
        let want1 = CMat::from_fn(n, n, |i, j| phi_ij(i, j) * n as f64);
        assert!(max_abs(&(&geo.ricci.ric1 - want1)) < 1e-12);
    }

    #[test]
    fn fubini_study_origin() {
        for n in 1..=3 {
            let m = FubiniStudy::new(n);
            let geo = PointGeometry::compute(&m, &vec![c64(0.0, 0.0); n], &DiffEngineConfig::jets()).unwrap();
            for_each4(n, |i, j, k, l| {
                let want = d(i, j) * d(k, l) + d(i, l) * d(k, j);
                assert_abs_diff_eq!((geo.curvature.r(i, j, k, l) - c64(want, 0.0)).norm(), 0.0, epsilon = 1e-12);
            });
            for r in geo.ricci.all() {
                assert!(max_abs(&(r - CMat::identity(n, n) * c64((n + 1) as f64, 0.0))) < 1e-12);
            }
            assert_abs_diff_eq!(geo.ricci.scalar2, (n * (n + 1)) as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn routes_and_engines_agree() {
        let p = pt(&[(0.3, 0.1), (0.0, -0.2)]);
        for name in ["fubini_study", "hopf", "perturbed_flat_nonkahler", "conformal_flat", "hyperbolic_ball"] {
            let m = get_metric(name).unwrap();
            let jets = chern_curvature(m.metric.as_ref(), &p, &DiffEngineConfig::jets());
            let jets = match jets {
                Ok(j) => j,
                Err(GeomError::DomainViolation { .. }) => continue,
                Err(e) => panic!("{name}: {e}"),
            };
            assert!(jets.cross_check < 1e-12, "{name}");
            let fd = chern_curvature(m.metric.as_ref(), &p, &DiffEngineConfig::finite_difference()).unwrap();
            assert!(fd.cross_check < CROSS_CHECK_FD, "{name}");
            assert!(fd.lower.max_diff(&jets.lower) < 1e-6, "{name}");
        }
    }

    #[test]
    fn ric1_is_minus_ddbar_log_det() {
        let p = pt(&[(0.3, 0.1), (-0.4, 0.2)]);
        for name in ["fubini_study", "hopf", "perturbed_flat_nonkahler", "hyperbolic_ball"] {
            let m = get_metric(name).unwrap();
            let r = ric1_potential_check(m.metric.as_ref(), &p, &DiffEngineConfig::jets()).unwrap();
            assert!(r < 1e-12, "{name}: {r}");
            let r = ric1_potential_check(m.metric.as_ref(), &p, &DiffEngineConfig::finite_difference()).unwrap();
            assert!(r < 1e-6, "{name}: {r}");
        }
    }

    #[test]
    fn domain_errors_propagate() {
        let m = Hopf::new(2);
        assert!(matches!(
            christoffel(&m, &pt(&[(0.0, 0.0), (0.0, 0.0)]), &DiffEngineConfig::jets()),
            Err(GeomError::DomainViolation { .. })
        ));
    }
}
