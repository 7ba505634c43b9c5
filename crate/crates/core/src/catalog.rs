//! Built-in metrics and holomorphic maps with closed-form expressions.
//!
//! Names accept inline arguments after a colon, e.g. `fubini_study:n=3`,
//! `conformal_flat:u=log(1+abs2(z1))`, `linear:A=[[1,1],[0,1]]`. The prefix
//! `file:PATH` loads a metric or map file instead.

use std::sync::Arc;

use num_complex::Complex64;

use crate::dsl::{parse_expr, parse_map, parse_metric, Expr};
use crate::error::{GeomError, Result};
use crate::linalg::{c64, CMat};
use crate::maps::{HolomorphicMap, MapJet, SharedMap};
use crate::metric::{metric_at, Metric, SampleRegion, ScaledMetric, SharedMetric};
use crate::point::MAX_DIM;
use crate::sampling::sample_region;
use crate::scalar::{Jet2, Scalar};
use crate::wirtinger::ChartField;

pub const METRIC_NAMES: [&str; 7] = [
    "flat",
    "fubini_study",
    "hyperbolic_ball",
    "hopf",
    "conformal_flat",
    "perturbed_flat",
    "perturbed_flat_nonkahler",
];

pub const MAP_NAMES: [&str; 4] = ["identity", "linear", "quadratic_poly", "dilation"];

const DEFAULT_DIM: usize = 2;
const DEFAULT_EPS: f64 = 0.1;
const DEFAULT_U: &str = "log(1 + abs2(z1))";

/// Properties a catalog metric is known to have (`Some(true)`), known to lack
/// (`Some(false)`), or about which nothing is claimed (`None`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExpectedFlags {
    pub kahler: Option<bool>,
    pub balanced: Option<bool>,
    pub pluriclosed: Option<bool>,
    pub kahler_like: Option<bool>,
    /// Einstein constant λ in `Ric⁽²⁾ = λ g`, when the metric is second Chern Einstein.
    pub einstein: Option<f64>,
}

impl ExpectedFlags {
    fn kahler(einstein: Option<f64>) -> Self {
        Self {
            kahler: Some(true),
            balanced: Some(true),
            pluriclosed: Some(true),
            kahler_like: Some(true),
            einstein,
        }
    }
}

#[derive(Clone)]
pub struct CatalogMetric {
    pub name: String,
    pub metric: SharedMetric,
    pub expected: ExpectedFlags,
}

impl CatalogMetric {
    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn region(&self) -> SampleRegion {
        self.metric.sample_region()
    }
}

impl std::fmt::Debug for CatalogMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogMetric")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("expected", &self.expected)
            .finish()
    }
}

fn cj<S: Scalar>(x: S) -> S {
    x.try_conj().expect("metric carriers support conjugation")
}

fn sq_norm<S: Scalar>(z: &[S]) -> S {
    z.iter().fold(S::real(0.0), |acc, &zi| acc + zi.abs2())
}

fn delta<S: Scalar>(i: usize, j: usize) -> S {
    S::real(if i == j { 1.0 } else { 0.0 })
}

fn check_len(label: &str, n: usize, z: usize) -> Result<()> {
    if n != z {
        return Err(GeomError::DimensionMismatch(format!(
            "{label} is {n}-dimensional, got a point with {z} coordinates"
        )));
    }
    Ok(())
}

macro_rules! closed_form_metric {
    ($ty:ty) => {
        impl ChartField for $ty {
            fn label(&self) -> String {
                self.name()
            }
            fn dim(&self) -> usize {
                self.n
            }
            fn outputs(&self) -> usize {
                self.n * self.n
            }
            fn contains(&self, z: &[Complex64]) -> bool {
                self.in_domain(z)
            }
            fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
                check_len(&self.name(), self.n, z.len())?;
                self.entries(z)
            }
            fn eval_jet(&self, z: &[Jet2]) -> Result<Vec<Jet2>> {
                check_len(&self.name(), self.n, z.len())?;
                self.entries(z)
            }
        }

        impl Metric for $ty {
            fn sample_region(&self) -> SampleRegion {
                self.region()
            }
        }
    };
}

/// `g_{i j̄} = δ_ij` on `Cⁿ`.
#[derive(Debug, Clone)]
pub struct Flat {
    n: usize,
}

impl Flat {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
    fn name(&self) -> String {
        "flat".into()
    }
    fn in_domain(&self, _z: &[Complex64]) -> bool {
        true
    }
    fn region(&self) -> SampleRegion {
        SampleRegion::ball(1.0)
    }
    fn entries<S: Scalar>(&self, _z: &[S]) -> Result<Vec<S>> {
        let n = self.n;
        Ok((0..n * n).map(|k| delta(k / n, k % n)).collect())
    }
}
closed_form_metric!(Flat);

/// Fubini–Study in the affine chart, `∂∂̄ log(1 + |z|²)`.
#[derive(Debug, Clone)]
pub struct FubiniStudy {
    n: usize,
}

impl FubiniStudy {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
    fn name(&self) -> String {
        "fubini_study".into()
    }
    fn in_domain(&self, _z: &[Complex64]) -> bool {
        true
    }
    fn region(&self) -> SampleRegion {
        SampleRegion::ball(1.0)
    }
    fn entries<S: Scalar>(&self, z: &[S]) -> Result<Vec<S>> {
        let n = self.n;
        let inv = (S::real(1.0) + sq_norm(z)).recip();
        let inv2 = inv * inv;
        Ok((0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                delta::<S>(i, j) * inv - cj(z[i]) * z[j] * inv2
            })
            .collect())
    }
}
closed_form_metric!(FubiniStudy);

/// Bergman-type metric of the unit ball, `−∂∂̄ log(1 − |z|²)`.
#[derive(Debug, Clone)]
pub struct HyperbolicBall {
    n: usize,
}

impl HyperbolicBall {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
    fn name(&self) -> String {
        "hyperbolic_ball".into()
    }
    fn in_domain(&self, z: &[Complex64]) -> bool {
        z.iter().map(|c| c.norm_sqr()).sum::<f64>() < 1.0
    }
    fn region(&self) -> SampleRegion {
        SampleRegion::ball(0.8)
    }
    fn entries<S: Scalar>(&self, z: &[S]) -> Result<Vec<S>> {
        let n = self.n;
        let inv = (S::real(1.0) - sq_norm(z)).recip();
        let inv2 = inv * inv;
        Ok((0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                delta::<S>(i, j) * inv + cj(z[i]) * z[j] * inv2
            })
            .collect())
    }
}
closed_form_metric!(HyperbolicBall);

/// `g_{i j̄} = δ_ij / |z|²` on `Cⁿ \ {0}`; the standard metric of the Hopf manifold.
#[derive(Debug, Clone)]
pub struct Hopf {
    n: usize,
}

impl Hopf {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
    fn name(&self) -> String {
        "hopf".into()
    }
    fn in_domain(&self, z: &[Complex64]) -> bool {
        z.iter().map(|c| c.norm_sqr()).sum::<f64>() > 0.0
    }
    fn region(&self) -> SampleRegion {
        SampleRegion::shell(0.5, 2.0)
    }
    fn entries<S: Scalar>(&self, z: &[S]) -> Result<Vec<S>> {
        let n = self.n;
        let inv = sq_norm(z).recip();
        Ok((0..n * n).map(|k| delta::<S>(k / n, k % n) * inv).collect())
    }
}
closed_form_metric!(Hopf);

/// `g = e^u δ` for a real-valued expression `u`.
#[derive(Debug, Clone)]
pub struct ConformalFlat {
    n: usize,
    u: Expr,
}

impl ConformalFlat {
    pub fn new(n: usize, u: Expr) -> Result<Self> {
        if u.max_var() > n {
            return Err(GeomError::DimensionMismatch(format!(
                "conformal factor uses z{} but n = {n}",
                u.max_var()
            )));
        }
        Ok(Self { n, u })
    }
    fn name(&self) -> String {
        format!("conformal_flat:u={}", self.u)
    }
    fn in_domain(&self, z: &[Complex64]) -> bool {
        matches!(self.u.eval(z), Ok(v) if v.re.is_finite() && v.im.is_finite())
    }
    fn region(&self) -> SampleRegion {
        SampleRegion::ball(1.0)
    }
    fn entries<S: Scalar>(&self, z: &[S]) -> Result<Vec<S>> {
        let n = self.n;
        let v = self.u.eval(z)?;
        let c = v.value();
        if c.im.abs() > 1e-12 * (1.0 + c.re.abs()) {
            return Err(GeomError::InvalidParameter(format!(
                "conformal factor u = {} is not real at this point",
                self.u
            )));
        }
        let e = ((v + cj(v)) * S::real(0.5)).exp();
        Ok((0..n * n).map(|k| delta::<S>(k / n, k % n) * e).collect())
    }
}
closed_form_metric!(ConformalFlat);

/// Kähler perturbation `δ + ε ∂∂̄ψ` with `ψ = ½|z|⁴ + Re(z₁)|z|²`.
#[derive(Debug, Clone)]
pub struct PerturbedFlat {
    n: usize,
    eps: f64,
}

impl PerturbedFlat {
    pub fn new(n: usize, eps: f64) -> Self {
        Self { n, eps }
    }
    fn name(&self) -> String {
        format!("perturbed_flat:eps={}", self.eps)
    }
    fn in_domain(&self, _z: &[Complex64]) -> bool {
        true
    }
    fn region(&self) -> SampleRegion {
        SampleRegion::ball(1.0)
    }
    fn entries<S: Scalar>(&self, z: &[S]) -> Result<Vec<S>> {
        let n = self.n;
        let s = sq_norm(z);
        let half = S::real(0.5);
        let re1 = (z[0] + cj(z[0])) * half;
        let eps = S::real(self.eps);
        Ok((0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                let mut h = (s + re1) * delta(i, j) + cj(z[i]) * z[j];
                if j == 0 {
                    h = h + cj(z[i]) * half;
                }
                if i == 0 {
                    h = h + z[j] * half;
                }
                delta::<S>(i, j) + eps * h
            })
            .collect())
    }
}
closed_form_metric!(PerturbedFlat);

/// Diagonal non-Kähler perturbation `g_{i ī} = 1 + ε|z_{i+1}|²` (indices cyclic).
#[derive(Debug, Clone)]
pub struct PerturbedFlatNonKahler {
    n: usize,
    eps: f64,
}

impl PerturbedFlatNonKahler {
    pub fn new(n: usize, eps: f64) -> Self {
        Self { n, eps }
    }
    fn name(&self) -> String {
        format!("perturbed_flat_nonkahler:eps={}", self.eps)
    }
    fn in_domain(&self, _z: &[Complex64]) -> bool {
        true
    }
    fn region(&self) -> SampleRegion {
        SampleRegion::ball(1.0)
    }
    fn entries<S: Scalar>(&self, z: &[S]) -> Result<Vec<S>> {
        let n = self.n;
        let eps = S::real(self.eps);
        Ok((0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                if i == j {
                    S::real(1.0) + eps * z[(i + 1) % n].abs2()
                } else {
                    S::real(0.0)
                }
            })
            .collect())
    }
}
closed_form_metric!(PerturbedFlatNonKahler);

/// Splits `name:k=v,k=v` into the name and its arguments. Commas nested in
/// brackets or parentheses belong to the value.
pub fn split_spec(spec: &str) -> Result<(String, Vec<(String, String)>)> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n.trim(), r),
        None => (spec.trim(), ""),
    };
    let mut args = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut parts = Vec::new();
    for c in rest.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() {
        parts.push(cur);
    }
    for p in parts {
        let (k, v) = p.split_once('=').ok_or_else(|| {
            GeomError::InvalidParameter(format!("argument '{}' is not of the form key=value", p.trim()))
        })?;
        args.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok((name.to_string(), args))
}

struct Args {
    owner: String,
    items: Vec<(String, String)>,
}

impl Args {
    fn take(&mut self, key: &str) -> Option<String> {
        let pos = self.items.iter().position(|(k, _)| k == key)?;
        Some(self.items.remove(pos).1)
    }

    fn finish(self) -> Result<()> {
        match self.items.first() {
            None => Ok(()),
            Some((k, _)) => Err(GeomError::InvalidParameter(format!(
                "'{}' does not take an argument '{k}'",
                self.owner
            ))),
        }
    }

    fn dim(&mut self) -> Result<usize> {
        match self.take("n") {
            None => Ok(DEFAULT_DIM),
            Some(v) => v
                .parse::<usize>()
                .ok()
                .filter(|n| (1..=MAX_DIM).contains(n))
                .ok_or_else(|| {
                    GeomError::InvalidParameter(format!("n must be an integer in 1..={MAX_DIM}, got '{v}'"))
                }),
        }
    }

    fn real(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| GeomError::InvalidParameter(format!("{key} must be a real number, got '{v}'"))),
        }
    }
}

/// Evaluates a constant DSL expression such as `2`, `-0.5` or `(1+2i)`.
pub fn parse_constant(text: &str) -> Result<Complex64> {
    let e = parse_expr(text)?;
    if e.max_var() > 0 {
        return Err(GeomError::InvalidParameter(format!("'{text}' is not a constant")));
    }
    e.eval::<Complex64>(&[])
}

/// Parses `[[a,b],[c,d]]` with constant-expression entries.
pub fn parse_matrix(text: &str) -> Result<CMat> {
    let bad = || GeomError::InvalidParameter(format!("malformed matrix '{text}'"));
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = t.strip_prefix("[[").and_then(|s| s.strip_suffix("]]")).ok_or_else(bad)?;
    let rows: Vec<Vec<Complex64>> = inner
        .split("],[")
        .map(|row| {
            split_top_level(row)
                .iter()
                .map(|e| parse_constant(e))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(GeomError::InvalidParameter(format!("matrix '{text}' is not square")));
    }
    Ok(CMat::from_fn(n, n, |i, j| rows[i][j]))
}

fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    out.push(cur);
    out
}

/// Probes positive-definiteness at deterministic points of the sample region.
fn probe(m: &dyn Metric) -> Result<()> {
    let region = m.sample_region();
    let mut pts: Vec<Vec<Complex64>> = sample_region(m.dim(), &region, 8, 0)
        .into_iter()
        .map(|p| p.coords().to_vec())
        .collect();
    if region.r_min == 0.0 {
        pts.push(vec![c64(0.0, 0.0); m.dim()]);
    }
    for z in pts.iter().filter(|z| m.contains(z)) {
        metric_at(m, z).map_err(|e| {
            GeomError::InvalidParameter(format!("{} fails at a probe point: {e}", m.label()))
        })?;
    }
    Ok(())
}

fn file_stem(path: &str) -> String {
    std::path::Path::new(path)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string())
}

fn read_file(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| GeomError::Config(format!("cannot read '{path}': {e}")))
}

/// Looks up a catalog metric, or loads `file:PATH`.
pub fn get_metric(spec: &str) -> Result<CatalogMetric> {
    if let Some(path) = spec.strip_prefix("file:") {
        let m = parse_metric(&read_file(path)?)?.with_name(file_stem(path));
        return Ok(CatalogMetric {
            name: m.name.clone(),
            metric: Arc::new(m),
            expected: ExpectedFlags::default(),
        });
    }
    let (name, items) = split_spec(spec)?;
    let mut args = Args {
        owner: name.clone(),
        items,
    };
    let n = args.dim()?;
    let scale = args.real("scale", 1.0)?;
    let (metric, mut expected): (SharedMetric, ExpectedFlags) = match name.as_str() {
        "flat" => (Arc::new(Flat::new(n)), ExpectedFlags::kahler(Some(0.0))),
        "fubini_study" => (
            Arc::new(FubiniStudy::new(n)),
            ExpectedFlags::kahler(Some((n + 1) as f64)),
        ),
        "hyperbolic_ball" => (
            Arc::new(HyperbolicBall::new(n)),
            ExpectedFlags::kahler(Some(-((n + 1) as f64))),
        ),
        "hopf" => {
            let flags = if n == 1 {
                // δ/|z|² on C \ {0} is flat: log|z|² is harmonic.
                ExpectedFlags::kahler(Some(0.0))
            } else {
                ExpectedFlags {
                    kahler: Some(false),
                    balanced: Some(false),
                    pluriclosed: Some(n == 2),
                    kahler_like: Some(false),
                    einstein: Some((n - 1) as f64),
                }
            };
            (Arc::new(Hopf::new(n)), flags)
        }
        "conformal_flat" => {
            let u = parse_expr(&args.take("u").unwrap_or_else(|| DEFAULT_U.to_string()))?;
            let m = ConformalFlat::new(n, u)?;
            probe(&m)?;
            let flags = if n == 1 {
                ExpectedFlags::kahler(None)
            } else {
                ExpectedFlags::default()
            };
            (Arc::new(m), flags)
        }
        "perturbed_flat" => {
            let m = PerturbedFlat::new(n, args.real("eps", DEFAULT_EPS)?);
            probe(&m)?;
            (Arc::new(m), ExpectedFlags::kahler(None))
        }
        "perturbed_flat_nonkahler" => {
            let eps = args.real("eps", DEFAULT_EPS)?;
            let m = PerturbedFlatNonKahler::new(n, eps);
            probe(&m)?;
            let flags = if n == 1 {
                ExpectedFlags::kahler(None)
            } else if eps != 0.0 {
                ExpectedFlags {
                    kahler: Some(false),
                    balanced: Some(false),
                    ..Default::default()
                }
            } else {
                ExpectedFlags::kahler(Some(0.0))
            };
            (Arc::new(m), flags)
        }
        _ => return Err(GeomError::UnknownMetric(name)),
    };
    args.finish()?;
    let metric: SharedMetric = if scale == 1.0 {
        metric
    } else {
        expected.einstein = expected.einstein.map(|l| l / scale);
        Arc::new(ScaledMetric::new(metric, scale)?)
    };
    Ok(CatalogMetric {
        name: metric.label(),
        metric,
        expected,
    })
}

/// `z ↦ z` on `Cⁿ`.
#[derive(Debug, Clone)]
pub struct IdentityMap {
    n: usize,
}

impl IdentityMap {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

fn linear_jet(a: &CMat, z: &[Complex64]) -> Result<MapJet> {
    let n = a.ncols();
    check_len("linear map", n, z.len())?;
    let v = a * nalgebra::DVector::from_column_slice(z);
    Ok(MapJet {
        value: v.iter().copied().collect(),
        jacobian: a.clone(),
        hessian: vec![CMat::zeros(n, n); a.nrows()],
    })
}

impl HolomorphicMap for IdentityMap {
    fn label(&self) -> String {
        "identity".into()
    }
    fn source_dim(&self) -> usize {
        self.n
    }
    fn target_dim(&self) -> usize {
        self.n
    }
    fn jet(&self, z: &[Complex64]) -> Result<MapJet> {
        linear_jet(&CMat::identity(self.n, self.n), z)
    }
    fn has_inverse(&self) -> bool {
        true
    }
    fn inverse_jet(&self, w: &[Complex64]) -> Result<MapJet> {
        self.jet(w)
    }
}

/// `z ↦ A z` for invertible `A`.
#[derive(Debug, Clone)]
pub struct LinearMap {
    a: CMat,
    a_inv: CMat,
}

impl LinearMap {
    pub fn new(a: CMat) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() == 0 || a.nrows() > MAX_DIM {
            return Err(GeomError::DimensionMismatch(format!(
                "linear map must be square of size 1..={MAX_DIM}"
            )));
        }
        let scale = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let svd = a.clone().svd(false, false);
        let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
        if !(smin > 1e-12 * scale) {
            return Err(GeomError::SingularLinearMap);
        }
        let a_inv = a.clone().try_inverse().ok_or(GeomError::SingularLinearMap)?;
        Ok(Self { a, a_inv })
    }

    pub fn matrix(&self) -> &CMat {
        &self.a
    }

    pub fn inverse_matrix(&self) -> &CMat {
        &self.a_inv
    }
}

impl HolomorphicMap for LinearMap {
    fn label(&self) -> String {
        let rows: Vec<String> = (0..self.a.nrows())
            .map(|i| {
                let r: Vec<String> = (0..self.a.ncols())
                    .map(|j| crate::point::format_complex(&self.a[(i, j)]))
                    .collect();
                format!("[{}]", r.join(","))
            })
            .collect();
        format!("linear:A=[{}]", rows.join(","))
    }
    fn source_dim(&self) -> usize {
        self.a.ncols()
    }
    fn target_dim(&self) -> usize {
        self.a.nrows()
    }
    fn jet(&self, z: &[Complex64]) -> Result<MapJet> {
        linear_jet(&self.a, z)
    }
    fn has_inverse(&self) -> bool {
        true
    }
    fn inverse_jet(&self, w: &[Complex64]) -> Result<MapJet> {
        linear_jet(&self.a_inv, w)
    }
}

/// `z ↦ c z`, `c ≠ 0`.
#[derive(Debug, Clone)]
pub struct Dilation {
    n: usize,
    c: Complex64,
}

impl Dilation {
    pub fn new(n: usize, c: Complex64) -> Result<Self> {
        if c.norm() == 0.0 || !c.norm().is_finite() {
            return Err(GeomError::InvalidParameter("dilation factor must be nonzero".into()));
        }
        Ok(Self { n, c })
    }
}

impl HolomorphicMap for Dilation {
    fn label(&self) -> String {
        format!("dilation:c={}", crate::point::format_complex(&self.c))
    }
    fn source_dim(&self) -> usize {
        self.n
    }
    fn target_dim(&self) -> usize {
        self.n
    }
    fn jet(&self, z: &[Complex64]) -> Result<MapJet> {
        linear_jet(&(CMat::identity(self.n, self.n) * self.c), z)
    }
    fn has_inverse(&self) -> bool {
        true
    }
    fn inverse_jet(&self, w: &[Complex64]) -> Result<MapJet> {
        linear_jet(&(CMat::identity(self.n, self.n) * self.c.inv()), w)
    }
}

/// `f^α(z) = z_α + ½ z_{α+1}²` (indices cyclic); no closed-form inverse.
#[derive(Debug, Clone)]
pub struct QuadraticPoly {
    n: usize,
}

impl QuadraticPoly {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl HolomorphicMap for QuadraticPoly {
    fn label(&self) -> String {
        "quadratic_poly".into()
    }
    fn source_dim(&self) -> usize {
        self.n
    }
    fn target_dim(&self) -> usize {
        self.n
    }
    fn jet(&self, z: &[Complex64]) -> Result<MapJet> {
        let n = self.n;
        check_len("quadratic_poly", n, z.len())?;
        let s = |a: usize| (a + 1) % n;
        let mut jacobian = CMat::identity(n, n);
        let mut hessian = vec![CMat::zeros(n, n); n];
        for a in 0..n {
            jacobian[(a, s(a))] += z[s(a)];
            hessian[a][(s(a), s(a))] = c64(1.0, 0.0);
        }
        Ok(MapJet {
            value: (0..n).map(|a| z[a] + 0.5 * z[s(a)] * z[s(a)]).collect(),
            jacobian,
            hessian,
        })
    }
}

/// Looks up a catalog map, or loads `file:PATH`.
pub fn get_map(spec: &str) -> Result<SharedMap> {
    if let Some(path) = spec.strip_prefix("file:") {
        return Ok(Arc::new(parse_map(&read_file(path)?)?.with_name(file_stem(path))));
    }
    let (name, items) = split_spec(spec)?;
    let mut args = Args {
        owner: name.clone(),
        items,
    };
    let map: SharedMap = match name.as_str() {
        "identity" => Arc::new(IdentityMap::new(args.dim()?)),
        "quadratic_poly" => Arc::new(QuadraticPoly::new(args.dim()?)),
        "dilation" => {
            let n = args.dim()?;
            let c = parse_constant(&args.take("c").unwrap_or_else(|| "2".into()))?;
            Arc::new(Dilation::new(n, c)?)
        }
        "linear" => {
            let a = args
                .take("A")
                .ok_or_else(|| GeomError::InvalidParameter("linear needs A=[[..],..]".into()))?;
            Arc::new(LinearMap::new(parse_matrix(&a)?)?)
        }
        _ => return Err(GeomError::UnknownMap(name)),
    };
    args.finish()?;
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::maps::inverse_round_trip;
    use crate::metric::metric_matrix;
    use crate::sampling::sample_region;

    fn z2(a: Complex64, b: Complex64) -> Vec<Complex64> {
        vec![a, b]
    }

    #[test]
    fn point_values() {
        let hopf = get_metric("hopf").unwrap();
        let g = metric_matrix(hopf.metric.as_ref(), &z2(c64(1.0, 0.0), c64(0.0, 0.0))).unwrap();
        assert_eq!(g, CMat::identity(2, 2));
        let fs = get_metric("fubini_study:n=3").unwrap();
        let g = metric_matrix(fs.metric.as_ref(), &[c64(0.0, 0.0); 3]).unwrap();
        assert_eq!(g, CMat::identity(3, 3));
        let flat = get_metric("flat").unwrap();
        let g = metric_matrix(flat.metric.as_ref(), &z2(c64(5.0, 1.0), c64(-2.0, 0.0))).unwrap();
        assert_eq!(g, CMat::identity(2, 2));
    }

    #[test]
    fn fubini_study_off_origin_matches_hand_formula() {
        // n = 1: g = 1/(1+|z|²)²
        let fs = get_metric("fubini_study:n=1").unwrap();
        let g = metric_matrix(fs.metric.as_ref(), &[c64(0.6, 0.8)]).unwrap();
        assert!((g[(0, 0)] - c64(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn every_metric_is_positive_definite_on_its_samples() {
        for name in METRIC_NAMES {
            for n in 1..=3 {
                let m = get_metric(&format!("{name}:n={n}")).unwrap();
                for p in sample_region(n, &m.region(), 200, 3) {
                    assert!(m.metric.contains(p.coords()), "{name}");
                    metric_at(m.metric.as_ref(), p.coords()).unwrap();
                }
            }
        }
    }

    #[test]
    fn perturbed_flat_is_the_hessian_of_its_potential() {
        let m = PerturbedFlat::new(2, 0.3);
        let psi = crate::wirtinger::FnField::new("psi", 2, 1, |z: &[Complex64]| {
            let s: f64 = z.iter().map(|c| c.norm_sqr()).sum();
            Ok(vec![c64(0.5 * s * s + z[0].re * s, 0.0)])
        });
        let p = crate::point::ChartPoint::from_pairs(&[(0.2, -0.1), (0.35, 0.15)]).unwrap();
        let cfg = crate::wirtinger::DiffEngineConfig::finite_difference();
        let jet = crate::wirtinger::jet2_scalar(&psi, &p, &cfg).unwrap();
        let g = metric_matrix(&m, p.coords()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 } + 0.3 * jet.ddbar[i][j];
                assert!((g[(i, j)] - want).norm() < 1e-7);
            }
        }
    }

    #[test]
    fn inline_arguments() {
        let m = get_metric("conformal_flat:n=1,u=log(1+abs2(z1))").unwrap();
        let g = metric_matrix(m.metric.as_ref(), &[c64(1.0, 0.0)]).unwrap();
        assert!((g[(0, 0)] - c64(2.0, 0.0)).norm() < 1e-14);
        let s = get_metric("fubini_study:scale=3").unwrap();
        assert_eq!(s.expected.einstein, Some(1.0));
        assert!(matches!(get_metric("nope"), Err(GeomError::UnknownMetric(_))));
        assert!(matches!(get_metric("flat:q=1"), Err(GeomError::InvalidParameter(_))));
        assert!(matches!(get_metric("flat:n=9"), Err(GeomError::InvalidParameter(_))));
        assert!(matches!(
            get_metric("perturbed_flat:eps=-10"),
            Err(GeomError::InvalidParameter(_))
        ));
        assert!(matches!(
            get_metric("conformal_flat:u=z1"),
            Err(GeomError::InvalidParameter(_))
        ));
    }

    #[test]
    fn maps() {
        let id = get_map("identity").unwrap();
        let j = id.jet(&z2(c64(0.1, 0.2), c64(0.3, 0.0))).unwrap();
        assert_eq!(j.jacobian, CMat::identity(2, 2));
        assert!(j.hessian.iter().all(|h| max_abs(h) == 0.0));

        let d = get_map("dilation:n=1,c=2").unwrap();
        let j = d.jet(&[c64(0.7, -0.3)]).unwrap();
        assert_eq!(j.jacobian[(0, 0)], c64(2.0, 0.0));
        assert_eq!(d.inverse_jet(&[c64(1.0, 0.0)]).unwrap().jacobian[(0, 0)], c64(0.5, 0.0));

        let lin = LinearMap::new(parse_matrix("[[1,1],[0,1]]").unwrap()).unwrap();
        let want = CMat::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(-1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
        assert_eq!(lin.inverse_matrix(), &want);
        let pts: Vec<Vec<Complex64>> = sample_region(2, &SampleRegion::ball(1.0), 20, 1)
            .into_iter()
            .map(|p| p.coords().to_vec())
            .collect();
        assert!(inverse_round_trip(&lin, &pts).unwrap() < 1e-12);
        assert!(matches!(
            get_map("linear:A=[[1,2],[2,4]]"),
            Err(GeomError::SingularLinearMap)
        ));
        assert!(matches!(get_map("rotate"), Err(GeomError::UnknownMap(_))));
    }

    #[test]
    fn quadratic_poly_derivatives_match_fd() {
        let q = QuadraticPoly::new(2);
        let z = z2(c64(0.3, -0.2), c64(-0.1, 0.4));
        let j = q.jet(&z).unwrap();
        let h = 1e-6;
        for i in 0..2 {
            let mut zp = z.clone();
            zp[i] += h;
            let mut zm = z.clone();
            zm[i] -= h;
            let (fp, fm) = (q.apply(&zp).unwrap(), q.apply(&zm).unwrap());
            for a in 0..2 {
                let d = (fp[a] - fm[a]) / (2.0 * h);
                assert!((d - j.jacobian[(a, i)]).norm() < 1e-9);
            }
        }
        assert!(!q.has_inverse());
    }
}
