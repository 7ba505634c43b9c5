//! Wirtinger derivatives of chart fields up to mixed second order.
//!
//! Two interchangeable engines are provided. The jet engine evaluates the
//! field on [`Jet2`] numbers and is exact up to rounding. The finite-difference
//! engine works on the real coordinates `z_k = x_k + i y_k` with central
//! stencils and Richardson extrapolation, and serves as an independent check.

use num_complex::Complex64;

use crate::error::{GeomError, Result};
use crate::point::{ChartPoint, MAX_DIM};
use crate::scalar::Jet2;

/// A smooth vector-valued field on a holomorphic chart.
pub trait ChartField: Send + Sync {
    fn label(&self) -> String;
    /// Complex dimension of the chart.
    fn dim(&self) -> usize;
    /// Number of complex output components.
    fn outputs(&self) -> usize;
    fn contains(&self, _z: &[Complex64]) -> bool {
        true
    }
    fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>>;
    fn eval_jet(&self, _z: &[Jet2]) -> Result<Vec<Jet2>> {
        Err(GeomError::JetsUnsupported(self.label()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Jets,
    FiniteDifference,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Jets => "jets",
            Engine::FiniteDifference => "fd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffEngineConfig {
    pub engine: Engine,
    pub fd_step: f64,
    pub richardson_levels: u8,
}

impl Default for DiffEngineConfig {
    fn default() -> Self {
        Self {
            engine: Engine::Jets,
            fd_step: 1e-4,
            richardson_levels: 2,
        }
    }
}

impl DiffEngineConfig {
    pub fn jets() -> Self {
        Self::default()
    }

    pub fn finite_difference() -> Self {
        Self {
            engine: Engine::FiniteDifference,
            ..Self::default()
        }
    }

    pub fn new(engine: Engine, fd_step: f64, richardson_levels: u8) -> Result<Self> {
        let cfg = Self {
            engine,
            fd_step,
            richardson_levels,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return Err(GeomError::Config(format!(
                "fd_step must be positive, got {}",
                self.fd_step
            )));
        }
        if !(1..=3).contains(&self.richardson_levels) {
            return Err(GeomError::Config(format!(
                "richardson_levels must be 1, 2 or 3, got {}",
                self.richardson_levels
            )));
        }
        Ok(())
    }

    /// Same configuration with the FD engine selected.
    pub fn as_fd(&self) -> Self {
        Self {
            engine: Engine::FiniteDifference,
            ..*self
        }
    }
}

/// Closure-backed field; supports the FD engine only.
pub struct FnField<F> {
    label: String,
    dim: usize,
    outputs: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&[Complex64]) -> Result<Vec<Complex64>> + Send + Sync,
{
    pub fn new(label: impl Into<String>, dim: usize, outputs: usize, f: F) -> Self {
        Self {
            label: label.into(),
            dim,
            outputs,
            f,
        }
    }
}

impl<F> ChartField for FnField<F>
where
    F: Fn(&[Complex64]) -> Result<Vec<Complex64>> + Send + Sync,
{
    fn label(&self) -> String {
        self.label.clone()
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn outputs(&self) -> usize {
        self.outputs
    }
    fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        (self.f)(z)
    }
}

fn check_finite(label: &str, vals: &[Complex64]) -> Result<()> {
    if vals.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(GeomError::NonFinite(label.to_string()))
    }
}

fn check_point(field: &dyn ChartField, z: &[Complex64]) -> Result<()> {
    if z.len() != field.dim() {
        return Err(GeomError::DimensionMismatch(format!(
            "{} expects {} coordinates, got {}",
            field.label(),
            field.dim(),
            z.len()
        )));
    }
    if z.len() > MAX_DIM {
        return Err(GeomError::DimensionMismatch(format!(
            "chart dimension {} exceeds {MAX_DIM}",
            z.len()
        )));
    }
    if !field.contains(z) {
        return Err(GeomError::domain(&field.label(), z));
    }
    Ok(())
}

/// Evaluates `field` at `z` after a domain and finiteness check.
pub fn eval_checked(field: &dyn ChartField, z: &[Complex64]) -> Result<Vec<Complex64>> {
    check_point(field, z)?;
    let v = field.eval(z)?;
    check_finite(&field.label(), &v)?;
    Ok(v)
}

/// Entrywise second-order jets of every output component at `z`.
pub fn jet2_field(
    field: &dyn ChartField,
    z: &[Complex64],
    cfg: &DiffEngineConfig,
) -> Result<Vec<Jet2>> {
    cfg.validate()?;
    check_point(field, z)?;
    match cfg.engine {
        Engine::Jets => {
            let out = field.eval_jet(&Jet2::seed(z))?;
            if out.iter().all(Jet2::is_finite) {
                Ok(out)
            } else {
                Err(GeomError::NonFinite(field.label()))
            }
        }
        Engine::FiniteDifference => fd_jet2(field, z, cfg),
    }
}

/// Jet of a scalar field.
pub fn jet2_scalar(field: &dyn ChartField, p: &ChartPoint, cfg: &DiffEngineConfig) -> Result<Jet2> {
    if field.outputs() != 1 {
        return Err(GeomError::DimensionMismatch(format!(
            "{} is not scalar-valued",
            field.label()
        )));
    }
    Ok(jet2_field(field, p.coords(), cfg)?[0])
}

/// Entrywise jets of an `n × n` matrix field, row-major.
pub fn jet2_matrix(
    field: &dyn ChartField,
    p: &ChartPoint,
    cfg: &DiffEngineConfig,
) -> Result<Vec<Jet2>> {
    let n = field.dim();
    if field.outputs() != n * n {
        return Err(GeomError::DimensionMismatch(format!(
            "{} does not produce an {n}×{n} matrix",
            field.label()
        )));
    }
    jet2_field(field, p.coords(), cfg)
}

/// `z` shifted by `h` along real coordinate `a` (`2k` is Re z_k, `2k+1` is Im z_k).
fn shifted(z: &[Complex64], moves: &[(usize, f64)]) -> Vec<Complex64> {
    let mut w = z.to_vec();
    for &(a, h) in moves {
        let k = a / 2;
        if a % 2 == 0 {
            w[k].re += h;
        } else {
            w[k].im += h;
        }
    }
    w
}

fn eval_stencil(field: &dyn ChartField, z: &[Complex64]) -> Result<Vec<Complex64>> {
    if !field.contains(z) {
        return Err(GeomError::domain(&format!("{} (FD stencil)", field.label()), z));
    }
    let v = field.eval(z)?;
    check_finite(&field.label(), &v)?;
    Ok(v)
}

/// Real gradient and Hessian of every output at one step size.
struct RealDerivs {
    grad: Vec<Vec<Complex64>>,      // [a][out]
    hess: Vec<Vec<Vec<Complex64>>>, // [a][b][out]
}

fn real_derivs(
    field: &dyn ChartField,
    z: &[Complex64],
    f0: &[Complex64],
    h: f64,
    second: bool,
) -> Result<RealDerivs> {
    let m = 2 * z.len();
    let k = f0.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut grad = vec![vec![zero; k]; m];
    let mut hess = vec![vec![vec![zero; k]; m]; if second { m } else { 0 }];
    for a in 0..m {
        let fp = eval_stencil(field, &shifted(z, &[(a, h)]))?;
        let fm = eval_stencil(field, &shifted(z, &[(a, -h)]))?;
        for o in 0..k {
            grad[a][o] = (fp[o] - fm[o]) / (2.0 * h);
            if second {
                hess[a][a][o] = (fp[o] - f0[o] * 2.0 + fm[o]) / (h * h);
            }
        }
    }
    if second {
        for a in 0..m {
            for b in (a + 1)..m {
                let fpp = eval_stencil(field, &shifted(z, &[(a, h), (b, h)]))?;
                let fpm = eval_stencil(field, &shifted(z, &[(a, h), (b, -h)]))?;
                let fmp = eval_stencil(field, &shifted(z, &[(a, -h), (b, h)]))?;
                let fmm = eval_stencil(field, &shifted(z, &[(a, -h), (b, -h)]))?;
                for o in 0..k {
                    let v = (fpp[o] - fpm[o] - fmp[o] + fmm[o]) / (4.0 * h * h);
                    hess[a][b][o] = v;
                    hess[b][a][o] = v;
                }
            }
        }
    }
    Ok(RealDerivs { grad, hess })
}

/// Richardson extrapolation of O(h²) estimates taken at h, h/2, h/4, ...
fn richardson(estimates: Vec<RealDerivs>) -> RealDerivs {
    let mut table: Vec<RealDerivs> = estimates;
    let mut factor = 4.0;
    while table.len() > 1 {
        let mut next = Vec::with_capacity(table.len() - 1);
        for w in table.windows(2) {
            let (coarse, fine) = (&w[0], &w[1]);
            let comb = |c: Complex64, f: Complex64| f + (f - c) / (factor - 1.0);
            let grad = coarse
                .grad
                .iter()
                .zip(&fine.grad)
                .map(|(c, f)| c.iter().zip(f).map(|(&c, &f)| comb(c, f)).collect())
                .collect();
            let hess = coarse
                .hess
                .iter()
                .zip(&fine.hess)
                .map(|(cr, fr)| {
                    cr.iter()
                        .zip(fr)
                        .map(|(c, f)| c.iter().zip(f).map(|(&c, &f)| comb(c, f)).collect())
                        .collect()
                })
                .collect();
            next.push(RealDerivs { grad, hess });
        }
        table = next;
        factor *= 4.0;
    }
    table.pop().expect("at least one estimate")
}

fn fd_real(
    field: &dyn ChartField,
    z: &[Complex64],
    cfg: &DiffEngineConfig,
    second: bool,
) -> Result<(Vec<Complex64>, RealDerivs)> {
    let f0 = eval_stencil(field, z)?;
    let mut estimates = Vec::new();
    let mut h = cfg.fd_step;
    for _ in 0..cfg.richardson_levels {
        estimates.push(real_derivs(field, z, &f0, h, second)?);
        h /= 2.0;
    }
    Ok((f0, richardson(estimates)))
}

fn fd_jet2(field: &dyn ChartField, z: &[Complex64], cfg: &DiffEngineConfig) -> Result<Vec<Jet2>> {
    let n = z.len();
    let (f0, rd) = fd_real(field, z, cfg, true)?;
    let i = Complex64::new(0.0, 1.0);
    let out = (0..f0.len())
        .map(|o| {
            let mut jet = Jet2::constant_value(f0[o]);
            for a in 0..n {
                let (gx, gy) = (rd.grad[2 * a][o], rd.grad[2 * a + 1][o]);
                jet.d[a] = (gx - i * gy) * 0.5;
                jet.dbar[a] = (gx + i * gy) * 0.5;
                for b in 0..n {
                    let h = |p: usize, q: usize| rd.hess[p][q][o];
                    jet.ddbar[a][b] = (h(2 * a, 2 * b)
                        + h(2 * a + 1, 2 * b + 1)
                        + i * (h(2 * a, 2 * b + 1) - h(2 * a + 1, 2 * b)))
                        * 0.25;
                }
            }
            jet
        })
        .collect();
    Ok(out)
}

/// First Wirtinger derivatives of every output: `(value, ∂, ∂̄)`.
pub struct FirstJet {
    pub value: Complex64,
    pub d: Vec<Complex64>,
    pub dbar: Vec<Complex64>,
}

/// First derivatives only; with the FD engine this avoids the Hessian stencils.
pub fn jet1_field(
    field: &dyn ChartField,
    z: &[Complex64],
    cfg: &DiffEngineConfig,
) -> Result<Vec<FirstJet>> {
    let n = z.len();
    match cfg.engine {
        Engine::Jets => Ok(jet2_field(field, z, cfg)?
            .into_iter()
            .map(|j| FirstJet {
                value: j.value,
                d: j.d[..n].to_vec(),
                dbar: j.dbar[..n].to_vec(),
            })
            .collect()),
        Engine::FiniteDifference => {
            cfg.validate()?;
            check_point(field, z)?;
            let (f0, rd) = fd_real(field, z, cfg, false)?;
            let i = Complex64::new(0.0, 1.0);
            Ok((0..f0.len())
                .map(|o| {
                    let gx = |a: usize| rd.grad[2 * a][o];
                    let gy = |a: usize| rd.grad[2 * a + 1][o];
                    FirstJet {
                        value: f0[o],
                        d: (0..n).map(|a| (gx(a) - i * gy(a)) * 0.5).collect(),
                        dbar: (0..n).map(|a| (gx(a) + i * gy(a)) * 0.5).collect(),
                    }
                })
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use approx::assert_abs_diff_eq;

    /// Scalar test field written generically so both engines can run it.
    struct Generic<F>(usize, F);

    impl<F> ChartField for Generic<F>
    where
        F: Fn(&[Jet2]) -> Jet2 + Send + Sync,
    {
        fn label(&self) -> String {
            "test".into()
        }
        fn dim(&self) -> usize {
            self.0
        }
        fn outputs(&self) -> usize {
            1
        }
        fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
            let jz: Vec<Jet2> = z.iter().map(|&c| Jet2::constant(c)).collect();
            Ok(vec![(self.1)(&jz).value])
        }
        fn eval_jet(&self, z: &[Jet2]) -> Result<Vec<Jet2>> {
            Ok(vec![(self.1)(z)])
        }
    }

    #[test]
    fn config_validation() {
        assert!(DiffEngineConfig::new(Engine::Jets, 0.0, 2).is_err());
        assert!(DiffEngineConfig::new(Engine::Jets, 1e-4, 0).is_err());
        assert!(DiffEngineConfig::new(Engine::Jets, 1e-4, 4).is_err());
        assert!(DiffEngineConfig::new(Engine::FiniteDifference, 1e-3, 3).is_ok());
    }

    #[test]
    fn log_one_plus_abs2_at_origin() {
        let f = Generic(1, |z: &[Jet2]| (Jet2::real(1.0) + z[0].abs2()).ln());
        let p = ChartPoint::real(&[0.0]).unwrap();
        for cfg in [DiffEngineConfig::jets(), DiffEngineConfig::finite_difference()] {
            let j = jet2_scalar(&f, &p, &cfg).unwrap();
            assert_abs_diff_eq!(j.ddbar[0][0].re, 1.0, epsilon = 1e-8);
            assert_abs_diff_eq!(j.ddbar[0][0].im, 0.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn fd_matches_jets_on_mixed_field() {
        let f = Generic(2, |z: &[Jet2]| {
            let w = z[0] * z[1].try_conj().unwrap() + z[0].abs2() * z[1];
            w.exp() / (Jet2::real(2.0) + z[1].abs2())
        });
        let p = ChartPoint::from_pairs(&[(0.3, 0.1), (0.0, -0.2)]).unwrap();
        let a = jet2_scalar(&f, &p, &DiffEngineConfig::jets()).unwrap();
        for levels in [2u8, 3] {
            let cfg = DiffEngineConfig::new(Engine::FiniteDifference, 1e-3, levels).unwrap();
            let b = jet2_scalar(&f, &p, &cfg).unwrap();
            for i in 0..2 {
                assert_abs_diff_eq!((a.d[i] - b.d[i]).norm(), 0.0, epsilon = 1e-7);
                assert_abs_diff_eq!((a.dbar[i] - b.dbar[i]).norm(), 0.0, epsilon = 1e-7);
                for j in 0..2 {
                    assert_abs_diff_eq!((a.ddbar[i][j] - b.ddbar[i][j]).norm(), 0.0, epsilon = 1e-6);
                }
            }
        }
    }

    #[test]
    fn stencil_outside_domain_is_reported() {
        struct Disk;
        impl ChartField for Disk {
            fn label(&self) -> String {
                "disk".into()
            }
            fn dim(&self) -> usize {
                1
            }
            fn outputs(&self) -> usize {
                1
            }
            fn contains(&self, z: &[Complex64]) -> bool {
                z[0].norm() < 1.0
            }
            fn eval(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
                Ok(vec![z[0]])
            }
        }
        let cfg = DiffEngineConfig::finite_difference();
        let edge = ChartPoint::real(&[1.0 - 0.5e-4]).unwrap();
        assert!(matches!(
            jet2_scalar(&Disk, &edge, &cfg),
            Err(GeomError::DomainViolation { .. })
        ));
        let outside = ChartPoint::real(&[2.0]).unwrap();
        assert!(matches!(
            jet2_scalar(&Disk, &outside, &DiffEngineConfig::jets()),
            Err(GeomError::DomainViolation { .. })
        ));
    }

    #[test]
    fn non_finite_values_are_errors() {
        let f = FnField::new("nan", 1, 1, |_z: &[Complex64]| {
            Ok(vec![Complex64::new(f64::NAN, 0.0)])
        });
        let p = ChartPoint::real(&[0.0]).unwrap();
        assert!(matches!(
            jet2_scalar(&f, &p, &DiffEngineConfig::finite_difference()),
            Err(GeomError::NonFinite(_))
        ));
        assert!(matches!(
            jet2_scalar(&f, &p, &DiffEngineConfig::jets()),
            Err(GeomError::JetsUnsupported(_))
        ));
    }

    #[test]
    fn first_order_fd_matches_full_fd() {
        let f = Generic(2, |z: &[Jet2]| z[0] * z[0] * z[1].try_conj().unwrap());
        let p = ChartPoint::from_pairs(&[(0.4, 0.2), (-0.1, 0.3)]).unwrap();
        let cfg = DiffEngineConfig::finite_difference();
        let full = jet2_field(&f, p.coords(), &cfg).unwrap();
        let first = jet1_field(&f, p.coords(), &cfg).unwrap();
        for i in 0..2 {
            assert_abs_diff_eq!((full[0].d[i] - first[0].d[i]).norm(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!((full[0].dbar[i] - first[0].dbar[i]).norm(), 0.0, epsilon = 1e-12);
        }
    }
}
