//! Small dense complex linear algebra on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{GeomError, Result};

pub type CMat = DMatrix<Complex64>;
pub type RMat = DMatrix<f64>;

/// Condition-number ceiling above which a metric is rejected.
pub const MAX_CONDITION: f64 = 1e12;

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Row-major `n × n` values into a matrix.
pub fn from_row_major(n: usize, vals: &[Complex64]) -> CMat {
    CMat::from_fn(n, n, |i, j| vals[i * n + j])
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation from Hermitian symmetry.
pub fn hermitian_residual(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Ascending eigenvalues of a Hermitian matrix (the Hermitian part is used).
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let h = (m + m.adjoint()) * c64(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Ascending eigenvalues of a real symmetric matrix (the symmetric part is used).
pub fn symmetric_eigen(m: &RMat) -> (Vec<f64>, RMat) {
    let s = (m + m.transpose()) * 0.5;
    let eig = s.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = RMat::from_fn(m.nrows(), m.ncols(), |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// Eigenvalues of a general real matrix, or `None` if the Schur iteration does not converge.
pub fn general_eigenvalues(m: &RMat) -> Option<Vec<Complex64>> {
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 10_000)?;
    Some(schur.complex_eigenvalues().iter().copied().collect())
}

/// A metric matrix at a point with its inverse in index form.
///
/// `g[(i, j)] = g_{i j̄}` and `ginv[(i, j)] = g^{i j̄}`, normalised so that
/// `Σ_j g^{i j̄} g_{k j̄} = δ_{ik}`. In matrix terms `ginv = (gᵀ)⁻¹`.
#[derive(Debug, Clone)]
pub struct MetricAt {
    pub g: CMat,
    pub ginv: CMat,
    pub min_eigenvalue: f64,
    pub condition: f64,
}

impl MetricAt {
    pub fn new(g: CMat, where_: &str) -> Result<Self> {
        let n = g.nrows();
        if g.ncols() != n {
            return Err(GeomError::DimensionMismatch("metric matrix is not square".into()));
        }
        let scale = max_abs(&g).max(1.0);
        if hermitian_residual(&g) > 1e-9 * scale {
            return Err(GeomError::NotPositiveDefinite(format!(
                "{where_} (matrix is not Hermitian)"
            )));
        }
        let ev = hermitian_eigenvalues(&g);
        let (lo, hi) = (ev[0], ev[n - 1]);
        if !(lo > 0.0) {
            return Err(GeomError::NotPositiveDefinite(where_.to_string()));
        }
        let condition = hi / lo;
        if condition > MAX_CONDITION {
            return Err(GeomError::IllConditionedMetric(condition));
        }
        let inv = g
            .clone()
            .cholesky()
            .ok_or_else(|| GeomError::NotPositiveDefinite(where_.to_string()))?
            .inverse();
        Ok(Self {
            ginv: inv.transpose(),
            g,
            min_eigenvalue: lo,
            condition,
        })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `Σ_{i,j} g^{i j̄} a_{i j̄}`.
    pub fn trace(&self, a: &CMat) -> Complex64 {
        let n = self.dim();
        let mut s = c64(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += self.ginv[(i, j)] * a[(i, j)];
            }
        }
        s
    }

    /// `|v|²_g = g_{α β̄} v^α conj(v^β)`.
    pub fn norm_sqr(&self, v: &[Complex64]) -> f64 {
        let mut s = c64(0.0, 0.0);
        for (a, va) in v.iter().enumerate() {
            for (b, vb) in v.iter().enumerate() {
                s += self.g[(a, b)] * va * vb.conj();
            }
        }
        s.re
    }
}

/// Solves `a x = b` for a small complex system.
pub fn solve(a: &CMat, b: &DVector<Complex64>) -> Option<DVector<Complex64>> {
    a.clone().lu().solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn inverse_convention() {
        let g = CMat::from_row_slice(
            2,
            2,
            &[c64(2.0, 0.0), c64(0.3, 0.4), c64(0.3, -0.4), c64(1.5, 0.0)],
        );
        let m = MetricAt::new(g.clone(), "test").unwrap();
        for i in 0..2 {
            for k in 0..2 {
                let s: Complex64 = (0..2).map(|j| m.ginv[(i, j)] * g[(k, j)]).sum();
                let want = if i == k { 1.0 } else { 0.0 };
                assert_abs_diff_eq!((s - c64(want, 0.0)).norm(), 0.0, epsilon = 1e-14);
            }
        }
        // ginv is Hermitian too
        assert!(hermitian_residual(&m.ginv) < 1e-14);
    }

    #[test]
    fn rejects_indefinite_and_ill_conditioned() {
        let g = CMat::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)]);
        assert!(matches!(MetricAt::new(g, "p"), Err(GeomError::NotPositiveDefinite(_))));
        let g = CMat::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1e-13, 0.0)]);
        assert!(matches!(MetricAt::new(g, "p"), Err(GeomError::IllConditionedMetric(_))));
    }

    #[test]
    fn eigen_helpers() {
        let m = RMat::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (vals, vecs) = symmetric_eigen(&m);
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vecs[(0, 1)].abs(), 0.5f64.sqrt(), epsilon = 1e-12);
        let rot = RMat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let ev = general_eigenvalues(&rot).unwrap();
        assert!(ev.iter().all(|e| (e.im.abs() - 1.0).abs() < 1e-12));
    }
}
