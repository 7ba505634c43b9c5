//! Holomorphic maps between charts and their second-order jets.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{GeomError, Result};
use crate::linalg::CMat;
use crate::scalar::HolJet2;

/// Value, Jacobian `f^α_i` and holomorphic Hessian `f^α_{ij}` of a map at a point.
#[derive(Debug, Clone)]
pub struct MapJet {
    pub value: Vec<Complex64>,
    /// `jacobian[(α, i)] = ∂f^α/∂z_i`
    pub jacobian: CMat,
    /// `hessian[α][(i, j)] = ∂²f^α/∂z_i∂z_j`
    pub hessian: Vec<CMat>,
}

impl MapJet {
    pub(crate) fn from_holjets(source_dim: usize, comps: &[HolJet2]) -> Self {
        let m = comps.len();
        let n = source_dim;
        MapJet {
            value: comps.iter().map(|c| c.value).collect(),
            jacobian: CMat::from_fn(m, n, |a, i| comps[a].d[i]),
            hessian: comps
                .iter()
                .map(|c| CMat::from_fn(n, n, |i, j| c.dd[i][j]))
                .collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        let ok = |c: &Complex64| c.re.is_finite() && c.im.is_finite();
        self.value.iter().all(ok)
            && self.jacobian.iter().all(ok)
            && self.hessian.iter().all(|h| h.iter().all(ok))
    }
}

pub trait HolomorphicMap: Send + Sync {
    fn label(&self) -> String;
    fn source_dim(&self) -> usize;
    fn target_dim(&self) -> usize;
    fn jet(&self, z: &[Complex64]) -> Result<MapJet>;

    fn apply(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok(self.jet(z)?.value)
    }

    fn has_inverse(&self) -> bool {
        false
    }

    /// Jet of the inverse map at a target point `w`.
    fn inverse_jet(&self, _w: &[Complex64]) -> Result<MapJet> {
        Err(GeomError::MissingInverse)
    }
}

pub type SharedMap = Arc<dyn HolomorphicMap>;

/// Largest `|f⁻¹(f(z)) − z|` over the given points.
pub fn inverse_round_trip(map: &dyn HolomorphicMap, points: &[Vec<Complex64>]) -> Result<f64> {
    let mut worst = 0.0f64;
    for z in points {
        let w = map.apply(z)?;
        let back = map.inverse_jet(&w)?.value;
        for (a, b) in back.iter().zip(z) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}

/// The constant map `z ↦ c`.
pub struct ConstantMap {
    value: Vec<Complex64>,
    source_dim: usize,
}

impl ConstantMap {
    pub fn new(source_dim: usize, value: Vec<Complex64>) -> Self {
        Self { value, source_dim }
    }
}

impl HolomorphicMap for ConstantMap {
    fn label(&self) -> String {
        "constant".into()
    }
    fn source_dim(&self) -> usize {
        self.source_dim
    }
    fn target_dim(&self) -> usize {
        self.value.len()
    }
    fn jet(&self, _z: &[Complex64]) -> Result<MapJet> {
        let (m, n) = (self.value.len(), self.source_dim);
        Ok(MapJet {
            value: self.value.clone(),
            jacobian: CMat::zeros(m, n),
            hessian: vec![CMat::zeros(n, n); m],
        })
    }
}
