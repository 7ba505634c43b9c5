use num_complex::Complex64;

use crate::error::{GeomError, Result};

/// Largest chart dimension supported by the jet carriers.
pub const MAX_DIM: usize = 4;

/// A point in a holomorphic chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    coords: Vec<Complex64>,
}

impl ChartPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(GeomError::DimensionMismatch(
                "a chart point needs at least one coordinate".into(),
            ));
        }
        if coords.len() > MAX_DIM {
            return Err(GeomError::DimensionMismatch(format!(
                "chart dimension {} exceeds the supported maximum {MAX_DIM}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(GeomError::NonFinite("chart point".into()));
        }
        Ok(Self { coords })
    }

    /// Builds a point from `(re, im)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    /// Builds a point with purely real coordinates.
    pub fn real(xs: &[f64]) -> Result<Self> {
        Self::new(xs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Coordinates as `[re, im]` pairs, the serialized form.
    pub fn pairs(&self) -> Vec<[f64; 2]> {
        pairs(&self.coords)
    }
}

pub fn pairs(z: &[Complex64]) -> Vec<[f64; 2]> {
    z.iter().map(|c| [c.re, c.im]).collect()
}

impl AsRef<[Complex64]> for ChartPoint {
    fn as_ref(&self) -> &[Complex64] {
        &self.coords
    }
}

pub(crate) fn format_point(z: &[Complex64]) -> String {
    let parts: Vec<String> = z.iter().map(format_complex).collect();
    format!("({})", parts.join(", "))
}

pub(crate) fn format_complex(c: &Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.im < 0.0 {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}
