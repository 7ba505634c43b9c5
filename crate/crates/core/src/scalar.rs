//! Number carriers for generic field evaluation.
//!
//! Every field in the crate is written once, generically over [`Scalar`], and
//! evaluated either on plain complex numbers or on truncated jets:
//!
//! * [`Jet2`] carries the value, both families of first Wirtinger derivatives
//!   (`∂_i`, `∂_ī`) and the mixed block `∂_i ∂_j̄`. The set is closed under
//!   products, conjugation and composition with holomorphic functions, which
//!   is all the metric formulas need.
//! * [`HolJet2`] carries the value, `∂_i` and the holomorphic Hessian
//!   `∂_i ∂_j`. It cannot represent conjugation and is used for holomorphic maps.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::point::MAX_DIM;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub trait Scalar:
    Copy
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(c: Complex64) -> Self;
    fn value(&self) -> Complex64;
    /// Complex conjugate, or `None` when the carrier only tracks holomorphic data.
    fn try_conj(self) -> Option<Self>;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn recip(self) -> Self;
    fn powi(self, k: i32) -> Self;

    fn real(x: f64) -> Self {
        Self::constant(Complex64::new(x, 0.0))
    }

    /// `self · conj(self)`; panics for holomorphic-only carriers.
    fn abs2(self) -> Self {
        self * self.try_conj().expect("abs2 on a holomorphic-only carrier")
    }
}

impl Scalar for Complex64 {
    fn constant(c: Complex64) -> Self {
        c
    }
    fn value(&self) -> Complex64 {
        *self
    }
    fn try_conj(self) -> Option<Self> {
        Some(Complex64::conj(&self))
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn ln(self) -> Self {
        Complex64::ln(self)
    }
    fn recip(self) -> Self {
        ONE / self
    }
    fn powi(self, k: i32) -> Self {
        Complex64::powi(&self, k)
    }
}

/// Derivatives of `x ↦ x^k` at `x`: value, first and second derivative.
fn powi_derivs(x: Complex64, k: i32) -> (Complex64, Complex64, Complex64) {
    let kf = k as f64;
    match k {
        0 => (ONE, ZERO, ZERO),
        1 => (x, ONE, ZERO),
        2 => (x * x, x * 2.0, Complex64::new(2.0, 0.0)),
        _ => (
            x.powi(k),
            x.powi(k - 1) * kf,
            x.powi(k - 2) * (kf * (kf - 1.0)),
        ),
    }
}

/// Second-order Wirtinger jet: value, `∂_i`, `∂_ī` and `∂_i ∂_j̄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub value: Complex64,
    pub d: [Complex64; MAX_DIM],
    pub dbar: [Complex64; MAX_DIM],
    /// `ddbar[i][j] = ∂_i ∂_j̄ f`.
    pub ddbar: [[Complex64; MAX_DIM]; MAX_DIM],
}

/// Public name of the jet returned by the differentiation engines.
pub type WirtingerJet2 = Jet2;

impl Jet2 {
    pub fn constant_value(value: Complex64) -> Self {
        Self {
            value,
            d: [ZERO; MAX_DIM],
            dbar: [ZERO; MAX_DIM],
            ddbar: [[ZERO; MAX_DIM]; MAX_DIM],
        }
    }

    /// The coordinate function `z_k` evaluated at `value`.
    pub fn variable(value: Complex64, k: usize) -> Self {
        let mut j = Self::constant_value(value);
        j.d[k] = ONE;
        j
    }

    /// Seeds one jet per coordinate of `z`.
    pub fn seed(z: &[Complex64]) -> Vec<Self> {
        z.iter()
            .enumerate()
            .map(|(k, &v)| Self::variable(v, k))
            .collect()
    }

    /// Composition with a holomorphic function given its value and first two derivatives.
    fn chain(self, h: Complex64, h1: Complex64, h2: Complex64) -> Self {
        let mut out = Self::constant_value(h);
        for i in 0..MAX_DIM {
            out.d[i] = h1 * self.d[i];
            out.dbar[i] = h1 * self.dbar[i];
            for j in 0..MAX_DIM {
                out.ddbar[i][j] = h1 * self.ddbar[i][j] + h2 * self.d[i] * self.dbar[j];
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        let ok = |c: &Complex64| c.re.is_finite() && c.im.is_finite();
        ok(&self.value)
            && self.d.iter().all(ok)
            && self.dbar.iter().all(ok)
            && self.ddbar.iter().flatten().all(ok)
    }
}

impl Add for Jet2 {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self.value += o.value;
        for i in 0..MAX_DIM {
            self.d[i] += o.d[i];
            self.dbar[i] += o.dbar[i];
            for j in 0..MAX_DIM {
                self.ddbar[i][j] += o.ddbar[i][j];
            }
        }
        self
    }
}

impl Sub for Jet2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for Jet2 {
    type Output = Self;
    fn neg(mut self) -> Self {
        self.value = -self.value;
        for i in 0..MAX_DIM {
            self.d[i] = -self.d[i];
            self.dbar[i] = -self.dbar[i];
            for j in 0..MAX_DIM {
                self.ddbar[i][j] = -self.ddbar[i][j];
            }
        }
        self
    }
}

impl Mul for Jet2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Self::constant_value(self.value * o.value);
        for i in 0..MAX_DIM {
            out.d[i] = self.d[i] * o.value + self.value * o.d[i];
            out.dbar[i] = self.dbar[i] * o.value + self.value * o.dbar[i];
            for j in 0..MAX_DIM {
                out.ddbar[i][j] = self.ddbar[i][j] * o.value
                    + self.d[i] * o.dbar[j]
                    + self.dbar[j] * o.d[i]
                    + self.value * o.ddbar[i][j];
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Scalar for Jet2 {
    fn constant(c: Complex64) -> Self {
        Self::constant_value(c)
    }
    fn value(&self) -> Complex64 {
        self.value
    }
    fn try_conj(self) -> Option<Self> {
        let mut out = Self::constant_value(Complex64::conj(&self.value));
        for i in 0..MAX_DIM {
            out.d[i] = Complex64::conj(&self.dbar[i]);
            out.dbar[i] = Complex64::conj(&self.d[i]);
            for j in 0..MAX_DIM {
                // ∂_i ∂_j̄ conj(f) = conj(∂_j ∂_ī f)
                out.ddbar[i][j] = Complex64::conj(&self.ddbar[j][i]);
            }
        }
        Some(out)
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let x = self.value;
        let r = ONE / x;
        self.chain(x.ln(), r, -r * r)
    }
    fn recip(self) -> Self {
        let r = ONE / self.value;
        self.chain(r, -r * r, r * r * r * 2.0)
    }
    fn powi(self, k: i32) -> Self {
        if k < 0 {
            return self.recip().powi(-k);
        }
        let (h, h1, h2) = powi_derivs(self.value, k);
        self.chain(h, h1, h2)
    }
}

/// Holomorphic second-order jet: value, `∂_i` and `∂_i ∂_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolJet2 {
    pub value: Complex64,
    pub d: [Complex64; MAX_DIM],
    pub dd: [[Complex64; MAX_DIM]; MAX_DIM],
}

impl HolJet2 {
    pub fn constant_value(value: Complex64) -> Self {
        Self {
            value,
            d: [ZERO; MAX_DIM],
            dd: [[ZERO; MAX_DIM]; MAX_DIM],
        }
    }

    pub fn variable(value: Complex64, k: usize) -> Self {
        let mut j = Self::constant_value(value);
        j.d[k] = ONE;
        j
    }

    pub fn seed(z: &[Complex64]) -> Vec<Self> {
        z.iter()
            .enumerate()
            .map(|(k, &v)| Self::variable(v, k))
            .collect()
    }

    fn chain(self, h: Complex64, h1: Complex64, h2: Complex64) -> Self {
        let mut out = Self::constant_value(h);
        for i in 0..MAX_DIM {
            out.d[i] = h1 * self.d[i];
            for j in 0..MAX_DIM {
                out.dd[i][j] = h1 * self.dd[i][j] + h2 * self.d[i] * self.d[j];
            }
        }
        out
    }
}

impl Add for HolJet2 {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self.value += o.value;
        for i in 0..MAX_DIM {
            self.d[i] += o.d[i];
            for j in 0..MAX_DIM {
                self.dd[i][j] += o.dd[i][j];
            }
        }
        self
    }
}

impl Sub for HolJet2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for HolJet2 {
    type Output = Self;
    fn neg(mut self) -> Self {
        self.value = -self.value;
        for i in 0..MAX_DIM {
            self.d[i] = -self.d[i];
            for j in 0..MAX_DIM {
                self.dd[i][j] = -self.dd[i][j];
            }
        }
        self
    }
}

impl Mul for HolJet2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Self::constant_value(self.value * o.value);
        for i in 0..MAX_DIM {
            out.d[i] = self.d[i] * o.value + self.value * o.d[i];
            for j in 0..MAX_DIM {
                out.dd[i][j] = self.dd[i][j] * o.value
                    + self.d[i] * o.d[j]
                    + self.d[j] * o.d[i]
                    + self.value * o.dd[i][j];
            }
        }
        out
    }
}

impl Div for HolJet2 {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Scalar for HolJet2 {
    fn constant(c: Complex64) -> Self {
        Self::constant_value(c)
    }
    fn value(&self) -> Complex64 {
        self.value
    }
    fn try_conj(self) -> Option<Self> {
        None
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let x = self.value;
        let r = ONE / x;
        self.chain(x.ln(), r, -r * r)
    }
    fn recip(self) -> Self {
        let r = ONE / self.value;
        self.chain(r, -r * r, r * r * r * 2.0)
    }
    fn powi(self, k: i32) -> Self {
        if k < 0 {
            return self.recip().powi(-k);
        }
        let (h, h1, h2) = powi_derivs(self.value, k);
        self.chain(h, h1, h2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn abs2_has_identity_levi_form() {
        let z = Jet2::variable(c(1.0, 0.0), 0);
        let f = z.abs2();
        assert_abs_diff_eq!(f.value.re, 1.0);
        assert_abs_diff_eq!(f.d[0].re, 1.0);
        assert_abs_diff_eq!(f.dbar[0].re, 1.0);
        assert_abs_diff_eq!(f.ddbar[0][0].re, 1.0);
    }

    #[test]
    fn holomorphic_square_has_no_antiholomorphic_part() {
        let z = Jet2::variable(c(2.0, 0.0), 0);
        let f = z * z;
        assert_abs_diff_eq!(f.d[0].re, 4.0);
        assert_eq!(f.dbar[0], ZERO);
        assert_eq!(f.ddbar[0][0], ZERO);
    }

    #[test]
    fn powi_matches_repeated_products() {
        let z = Jet2::seed(&[c(0.3, -0.2), c(0.1, 0.4)]);
        let w = z[0] * z[1].try_conj().unwrap() + z[1];
        let a = w.powi(3);
        let b = w * w * w;
        assert_abs_diff_eq!((a.value - b.value).norm(), 0.0, epsilon = 1e-14);
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!((a.ddbar[i][j] - b.ddbar[i][j]).norm(), 0.0, epsilon = 1e-14);
            }
        }
        let inv = w.powi(-2);
        let direct = (w * w).recip();
        assert_abs_diff_eq!((inv.ddbar[0][1] - direct.ddbar[0][1]).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn conjugation_swaps_families() {
        let z = Jet2::seed(&[c(0.5, 0.5), c(-0.2, 0.1)]);
        let f = z[0] * z[0] * z[1].try_conj().unwrap();
        let g = f.try_conj().unwrap().try_conj().unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn holomorphic_jet_tracks_hessian() {
        let z = HolJet2::seed(&[c(1.0, 1.0), c(2.0, 0.0)]);
        let f = z[0] * z[0] * z[1];
        // ∂₀∂₀ = 2 z₁, ∂₀∂₁ = 2 z₀
        assert_abs_diff_eq!((f.dd[0][0] - c(4.0, 0.0)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((f.dd[0][1] - c(2.0, 2.0)).norm(), 0.0, epsilon = 1e-14);
        assert!(HolJet2::constant(ONE).try_conj().is_none());
    }
}
