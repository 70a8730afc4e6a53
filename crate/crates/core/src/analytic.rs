//! Univariate functions holomorphic on a horizontal strip.

use crate::error::{Error, Result};
use crate::jet::Jet;
use num_complex::Complex64 as C64;
use std::fmt;
use std::sync::Arc;

type JetFn = dyn Fn(Jet) -> Jet + Send + Sync;

/// A function of one complex variable, evaluable together with its first two
/// derivatives, and guaranteed analytic on `|Im z| <= strip`.
#[derive(Clone)]
pub struct AnalyticFn1D {
    f: Arc<JetFn>,
    strip: f64,
}

impl fmt::Debug for AnalyticFn1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticFn1D").field("strip", &self.strip).finish()
    }
}

impl AnalyticFn1D {
    pub fn new(strip: f64, f: impl Fn(Jet) -> Jet + Send + Sync + 'static) -> Self {
        AnalyticFn1D { f: Arc::new(f), strip }
    }

    /// An entire function.
    pub fn entire(f: impl Fn(Jet) -> Jet + Send + Sync + 'static) -> Self {
        Self::new(f64::INFINITY, f)
    }

    pub fn constant(k: C64) -> Self {
        Self::entire(move |_| Jet::constant(k))
    }

    pub fn zero() -> Self {
        Self::constant(C64::new(0.0, 0.0))
    }

    pub fn sin() -> Self {
        Self::entire(|z| z.sin())
    }

    pub fn cos() -> Self {
        Self::entire(|z| z.cos())
    }

    /// `Σ c_k exp(i k x)` over the given `(k, c_k)` pairs.
    pub fn trig_poly(terms: Vec<(i32, C64)>) -> Self {
        Self::entire(move |z| {
            let mut acc = Jet::real(0.0);
            for &(k, ck) in &terms {
                acc += (z * C64::new(0.0, k as f64)).exp() * ck;
            }
            acc
        })
    }

    pub fn strip(&self) -> f64 {
        self.strip
    }

    pub fn with_strip(mut self, strip: f64) -> Self {
        self.strip = strip;
        self
    }

    pub fn jet(&self, z: Jet) -> Jet {
        (self.f)(z)
    }

    pub fn eval(&self, z: C64) -> C64 {
        (self.f)(Jet::var(z)).v
    }

    pub fn deriv(&self, z: C64) -> C64 {
        (self.f)(Jet::var(z)).d1
    }

    pub fn deriv2(&self, z: C64) -> C64 {
        (self.f)(Jet::var(z)).d2
    }

    /// Value and derivatives at `z`.
    pub fn at(&self, z: C64) -> Jet {
        (self.f)(Jet::var(z))
    }

    /// Fails when a shift of imaginary size `shift` would leave the strip.
    pub fn check_shift(&self, shift: f64) -> Result<()> {
        if shift.abs() > self.strip * (1.0 + 1e-12) {
            Err(Error::StripViolation { shift: shift.abs(), strip: self.strip })
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = (self.f.clone(), other.f.clone());
        AnalyticFn1D { f: Arc::new(move |z| a(z) + b(z)), strip: self.strip.min(other.strip) }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (self.f.clone(), other.f.clone());
        AnalyticFn1D { f: Arc::new(move |z| a(z) * b(z)), strip: self.strip.min(other.strip) }
    }

    pub fn scale(&self, k: C64) -> Self {
        let a = self.f.clone();
        AnalyticFn1D { f: Arc::new(move |z| a(z) * k), strip: self.strip }
    }

    /// `x ↦ g(f(x))` where `g` acts on jets.
    pub fn map(&self, g: impl Fn(Jet) -> Jet + Send + Sync + 'static) -> Self {
        let a = self.f.clone();
        AnalyticFn1D { f: Arc::new(move |z| g(a(z))), strip: self.strip }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_poly_matches_cos() {
        let f = AnalyticFn1D::trig_poly(vec![(2, C64::new(0.5, 0.0)), (-2, C64::new(0.5, 0.0))]);
        let z = C64::new(0.4, 0.3);
        assert!((f.eval(z) - (2.0 * z).cos()).norm() < 1e-14);
        assert!((f.deriv(z) + 2.0 * (2.0 * z).sin()).norm() < 1e-14);
    }

    #[test]
    fn strip_check() {
        let f = AnalyticFn1D::sin().with_strip(0.5);
        assert!(f.check_shift(0.4).is_ok());
        assert!(f.check_shift(-0.6).is_err());
    }
}
