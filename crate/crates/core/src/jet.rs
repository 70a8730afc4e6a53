//! Second-order forward-mode jets over `Complex64`.
//!
//! A [`Jet`] carries a value together with its first and second derivative
//! with respect to a single complex variable. Every closed form in the crate
//! is written once against `Jet`, so derivatives of connections, flow fields
//! and mode functions are exact rather than finite-differenced.

use num_complex::Complex64 as C64;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: C64,
    pub d1: C64,
    pub d2: C64,
}

impl Jet {
    pub fn constant(v: C64) -> Self {
        Jet { v, d1: C64::new(0.0, 0.0), d2: C64::new(0.0, 0.0) }
    }

    /// The independent variable evaluated at `z`.
    pub fn var(z: C64) -> Self {
        Jet { v: z, d1: C64::new(1.0, 0.0), d2: C64::new(0.0, 0.0) }
    }

    pub fn real(x: f64) -> Self {
        Self::constant(c(x))
    }

    /// Apply a scalar function given its value and first two derivatives at `self.v`.
    #[inline]
    pub fn chain(self, g: C64, dg: C64, ddg: C64) -> Self {
        Jet { v: g, d1: dg * self.d1, d2: ddg * self.d1 * self.d1 + dg * self.d2 }
    }

    pub fn sin(self) -> Self {
        let (s, co) = (self.v.sin(), self.v.cos());
        self.chain(s, co, -s)
    }

    pub fn cos(self) -> Self {
        let (s, co) = (self.v.sin(), self.v.cos());
        self.chain(co, -s, -co)
    }

    pub fn tan(self) -> Self {
        self.sin() / self.cos()
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    /// Principal logarithm.
    pub fn ln(self) -> Self {
        let r = self.v.inv();
        self.chain(self.v.ln(), r, -r * r)
    }

    /// Principal square root.
    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let ds = 0.5 / s;
        self.chain(s, ds, -ds / (2.0 * self.v))
    }

    pub fn recip(self) -> Self {
        let r = self.v.inv();
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => Jet::real(1.0),
            n if n < 0 => self.powi(-n).recip(),
            n => {
                let vn2 = if n >= 2 { self.v.powi(n - 2) } else { C64::new(0.0, 0.0) };
                let vn1 = self.v.powi(n - 1);
                let nf = n as f64;
                self.chain(self.v.powi(n), nf * vn1, nf * (nf - 1.0) * vn2)
            }
        }
    }

    /// `artanh(v) = ½[ln(1+v) − ln(1−v)]` on principal logarithms.
    pub fn atanh(self) -> Self {
        let one = Jet::real(1.0);
        ((one + self).ln() - (one - self).ln()) * 0.5
    }

    pub fn scale(self, k: C64) -> Self {
        Jet { v: self.v * k, d1: self.d1 * k, d2: self.d2 * k }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet { v: self.v - o.v, d1: self.d1 - o.d1, d2: self.d2 - o.d2 }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { v: -self.v, d1: -self.d1, d2: -self.d2 }
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, o: Jet) {
        *self = *self + o;
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, o: Jet) {
        *self = *self - o;
    }
}

impl MulAssign for Jet {
    fn mul_assign(&mut self, o: Jet) {
        *self = *self * o;
    }
}

macro_rules! scalar_ops {
    ($t:ty, $conv:expr) => {
        impl Add<$t> for Jet {
            type Output = Jet;
            fn add(self, o: $t) -> Jet {
                Jet { v: self.v + $conv(o), ..self }
            }
        }
        impl Sub<$t> for Jet {
            type Output = Jet;
            fn sub(self, o: $t) -> Jet {
                Jet { v: self.v - $conv(o), ..self }
            }
        }
        impl Mul<$t> for Jet {
            type Output = Jet;
            fn mul(self, o: $t) -> Jet {
                self.scale($conv(o))
            }
        }
        impl Div<$t> for Jet {
            type Output = Jet;
            fn div(self, o: $t) -> Jet {
                self.scale(C64::new(1.0, 0.0) / $conv(o))
            }
        }
        impl Add<Jet> for $t {
            type Output = Jet;
            fn add(self, o: Jet) -> Jet {
                o + self
            }
        }
        impl Sub<Jet> for $t {
            type Output = Jet;
            fn sub(self, o: Jet) -> Jet {
                -o + self
            }
        }
        impl Mul<Jet> for $t {
            type Output = Jet;
            fn mul(self, o: Jet) -> Jet {
                o.scale($conv(self))
            }
        }
        impl Div<Jet> for $t {
            type Output = Jet;
            fn div(self, o: Jet) -> Jet {
                o.recip().scale($conv(self))
            }
        }
    };
}

scalar_ops!(f64, c);
scalar_ops!(C64, |z: C64| z);

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn derivatives_of_composite() {
        // f(x) = sin(x)^2 / (2 - cos 2x)
        let z = C64::new(0.7, 0.2);
        let f = |j: Jet| j.sin().sqr() / (2.0 - (j * 2.0).cos());
        let j = f(Jet::var(z));
        let h = 1e-4;
        let fd1 = (f(Jet::constant(z + h)).v - f(Jet::constant(z - h)).v) / (2.0 * h);
        let fd2 = (f(Jet::constant(z + h)).v - 2.0 * j.v + f(Jet::constant(z - h)).v) / (h * h);
        assert!(close(j.d1, fd1, 1e-7));
        assert!(close(j.d2, fd2, 1e-5));
    }

    #[test]
    fn powi_and_sqrt_agree() {
        let z = Jet::var(C64::new(1.3, -0.4));
        let a = z.sqrt().powi(4);
        let b = z * z;
        assert!(close(a.v, b.v, 1e-14));
        assert!(close(a.d1, b.d1, 1e-13));
        assert!(close(a.d2, b.d2, 1e-12));
    }

    #[test]
    fn atanh_matches_derivative() {
        let z = Jet::var(C64::new(0.3, 0.1));
        let a = z.atanh();
        let expect = 1.0 / (1.0 - z.v * z.v);
        assert!(close(a.d1, expect, 1e-14));
        assert!(close(a.d2, 2.0 * z.v * expect * expect, 1e-13));
    }
}
