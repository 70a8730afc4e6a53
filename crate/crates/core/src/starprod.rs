//! Weyl–Moyal star product on the plane-wave lattice and on functions of `x`.
//!
//! Three engines are provided: the exact lattice product on [`TrigPoly`], the
//! truncated series of `exp(V)`, and complex-shift formulas for products of a
//! function of `x` with trigonometric factors in `y`.

use crate::analytic::AnalyticFn1D;
use crate::error::{Error, Result};
use crate::jet::I;
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// Coefficients below this magnitude are dropped from a [`TrigPoly`].
pub const PRUNE_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeformationMode {
    RealH,
    ImaginaryH,
    Complex,
}

/// The deformation parameter `h` together with `alpha = tanh h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deformation {
    pub h: C64,
    pub alpha: C64,
    pub mode: DeformationMode,
}

impl Deformation {
    pub fn real(h: f64) -> Self {
        Deformation { h: C64::new(h, 0.0), alpha: C64::new(h.tanh(), 0.0), mode: DeformationMode::RealH }
    }

    /// Real deformation with `alpha` in (−1, 1).
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if !(alpha.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (-1, 1)")));
        }
        Ok(Self::real(alpha.atanh()))
    }

    /// `h = i·hbar`, so `alpha = i tan(hbar)`.
    pub fn imaginary(hbar: f64) -> Self {
        let h = C64::new(0.0, hbar);
        Deformation { h, alpha: h.tanh(), mode: DeformationMode::ImaginaryH }
    }

    pub fn complex(h: C64) -> Self {
        let mode = if h.im == 0.0 {
            DeformationMode::RealH
        } else if h.re == 0.0 {
            DeformationMode::ImaginaryH
        } else {
            DeformationMode::Complex
        };
        Deformation { h, alpha: h.tanh(), mode }
    }

    /// Real `h`, or an error for the other modes.
    pub fn real_h(&self) -> Result<f64> {
        match self.mode {
            DeformationMode::RealH => Ok(self.h.re),
            _ => Err(Error::InvalidParameter("operation requires a real deformation parameter".into())),
        }
    }

    pub fn real_alpha(&self) -> Result<f64> {
        self.real_h().map(|_| self.alpha.re)
    }

    /// `tan(hbar)` for an imaginary deformation.
    pub fn alpha_bar(&self) -> Option<f64> {
        match self.mode {
            DeformationMode::ImaginaryH => Some(self.h.im.tan()),
            _ => None,
        }
    }

    pub fn negated(&self) -> Self {
        Deformation::complex(-self.h)
    }
}

/// Finite sum `Σ c_{ab} exp(i(a x + b y))` over integer frequencies.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrigPoly {
    terms: BTreeMap<(i32, i32), C64>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(a: i32, b: i32, c: C64) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p.prune();
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((i32, i32), C64)>) -> Self {
        let mut p = Self::zero();
        for ((a, b), c) in terms {
            p.add_term(a, b, c);
        }
        p.prune();
        p
    }

    pub fn sin_x(k: i32) -> Self {
        Self::from_terms([((k, 0), -0.5 * I), ((-k, 0), 0.5 * I)])
    }

    pub fn cos_x(k: i32) -> Self {
        Self::from_terms([((k, 0), C64::new(0.5, 0.0)), ((-k, 0), C64::new(0.5, 0.0))])
    }

    pub fn sin_y(k: i32) -> Self {
        Self::from_terms([((0, k), -0.5 * I), ((0, -k), 0.5 * I)])
    }

    pub fn cos_y(k: i32) -> Self {
        Self::from_terms([((0, k), C64::new(0.5, 0.0)), ((0, -k), C64::new(0.5, 0.0))])
    }

    fn add_term(&mut self, a: i32, b: i32, c: C64) {
        *self.terms.entry((a, b)).or_insert(C64::new(0.0, 0.0)) += c;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() > PRUNE_TOL);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, i32), &C64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, a: i32, b: i32) -> C64 {
        self.terms.get(&(a, b)).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest coefficient magnitude.
    pub fn norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, x: C64, y: C64) -> C64 {
        self.terms
            .iter()
            .map(|(&(a, b), &c)| c * (I * (x * a as f64 + y * b as f64)).exp())
            .sum()
    }

    pub fn eval_real(&self, x: f64, y: f64) -> C64 {
        self.eval(C64::new(x, 0.0), C64::new(y, 0.0))
    }

    /// Real-valued on the real plane iff `c_{-a,-b} = conj(c_{a,b})`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.terms.iter().all(|(&(a, b), &c)| (self.coeff(-a, -b) - c.conj()).norm() <= tol)
    }

    pub fn scale(&self, k: C64) -> Self {
        let mut p = Self { terms: self.terms.iter().map(|(&ab, &c)| (ab, c * k)).collect() };
        p.prune();
        p
    }

    pub fn dx(&self) -> Self {
        let mut p = Self { terms: self.terms.iter().map(|(&(a, b), &c)| ((a, b), c * I * a as f64)).collect() };
        p.prune();
        p
    }

    pub fn dy(&self) -> Self {
        let mut p = Self { terms: self.terms.iter().map(|(&(a, b), &c)| ((a, b), c * I * b as f64)).collect() };
        p.prune();
        p
    }

    fn dxy(&self, nx: u32, ny: u32) -> Self {
        let mut p = Self {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), &c)| ((a, b), c * (I * a as f64).powu(nx) * (I * b as f64).powu(ny)))
                .collect(),
        };
        p.prune();
        p
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        self.product_with(other, |_, _, _, _| C64::new(1.0, 0.0))
    }

    /// Exact star product: each pair of plane waves picks up `exp(−h(a₁b₂ − b₁a₂))`.
    pub fn star(&self, other: &Self, h: C64) -> Self {
        self.product_with(other, |a1, b1, a2, b2| (-h * ((a1 * b2 - b1 * a2) as f64)).exp())
    }

    fn product_with(&self, other: &Self, factor: impl Fn(i32, i32, i32, i32) -> C64) -> Self {
        let mut out = Self::zero();
        for (&(a1, b1), &c1) in &self.terms {
            for (&(a2, b2), &c2) in &other.terms {
                out.add_term(a1 + a2, b1 + b2, c1 * c2 * factor(a1, b1, a2, b2));
            }
        }
        out.prune();
        out
    }

    /// `f(σ x, σ̃ y)`.
    pub fn rescale(&self, sigma: i32, sigma_t: i32) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(a, b), &c)| ((a * sigma, b * sigma_t), c)))
    }

    /// `f(π/2 − x, π/2 − y)`.
    pub fn reflect_quarter(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(a, b), &c)| {
            let phase = (I * std::f64::consts::FRAC_PI_2 * (a + b) as f64).exp();
            ((-a, -b), c * phase)
        }))
    }

    /// `f(y, x)`.
    pub fn swap_xy(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(a, b), &c)| ((b, a), c)))
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, o: &TrigPoly) -> TrigPoly {
        let mut p = self.clone();
        for (&(a, b), &c) in &o.terms {
            p.add_term(a, b, c);
        }
        p.prune();
        p
    }
}

impl Sub for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, o: &TrigPoly) -> TrigPoly {
        self + &(-o)
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, o: &TrigPoly) -> TrigPoly {
        TrigPoly::mul(self, o)
    }
}

impl Add for TrigPoly {
    type Output = TrigPoly;
    fn add(self, o: TrigPoly) -> TrigPoly {
        &self + &o
    }
}

impl Sub for TrigPoly {
    type Output = TrigPoly;
    fn sub(self, o: TrigPoly) -> TrigPoly {
        &self - &o
    }
}

pub fn star_lattice(f: &TrigPoly, g: &TrigPoly, d: &Deformation) -> TrigPoly {
    f.star(g, d.h)
}

/// Truncation of `exp(V) f(X) g(W)|_{W→X}` at total order `order` in `h`.
pub fn star_series(f: &TrigPoly, g: &TrigPoly, d: &Deformation, order: u32) -> TrigPoly {
    let mut out = TrigPoly::zero();
    let mut h_pow = C64::new(1.0, 0.0);
    let mut fact = vec![1.0f64; order as usize + 1];
    for k in 1..=order as usize {
        fact[k] = fact[k - 1] * k as f64;
    }
    for n in 0..=order {
        for p in 0..=n {
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            let w = h_pow * sign / (fact[p as usize] * fact[(n - p) as usize]);
            // ∂x^{n−p} ∂y^p on f, ∂v^{n−p} ∂u^p on g
            let fl = f.dxy(n - p, p);
            let gr = g.dxy(p, n - p);
            out = &out + &fl.mul(&gr).scale(w);
        }
        h_pow *= d.h;
    }
    out
}

/// `f₁ = sin x sin y, f₂ = sin x cos y, f₃ = cos x sin y, f₄ = cos x cos y`.
pub fn basis_f(m: i32) -> Result<TrigPoly> {
    let (xs, ys) = match m {
        1 => (TrigPoly::sin_x(1), TrigPoly::sin_y(1)),
        2 => (TrigPoly::sin_x(1), TrigPoly::cos_y(1)),
        3 => (TrigPoly::cos_x(1), TrigPoly::sin_y(1)),
        4 => (TrigPoly::cos_x(1), TrigPoly::cos_y(1)),
        _ => return Err(Error::OutOfRange { what: "basis index", value: m as i64 }),
    };
    Ok(xs.mul(&ys))
}

fn fb(m: i32) -> TrigPoly {
    basis_f(m).expect("index in 1..=4")
}

/// Closed form of `f_n ⋆ f_m` built only from pointwise products.
///
/// `f_m⋆f_m`, `f₁⋆f₂`, `f₁⋆f₃`, `f₁⋆f₄` are the tabulated forms; the rest follow
/// from `f⋆_h g = g⋆_{−h} f` and the quarter-turn permutation `f₁↔f₄, f₂↔f₃`.
/// The pair `{f₂⋆f₃, f₃⋆f₂}` is mapped only onto itself by those two rules, so
/// it uses `f₂⋆f₃ = f₂f₃ − (f₁² − f₄²) sinh h cosh h`.
pub fn fnfm_closed(n: i32, m: i32, h: f64) -> Result<TrigPoly> {
    if !(1..=4).contains(&n) {
        return Err(Error::OutOfRange { what: "basis index", value: n as i64 });
    }
    if !(1..=4).contains(&m) {
        return Err(Error::OutOfRange { what: "basis index", value: m as i64 });
    }
    let (ch, sh) = (C64::new(h.cosh(), 0.0), C64::new(h.sinh(), 0.0));
    let perm = |k: i32| 5 - k;
    Ok(match (n, m) {
        (k, l) if k == l => {
            let k0 = 5 - k;
            &fb(k).mul(&fb(k)).scale(ch * ch) - &fb(k0).mul(&fb(k0)).scale(sh * sh)
        }
        (1, 2) => (&fb(1).scale(ch) - &fb(4).scale(sh)).mul(&(&fb(2).scale(ch) - &fb(3).scale(sh))),
        (1, 3) => (&fb(1).scale(ch) + &fb(4).scale(sh)).mul(&(&fb(3).scale(ch) + &fb(2).scale(sh))),
        (1, 4) => &fb(1).mul(&fb(4)) + &(&fb(2).mul(&fb(2)) - &fb(3).mul(&fb(3))).scale(sh * ch),
        (2, 3) => &fb(2).mul(&fb(3)) - &(&fb(1).mul(&fb(1)) - &fb(4).mul(&fb(4))).scale(sh * ch),
        (3, 2) => fnfm_closed(2, 3, -h)?,
        (k, 1) => fnfm_closed(1, k, -h)?,
        // f₄ on the left or f₂,f₃ against f₄: pull back through the permutation
        (k, l) if k == 4 || l == 4 => fnfm_closed(perm(k), perm(l), h)?.reflect_quarter(),
        (k, l) => fnfm_closed(l, k, -h)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigMode {
    Cos,
    Sin,
}

/// `F(x) ⋆ f_m` (left) or `f_m ⋆ F(x)` (right) at `(x, y)`.
///
/// The right product is the left one with `h → −h`.
pub fn star_f_basis(f: &AnalyticFn1D, m: i32, d: &Deformation, x: f64, y: f64, side: Side) -> Result<C64> {
    if !(1..=4).contains(&m) {
        return Err(Error::OutOfRange { what: "basis index", value: m as i64 });
    }
    f.check_shift(d.h.norm())?;
    let h = match side {
        Side::Left => d.h,
        Side::Right => -d.h,
    };
    let p = if m % 2 == 0 { 1.0 } else { -1.0 };
    let m2 = m - p as i32;
    let fm = fb(m).eval_real(x, y);
    let fm2 = fb(m2).eval_real(x, y);
    let xz = C64::new(x, 0.0);
    let fp = f.eval(xz + I * h);
    let fmn = f.eval(xz - I * h);
    Ok(0.5 * fp * (fm + I * p * fm2) + 0.5 * fmn * (fm - I * p * fm2))
}

/// Coefficients `(a, b)` of `c_n` and `s_n` in the product of `F(x)` with `c_n` or `s_n`.
pub fn star_f_trigmode(
    f: &AnalyticFn1D,
    mode: TrigMode,
    n: i32,
    d: &Deformation,
    x: f64,
    side: Side,
) -> Result<(C64, C64)> {
    if n < 1 {
        return Err(Error::OutOfRange { what: "mode index", value: n as i64 });
    }
    let shift = d.h * n as f64;
    f.check_shift(shift.norm())?;
    let xz = C64::new(x, 0.0);
    let fp = f.eval(xz + I * shift);
    let fm = f.eval(xz - I * shift);
    let half = 0.5;
    Ok(match (side, mode) {
        // 2F⋆c = (c − i s)F₋ + (c + i s)F₊
        (Side::Left, TrigMode::Cos) => (half * (fm + fp), half * I * (fp - fm)),
        // 2F⋆s = (s − i c)F₊ + (s + i c)F₋
        (Side::Left, TrigMode::Sin) => (half * I * (fm - fp), half * (fp + fm)),
        // 2c⋆F = (c − i s)F₊ + (c + i s)F₋
        (Side::Right, TrigMode::Cos) => (half * (fp + fm), half * I * (fm - fp)),
        // 2s⋆F = (s − i c)F₋ + (s + i c)F₊
        (Side::Right, TrigMode::Sin) => (half * I * (fp - fm), half * (fm + fp)),
    })
}

/// The four x-only residual products left after factoring `c_n, s_n` (from the
/// left factor) and `c_m, s_m` (from the right factor) out of `(·F) ⋆ (·G)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedProducts {
    pub a1: C64,
    pub a2: C64,
    pub a3: C64,
    pub a4: C64,
}

/// Reduced products of `c_n F` against `c_m G`.
///
/// `F` is shifted by the right frequency `m` and `G` by the left frequency `n`:
/// with `F± = F(x ± imh)`, `G± = G(x ± inh)`, `C = (·₊ + ·₋)/2`, `D = (·₊ − ·₋)/(2i)`:
/// `A1 = C_F C_G`, `A2 = −C_G D_F`, `A3 = D_G C_F`, `A4 = −D_G D_F`.
pub fn reduced_products_at(
    f: &AnalyticFn1D,
    g: &AnalyticFn1D,
    n: i32,
    m: i32,
    d: &Deformation,
    x: C64,
) -> Result<ReducedProducts> {
    if n < 0 || m < 0 {
        return Err(Error::OutOfRange { what: "mode index", value: n.min(m) as i64 });
    }
    f.check_shift((d.h * m as f64).norm())?;
    g.check_shift((d.h * n as f64).norm())?;
    let sf = I * d.h * m as f64;
    let sg = I * d.h * n as f64;
    let (fp, fm) = (f.eval(x + sf), f.eval(x - sf));
    let (gp, gm) = (g.eval(x + sg), g.eval(x - sg));
    Ok(reduced_from_shifts(fp, fm, gp, gm))
}

pub(crate) fn reduced_from_shifts(fp: C64, fm: C64, gp: C64, gm: C64) -> ReducedProducts {
    let cf = 0.5 * (fp + fm);
    let df = (fp - fm) / (2.0 * I);
    let cg = 0.5 * (gp + gm);
    let dg = (gp - gm) / (2.0 * I);
    ReducedProducts { a1: cf * cg, a2: -cg * df, a3: dg * cf, a4: -dg * df }
}

pub fn reduced_products(
    f: &AnalyticFn1D,
    g: &AnalyticFn1D,
    n: i32,
    m: i32,
    d: &Deformation,
    x: f64,
) -> Result<ReducedProducts> {
    reduced_products_at(f, g, n, m, d, C64::new(x, 0.0))
}

/// Maximum violations of the structural identities of the star product.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IdentityReport {
    pub flip: f64,
    pub mixed_left: f64,
    pub mixed_right: f64,
    pub rescaling: f64,
    pub permutation: f64,
}

impl IdentityReport {
    pub fn max(&self) -> f64 {
        [self.flip, self.mixed_left, self.mixed_right, self.rescaling, self.permutation]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn sample_polys() -> Vec<TrigPoly> {
    let mut v: Vec<TrigPoly> = (1..=4).map(fb).collect();
    v.push(TrigPoly::from_terms([
        ((1, 2), C64::new(0.3, -0.2)),
        ((-1, -2), C64::new(0.3, 0.2)),
        ((2, -1), C64::new(-0.5, 0.1)),
        ((-2, 1), C64::new(-0.5, -0.1)),
        ((0, 1), C64::new(0.25, 0.0)),
    ]));
    v
}

/// Checks `f⋆_h g = g⋆_{−h} f`, the two mixed-variable identities, the rescaling
/// law with `σ = 2, σ̃ = 3`, and quarter-turn covariance of all 16 `f_n ⋆ f_m`,
/// evaluating both sides at `samples`. Violations are relative to `1 + ‖lhs‖`.
pub fn verify_identities(d: &Deformation, samples: &[(f64, f64)]) -> IdentityReport {
    let h = d.h;
    let pointwise = |a: &TrigPoly, b: &TrigPoly| {
        let diff = a - b;
        let abs = samples.iter().map(|&(x, y)| diff.eval_real(x, y).norm()).fold(diff.norm(), f64::max);
        abs / (1.0 + a.norm())
    };
    let mut rep = IdentityReport::default();
    let polys = sample_polys();
    for f in &polys {
        for g in &polys {
            rep.flip = rep.flip.max(pointwise(&f.star(g, h), &g.star(f, -h)));
        }
    }

    // f(x) ⋆ [g1(x) g2(y)] = g1(x) [f(x) ⋆ g2(y)]
    let fx = &TrigPoly::cos_x(2) + &TrigPoly::sin_x(1).scale(C64::new(0.5, 0.0));
    let g1 = &TrigPoly::sin_x(3) + &TrigPoly::constant(C64::new(0.2, 0.0));
    let g2 = &TrigPoly::cos_y(1) + &TrigPoly::sin_y(2);
    rep.mixed_left = pointwise(&fx.star(&g1.mul(&g2), h), &g1.mul(&fx.star(&g2, h)));
    // (f1(x) f2(y)) ⋆ g(y) = (f1(x) ⋆ g(y)) f2(y)
    let f1 = TrigPoly::sin_x(2);
    let f2 = &TrigPoly::cos_y(3) + &TrigPoly::constant(C64::new(1.0, 0.0));
    let gy = TrigPoly::sin_y(1);
    rep.mixed_right = pointwise(&f1.mul(&f2).star(&gy, h), &f1.star(&gy, h).mul(&f2));

    let (s, st) = (2, 3);
    let hp = h * (s * st) as f64;
    for f in &polys {
        for g in &polys {
            let lhs = f.rescale(s, st).star(&g.rescale(s, st), h);
            let rhs = f.star(g, hp).rescale(s, st);
            rep.rescaling = rep.rescaling.max(pointwise(&lhs, &rhs));
        }
    }

    for n in 1..=4 {
        for m in 1..=4 {
            let lhs = fb(n).star(&fb(m), h).reflect_quarter();
            let rhs = fb(5 - n).star(&fb(5 - m), h);
            rep.permutation = rep.permutation.max(pointwise(&lhs, &rhs));
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_identity_f1f4_f2f3() {
        let d = &fb(1).mul(&fb(4)) - &fb(2).mul(&fb(3));
        assert!(d.is_empty());
    }

    #[test]
    fn closed_forms_match_lattice() {
        for &h in &[0.1, 0.3, 0.5] {
            for n in 1..=4 {
                for m in 1..=4 {
                    let lat = fb(n).star(&fb(m), C64::new(h, 0.0));
                    let cf = fnfm_closed(n, m, h).unwrap();
                    assert!((&lat - &cf).norm() < 1e-13, "f{n}*f{m} at h={h}");
                }
            }
        }
    }

    #[test]
    fn series_converges_to_lattice() {
        let d = Deformation::real(0.3);
        let s = star_series(&fb(1), &fb(2), &d, 25);
        assert!((&s - &fb(1).star(&fb(2), d.h)).norm() < 1e-12);
    }
}
