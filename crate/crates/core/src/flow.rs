//! y-symmetric auto-parallel flow `V = (Ψ(x), Φ(x))`.

use crate::analytic::AnalyticFn1D;
use crate::error::{Error, Result};
use crate::geometry::{check_metric, d_alpha_jet, gamma_upper_jet};
use crate::jet::{c, Jet, I};
use crate::starprod::Deformation;
use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64 as C64;
use std::f64::consts::{PI, SQRT_2};

/// Nominal strip half-width given to the closed-form flow families.
pub const CLOSED_FORM_STRIP: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams {
    pub a0: f64,
    pub b0: f64,
    pub signs: (Sign, Sign),
}

#[derive(Debug, Clone)]
pub struct YSymField {
    pub psi: AnalyticFn1D,
    pub phi: AnalyticFn1D,
    pub params: Option<FlowParams>,
}

impl YSymField {
    pub fn new(psi: AnalyticFn1D, phi: AnalyticFn1D) -> Self {
        YSymField { psi, phi, params: None }
    }

    fn check_strip(&self, z: C64) -> Result<()> {
        self.psi.check_shift(z.im)?;
        self.phi.check_shift(z.im)
    }

    /// `(Ψ, Φ) → (kΨ, kΦ)`.
    pub fn scaled(&self, k: C64) -> Self {
        YSymField { psi: self.psi.scale(k), phi: self.phi.scale(k), params: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaPair {
    pub s1: C64,
    pub s2: C64,
}

/// The displayed `Σ¹_α`, `Σ²_α` in terms of `Ψ`, `Φ` and `d_α`.
pub fn sigma_eval(f: &YSymField, z: C64, alpha: f64) -> Result<SigmaPair> {
    f.check_strip(z)?;
    check_metric(z, c(alpha))?;
    let x = Jet::constant(z);
    let (p, q) = (f.psi.at(z), f.phi.at(z));
    let (psi, phi) = (p.v, q.v);
    let a = alpha;
    let a2 = a * a;
    let c2 = (2.0 * x.v).cos();
    let ds2 = d_alpha_jet(x, c(a)).v * (2.0 * x.v).sin();
    let s1 = psi * p.d1
        - (a2 * c2 * psi * psi - a * (a2 - 1.0) * psi * phi
            - 0.25 * (a2 * a2 - 1.0 + (a2 - 1.0).powi(2) * c2) * phi * phi)
            * ds2;
    let s2 = psi * q.d1
        + (a * psi * psi + (1.0 + a2 - 2.0 * a2 * c2) * psi * phi + a * (1.0 - 0.5 * (a2 + 1.0) * c2) * phi * phi)
            * ds2;
    Ok(SigmaPair { s1, s2 })
}

/// `Σ^σ = V^μ(∂_μV^σ + V^ρ Γ^σ_{μρ})` contracted from the connection table.
pub fn sigma_from_connection(f: &YSymField, z: C64, alpha: f64) -> Result<SigmaPair> {
    f.check_strip(z)?;
    check_metric(z, c(alpha))?;
    let g = gamma_upper_jet(Jet::constant(z), c(alpha));
    let v = [f.psi.at(z), f.phi.at(z)];
    let mut out = [C64::new(0.0, 0.0); 2];
    for (s, o) in out.iter_mut().enumerate() {
        *o = v[0].v * v[s].d1;
        for m in 0..2 {
            for r in 0..2 {
                *o += v[m].v * v[r].v * g[s][m][r].v;
            }
        }
    }
    Ok(SigmaPair { s1: out[0], s2: out[1] })
}

/// The non-local pair evaluated on the slices `z = x ± ih`.
pub fn ysym_residual(f: &YSymField, x: f64, d: &Deformation) -> Result<(C64, C64)> {
    let h = d.real_h()?;
    let a = d.alpha.re;
    let zp = C64::new(x, h);
    let zm = C64::new(x, -h);
    let sp = sigma_eval(f, zp, a)?;
    let sm = sigma_eval(f, zm, a)?;
    let rp = (sp.s1 + a * sp.s2) * zp.cos() + I * (sp.s2 + a * sp.s1) * zp.sin();
    let rm = (sm.s1 + a * sm.s2) * zm.cos() - I * (sm.s2 + a * sm.s1) * zm.sin();
    Ok((rp, rm))
}

/// `(Σ¹₊ cos x + iΣ²₊ sin x, Σ¹₋ cos x − iΣ²₋ sin x)`.
pub fn sysfirst_residual(f: &YSymField, x: f64, d: &Deformation) -> Result<(C64, C64)> {
    let h = d.real_h()?;
    let a = d.alpha.re;
    let sp = sigma_eval(f, C64::new(x, h), a)?;
    let sm = sigma_eval(f, C64::new(x, -h), a)?;
    Ok((
        sp.s1 * x.cos() + I * sp.s2 * x.sin(),
        sm.s1 * x.cos() - I * sm.s2 * x.sin(),
    ))
}

/// `Σ¹(x+ih)Σ²(x−ih) + Σ²(x+ih)Σ¹(x−ih)`.
pub fn compatibility(f: &YSymField, x: f64, d: &Deformation) -> Result<C64> {
    let h = d.real_h()?;
    let a = d.alpha.re;
    let sp = sigma_eval(f, C64::new(x, h), a)?;
    let sm = sigma_eval(f, C64::new(x, -h), a)?;
    Ok(sp.s1 * sm.s2 + sp.s2 * sm.s1)
}

fn check_params(a0: f64, b0: f64) -> Result<()> {
    if !(a0 >= 0.0) {
        return Err(Error::InvalidParameter(format!("a0 = {a0} must be non-negative")));
    }
    if !(b0 > 0.0) {
        return Err(Error::InvalidParameter(format!("b0 = {b0} must be positive")));
    }
    if a0 > 0.0 && b0 <= a0 {
        return Err(Error::Domain(format!("empty validity domain: b0 = {b0} <= a0 = {a0}")));
    }
    Ok(())
}

/// `[arcsin √(a₀/b₀), π − arcsin √(a₀/b₀)]`, where the zero-order flow is real.
pub fn validity_domain(a0: f64, b0: f64) -> Result<(f64, f64)> {
    check_params(a0, b0)?;
    let xm = (a0 / b0).sqrt().asin();
    Ok((xm, PI - xm))
}

fn psi0_jet(x: Jet, a0: f64, b0: f64) -> Jet {
    (b0 - a0 / x.sin().sqr()).sqrt()
}

fn phi0_jet(x: Jet, a0: f64) -> Jet {
    a0.sqrt() / x.sin().sqr()
}

/// `ψ₀ = ±√(b₀ − a₀/sin²x)`, `φ₀ = ±√a₀/sin²x`.
pub fn zero_order_solution(a0: f64, b0: f64, signs: (Sign, Sign)) -> Result<YSymField> {
    check_params(a0, b0)?;
    let (sp, sq) = (signs.0.value(), signs.1.value());
    Ok(YSymField {
        psi: AnalyticFn1D::new(CLOSED_FORM_STRIP, move |x| psi0_jet(x, a0, b0) * sp),
        phi: AnalyticFn1D::new(CLOSED_FORM_STRIP, move |x| phi0_jet(x, a0) * sq),
        params: Some(FlowParams { a0, b0, signs }),
    })
}

/// Residuals of `ΨΨ' − ½ sin 2x Φ² = 0` and `ΨΦ' + 2ΨΦ cot x = 0`.
pub fn alphazero_residual(f: &YSymField, x: f64) -> (C64, C64) {
    let z = c(x);
    let (p, q) = (f.psi.at(z), f.phi.at(z));
    let r1 = p.v * p.d1 - 0.5 * (2.0 * x).sin() * q.v * q.v;
    let r2 = p.v * q.d1 + 2.0 * p.v * q.v / x.tan();
    (r1, r2)
}

/// The two `O(α)` equations, evaluated verbatim.
pub fn first_order_residual(f: &YSymField, x: f64, alpha: f64) -> Result<(C64, C64)> {
    if x.cos().abs() < 1e-12 || x.sin().abs() < 1e-12 {
        return Err(Error::Singular { what: "tan x", x: c(x) });
    }
    let z = c(x);
    let (p, q) = (f.psi.at(z), f.phi.at(z));
    let t = x.tan();
    let (s2, s) = ((2.0 * x).sin(), x.sin());
    // ∂(ΨΦ) and ∂(Ψ ∂Φ)
    let d_pq = p.d1 * q.v + p.v * q.d1;
    let d_pdq = p.d1 * q.d1 + p.v * q.d2;
    let r1 = p.v * p.d1 - 0.5 * s2 * q.v * q.v - alpha * (2.0 * d_pq + t * (d_pdq - 2.0 * q.v * p.v));
    let r2 = t * p.v * q.d1
        + 2.0 * p.v * q.v
        + alpha * (2.0 * p.v * p.v + 4.0 * s * s * q.v * q.v - s2 * q.v * q.d1 + p.d1 * p.d1 + p.v * p.d2);
    Ok((r1, r2))
}

/// Branch choice for the multivalued functions in the deviation closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    /// `√v → i√(−v)`, `coth⁻¹ v = artanh v − iπ/2`,
    /// `tan⁻¹ w = [ln(1+iw) − ln(iw−1) − iπ]/(2i)`. On this sheet the closed
    /// forms solve the linear system exactly.
    #[default]
    Sheet,
    /// Principal branches throughout, `coth⁻¹ u = ½ ln((u+1)/(u−1))`.
    Principal,
}

/// Sends a signed zero imaginary part to `+0`, so values on a cut take the
/// principal (upper) limit.
fn on_cut_from_above(mut v: Jet) -> Jet {
    if v.v.im == 0.0 {
        v.v.im = 0.0;
    }
    v
}

fn sqrt_b(v: Jet, br: Branch) -> Jet {
    match br {
        Branch::Sheet => (-v).sqrt() * I,
        Branch::Principal => on_cut_from_above(v).sqrt(),
    }
}

fn acoth_b(v: Jet, br: Branch) -> Jet {
    match br {
        Branch::Sheet => v.atanh() - I * (PI / 2.0),
        Branch::Principal => on_cut_from_above((v + 1.0) / (v - 1.0)).ln() * 0.5,
    }
}

fn atan_b(w: Jet, br: Branch) -> Jet {
    let iw = w * I;
    match br {
        Branch::Sheet => ((iw + 1.0).ln() - (iw - 1.0).ln() - I * PI) / (2.0 * I),
        Branch::Principal => (on_cut_from_above(iw + 1.0).ln() - on_cut_from_above(1.0 - iw).ln()) / (2.0 * I),
    }
}

/// First-order deviation `Ψ = ψ₀ + αΩ`, `Φ = φ₀ + αΔ` of the connected solution.
#[derive(Debug, Clone)]
pub struct Deviation {
    pub omega: AnalyticFn1D,
    pub delta: AnalyticFn1D,
    pub eta: AnalyticFn1D,
    pub beta: AnalyticFn1D,
    pub a0: f64,
    pub b0: f64,
    pub c0: f64,
    pub d0: f64,
}

/// Distance below which a point counts as sitting on a branch point.
pub const BRANCH_TOL: f64 = 1e-8;

impl Deviation {
    /// True within [`BRANCH_TOL`] of `η = 0` or `ψ₀ = 0`.
    pub fn near_branch_point(&self, x: f64) -> bool {
        let s2 = x.sin().powi(2);
        let eta = 2.0 * (self.a0 - self.b0 * s2);
        let psi2 = self.b0 - self.a0 / s2;
        eta.abs() < BRANCH_TOL || psi2.abs() < BRANCH_TOL
    }

    /// `(ψ₀ + αΩ, φ₀ + αΔ)`.
    pub fn connected_field(&self, alpha: f64) -> Result<YSymField> {
        let z0 = zero_order_solution(self.a0, self.b0, (Sign::Plus, Sign::Plus))?;
        let k = c(alpha);
        Ok(YSymField::new(z0.psi.add(&self.omega.scale(k)), z0.phi.add(&self.delta.scale(k))))
    }
}

pub fn first_order_deviation(a0: f64, b0: f64, c0: f64, d0: f64) -> Result<Deviation> {
    first_order_deviation_with(a0, b0, c0, d0, Branch::Sheet)
}

pub fn first_order_deviation_with(a0: f64, b0: f64, c0: f64, d0: f64, br: Branch) -> Result<Deviation> {
    if !(a0 > 0.0 && b0 > a0) {
        return Err(Error::InvalidParameter(format!("need b0 > a0 > 0, got a0 = {a0}, b0 = {b0}")));
    }
    let eta = move |x: Jet| (a0 - b0 * x.sin().sqr()) * 2.0;
    let sb0 = b0.sqrt();
    let sa0 = a0.sqrt();
    let delta = move |x: Jet| {
        let s2 = x.sin().sqr();
        let psi = psi0_jet(x, a0, b0);
        (c0 - acoth_b(psi / sb0, br) * (a0 / sb0) - (s2 + 1.0) * psi) / s2
    };
    let omega = move |x: Jet| {
        let s = x.sin();
        let e = eta(x);
        let beta = e / b0;
        let psi = psi0_jet(x, a0, b0);
        let se = sqrt_b(e, br);
        let sbeta = sqrt_b(beta, br);
        let s2beta = sqrt_b(beta * 2.0, br);
        let atan = atan_b(s * SQRT_2 / sbeta, br);
        s * d0 / se + (psi * (2.0 * c0) / e + 1.0 - s2beta / s * (1.0 - a0 / e) * atan) * sa0
    };
    Ok(Deviation {
        omega: AnalyticFn1D::new(CLOSED_FORM_STRIP, omega),
        delta: AnalyticFn1D::new(CLOSED_FORM_STRIP, delta),
        eta: AnalyticFn1D::new(f64::INFINITY, eta),
        beta: AnalyticFn1D::new(f64::INFINITY, move |x| eta(x) / b0),
        a0,
        b0,
        c0,
        d0,
    })
}

/// Residuals of the linear system for `(Ω, Δ)`:
/// `ψ₀Ω' + ψ₀'Ω − sin 2x φ₀Δ + ψ₀φ₀'` and `ψ₀(tan x Δ' + 2Δ) + φ₀² + 2b₀`.
pub fn deviation_system_residual(dev: &Deviation, x: f64) -> (C64, C64) {
    let z = Jet::var(c(x));
    let psi = psi0_jet(z, dev.a0, dev.b0);
    let phi = phi0_jet(z, dev.a0);
    let om = dev.omega.at(c(x));
    let de = dev.delta.at(c(x));
    let r1 = psi.v * om.d1 + psi.d1 * om.v - (2.0 * x).sin() * phi.v * de.v + psi.v * phi.d1;
    let r2 = psi.v * (x.tan() * de.d1 + 2.0 * de.v) + phi.v * phi.v + 2.0 * dev.b0;
    (r1, r2)
}

/// Classical RK4 with `n` fixed steps from `x0` to `x1`; returns every node.
pub fn rk4<const N: usize, F>(f: F, x0: f64, x1: f64, y0: [C64; N], n: usize) -> Result<Vec<(f64, [C64; N])>>
where
    F: Fn(f64, &[C64; N]) -> Result<[C64; N]>,
{
    if n == 0 {
        return Err(Error::InvalidParameter("rk4 needs at least one step".into()));
    }
    let h = (x1 - x0) / n as f64;
    let axpy = |y: &[C64; N], k: &[C64; N], s: f64| -> [C64; N] {
        let mut o = *y;
        for i in 0..N {
            o[i] += k[i] * s;
        }
        o
    };
    let mut out = Vec::with_capacity(n + 1);
    let mut y = y0;
    out.push((x0, y));
    for i in 0..n {
        let x = x0 + h * i as f64;
        let k1 = f(x, &y)?;
        let k2 = f(x + 0.5 * h, &axpy(&y, &k1, 0.5 * h))?;
        let k3 = f(x + 0.5 * h, &axpy(&y, &k2, 0.5 * h))?;
        let k4 = f(x + h, &axpy(&y, &k3, h))?;
        for j in 0..N {
            y[j] += (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) * (h / 6.0);
        }
        out.push((x0 + h * (i + 1) as f64, y));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationSamples {
    pub x: Vec<f64>,
    pub omega: Vec<C64>,
    pub delta: Vec<C64>,
}

/// Integrates the linear `(Ω, Δ)` system by RK4 with `steps` steps, starting
/// from the closed forms at `x0`.
pub fn deviation_ode_solve(
    a0: f64,
    b0: f64,
    c0: f64,
    d0: f64,
    x0: f64,
    x1: f64,
    steps: usize,
) -> Result<DeviationSamples> {
    let dev = first_order_deviation(a0, b0, c0, d0)?;
    let (lo, hi) = validity_domain(a0, b0)?;
    for &x in &[x0, x1] {
        if !(x > lo && x < hi) {
            return Err(Error::Domain(format!("x = {x} outside the open domain ({lo}, {hi})")));
        }
        if dev.near_branch_point(x) {
            return Err(Error::Domain(format!("x = {x} is on a branch point")));
        }
    }
    let y0 = [dev.omega.eval(c(x0)), dev.delta.eval(c(x0))];
    let rhs = |x: f64, y: &[C64; 2]| -> Result<[C64; 2]> {
        let z = Jet::var(c(x));
        let psi = psi0_jet(z, a0, b0);
        let phi = phi0_jet(z, a0);
        if psi.v.norm() < BRANCH_TOL || x.sin().abs() < BRANCH_TOL {
            return Err(Error::Singular { what: "deviation system", x: c(x) });
        }
        let ddelta = (-(phi.v * phi.v + 2.0 * b0) / psi.v - 2.0 * y[1]) / x.tan();
        let domega = ((2.0 * x).sin() * phi.v * y[1] - psi.v * phi.d1 - psi.d1 * y[0]) / psi.v;
        Ok([domega, ddelta])
    };
    let nodes = rk4(rhs, x0, x1, y0, steps)?;
    Ok(DeviationSamples {
        x: nodes.iter().map(|n| n.0).collect(),
        omega: nodes.iter().map(|n| n.1[0]).collect(),
        delta: nodes.iter().map(|n| n.1[1]).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub pos: [f64; 3],
}

impl FlowPoint {
    fn new(t: f64, x: f64, y: f64) -> Self {
        FlowPoint { t, x, y, pos: [x.sin() * y.cos(), x.sin() * y.sin(), x.cos()] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrace {
    pub points: Vec<FlowPoint>,
    /// Last point before the field stopped being real, if it did.
    pub exit: Option<(f64, f64)>,
}

const REAL_TOL: f64 = 1e-12;

fn real_field(f: &YSymField, x: f64) -> Option<(f64, f64)> {
    if !(x > 0.0 && x < PI) {
        return None;
    }
    let (p, q) = (f.psi.eval(c(x)), f.phi.eval(c(x)));
    let ok = |v: C64| v.re.is_finite() && v.im.abs() <= REAL_TOL;
    (ok(p) && ok(q)).then_some((p.re, q.re))
}

/// Integrates `dx/dt = Ψ(x)`, `dy/dt = Φ(x)` by RK4 until `t_end` or until the
/// field stops being real.
pub fn trace_flow(f: &YSymField, start: (f64, f64), t_end: f64, dt: f64) -> Result<FlowTrace> {
    if !(dt > 0.0 && t_end >= 0.0) {
        return Err(Error::InvalidParameter(format!("dt = {dt}, t_end = {t_end}")));
    }
    let (mut x, mut y) = start;
    if real_field(f, x).is_none() {
        return Err(Error::Domain(format!("start x = {x} outside the real domain of the field")));
    }
    let mut points = vec![FlowPoint::new(0.0, x, y)];
    let steps = (t_end / dt).ceil() as usize;
    for i in 0..steps {
        let stage = || -> Option<(f64, f64)> {
            let k1 = real_field(f, x)?;
            let k2 = real_field(f, x + 0.5 * dt * k1.0)?;
            let k3 = real_field(f, x + 0.5 * dt * k2.0)?;
            let k4 = real_field(f, x + dt * k3.0)?;
            Some((
                x + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
                y + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
            ))
        };
        match stage() {
            Some((nx, ny)) if real_field(f, nx).is_some() => {
                x = nx;
                y = ny;
                points.push(FlowPoint::new(dt * (i + 1) as f64, x, y));
            }
            _ => return Ok(FlowTrace { points, exit: Some((x, y)) }),
        }
    }
    Ok(FlowTrace { points, exit: None })
}

/// Largest distance from the best plane through the origin.
pub fn plane_fit_residual(points: &[[f64; 3]]) -> f64 {
    let mut m = Matrix3::zeros();
    for p in points {
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] += p[i] * p[j];
            }
        }
    }
    let eig = SymmetricEigen::new(m);
    let k = eig.eigenvalues.imin();
    let col = eig.eigenvectors.column(k);
    let n: [f64; 3] = [col[0], col[1], col[2]];
    points
        .iter()
        .map(|p| (n[0] * p[0] + n[1] * p[1] + n[2] * p[2]).abs())
        .fold(0.0, f64::max)
}
