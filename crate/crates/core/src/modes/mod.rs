//! Fourier decomposition of the auto-parallel condition in `y`.
//!
//! A mode set carries `V^μ = V₀^μ(x) + Σₙ [V_C,n^μ(x) cos ny + V_S,n^μ(x) sin ny]`
//! for `n = 1..N`. Star products with `y`-trigonometric factors turn into
//! imaginary shifts of the `x` argument, so every object here is evaluated at
//! complex points.

mod legendre;
mod oracle;
mod spec;

pub use legendre::{harmonics_to_modes, k_lm, legendre_jet, HarmonicCoeffs};
pub use oracle::{p_mode_quadrature, sigma_hat_direct, sigma_hat_point, YField, QUADRATURE_POINTS};
pub use spec::{ModeSetSpec, ModeSpec};

use crate::analytic::AnalyticFn1D;
use crate::error::{Error, Result};
use crate::geometry::{check_metric, gamma_upper_jet, Gamma};
use crate::jet::{c, Jet, I};
use crate::par;
use crate::starprod::{reduced_from_shifts, Deformation};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Values indexed `[σ][μ]`.
pub type Table = [[C64; 2]; 2];
/// Values indexed by the free component `σ`.
pub type PerSigma = [C64; 2];

/// Source of the connection coefficients `Γ^σ_{μρ}(z)`, indexed `[σ][μ][ρ]`.
pub trait Connection: Send + Sync {
    fn gamma(&self, z: C64) -> Result<Gamma<C64>>;
}

/// The connection of the deformed sphere at real `alpha`.
#[derive(Debug, Clone, Copy)]
pub struct DeformedConnection {
    pub alpha: f64,
}

impl Connection for DeformedConnection {
    fn gamma(&self, z: C64) -> Result<Gamma<C64>> {
        check_metric(z, c(self.alpha))?;
        let g = gamma_upper_jet(Jet::constant(z), c(self.alpha));
        Ok(g.map(|a| a.map(|b| b.map(|j| j.v))))
    }
}

/// Truncated Fourier decomposition of a vector field in `y`.
#[derive(Debug, Clone)]
pub struct ModeSet {
    n: usize,
    v0: [AnalyticFn1D; 2],
    vc: [Vec<AnalyticFn1D>; 2],
    vs: [Vec<AnalyticFn1D>; 2],
    spec: Option<ModeSetSpec>,
}

impl ModeSet {
    /// `vc[μ][n-1]` and `vs[μ][n-1]` hold the `cos ny` and `sin ny` coefficients.
    pub fn new(
        n: usize,
        v0: [AnalyticFn1D; 2],
        vc: [Vec<AnalyticFn1D>; 2],
        vs: [Vec<AnalyticFn1D>; 2],
    ) -> Result<Self> {
        if vc.iter().chain(vs.iter()).any(|v| v.len() != n) {
            return Err(Error::InvalidParameter(format!("every mode list must have length N = {n}")));
        }
        Ok(ModeSet { n, v0, vc, vs, spec: None })
    }

    pub fn zero(n: usize) -> Self {
        let z = || vec![AnalyticFn1D::zero(); n];
        ModeSet { n, v0: [AnalyticFn1D::zero(), AnalyticFn1D::zero()], vc: [z(), z()], vs: [z(), z()], spec: None }
    }

    /// The `y`-independent field `(Ψ, Φ)`.
    pub fn y_symmetric(psi: AnalyticFn1D, phi: AnalyticFn1D) -> Self {
        ModeSet { n: 0, v0: [psi, phi], vc: [vec![], vec![]], vs: [vec![], vec![]], spec: None }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spec(&self) -> Option<&ModeSetSpec> {
        self.spec.as_ref()
    }

    pub(crate) fn with_spec(mut self, spec: ModeSetSpec) -> Self {
        self.spec = Some(spec);
        self
    }

    pub fn v0(&self, mu: usize) -> &AnalyticFn1D {
        &self.v0[mu]
    }

    /// `None` outside `1..=N`.
    pub fn vc(&self, mu: usize, m: i64) -> Option<&AnalyticFn1D> {
        (m >= 1 && m as usize <= self.n).then(|| &self.vc[mu][m as usize - 1])
    }

    pub fn vs(&self, mu: usize, m: i64) -> Option<&AnalyticFn1D> {
        (m >= 1 && m as usize <= self.n).then(|| &self.vs[mu][m as usize - 1])
    }

    /// Common analyticity strip of all coefficient functions.
    pub fn strip(&self) -> f64 {
        self.v0
            .iter()
            .chain(self.vc.iter().flatten())
            .chain(self.vs.iter().flatten())
            .map(AnalyticFn1D::strip)
            .fold(f64::INFINITY, f64::min)
    }

    /// `V^μ(x, y)`.
    pub fn eval(&self, mu: usize, x: C64, y: f64) -> C64 {
        let mut acc = self.v0[mu].eval(x);
        for k in 0..self.n {
            let ny = (k + 1) as f64 * y;
            acc += self.vc[mu][k].eval(x) * ny.cos() + self.vs[mu][k].eval(x) * ny.sin();
        }
        acc
    }

    pub fn scaled(&self, k: f64) -> Self {
        let s = |f: &AnalyticFn1D| f.scale(c(k));
        ModeSet {
            n: self.n,
            v0: self.v0.clone().map(|f| s(&f)),
            vc: self.vc.clone().map(|v| v.iter().map(s).collect()),
            vs: self.vs.clone().map(|v| v.iter().map(s).collect()),
            spec: None,
        }
    }

    /// The same field with zero modes appended up to `n`.
    pub fn padded(&self, n: usize) -> Result<Self> {
        if n < self.n {
            return Err(Error::InvalidParameter(format!("cannot pad N = {} down to {n}", self.n)));
        }
        let pad = |v: &Vec<AnalyticFn1D>| {
            let mut v = v.clone();
            v.resize(n, AnalyticFn1D::zero());
            v
        };
        Ok(ModeSet {
            n,
            v0: self.v0.clone(),
            vc: [pad(&self.vc[0]), pad(&self.vc[1])],
            vs: [pad(&self.vs[0]), pad(&self.vs[1])],
            spec: None,
        })
    }
}

/// `𝒞₀`, `𝒞_m` and `𝒮_m` at one point, each indexed `[σ][μ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeFunctions {
    pub c0: Table,
    /// Entry `m-1` holds mode `m`.
    pub cm: Vec<Table>,
    pub sm: Vec<Table>,
}

/// `𝒦₁..𝒦₄` and `ℒ₁..ℒ₄` at one mode index, indexed `[σ][j]`, together
/// with `ℬ₁, ℬ₂, ℳ₁, ℳ₂` at the same index and real point.
#[derive(Debug, Clone, PartialEq)]
pub struct BklmBundle {
    pub q: usize,
    pub b1: PerSigma,
    pub b2: PerSigma,
    pub m1: PerSigma,
    pub m2: PerSigma,
    pub k: [[C64; 4]; 2],
    pub l: [[C64; 4]; 2],
}

/// Evaluator for the mode functions of one [`ModeSet`] under one connection.
pub struct ModeSystem<'a> {
    ms: &'a ModeSet,
    conn: Box<dyn Connection + 'a>,
    h: f64,
}

impl<'a> ModeSystem<'a> {
    pub fn new(ms: &'a ModeSet, d: &Deformation) -> Result<Self> {
        let alpha = d.real_alpha()?;
        Self::with_connection(ms, d.real_h()?, Box::new(DeformedConnection { alpha }))
    }

    pub fn with_connection(ms: &'a ModeSet, h: f64, conn: Box<dyn Connection + 'a>) -> Result<Self> {
        let need = (ms.n + 1) as f64 * h.abs();
        if ms.strip() < need * (1.0 - 1e-12) {
            return Err(Error::StripViolation { shift: need, strip: ms.strip() });
        }
        Ok(ModeSystem { ms, conn, h })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    fn shift(&self, k: i64) -> C64 {
        I * (k as f64 * self.h)
    }

    fn v0(&self, mu: usize, z: C64) -> Jet {
        self.ms.v0[mu].at(z)
    }

    fn vc(&self, mu: usize, m: i64, z: C64) -> Jet {
        self.ms.vc(mu, m).map_or(Jet::constant(ZERO), |f| f.at(z))
    }

    fn vs(&self, mu: usize, m: i64, z: C64) -> Jet {
        self.ms.vs(mu, m).map_or(Jet::constant(ZERO), |f| f.at(z))
    }

    /// `𝒞₀^σ_μ = δ_{μ1} ∂ₓV₀^σ + Σ_ρ V₀^ρ Γ^σ_{μρ}`.
    pub fn c0(&self, z: C64) -> Result<Table> {
        let g = self.conn.gamma(z)?;
        let v = [self.v0(0, z), self.v0(1, z)];
        let mut t = [[ZERO; 2]; 2];
        for s in 0..2 {
            for mu in 0..2 {
                let mut r = if mu == 0 { v[s].d1 } else { ZERO };
                for rho in 0..2 {
                    r += v[rho].v * g[s][mu][rho];
                }
                t[s][mu] = r;
            }
        }
        Ok(t)
    }

    /// `(𝒞_m, 𝒮_m)`; the connection enters at `z ± imh`. Zero outside `1..=N`.
    pub fn cm_sm(&self, m: i64, z: C64) -> Result<(Table, Table)> {
        let mut cm = [[ZERO; 2]; 2];
        let mut sm = [[ZERO; 2]; 2];
        if m < 1 || m as usize > self.ms.n {
            return Ok((cm, sm));
        }
        let t = self.shift(m);
        let (gp, gm) = (self.conn.gamma(z + t)?, self.conn.gamma(z - t)?);
        let vc = [self.vc(0, m, z), self.vc(1, m, z)];
        let vs = [self.vs(0, m, z), self.vs(1, m, z)];
        let mf = m as f64;
        for s in 0..2 {
            for mu in 0..2 {
                let mut cr = if mu == 0 { vc[s].d1 } else { vs[s].v * mf };
                let mut sr = if mu == 0 { vs[s].d1 } else { -vc[s].v * mf };
                for rho in 0..2 {
                    let (a, b) = (vc[rho].v, vs[rho].v);
                    cr += 0.5 * ((a + I * b) * gp[s][mu][rho] + (a - I * b) * gm[s][mu][rho]);
                    sr += 0.5 * ((b - I * a) * gp[s][mu][rho] + (b + I * a) * gm[s][mu][rho]);
                }
                cm[s][mu] = cr;
                sm[s][mu] = sr;
            }
        }
        Ok((cm, sm))
    }

    /// `Σ^σ = Σ_μ V₀^μ 𝒞₀^σ_μ`.
    pub fn sigma(&self, z: C64) -> Result<PerSigma> {
        let t = self.c0(z)?;
        let v = [self.v0(0, z).v, self.v0(1, z).v];
        Ok([0, 1].map(|s| v[0] * t[s][0] + v[1] * t[s][1]))
    }

    /// `(ℬ₁, ℬ₂)` at mode `m`; zero outside `1..=N`.
    pub fn b12(&self, m: i64, z: C64) -> Result<(PerSigma, PerSigma)> {
        let mut b1 = [ZERO; 2];
        let mut b2 = [ZERO; 2];
        if m < 1 || m as usize > self.ms.n {
            return Ok((b1, b2));
        }
        let t = self.shift(m);
        let (cm, sm) = self.cm_sm(m, z)?;
        let (c0p, c0m) = (self.c0(z + t)?, self.c0(z - t)?);
        for mu in 0..2 {
            let (vp, vm) = (self.v0(mu, z + t).v, self.v0(mu, z - t).v);
            let (vc, vs) = (self.vc(mu, m, z).v, self.vs(mu, m, z).v);
            for s in 0..2 {
                let (cp, cn) = (c0p[s][mu], c0m[s][mu]);
                b1[s] += (vm + vp) * cm[s][mu] - I * (vp - vm) * sm[s][mu] + (cp + cn) * vc - I * (cn - cp) * vs;
                b2[s] += I * (vm - vp) * cm[s][mu] - (vp + vm) * sm[s][mu] + I * (cp - cn) * vc - (cn + cp) * vs;
            }
        }
        Ok((b1, b2))
    }

    /// `[ℬ₃, ℬ₄, ℬ₅, ℬ₆]` at modes `(n, m)`; zero unless both lie in `1..=N`.
    pub fn b36(&self, n: i64, m: i64, z: C64) -> Result<[[C64; 4]; 2]> {
        let mut out = [[ZERO; 4]; 2];
        let top = self.ms.n as i64;
        if n < 1 || m < 1 || n > top || m > top {
            return Ok(out);
        }
        let (tm, tn) = (self.shift(m), self.shift(n));
        let (cp, sp) = self.cm_sm(m, z + tn)?;
        let (cn, sn) = self.cm_sm(m, z - tn)?;
        for mu in 0..2 {
            let (fcp, fcm) = (self.vc(mu, n, z + tm).v, self.vc(mu, n, z - tm).v);
            let (fsp, fsm) = (self.vs(mu, n, z + tm).v, self.vs(mu, n, z - tm).v);
            for s in 0..2 {
                let cc = reduced_from_shifts(fcp, fcm, cp[s][mu], cn[s][mu]);
                let cs = reduced_from_shifts(fcp, fcm, sp[s][mu], sn[s][mu]);
                let sc = reduced_from_shifts(fsp, fsm, cp[s][mu], cn[s][mu]);
                let ss = reduced_from_shifts(fsp, fsm, sp[s][mu], sn[s][mu]);
                let o = &mut out[s];
                o[0] += cc.a1 - cs.a2 - sc.a3 + ss.a4;
                o[1] += cc.a2 + cs.a1 - sc.a4 - ss.a3;
                o[2] += cc.a3 - cs.a4 + sc.a1 - ss.a2;
                o[3] += cc.a4 + cs.a3 + sc.a2 + ss.a1;
            }
        }
        Ok(out)
    }

    /// `(ℳ₁, ℳ₂)` at mode `q ≥ 0`.
    pub fn m12(&self, q: i64, z: C64) -> Result<(PerSigma, PerSigma)> {
        let mut m1 = [ZERO; 2];
        let mut m2 = [ZERO; 2];
        for n in 1..=self.ms.n as i64 {
            let a = self.b36(n, q - n, z)?;
            let b = self.b36(n, q + n, z)?;
            let r = self.b36(n, n - q, z)?;
            for s in 0..2 {
                m1[s] += a[s][0] - a[s][3] + b[s][0] + b[s][3] + r[s][0] + r[s][3];
                m2[s] += a[s][1] + a[s][2] + b[s][1] - b[s][2] - r[s][1] + r[s][2];
            }
        }
        Ok((m1, m2))
    }

    pub fn klm(&self, q: usize, x: f64) -> Result<BklmBundle> {
        let qi = q as i64;
        let (w, z) = (C64::new(x, self.h), C64::new(x, -self.h));
        let (m1w, m2w) = self.m12(qi, w)?;
        let (m1z, m2z) = self.m12(qi, z)?;
        let (b1w, b2w) = self.b12(qi, w)?;
        let (b1z, b2z) = self.b12(qi, z)?;
        let mut k = [[ZERO; 4]; 2];
        let mut l = [[ZERO; 4]; 2];
        for s in 0..2 {
            let (mpw, mmw) = (m1w[s] + I * m2w[s], m1w[s] - I * m2w[s]);
            let (mpz, mmz) = (m1z[s] + I * m2z[s], m1z[s] - I * m2z[s]);
            k[s] = [-(mmw + mpz), -I * mmw + I * mpz, -mpw + mmz, mpw + mmz];
            let (bpw, bmw) = (b1w[s] + I * b2w[s], b1w[s] - I * b2w[s]);
            let (bpz, bmz) = (b1z[s] + I * b2z[s], b1z[s] - I * b2z[s]);
            l[s] = [bpw + bmz, -I * bpw + I * bmz, -bmw + bpz, bmw + bpz];
        }
        let (b1, b2) = self.b12(qi, c(x))?;
        let (m1, m2) = self.m12(qi, c(x))?;
        Ok(BklmBundle { q, b1, b2, m1, m2, k, l })
    }

    /// The six equations of mode `p ≥ 1` at real `x`, scaled by `π/8` (first
    /// four) and `π/2` (last two) so that they equal the raw `y`-integrals.
    pub fn residuals(&self, p: usize, x: f64) -> Result<[C64; 6]> {
        if p == 0 {
            return Err(Error::OutOfRange { what: "mode index p", value: 0 });
        }
        let h = self.h;
        let lo = self.klm(p - 1, x)?;
        let hi = self.klm(p + 1, x)?;
        let kl1 = [0, 1].map(|s| lo.k[s][0] - lo.l[s][0]);
        let kl2 = [0, 1].map(|s| lo.k[s][1] + lo.l[s][1]);
        let lk3 = [0, 1].map(|s| hi.l[s][2] + hi.k[s][2]);
        let lk4 = [0, 1].map(|s| hi.l[s][3] + hi.k[s][3]);
        let (sw, sz) = if p == 1 {
            (self.sigma(C64::new(x, h))?, self.sigma(C64::new(x, -h))?)
        } else {
            ([ZERO; 2], [ZERO; 2])
        };
        let ch = |k: usize| (k as f64 * h).cosh();
        let sh = |k: usize| (k as f64 * h).sinh();
        let (ch1, sh1, ch2, sh2) = (ch(p - 1), sh(p - 1), ch(p + 1), sh(p + 1));
        let (cx, sx) = (x.cos(), x.sin());
        let e1 = cx * (-kl1[0] * ch1 - kl1[1] * sh1 + 4.0 * (sw[0] + sz[0]))
            + sx * (-kl2[1] * ch1 - kl2[0] * sh1 + 4.0 * I * (sw[1] - sz[1]));
        let e2 = cx * (-kl2[0] * ch1 - kl2[1] * sh1 + 4.0 * I * (sw[0] - sz[0]))
            + sx * (kl1[1] * ch1 + kl1[0] * sh1 - 4.0 * (sw[1] + sz[1]));
        let e3 = cx * (lk4[0] * ch2 - lk4[1] * sh2) - sx * (I * lk3[1] * ch2 - I * lk3[0] * sh2);
        let e4 = cx * (I * lk3[0] * ch2 - I * lk3[1] * sh2) + sx * (lk4[1] * ch2 - lk4[0] * sh2);
        let (c1, c2) = self.constraints(p, x)?;
        let (chp, shp) = (ch(p), sh(p));
        let e5 = chp * sx * c1 - shp * cx * c2;
        let e6 = shp * cx * c1 + chp * sx * c2;
        let (k8, k2) = (PI / 8.0, PI / 2.0);
        Ok([k8 * e1, k8 * e2, k8 * e3, k8 * e4, k2 * e5, k2 * e6])
    }

    /// `(ℳ₁ + ℬ₁, ℳ₂ − ℬ₂)` for `σ = 1` at mode `p`.
    pub fn constraints(&self, p: usize, x: f64) -> Result<(C64, C64)> {
        let (b1, b2) = self.b12(p as i64, c(x))?;
        let (m1, m2) = self.m12(p as i64, c(x))?;
        Ok((m1[0] + b1[0], m2[0] - b2[0]))
    }

    /// `Σ̂^σ(x, y)` assembled from `Σ` and `ℬ₁..ℬ₆`.
    pub fn sigma_hat_assembled(&self, x: f64, y: f64) -> Result<PerSigma> {
        let z = c(x);
        let mut r = self.sigma(z)?;
        let n = self.ms.n as i64;
        for m in 1..=n {
            let (cm, sm) = ((m as f64 * y).cos(), (m as f64 * y).sin());
            let (b1, b2) = self.b12(m, z)?;
            for s in 0..2 {
                r[s] += 0.5 * (cm * b1[s] - sm * b2[s]);
            }
            for k in 1..=n {
                let (ck, sk) = ((k as f64 * y).cos(), (k as f64 * y).sin());
                let b = self.b36(k, m, z)?;
                for s in 0..2 {
                    r[s] += ck * cm * b[s][0] + ck * sm * b[s][1] + sk * cm * b[s][2] + sk * sm * b[s][3];
                }
            }
        }
        Ok(r)
    }

    pub fn mode_functions(&self, x: f64) -> Result<ModeFunctions> {
        let z = c(x);
        let mut cm = Vec::with_capacity(self.ms.n);
        let mut sm = Vec::with_capacity(self.ms.n);
        for m in 1..=self.ms.n as i64 {
            let (a, b) = self.cm_sm(m, z)?;
            cm.push(a);
            sm.push(b);
        }
        Ok(ModeFunctions { c0: self.c0(z)?, cm, sm })
    }
}

pub fn mode_functions(ms: &ModeSet, d: &Deformation, x: f64) -> Result<ModeFunctions> {
    ModeSystem::new(ms, d)?.mode_functions(x)
}

/// `[ℬ₁, …, ℬ₆]` per `σ` at real `x`.
pub fn b_functions(ms: &ModeSet, d: &Deformation, x: f64, n: i64, m: i64) -> Result<[[C64; 6]; 2]> {
    let sys = ModeSystem::new(ms, d)?;
    let (b1, b2) = sys.b12(m, c(x))?;
    let b = sys.b36(n, m, c(x))?;
    Ok([0, 1].map(|s| [b1[s], b2[s], b[s][0], b[s][1], b[s][2], b[s][3]]))
}

pub fn klm_functions(ms: &ModeSet, d: &Deformation, x: f64, p: usize) -> Result<BklmBundle> {
    ModeSystem::new(ms, d)?.klm(p, x)
}

pub fn p_mode_residuals(ms: &ModeSet, d: &Deformation, x: f64, p: usize) -> Result<[C64; 6]> {
    ModeSystem::new(ms, d)?.residuals(p, x)
}

pub fn mode_constraints(ms: &ModeSet, d: &Deformation, x: f64, p: usize) -> Result<(C64, C64)> {
    ModeSystem::new(ms, d)?.constraints(p, x)
}

pub fn sigma_hat_assembled(ms: &ModeSet, d: &Deformation, x: f64, y: f64) -> Result<PerSigma> {
    ModeSystem::new(ms, d)?.sigma_hat_assembled(x, y)
}

/// One row of a residual table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRow {
    pub p: usize,
    pub x: f64,
    pub residuals: [C64; 6],
    pub constraints: (C64, C64),
}

impl ResidualRow {
    pub fn max_abs(&self) -> f64 {
        self.residuals.iter().map(|r| r.norm()).fold(0.0, f64::max)
    }

    /// True when either constraint exceeds `tol`.
    pub fn constraint_violated(&self, tol: f64) -> bool {
        self.constraints.0.norm() > tol || self.constraints.1.norm() > tol
    }
}

/// Residuals over every `(p, x)` pair, evaluated in parallel.
pub fn residual_table(ms: &ModeSet, d: &Deformation, ps: &[usize], xs: &[f64]) -> Result<Vec<ResidualRow>> {
    ModeSystem::new(ms, d)?;
    let pairs: Vec<(usize, f64)> = ps.iter().flat_map(|&p| xs.iter().map(move |&x| (p, x))).collect();
    par::map(&pairs, |&(p, x)| {
        let sys = ModeSystem::new(ms, d)?;
        Ok(ResidualRow { p, x, residuals: sys.residuals(p, x)?, constraints: sys.constraints(p, x)? })
    })
    .into_iter()
    .collect()
}
