//! Brute-force evaluation of `Σ̂` and of the mode equations, used to check the
//! assembled formulas.

use super::{Connection, DeformedConnection, ModeSet, PerSigma};
use crate::error::{Error, Result};
use crate::jet::I;
use crate::starprod::Deformation;
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

type XFn = Arc<dyn Fn(C64) -> Result<C64> + Send + Sync>;

/// Default number of trapezoid nodes in `y`.
pub const QUADRATURE_POINTS: usize = 512;

/// A field `Σ_k F_k(x) e^{iky}` stored as lazily evaluated coefficients.
#[derive(Clone, Default)]
pub struct YField {
    comps: BTreeMap<i32, Vec<XFn>>,
}

impl YField {
    pub fn zero() -> Self {
        Self::default()
    }

    /// A `y`-independent field.
    pub fn constant(f: impl Fn(C64) -> Result<C64> + Send + Sync + 'static) -> Self {
        Self::mode(0, f)
    }

    pub fn mode(k: i32, f: impl Fn(C64) -> Result<C64> + Send + Sync + 'static) -> Self {
        let mut comps = BTreeMap::new();
        comps.insert(k, vec![Arc::new(f) as XFn]);
        YField { comps }
    }

    /// `V^μ`, or `∂ₓV^μ` when `deriv` is set.
    pub fn from_modes(ms: &ModeSet, mu: usize, deriv: bool) -> Self {
        let pick = move |j: crate::jet::Jet| if deriv { j.d1 } else { j.v };
        let v0 = ms.v0(mu).clone();
        let mut out = Self::constant(move |z| Ok(pick(v0.at(z))));
        for n in 1..=ms.n() as i64 {
            let (cf, sf) = (ms.vc(mu, n).unwrap().clone(), ms.vs(mu, n).unwrap().clone());
            let (cf2, sf2) = (cf.clone(), sf.clone());
            out = out
                .add(&Self::mode(n as i32, move |z| Ok(0.5 * (pick(cf.at(z)) - I * pick(sf.at(z))))))
                .add(&Self::mode(-(n as i32), move |z| Ok(0.5 * (pick(cf2.at(z)) + I * pick(sf2.at(z))))));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut comps = self.comps.clone();
        for (k, fs) in &other.comps {
            comps.entry(*k).or_default().extend(fs.iter().cloned());
        }
        YField { comps }
    }

    pub fn dy(&self) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|(&k, fs)| {
                let fs = fs
                    .iter()
                    .map(|f| {
                        let f = f.clone();
                        Arc::new(move |z| Ok(I * k as f64 * f(z)?)) as XFn
                    })
                    .collect();
                (k, fs)
            })
            .collect();
        YField { comps }
    }

    /// Restriction to the frequencies with `|k|` in `keep`.
    pub fn band(&self, keep: &[i32]) -> Self {
        let comps = self.comps.iter().filter(|(k, _)| keep.contains(&k.abs())).map(|(k, v)| (*k, v.clone())).collect();
        YField { comps }
    }

    pub fn coeff(&self, k: i32, z: C64) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for f in self.comps.get(&k).into_iter().flatten() {
            acc += f(z)?;
        }
        Ok(acc)
    }

    pub fn frequencies(&self) -> impl Iterator<Item = i32> + '_ {
        self.comps.keys().copied()
    }

    /// `(A ⋆ B)_{k+l} = Σ A_k(x + ilh) B_l(x − ikh)`.
    pub fn star(&self, other: &Self, h: f64) -> Self {
        let mut out = YField::zero();
        for &k in self.comps.keys() {
            for &l in other.comps.keys() {
                let (a, b) = (self.clone(), other.clone());
                let (sa, sb) = (I * (l as f64 * h), I * (k as f64 * h));
                out = out.add(&Self::mode(k + l, move |z| Ok(a.coeff(k, z + sa)? * b.coeff(l, z - sb)?)));
            }
        }
        out
    }

    /// All coefficients at `x`.
    pub fn coeffs_at(&self, x: f64) -> Result<Vec<(i32, C64)>> {
        self.comps.keys().map(|&k| Ok((k, self.coeff(k, C64::new(x, 0.0))?))).collect()
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<C64> {
        Ok(self.coeffs_at(x)?.into_iter().map(|(k, v)| v * (I * (k as f64 * y)).exp()).sum())
    }
}

/// `Σ̂^σ = Σ_μ V^μ ⋆ (∂_μ V^σ + Σ_ρ V^ρ ⋆ Γ^σ_{μρ})`, built product by product.
pub fn sigma_hat_direct(ms: &ModeSet, conn: Arc<dyn Connection>, h: f64) -> [YField; 2] {
    [0, 1].map(|s| {
        let mut total = YField::zero();
        for mu in 0..2 {
            let mut inner = if mu == 0 { YField::from_modes(ms, s, true) } else { YField::from_modes(ms, s, false).dy() };
            for rho in 0..2 {
                let g = conn.clone();
                let gam = YField::constant(move |z| Ok(g.gamma(z)?[s][mu][rho]));
                inner = inner.add(&YField::from_modes(ms, rho, false).star(&gam, h));
            }
            total = total.add(&YField::from_modes(ms, mu, false).star(&inner, h));
        }
        total
    })
}

fn trapezoid(f: &YField, x: f64, p: usize, cosine: bool, points: usize) -> Result<C64> {
    let coeffs = f.coeffs_at(x)?;
    let w = 2.0 * PI / points as f64;
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..points {
        let y = w * j as f64;
        let t = if cosine { (p as f64 * y).cos() } else { (p as f64 * y).sin() };
        let v: C64 = coeffs.iter().map(|&(k, c)| c * (I * (k as f64 * y)).exp()).sum();
        acc += w * t * v;
    }
    Ok(acc)
}

fn basis_y(j: u8) -> YField {
    let sin_x = j <= 2;
    let x_part = move |z: C64| if sin_x { z.sin() } else { z.cos() };
    if j % 2 == 1 {
        YField::mode(1, move |z| Ok(x_part(z) / (2.0 * I))).add(&YField::mode(-1, move |z| Ok(-x_part(z) / (2.0 * I))))
    } else {
        YField::mode(1, move |z| Ok(x_part(z) * 0.5)).add(&YField::mode(-1, move |z| Ok(x_part(z) * 0.5)))
    }
}

/// The six mode integrals at `(p, x)` from `y`-quadrature of `Σ̂`.
///
/// The first four project `Σ̂¹ ⋆ f₄ − Σ̂² ⋆ f₁` restricted to the frequency
/// bands `|k| = p∓1` onto `cos py` and `sin py`; the last two project
/// `Σ̂¹ ⋆ sin x`.
pub fn p_mode_quadrature(ms: &ModeSet, d: &Deformation, x: f64, p: usize, points: usize) -> Result<[C64; 6]> {
    if p == 0 {
        return Err(Error::OutOfRange { what: "mode index p", value: 0 });
    }
    let h = d.real_h()?;
    let conn: Arc<dyn Connection> = Arc::new(DeformedConnection { alpha: d.real_alpha()? });
    let sh = sigma_hat_direct(ms, conn, h);
    let (f1, f4) = (basis_y(1), basis_y(4));
    let pi = p as i32;
    let project = |band: i32, cosine: bool| -> Result<C64> {
        let a = sh[0].band(&[band]).star(&f4, h);
        let b = sh[1].band(&[band]).star(&f1, h);
        Ok(trapezoid(&a, x, p, cosine, points)? - trapezoid(&b, x, p, cosine, points)?)
    };
    let sinx = YField::constant(|z| Ok(z.sin()));
    let e = sh[0].star(&sinx, h);
    Ok([
        project(pi - 1, true)?,
        project(pi - 1, false)?,
        project(pi + 1, true)?,
        project(pi + 1, false)?,
        trapezoid(&e, x, p, true, points)?,
        trapezoid(&e, x, p, false, points)?,
    ])
}

/// `Σ̂` at one point from the brute-force construction.
pub fn sigma_hat_point(fields: &[YField; 2], x: f64, y: f64) -> Result<PerSigma> {
    Ok([fields[0].eval(x, y)?, fields[1].eval(x, y)?])
}
