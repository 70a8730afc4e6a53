//! Deformed sphere geometry: embedding, metric, connections and curvature.
//!
//! Closed forms are written once against [`Jet`] with a complex `alpha`, so the
//! same code gives real values, analytic continuations to complex `x` or
//! imaginary deformations, and exact `x`-derivatives.

use crate::error::{Error, Result};
use crate::jet::{c, Jet};
use crate::par;
use crate::starprod::{basis_f, Deformation, TrigPoly};
use nalgebra::Matrix2;
use num_complex::Complex64 as C64;

/// Threshold on `|det g|` and on the curvature denominator below which a point
/// is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Exclusion radius around singular points in grid scans.
pub const EXCLUSION_RADIUS: f64 = 1e-6;

pub type Vec3 = [TrigPoly; 3];

/// Scalar product `[a,b,c]·[a',b',c'] = a⋆a' + b⋆b' + c⋆c'`.
pub fn dot(u: &Vec3, v: &Vec3, h: C64) -> TrigPoly {
    let mut acc = TrigPoly::zero();
    for i in 0..3 {
        acc = &acc + &u[i].star(&v[i], h);
    }
    acc
}

#[derive(Debug, Clone)]
pub struct Embedding {
    pub lambda: Vec3,
    pub a: f64,
    pub b: f64,
    pub h: f64,
}

/// `Λ_h = A f₂ e₁ + A f₁ e₂ + B cos x e₃` with `A = 1/cosh h`, `B = A √cosh 2h`.
pub fn build_embedding(d: &Deformation) -> Result<Embedding> {
    let h = d.real_h()?;
    let a = 1.0 / h.cosh();
    let b = a * (2.0 * h).cosh().sqrt();
    let lambda = [
        basis_f(2)?.scale(c(a)),
        basis_f(1)?.scale(c(a)),
        TrigPoly::cos_x(1).scale(c(b)),
    ];
    Ok(Embedding { lambda, a, b, h })
}

impl Embedding {
    fn hc(&self) -> C64 {
        c(self.h)
    }

    /// `E_μ = ∂_μ Λ_h`.
    pub fn tangent_basis(&self) -> [Vec3; 2] {
        let d = |f: fn(&TrigPoly) -> TrigPoly| -> Vec3 {
            [f(&self.lambda[0]), f(&self.lambda[1]), f(&self.lambda[2])]
        };
        [d(TrigPoly::dx), d(TrigPoly::dy)]
    }

    pub fn dot(&self, u: &Vec3, v: &Vec3) -> TrigPoly {
        dot(u, v, self.hc())
    }

    /// `g_{μν} = E_μ·E_ν` at `(x, y)`.
    pub fn metric_at(&self, x: f64, y: f64) -> Matrix2<f64> {
        let e = self.tangent_basis();
        Matrix2::from_fn(|m, n| self.dot(&e[m], &e[n]).eval_real(x, y).re)
    }

    /// `_cΓ_{μνσ}` and `Υ_{μνσ}` at `(x, y)` from star products of the basis.
    pub fn torsion_split_at(&self, x: f64, y: f64) -> TorsionSplit {
        let e = self.tangent_basis();
        let de = [
            [e[0].clone().map(|p| p.dx()), e[1].clone().map(|p| p.dx())],
            [e[0].clone().map(|p| p.dy()), e[1].clone().map(|p| p.dy())],
        ];
        let mut christoffel = [[[0.0; 2]; 2]; 2];
        let mut torsion = [[[0.0; 2]; 2]; 2];
        for m in 0..2 {
            for n in 0..2 {
                for s in 0..2 {
                    let l = self.dot(&de[m][n], &e[s]).eval_real(x, y).re;
                    let r = self.dot(&e[s], &de[m][n]).eval_real(x, y).re;
                    christoffel[m][n][s] = 0.5 * (l + r);
                    torsion[m][n][s] = 0.5 * (l - r);
                }
            }
        }
        TorsionSplit { christoffel, torsion }
    }
}

/// `Γ_{μνσ}` split into its symmetric-in-product and torsion parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorsionSplit {
    pub christoffel: [[[f64; 2]; 2]; 2],
    pub torsion: [[[f64; 2]; 2]; 2],
}

pub type Gamma<T> = [[[T; 2]; 2]; 2];

/// `g_{μν}` as jets in `x`.
pub fn metric_jet(x: Jet, alpha: C64) -> [[Jet; 2]; 2] {
    let (s, co) = (x.sin(), x.cos());
    let c2 = (x * 2.0).cos();
    [
        [Jet::real(1.0), -c2 * alpha],
        [c2 * alpha, s.sqr() - co.sqr() * (alpha * alpha)],
    ]
}

/// `d_α = (sin²x − α²cos²x + α²cos²2x)⁻¹`.
pub fn d_alpha_jet(x: Jet, alpha: C64) -> Jet {
    let a2 = alpha * alpha;
    (x.sin().sqr() - x.cos().sqr() * a2 + (x * 2.0).cos().sqr() * a2).recip()
}

fn det_denominator(x: C64, alpha: C64) -> C64 {
    let a2 = alpha * alpha;
    x.sin().powi(2) - a2 * x.cos().powi(2) + a2 * (2.0 * x).cos().powi(2)
}

/// Fails where `det g` vanishes.
pub fn check_metric(x: C64, alpha: C64) -> Result<()> {
    if det_denominator(x, alpha).norm() < SINGULAR_TOL {
        Err(Error::Singular { what: "metric", x })
    } else {
        Ok(())
    }
}

pub fn metric_closed(x: f64, alpha: f64) -> Matrix2<f64> {
    let g = metric_jet(Jet::real(x), c(alpha));
    Matrix2::from_fn(|m, n| g[m][n].v.re)
}

/// `E_μ·E_ν` evaluated on the lattice at `(x, y)`.
pub fn metric_from_basis(e: &Embedding, x: f64, y: f64) -> Matrix2<f64> {
    e.metric_at(x, y)
}

/// `g^{μν}` and `d_α`.
pub fn inverse_metric(x: f64, alpha: f64) -> Result<(Matrix2<f64>, f64)> {
    check_metric(c(x), c(alpha))?;
    let gi = inverse_metric_jet(Jet::real(x), c(alpha));
    let d = d_alpha_jet(Jet::real(x), c(alpha)).v.re;
    Ok((Matrix2::from_fn(|m, n| gi[m][n].v.re), d))
}

pub fn inverse_metric_jet(x: Jet, alpha: C64) -> [[Jet; 2]; 2] {
    let d = d_alpha_jet(x, alpha);
    let c2 = (x * 2.0).cos();
    [
        [(x.sin().sqr() - x.cos().sqr() * (alpha * alpha)) * d, c2 * d * alpha],
        [-c2 * d * alpha, d],
    ]
}

/// `Γ_{μνσ}` indexed `[μ][ν][σ]`.
pub fn gamma_lower_jet(x: Jet, alpha: C64) -> Gamma<Jet> {
    let s2 = (x * 2.0).sin();
    let a = s2 * alpha;
    let b = s2 * ((1.0 + alpha * alpha) * 0.5);
    let z = Jet::real(0.0);
    [[[z, a], [-a, b]], [[-a, b], [-b, a]]]
}

/// `Γ^σ_{μν}` indexed `[σ][μ][ν]`, from the closed table.
pub fn gamma_upper_jet(x: Jet, alpha: C64) -> Gamma<Jet> {
    let d = d_alpha_jet(x, alpha);
    let s2d = (x * 2.0).sin() * d;
    let c2 = (x * 2.0).cos();
    let a2 = alpha * alpha;
    let g111 = (x * 4.0).sin() * d * (-a2 * 0.5);
    let g112 = s2d * ((alpha * a2 - alpha) * 0.5);
    let g122 = s2d * (c2 * (a2 - 1.0).powi(2) + (a2 * a2 - 1.0)) * 0.25;
    let g211 = s2d * alpha;
    let g212 = s2d * (1.0 + a2 - c2 * (2.0 * a2)) * 0.5;
    let g222 = s2d * (1.0 - c2 * ((1.0 + a2) * 0.5)) * alpha;
    [[[g111, g112], [g112, g122]], [[g211, g212], [g212, g222]]]
}

/// `Γ^σ_{μν} = Σ_k Γ_{μνk} g^{kσ}`.
pub fn gamma_upper_contracted(x: Jet, alpha: C64) -> Gamma<Jet> {
    let gl = gamma_lower_jet(x, alpha);
    let gi = inverse_metric_jet(x, alpha);
    let mut out = [[[Jet::real(0.0); 2]; 2]; 2];
    for (s, o) in out.iter_mut().enumerate() {
        for m in 0..2 {
            for n in 0..2 {
                o[m][n] = gl[m][n][0] * gi[0][s] + gl[m][n][1] * gi[1][s];
            }
        }
    }
    out
}

fn real3(g: &Gamma<Jet>) -> Gamma<f64> {
    let mut out = [[[0.0; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out[i][j][k] = g[i][j][k].v.re;
            }
        }
    }
    out
}

/// `_cΓ_{μνσ} = ½(∂_μ g_{νσ} + ∂_ν g_{σμ} − ∂_σ g_{νμ})`, only `∂_x` nonzero.
pub fn christoffel_from_metric(x: f64, alpha: f64) -> Gamma<f64> {
    let g = metric_jet(Jet::var(c(x)), c(alpha));
    let dg = |m: usize, i: usize, j: usize| if m == 0 { g[i][j].d1.re } else { 0.0 };
    let mut out = [[[0.0; 2]; 2]; 2];
    for m in 0..2 {
        for n in 0..2 {
            for s in 0..2 {
                out[m][n][s] = 0.5 * (dg(m, n, s) + dg(n, s, m) - dg(s, n, m));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Connections {
    /// `Γ_{μνσ}` as `[μ][ν][σ]`.
    pub lower: Gamma<f64>,
    /// `Γ^σ_{μν}` as `[σ][μ][ν]`.
    pub upper: Gamma<f64>,
    pub split: TorsionSplit,
}

/// Tabulated connections with `Υ = Γ_lower − _cΓ`.
pub fn connections(x: f64, alpha: f64) -> Result<Connections> {
    check_metric(c(x), c(alpha))?;
    let xj = Jet::real(x);
    let lower = real3(&gamma_lower_jet(xj, c(alpha)));
    let upper = real3(&gamma_upper_jet(xj, c(alpha)));
    let christoffel = christoffel_from_metric(x, alpha);
    let mut torsion = [[[0.0; 2]; 2]; 2];
    for m in 0..2 {
        for n in 0..2 {
            for s in 0..2 {
                torsion[m][n][s] = lower[m][n][s] - christoffel[m][n][s];
            }
        }
    }
    Ok(Connections { lower, upper, split: TorsionSplit { christoffel, torsion } })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GammaReport {
    /// Tabulated `Γ_{μνσ}` vs `_cΓ + Υ` with `Υ` from star products.
    pub lower_split: f64,
    /// Tabulated `Γ^σ_{μν}` vs `(_cΓ + Υ)_k g^{kσ}`.
    pub upper: f64,
    /// `g^{σk}(_cΓ − Υ)_k` at `α` vs tabulated `Γ^σ_{μν}` at `−α`.
    pub dual: f64,
    /// Lattice `∂_μE_ν·E_σ` vs tabulated `Γ_{μνσ}`.
    pub lattice_lower: f64,
}

impl GammaReport {
    pub fn max(&self) -> f64 {
        self.lower_split.max(self.upper).max(self.dual).max(self.lattice_lower)
    }
}

/// Cross-checks the connection tables against the metric, the inverse metric
/// and the star-product torsion at the point `(x, y)`.
pub fn gamma_consistency(x: f64, y: f64, d: &Deformation) -> Result<GammaReport> {
    let alpha = d.real_alpha()?;
    let con = connections(x, alpha)?;
    let emb = build_embedding(d)?;
    let lat = emb.torsion_split_at(x, y);
    let (gi, _) = inverse_metric(x, alpha)?;
    let up_neg = real3(&gamma_upper_jet(Jet::real(x), c(-alpha)));
    let cg = con.split.christoffel;
    let mut rep = GammaReport::default();
    for m in 0..2 {
        for n in 0..2 {
            for s in 0..2 {
                let lat_lower = lat.christoffel[m][n][s] + lat.torsion[m][n][s];
                rep.lattice_lower = rep.lattice_lower.max((lat_lower - con.lower[m][n][s]).abs());
                let sum = cg[m][n][s] + lat.torsion[m][n][s];
                rep.lower_split = rep.lower_split.max((sum - con.lower[m][n][s]).abs());
                let left: f64 = (0..2).map(|k| (cg[m][n][k] + lat.torsion[m][n][k]) * gi[(k, s)]).sum();
                rep.upper = rep.upper.max((left - con.upper[s][m][n]).abs());
                let right: f64 = (0..2).map(|k| gi[(s, k)] * (cg[m][n][k] - lat.torsion[m][n][k])).sum();
                rep.dual = rep.dual.max((right - up_neg[s][m][n]).abs());
            }
        }
    }
    Ok(rep)
}

fn curvature_denominator(x: C64, alpha: C64) -> C64 {
    let a2 = alpha * alpha;
    a2 + 2.0 * a2 * (2.0 * x).cos() - 1.0
}

pub fn check_curvature(x: C64, alpha: C64) -> Result<()> {
    if curvature_denominator(x, alpha).norm() < SINGULAR_TOL {
        Err(Error::Singular { what: "curvature", x })
    } else {
        Ok(())
    }
}

/// Left Riemann tensor `R^l_{kij}` indexed `[l][k][i][j]` from the tabulated
/// connection and its exact `x`-derivative.
pub fn riemann_c(x: C64, alpha: C64) -> Result<[[[[C64; 2]; 2]; 2]; 2]> {
    check_metric(x, alpha)?;
    let g = gamma_upper_jet(Jet::var(x), alpha);
    let gam = |l: usize, i: usize, k: usize| g[l][i][k].v;
    let dgam = |d: usize, l: usize, i: usize, k: usize| if d == 0 { g[l][i][k].d1 } else { C64::new(0.0, 0.0) };
    let mut r = [[[[C64::new(0.0, 0.0); 2]; 2]; 2]; 2];
    for (l, rl) in r.iter_mut().enumerate() {
        for (k, rk) in rl.iter_mut().enumerate() {
            for (i, ri) in rk.iter_mut().enumerate() {
                for (j, rij) in ri.iter_mut().enumerate() {
                    let mut v = -dgam(j, l, i, k) + dgam(i, l, j, k);
                    for p in 0..2 {
                        v += -gam(p, i, k) * gam(l, j, p) + gam(p, j, k) * gam(l, i, p);
                    }
                    *rij = v;
                }
            }
        }
    }
    Ok(r)
}

/// Assembled `R_{ij} = R^p_{ipj}` and `R = g^{ji} R_{ij}` at complex arguments.
pub fn riemann_ricci_c(x: C64, alpha: C64) -> Result<([[C64; 2]; 2], C64)> {
    check_curvature(x, alpha)?;
    let r = riemann_c(x, alpha)?;
    let mut ric = [[C64::new(0.0, 0.0); 2]; 2];
    for (i, row) in ric.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = r[0][i][0][j] + r[1][i][1][j];
        }
    }
    let gi = inverse_metric_jet(Jet::constant(x), alpha);
    let mut s = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            s += gi[j][i].v * ric[i][j];
        }
    }
    Ok((ric, s))
}

pub fn riemann_ricci(x: f64, alpha: f64) -> Result<(Matrix2<f64>, f64)> {
    let (ric, s) = riemann_ricci_c(c(x), c(alpha))?;
    Ok((Matrix2::from_fn(|i, j| ric[i][j].re), s.re))
}

/// Closed Ricci tensor and scalar curvature at complex arguments.
pub fn ricci_closed_c(x: C64, alpha: C64) -> Result<([[C64; 2]; 2], C64)> {
    check_curvature(x, alpha)?;
    let a2 = alpha * alpha;
    let a4 = a2 * a2;
    let c2 = (2.0 * x).cos();
    let den = curvature_denominator(x, alpha);
    let den2 = den * den;
    let r11 = (3.0 * a4 + 4.0 * a2 + 1.0) / den2;
    let r12 = alpha * (1.0 - a4) * (c2 + 2.0) / den2;
    let r21 = alpha * (2.0 * (a2 + 1.0).powi(2) + (a4 - 1.0) * c2) / den2;
    let r22 = (1.0 - a4) * (3.0 * a2 + (3.0 * a2 - 1.0) * c2 + 1.0) / (2.0 * den2);
    let r = 2.0 * (a4 - 1.0) * (3.0 * a2 + 2.0 * a2 * c2 + 1.0) / (den2 * den);
    Ok(([[r11, r12], [r21, r22]], r))
}

pub fn ricci_closed(x: f64, alpha: f64) -> Result<(Matrix2<f64>, f64)> {
    let (ric, s) = ricci_closed_c(c(x), c(alpha))?;
    Ok((Matrix2::from_fn(|i, j| ric[i][j].re), s.re))
}

pub fn scalar_r(x: f64, alpha: f64) -> Result<f64> {
    ricci_closed(x, alpha).map(|(_, r)| r)
}

/// Scalar curvature for `h = iħ`, written in `ᾱ = tan ħ`.
pub fn scalar_r_imaginary(x: f64, hbar: f64) -> Result<f64> {
    let cos_h = hbar.cos();
    if cos_h.abs() < SINGULAR_TOL {
        return Err(Error::Singular { what: "tan(hbar)", x: c(hbar) });
    }
    let ab = hbar.tan();
    let a2 = ab * ab;
    let c2 = (2.0 * x).cos();
    let den = a2 + 2.0 * a2 * c2 + 1.0;
    if den.abs() < SINGULAR_TOL {
        return Err(Error::Singular { what: "imaginary-h curvature", x: c(x) });
    }
    Ok(2.0 * (a2 * a2 - 1.0) * (3.0 * a2 + 2.0 * a2 * c2 - 1.0) / den.powi(3))
}

/// Roots of `α² + 2α² cos 2x − 1 = 0` in `[0, π)`.
pub fn singularity_locus(alpha: f64) -> Vec<f64> {
    if alpha == 0.0 {
        return Vec::new();
    }
    let a2 = alpha * alpha;
    let u = (1.0 - a2) / (2.0 * a2);
    if u.abs() > 1.0 {
        return Vec::new();
    }
    let x0 = 0.5 * u.acos();
    let x1 = std::f64::consts::PI - x0;
    if (x1 - x0).abs() < 1e-15 {
        vec![x0]
    } else {
        vec![x0, x1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSample {
    pub x: f64,
    pub r: f64,
    pub sign: i8,
}

/// Samples `R` on `grid` points of `[0, π)`, skipping points within
/// [`EXCLUSION_RADIUS`] of a singularity.
pub fn curvature_sign_scan(alpha: f64, grid: usize) -> Result<Vec<CurvatureSample>> {
    if grid < 2 {
        return Err(Error::InvalidParameter(format!("grid = {grid} must be at least 2")));
    }
    let locus = singularity_locus(alpha);
    let xs: Vec<f64> = par::linspace_open(0.0, std::f64::consts::PI, grid)
        .into_iter()
        .filter(|x| locus.iter().all(|s| (x - s).abs() > EXCLUSION_RADIUS))
        .collect();
    let rows = par::map(&xs, |&x| scalar_r(x, alpha).ok().map(|r| (x, r)));
    Ok(rows
        .into_iter()
        .flatten()
        .map(|(x, r)| CurvatureSample { x, r, sign: if r > 0.0 { 1 } else if r < 0.0 { -1 } else { 0 } })
        .collect())
}

/// Midpoints between consecutive samples of opposite sign.
pub fn sign_changes(samples: &[CurvatureSample]) -> Vec<f64> {
    samples
        .windows(2)
        .filter(|w| w[0].sign * w[1].sign < 0)
        .map(|w| 0.5 * (w[0].x + w[1].x))
        .collect()
}

/// Everything local at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryAt {
    pub x: f64,
    pub alpha: f64,
    pub g: Matrix2<f64>,
    pub ginv: Matrix2<f64>,
    pub d_alpha: f64,
    pub gamma_lower: Gamma<f64>,
    pub gamma_upper: Gamma<f64>,
    pub ricci: Matrix2<f64>,
    pub scalar_r: f64,
}

impl GeometryAt {
    pub fn new(x: f64, alpha: f64) -> Result<Self> {
        let (ginv, d_alpha) = inverse_metric(x, alpha)?;
        let con = connections(x, alpha)?;
        let (ricci, scalar_r) = ricci_closed(x, alpha)?;
        Ok(GeometryAt {
            x,
            alpha,
            g: metric_closed(x, alpha),
            ginv,
            d_alpha,
            gamma_lower: con.lower,
            gamma_upper: con.upper,
            ricci,
            scalar_r,
        })
    }
}

/// Richardson-extrapolated central difference of `Γ^σ_{μν}` in `x`.
pub fn gamma_upper_derivative_fd(x: f64, alpha: f64, step: f64) -> Gamma<f64> {
    let at = |t: f64| real3(&gamma_upper_jet(Jet::real(t), c(alpha)));
    let central = |h: f64| {
        let (p, m) = (at(x + h), at(x - h));
        let mut out = [[[0.0; 2]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    out[i][j][k] = (p[i][j][k] - m[i][j][k]) / (2.0 * h);
                }
            }
        }
        out
    };
    let (d1, d2) = (central(step), central(step / 2.0));
    let mut out = [[[0.0; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out[i][j][k] = (4.0 * d2[i][j][k] - d1[i][j][k]) / 3.0;
            }
        }
    }
    out
}

/// Exact `∂_x Γ^σ_{μν}`.
pub fn gamma_upper_derivative(x: f64, alpha: f64) -> Gamma<f64> {
    let g = gamma_upper_jet(Jet::var(c(x)), c(alpha));
    let mut out = [[[0.0; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out[i][j][k] = g[i][j][k].d1.re;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_table_is_lower_contracted() {
        for &(x, a) in &[(0.3, 0.2), (1.1, -0.5), (2.4, 0.75)] {
            let t = real3(&gamma_upper_jet(Jet::real(x), c(a)));
            let k = real3(&gamma_upper_contracted(Jet::real(x), c(a)));
            for s in 0..2 {
                for m in 0..2 {
                    for n in 0..2 {
                        assert!((t[s][m][n] - k[s][m][n]).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn locus_at_three_quarters() {
        let l = singularity_locus(0.75);
        assert!((l[0] - 0.5 * (7.0f64 / 18.0).acos()).abs() < 1e-14);
    }
}
