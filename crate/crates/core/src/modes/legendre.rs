//! Spherical-harmonic input for mode sets.

use super::ModeSet;
use crate::analytic::AnalyticFn1D;
use crate::error::{Error, Result};
use crate::jet::Jet;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// `(l-|m|)! / (l+|m|)!`.
fn factorial_ratio(l: u32, m: u32) -> f64 {
    (l - m + 1..=l + m).fold(1.0, |acc, k| acc / k as f64)
}

/// `k_{l,m} = sqrt((2l+1)/(4π) · (l-|m|)!/(l+|m|)!)`.
pub fn k_lm(l: u32, m: i32) -> f64 {
    ((2 * l + 1) as f64 / (4.0 * PI) * factorial_ratio(l, m.unsigned_abs())).sqrt()
}

/// Associated Legendre function `P_{l,m}(cos x)` with the Condon–Shortley
/// phase, as a jet in `x`. Built from `sin x` directly so it stays entire.
/// Negative orders use `P_{l,-m} = (-1)^m P_{l,m}`, which together with
/// [`k_lm`] keeps every `k_{l,m} P_{l,m}(cos x) e^{imy}` unit-normalized.
pub fn legendre_jet(l: u32, m: i32, x: Jet) -> Jet {
    let am = m.unsigned_abs();
    if am > l {
        return Jet::real(0.0);
    }
    let (s, co) = (x.sin(), x.cos());
    let double_fact = (1..=am).fold(1.0, |acc, k| acc * (2 * k - 1) as f64);
    let sign = if am % 2 == 0 { 1.0 } else { -1.0 };
    let mut pmm = s.powi(am as i32) * (sign * double_fact);
    if l > am {
        let mut pm1 = co * pmm * (2 * am + 1) as f64;
        for ll in am + 2..=l {
            let next = (co * pm1 * (2 * ll - 1) as f64 - pmm * (ll + am - 1) as f64) / (ll - am) as f64;
            pmm = pm1;
            pm1 = next;
        }
        pmm = pm1;
    }
    if m < 0 {
        pmm * sign
    } else {
        pmm
    }
}

/// Real coefficients `(a, b)` of `k_{l,m} P_{l,m}(cos x)(a cos my − b sin my)`
/// keyed by `(μ, l, m)` with `μ ∈ {1, 2}`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HarmonicCoeffs {
    entries: BTreeMap<(u8, u32, i32), (f64, f64)>,
}

impl HarmonicCoeffs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, mu: u8, l: u32, m: i32, a: f64, b: f64) -> Result<()> {
        if !(1..=2).contains(&mu) {
            return Err(Error::OutOfRange { what: "component", value: mu as i64 });
        }
        if m.unsigned_abs() > l {
            return Err(Error::OutOfRange { what: "harmonic order", value: m as i64 });
        }
        let e = self.entries.entry((mu, l, m)).or_insert((0.0, 0.0));
        e.0 += a;
        e.1 += b;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u8, u32, i32), &(f64, f64))> {
        self.entries.iter()
    }
}

/// Sum of `w · k_{l,m} P_{l,m}(cos x)` over the given `(l, m, w)`.
fn harmonic_sum(terms: Vec<(u32, i32, f64)>) -> AnalyticFn1D {
    if terms.is_empty() {
        return AnalyticFn1D::zero();
    }
    AnalyticFn1D::entire(move |x| {
        let mut acc = Jet::real(0.0);
        for &(l, m, w) in &terms {
            acc += legendre_jet(l, m, x) * (w * k_lm(l, m));
        }
        acc
    })
}

/// Groups harmonics by `|m|` into a mode set truncated at `n`. Orders with
/// `|m| > n` are dropped.
pub fn harmonics_to_modes(hc: &HarmonicCoeffs, n: usize) -> Result<ModeSet> {
    let mut v0 = [vec![], vec![]];
    let mut vc = [vec![vec![]; n], vec![vec![]; n]];
    let mut vs = [vec![vec![]; n], vec![vec![]; n]];
    for (&(mu, l, m), &(a, b)) in hc.iter() {
        let i = (mu - 1) as usize;
        let am = m.unsigned_abs() as usize;
        if am == 0 {
            v0[i].push((l, m, a));
        } else if am <= n {
            vc[i][am - 1].push((l, m, a));
            vs[i][am - 1].push((l, m, -b * m.signum() as f64));
        }
    }
    let [v00, v01] = v0;
    let to_fns = |v: Vec<Vec<(u32, i32, f64)>>| v.into_iter().map(harmonic_sum).collect::<Vec<_>>();
    let [c0, c1] = vc;
    let [s0, s1] = vs;
    ModeSet::new(n, [harmonic_sum(v00), harmonic_sum(v01)], [to_fns(c0), to_fns(c1)], [to_fns(s0), to_fns(s1)])
}
