//! JSON description of a [`ModeSet`].

use super::legendre::{k_lm, legendre_jet};
use super::ModeSet;
use crate::analytic::AnalyticFn1D;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// One coefficient function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModeSpec {
    /// `Σ (re + i·im) exp(i a x)` over `[a, re, im]` triples.
    Trigpoly { terms: Vec<(i32, f64, f64)> },
    /// `coeff · k_{l,m} · P_{l,m}(cos x)`.
    Legendre { l: u32, m: i32, coeff: f64 },
}

impl ModeSpec {
    pub fn zero() -> Self {
        ModeSpec::Trigpoly { terms: vec![] }
    }

    pub fn to_fn(&self) -> Result<AnalyticFn1D> {
        match *self {
            ModeSpec::Trigpoly { ref terms } => {
                Ok(AnalyticFn1D::trig_poly(terms.iter().map(|&(a, re, im)| (a, C64::new(re, im))).collect()))
            }
            ModeSpec::Legendre { l, m, coeff } => {
                if m.unsigned_abs() > l {
                    return Err(Error::InvalidParameter(format!("legendre order |m| = {} exceeds l = {l}", m.abs())));
                }
                let k = coeff * k_lm(l, m);
                Ok(AnalyticFn1D::entire(move |z| legendre_jet(l, m, z) * k))
            }
        }
    }
}

/// `v0` has one entry per component; `vc` and `vs` hold, per component, the
/// list of mode coefficients for `n = 1..N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSetSpec {
    #[serde(rename = "N")]
    pub n: usize,
    pub v0: Vec<ModeSpec>,
    pub vc: Vec<Vec<ModeSpec>>,
    pub vs: Vec<Vec<ModeSpec>>,
}

impl ModeSetSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parse(m));
        if self.v0.len() != 2 {
            return bad(format!("v0 must have 2 entries, found {}", self.v0.len()));
        }
        for (name, list) in [("vc", &self.vc), ("vs", &self.vs)] {
            if list.len() != 2 {
                return bad(format!("{name} must have 2 entries, found {}", list.len()));
            }
            for (mu, modes) in list.iter().enumerate() {
                if modes.len() != self.n {
                    return bad(format!("{name}[{mu}] must have N = {} entries, found {}", self.n, modes.len()));
                }
            }
        }
        Ok(())
    }
}

impl ModeSet {
    pub fn from_spec(spec: &ModeSetSpec) -> Result<Self> {
        spec.validate()?;
        let fns = |v: &Vec<ModeSpec>| v.iter().map(ModeSpec::to_fn).collect::<Result<Vec<_>>>();
        let v0 = [spec.v0[0].to_fn()?, spec.v0[1].to_fn()?];
        let vc = [fns(&spec.vc[0])?, fns(&spec.vc[1])?];
        let vs = [fns(&spec.vs[0])?, fns(&spec.vs[1])?];
        Ok(ModeSet::new(spec.n, v0, vc, vs)?.with_spec(spec.clone()))
    }

    /// Parse errors carry the line and column of the offending token.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ModeSetSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_spec(&spec)
    }
}
