//! Weight families on the lattice `Z^d`.
//!
//! Every family is symmetric under sign flips and coordinate permutations and
//! nondecreasing in each `|k_i|`. The enumerators in [`crate::sigma`] rely on
//! both properties, so evaluation always works on the canonical representative:
//! the absolute values sorted in nonincreasing order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Largest supported lattice dimension.
pub const MAX_DIM: usize = 20;

/// Two weights closer than this in log-domain are treated as equal.
pub const TIE_TOL: f64 = 1e-12;

/// Canonical orbit representative: absolute values in nonincreasing order.
pub type Rep = SmallVec<[u32; 8]>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
pub enum Family {
    /// `prod (1 + |k_i|^r)^(s/r)`
    #[serde(rename = "mixed-sr")]
    #[value(name = "mixed-sr")]
    MixedSR,
    /// `prod max(1, |k_i|)^s`
    #[serde(rename = "mixed-inf")]
    #[value(name = "mixed-inf")]
    MixedInf,
    /// `(1 + sum |k_i|^r)^(s/r)`
    #[serde(rename = "isotropic-sr")]
    #[value(name = "isotropic-sr")]
    IsotropicSR,
    /// `max(1, |k_1|, ..., |k_d|)^s`
    #[serde(rename = "isotropic-inf")]
    #[value(name = "isotropic-inf")]
    IsotropicInf,
    /// `prod (1 + k_j^2)^(s/2) / (1 + sum k_j^2)^(1/2)`, requires `s > 1`.
    #[serde(rename = "h1-ratio")]
    #[value(name = "h1-ratio")]
    H1Ratio,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::MixedSR, Family::MixedInf, Family::IsotropicSR, Family::IsotropicInf, Family::H1Ratio];

    pub fn name(self) -> &'static str {
        match self {
            Family::MixedSR => "mixed-sr",
            Family::MixedInf => "mixed-inf",
            Family::IsotropicSR => "isotropic-sr",
            Family::IsotropicInf => "isotropic-inf",
            Family::H1Ratio => "h1-ratio",
        }
    }

    /// Whether the family uses the `r` parameter.
    pub fn has_r(self) -> bool {
        matches!(self, Family::MixedSR | Family::IsotropicSR)
    }

    /// Tensor-product families factor as `prod w(|k_i|)`.
    pub fn is_product(self) -> bool {
        matches!(self, Family::MixedSR | Family::MixedInf)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| {
            let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
            Error::InvalidParameter(format!("unknown family '{s}'; expected one of: {}", names.join(", ")))
        })
    }
}

/// A weight family together with its parameters `(s, r, d)`.
///
/// Immutable once constructed; all evaluation is pure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    family: Family,
    s: f64,
    /// Only meaningful for the `*SR` families; stored as 0 otherwise.
    r: f64,
    d: usize,
}

impl WeightSpec {
    pub fn new(family: Family, s: f64, r: Option<f64>, d: usize) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidParameter(format!("s must be positive and finite (got {s})")));
        }
        if d == 0 || d > MAX_DIM {
            return Err(Error::InvalidParameter(format!("d must lie in 1..={MAX_DIM} (got {d})")));
        }
        if family == Family::H1Ratio && s <= 1.0 {
            return Err(Error::RequiresSGreaterOne(s));
        }
        let r = if family.has_r() {
            match r {
                Some(r) if r.is_finite() && r > 0.0 => r,
                Some(r) => {
                    return Err(Error::InvalidParameter(format!(
                        "r must be positive and finite for {family} (got {r}); use the *-inf family for r = inf"
                    )))
                }
                None => return Err(Error::InvalidParameter(format!("{family} requires r"))),
            }
        } else {
            0.0
        };
        Ok(Self { family, s, r, d })
    }

    pub fn mixed(s: f64, r: f64, d: usize) -> Result<Self> {
        Self::new(Family::MixedSR, s, Some(r), d)
    }

    pub fn mixed_inf(s: f64, d: usize) -> Result<Self> {
        Self::new(Family::MixedInf, s, None, d)
    }

    pub fn isotropic(s: f64, r: f64, d: usize) -> Result<Self> {
        Self::new(Family::IsotropicSR, s, Some(r), d)
    }

    pub fn isotropic_inf(s: f64, d: usize) -> Result<Self> {
        Self::new(Family::IsotropicInf, s, None, d)
    }

    pub fn h1_ratio(s: f64, d: usize) -> Result<Self> {
        Self::new(Family::H1Ratio, s, None, d)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn r(&self) -> Option<f64> {
        self.family.has_r().then_some(self.r)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// The isotropic families can be evaluated and enumerated, but no
    /// asymptotic constants are known for them.
    pub fn asymptotics_supported(&self) -> bool {
        !matches!(self.family, Family::IsotropicSR | Family::IsotropicInf)
    }

    /// `omega(k)`.
    pub fn evaluate(&self, k: &[i64]) -> Result<f64> {
        let rep = self.canonicalize(k)?;
        Ok(self.weight_of(&rep))
    }

    /// `ln omega(k)`, finite for every `k` even where `omega(k)` overflows.
    pub fn log_evaluate(&self, k: &[i64]) -> Result<f64> {
        let rep = self.canonicalize(k)?;
        Ok(self.log_weight_of(&rep))
    }

    fn canonicalize(&self, k: &[i64]) -> Result<Rep> {
        if k.len() != self.d {
            return Err(Error::WrongArity { expected: self.d, got: k.len() });
        }
        canonical_rep(k).ok_or_else(|| Error::InvalidParameter("coordinate exceeds u32 range".into()))
    }

    /// `omega` of a vector of absolute values, evaluated in the given order.
    ///
    /// Integer-valued inputs are combined into a single exact product before the
    /// final power, so symmetric and accidental ties produce identical bits.
    pub(crate) fn weight_of(&self, a: &[u32]) -> f64 {
        let w = match self.family {
            Family::MixedSR => {
                let p: f64 = a.iter().map(|&x| 1.0 + pow_r(x, self.r)).product();
                p.powf(self.s / self.r)
            }
            Family::MixedInf => {
                if let Some(exact) = exact_int_power_product(a.iter().map(|&x| x.max(1) as u128), self.s) {
                    exact
                } else {
                    let p: f64 = a.iter().map(|&x| x.max(1) as f64).product();
                    p.powf(self.s)
                }
            }
            Family::IsotropicSR => {
                let b: f64 = 1.0 + a.iter().map(|&x| pow_r(x, self.r)).sum::<f64>();
                b.powf(self.s / self.r)
            }
            Family::IsotropicInf => {
                let m = a.iter().copied().max().unwrap_or(0).max(1);
                exact_int_power_product(std::iter::once(m as u128), self.s).unwrap_or_else(|| (m as f64).powf(self.s))
            }
            Family::H1Ratio => {
                let p: f64 = a.iter().map(|&x| 1.0 + sq(x)).product();
                let q: f64 = 1.0 + a.iter().map(|&x| sq(x)).sum::<f64>();
                p.powf(self.s / 2.0) / q.sqrt()
            }
        };
        if w.is_finite() {
            w
        } else {
            self.log_weight_of(a).exp()
        }
    }

    pub(crate) fn log_weight_of(&self, a: &[u32]) -> f64 {
        match self.family {
            Family::MixedSR => {
                let r = self.r;
                self.s / r * a.iter().map(|&x| ln1p_pow(x, r)).sum::<f64>()
            }
            Family::MixedInf => self.s * a.iter().map(|&x| (x.max(1) as f64).ln()).sum::<f64>(),
            Family::IsotropicSR => {
                let r = self.r;
                let total: f64 = a.iter().map(|&x| pow_r(x, r)).sum();
                if total.is_finite() {
                    self.s / r * total.ln_1p()
                } else {
                    // log-sum-exp over {0} and {r ln x}
                    let logs: Vec<f64> = a.iter().filter(|&&x| x > 0).map(|&x| r * (x as f64).ln()).collect();
                    let m = logs.iter().copied().fold(0.0, f64::max);
                    let rest: f64 = (-m).exp() + logs.iter().map(|l| (l - m).exp()).sum::<f64>();
                    self.s / r * (m + rest.ln())
                }
            }
            Family::IsotropicInf => {
                let m = a.iter().copied().max().unwrap_or(0).max(1);
                self.s * (m as f64).ln()
            }
            Family::H1Ratio => {
                let num: f64 = a.iter().map(|&x| sq(x).ln_1p()).sum();
                let den = a.iter().map(|&x| sq(x)).sum::<f64>().ln_1p();
                0.5 * (self.s * num - den)
            }
        }
    }

    /// Weight of the vector `(m, 0, ..., 0)`, the smallest weight among points with `|k|_inf = m`.
    pub(crate) fn axis_weight(&self, m: u32) -> f64 {
        let mut rep = Rep::from_elem(0, self.d);
        rep[0] = m;
        self.weight_of(&rep)
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.r() {
            Some(r) => write!(f, "{}(s={}, r={}, d={})", self.family, self.s, r, self.d),
            None => write!(f, "{}(s={}, d={})", self.family, self.s, self.d),
        }
    }
}

/// Sorted absolute values of `k` in nonincreasing order, or `None` if a
/// coordinate does not fit in `u32`.
pub fn canonical_rep(k: &[i64]) -> Option<Rep> {
    let mut rep = Rep::with_capacity(k.len());
    for &x in k {
        rep.push(u32::try_from(x.unsigned_abs()).ok()?);
    }
    rep.sort_unstable_by(|a, b| b.cmp(a));
    Some(rep)
}

#[inline]
fn sq(x: u32) -> f64 {
    let x = x as f64;
    x * x
}

#[inline]
fn pow_r(x: u32, r: f64) -> f64 {
    if r.fract() == 0.0 && r <= 64.0 {
        (x as f64).powi(r as i32)
    } else {
        (x as f64).powf(r)
    }
}

/// `ln(1 + x^r)` without overflowing for large `x^r`.
#[inline]
fn ln1p_pow(x: u32, r: f64) -> f64 {
    if x == 0 {
        return 0.0;
    }
    let p = pow_r(x, r);
    if p.is_finite() && p < 1e300 {
        p.ln_1p()
    } else {
        r * (x as f64).ln() + (-r * (x as f64).ln()).exp().ln_1p()
    }
}

/// `prod x_i^s` computed exactly in `u128` when `s` is a small integer and no
/// overflow occurs; the single conversion to `f64` is correctly rounded.
fn exact_int_power_product(factors: impl Iterator<Item = u128>, s: f64) -> Option<f64> {
    if s.fract() != 0.0 || s > 64.0 {
        return None;
    }
    let e = s as u32;
    let mut acc: u128 = 1;
    for f in factors {
        acc = acc.checked_mul(f.checked_pow(e)?)?;
    }
    Some(acc as f64)
}
