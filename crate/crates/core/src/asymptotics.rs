//! Asymptotic constants, the series `S`, convergence tables and the
//! auxiliary integral.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::summation::CompensatedSum;
use crate::widths::{Embedding, WidthEvaluator, WidthKind, WidthQuery};

/// Default tolerance when `S` is needed inside another constant.
pub const S_TOL: f64 = 1e-12;

/// Largest truncation index `series_s` will sum to.
pub const MAX_SERIES_TERMS: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum ConstantSpec {
    /// `(2^d / (d-1)!)^s`, the limit of `sigma_n / (n^{-s} (ln n)^{s(d-1)})` for mixed weights.
    MixL2Sigma { d: u32, s: f64 },
    /// `(2s/(2s+1))^s`, the factor from `sigma_n` to approximation numbers into `L_2`.
    TransferUV { s: f64 },
    /// `sqrt(2s+1)`, the factor from `sigma_n` to Bernstein numbers into `L_2`.
    TransferVW { s: f64 },
    /// `C(d) = [1 + (1 + 2/log2(d-1)) / (d-1)]^{d-1}`, `d >= 3`.
    Preasymptotic { d: u32 },
    /// `(2d)^{s-1} (2S+1)^{(s-1)(d-1)}`, `s > 1`.
    H1Constant { d: u32, s: f64 },
    /// `S = sum_{k>=1} (k^2+1)^{-s/(2(s-1))}`, `s > 1`.
    SSeries { s: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite (got {v})")))
    }
}

fn dim(d: u32) -> Result<()> {
    if d == 0 {
        return Err(Error::Domain("d must be at least 1".into()));
    }
    Ok(())
}

pub fn constant(c: &ConstantSpec) -> Result<f64> {
    match *c {
        ConstantSpec::MixL2Sigma { d, s } => {
            dim(d)?;
            positive("s", s)?;
            let fact: f64 = (1..d).map(f64::from).product();
            Ok((2f64.powi(d as i32) / fact).powf(s))
        }
        ConstantSpec::TransferUV { s } => {
            positive("s", s)?;
            Ok((2.0 * s / (2.0 * s + 1.0)).powf(s))
        }
        ConstantSpec::TransferVW { s } => {
            positive("s", s)?;
            Ok((2.0 * s + 1.0).sqrt())
        }
        ConstantSpec::Preasymptotic { d } => {
            if d < 3 {
                return Err(Error::Domain(format!("preasymptotic constant needs d >= 3 (got {d})")));
            }
            let m = f64::from(d - 1);
            Ok((1.0 + (1.0 + 2.0 / m.log2()) / m).powf(m))
        }
        ConstantSpec::H1Constant { d, s } => {
            dim(d)?;
            if !(s > 1.0) {
                return Err(Error::Domain(format!("h1 constant needs s > 1 (got {s})")));
            }
            let base = (2.0 * f64::from(d)).powf(s - 1.0);
            if d == 1 {
                return Ok(base);
            }
            let big_s = series_s(s, S_TOL)?;
            Ok(base * (2.0 * big_s + 1.0).powf((s - 1.0) * f64::from(d - 1)))
        }
        ConstantSpec::SSeries { s } => series_s(s, S_TOL),
    }
}

/// `sigma_n <= (C(d)/n)^{s / (r (1 + log2(d-1)))}`, valid for `n >= 2`, `d >= 3`, `1 <= r < inf`.
pub fn preasymptotic_bound(d: u32, s: f64, r: f64, n: u64) -> Result<f64> {
    if !(1.0..f64::INFINITY).contains(&r) {
        return Err(Error::Domain(format!("preasymptotic bound needs 1 <= r < inf (got {r})")));
    }
    positive("s", s)?;
    if n < 2 {
        return Err(Error::Domain("preasymptotic bound holds for n >= 2".into()));
    }
    let c = constant(&ConstantSpec::Preasymptotic { d })?;
    let e = s / (r * (1.0 + f64::from(d - 1).log2()));
    Ok((c / n as f64).powf(e))
}

/// `S = sum_{k>=1} (k^2+1)^{-p}` with `p = s/(2(s-1))`, to absolute error `tol`.
///
/// The tail after `K` terms is enclosed by
/// `[(1+K^{-2})^{-p} (K+1)^{1-2p}, K^{1-2p}] / (2p-1)`; the midpoint is added and
/// `K` is grown until the half-width drops below `tol`.
pub fn series_s(s: f64, tol: f64) -> Result<f64> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(Error::Domain(format!("series S needs s > 1 (got {s})")));
    }
    positive("tol", tol)?;
    let p = s / (2.0 * (s - 1.0));
    let q = 2.0 * p - 1.0;
    let tail = |k: f64| {
        let hi = k.powf(-q) / q;
        let lo = (1.0 + k.powi(-2)).powf(-p) * (k + 1.0).powf(-q) / q;
        (lo, hi)
    };
    let mut k_max: u64 = 16;
    loop {
        let (lo, hi) = tail(k_max as f64);
        if 0.5 * (hi - lo) < tol {
            break;
        }
        if k_max >= MAX_SERIES_TERMS {
            return Err(Error::ResourceCap(format!(
                "series S for s = {s} needs more than {MAX_SERIES_TERMS} terms at tol {tol:e}"
            )));
        }
        k_max = (k_max * 2).min(MAX_SERIES_TERMS);
    }
    let (lo, hi) = tail(k_max as f64);
    let mut acc: CompensatedSum = (1..=k_max).map(|k| (k as f64 * k as f64 + 1.0).powf(-p)).collect();
    acc.add(0.5 * (lo + hi));
    Ok(acc.total())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// The width, or the upper end of its interval.
    pub raw: f64,
    pub raw_lower: f64,
    /// `n^{-alpha} (ln n)^beta`
    pub normalizer: f64,
    pub ratio: f64,
    pub target: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub embedding: Embedding,
    pub kind: WidthKind,
    pub alpha: f64,
    pub beta: f64,
    pub rows: Vec<ConvergenceRow>,
}

pub fn normalizer(n: usize, alpha: f64, beta: f64) -> f64 {
    let n = n as f64;
    n.powf(-alpha) * n.ln().powf(beta)
}

/// Width divided by `n^{-alpha} (ln n)^beta` along `n_grid`.
pub fn convergence_table(
    ev: &WidthEvaluator,
    embedding: Embedding,
    kind: WidthKind,
    n_grid: &[usize],
    alpha: f64,
    beta: f64,
    target: Option<f64>,
) -> Result<ConvergenceTable> {
    if n_grid.is_empty() || n_grid[0] < 3 || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("n grid must be strictly increasing and start at n >= 3".into()));
    }
    let rows = n_grid
        .par_iter()
        .map(|&n| {
            let w = ev.width(&WidthQuery::new(embedding, kind, n))?;
            let norm = normalizer(n, alpha, beta);
            Ok(ConvergenceRow { n, raw: w.upper, raw_lower: w.lower, normalizer: norm, ratio: w.upper / norm, target })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable { embedding, kind, alpha, beta, rows })
}

/// `int_{a/n}^1 y^s (ln n / ln(yn))^beta dy`, which tends to `1/(s+1)` as `n -> inf`.
///
/// Integrated in `u = ln y`, where the integrand `e^{(s+1)u} (ln n / (u + ln n))^beta`
/// is smooth and bounded on `[ln(a/n), 0]`.
pub fn aux_integral(s: f64, beta: f64, a: f64, n: u64) -> Result<f64> {
    positive("s", s)?;
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("beta must be nonnegative (got {beta})")));
    }
    if !(a > 1.0 && a.is_finite()) {
        return Err(Error::Domain(format!("a must exceed 1 (got {a})")));
    }
    if !(n >= 2 && a < n as f64) {
        return Err(Error::Domain(format!("need a/n < 1 (a = {a}, n = {n})")));
    }
    let ln_n = (n as f64).ln();
    let lo = (a / n as f64).ln();
    let f = |u: f64| ((s + 1.0) * u).exp() * (ln_n / (u + ln_n)).powf(beta);
    let (v, _) = integrate(f, lo, 0.0, 1e-11)?;
    Ok(v)
}
