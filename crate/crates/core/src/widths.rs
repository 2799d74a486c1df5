//! Widths (approximation, Kolmogorov, Bernstein, Weyl numbers) of the
//! embeddings, expressed through a [`SigmaPrefix`].
//!
//! `u_n` denotes the common value of approximation and Kolmogorov numbers,
//! `v_n` the common value of Bernstein and Weyl numbers. Where only a
//! two-sided estimate is known the result is an interval.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sigma::{best_index_set, sigma_prefix, SigmaPrefix};
use crate::weights::{Family, WeightSpec};

/// Source and target space of the embedding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Embedding {
    AtoA,
    AtoL2,
    FtoL2,
    AtoLinf,
    /// `2 < p < inf`
    AtoLp(f64),
    CmixToL2,
    AmixToH1,
    HmixToH1,
}

impl Embedding {
    pub const NAMES: [&'static str; 8] =
        ["a-to-a", "a-to-l2", "f-to-l2", "a-to-linf", "a-to-lp", "cmix-to-l2", "amix-to-h1", "hmix-to-h1"];

    /// Parses a name from [`Embedding::NAMES`]; `p` is required for `a-to-lp` only.
    pub fn from_name(name: &str, p: Option<f64>) -> Result<Self> {
        let e = match name {
            "a-to-a" => Embedding::AtoA,
            "a-to-l2" => Embedding::AtoL2,
            "f-to-l2" => Embedding::FtoL2,
            "a-to-linf" => Embedding::AtoLinf,
            "a-to-lp" => {
                let p = p.ok_or_else(|| Error::InvalidParameter("a-to-lp requires p".into()))?;
                return Embedding::lp(p);
            }
            "cmix-to-l2" => Embedding::CmixToL2,
            "amix-to-h1" => Embedding::AmixToH1,
            "hmix-to-h1" => Embedding::HmixToH1,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown embedding '{name}'; expected one of: {}",
                    Self::NAMES.join(", ")
                )))
            }
        };
        Ok(e)
    }

    /// `A_omega -> L_p`; `p = 2` and `p = inf` have their own variants.
    pub fn lp(p: f64) -> Result<Self> {
        if p > 2.0 && p.is_finite() {
            Ok(Embedding::AtoLp(p))
        } else {
            Err(Error::InvalidParameter(format!("a-to-lp needs 2 < p < inf (got {p}); use a-to-l2 or a-to-linf")))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Embedding::AtoA => "a-to-a",
            Embedding::AtoL2 => "a-to-l2",
            Embedding::FtoL2 => "f-to-l2",
            Embedding::AtoLinf => "a-to-linf",
            Embedding::AtoLp(_) => "a-to-lp",
            Embedding::CmixToL2 => "cmix-to-l2",
            Embedding::AmixToH1 => "amix-to-h1",
            Embedding::HmixToH1 => "hmix-to-h1",
        }
    }

    /// Checks that the weight matches the embedding.
    pub fn validate(&self, spec: &WeightSpec) -> Result<()> {
        match self {
            Embedding::AtoLp(p) if !(*p > 2.0 && p.is_finite()) => {
                Err(Error::InvalidParameter(format!("a-to-lp needs 2 < p < inf (got {p})")))
            }
            Embedding::CmixToL2 => {
                cmix_order(spec)?;
                Ok(())
            }
            Embedding::AmixToH1 | Embedding::HmixToH1 if spec.family() != Family::H1Ratio => {
                Err(Error::InvalidParameter(format!("{} is defined through the h1-ratio weight", self.name())))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Embedding::AtoLp(p) => write!(f, "a-to-lp(p={p})"),
            e => f.write_str(e.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum WidthKind {
    Approximation,
    Kolmogorov,
    Bernstein,
    Weyl,
}

impl WidthKind {
    pub const ALL: [WidthKind; 4] =
        [WidthKind::Approximation, WidthKind::Kolmogorov, WidthKind::Bernstein, WidthKind::Weyl];

    pub fn name(self) -> &'static str {
        match self {
            WidthKind::Approximation => "approximation",
            WidthKind::Kolmogorov => "kolmogorov",
            WidthKind::Bernstein => "bernstein",
            WidthKind::Weyl => "weyl",
        }
    }

    /// Approximation and Kolmogorov numbers coincide for every embedding here.
    fn is_u(self) -> bool {
        matches!(self, WidthKind::Approximation | WidthKind::Kolmogorov)
    }
}

impl fmt::Display for WidthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthQuery {
    pub embedding: Embedding,
    pub kind: WidthKind,
    pub n: usize,
}

impl WidthQuery {
    pub fn new(embedding: Embedding, kind: WidthKind, n: usize) -> Self {
        Self { embedding, kind, n }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthValue {
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
}

impl WidthValue {
    pub fn exact(v: f64) -> Self {
        Self { lower: v, upper: v, exact: true }
    }

    pub fn interval(lower: f64, upper: f64) -> Self {
        debug_assert!(lower <= upper, "[{lower}, {upper}]");
        Self { lower, upper, exact: false }
    }

    /// The value of an exact result.
    pub fn value(&self) -> Option<f64> {
        self.exact.then_some(self.lower)
    }
}

/// `v_n = (sum_{k<=n} sigma_k^{-2})^{-1/2}`.
pub fn v_n(prefix: &SigmaPrefix, n: usize) -> Result<f64> {
    // same rounding as the h = n term of `sup_over_h`, so v_n <= u_n holds in floats
    Ok(prefix.cum(n)?.recip().sqrt())
}

/// `u_n = sup_{h>=n} ((h-n+1) / sum_{k<=h} sigma_k^{-2})^{1/2}` and its smallest maximizer.
///
/// Two stopping rules, both sound for any nonincreasing `sigma`:
/// * before `h`: `2 sigma_{ceil(h/2)}^2` below the incumbent, because
///   `sum_{k<=h'} sigma_k^{-2} >= (h'/2) sigma_{ceil(h'/2)}^{-2}`;
/// * after `h`: `sigma_h^2` at most the incumbent, because every later ratio is
///   `(A + x) / (B + x sigma_h^{-2})` at best, which never exceeds `max(A/B, sigma_h^2)`.
pub fn sup_over_h(prefix: &SigmaPrefix, n: usize) -> Result<(f64, usize)> {
    prefix.sigma(n)?;
    let mut best = 0.0f64;
    let mut arg = n;
    let mut h = n;
    loop {
        let half = prefix.values[h.div_ceil(2) - 1];
        if 2.0 * half * half * (1.0 + 1e-12) < best {
            break;
        }
        if h > prefix.n_max {
            return Err(Error::PrefixExhausted { needed: 2 * h });
        }
        let ratio = (h - n + 1) as f64 / prefix.cum_inv_sq[h - 1];
        if ratio > best {
            best = ratio;
            arg = h;
        }
        let s = prefix.values[h - 1];
        if s * s <= best {
            break;
        }
        h += 1;
    }
    Ok((best.sqrt(), arg))
}

fn cmix_order(spec: &WeightSpec) -> Result<u32> {
    let s = spec.s();
    if !spec.family().is_product() || s.fract() != 0.0 || s > 64.0 {
        return Err(Error::InvalidParameter(format!(
            "cmix-to-l2 needs a mixed weight with integer smoothness m (got {spec})"
        )));
    }
    Ok(s as u32)
}

/// Evaluates widths on one prefix, building the `(m, 2m)` companion prefix
/// for `cmix-to-l2` on first use.
pub struct WidthEvaluator {
    prefix: SigmaPrefix,
    companion: OnceLock<Result<SigmaPrefix>>,
    // u_n is shared by several embeddings and kinds
    sup_cache: Mutex<HashMap<usize, f64>>,
}

impl WidthEvaluator {
    pub fn new(prefix: SigmaPrefix) -> Self {
        Self { prefix, companion: OnceLock::new(), sup_cache: Mutex::default() }
    }

    fn u(&self, n: usize) -> Result<f64> {
        if let Some(&u) = self.sup_cache.lock().unwrap().get(&n) {
            return Ok(u);
        }
        let u = sup_over_h(&self.prefix, n)?.0;
        self.sup_cache.lock().unwrap().insert(n, u);
        Ok(u)
    }

    pub fn prefix(&self) -> &SigmaPrefix {
        &self.prefix
    }

    fn companion(&self) -> Result<&SigmaPrefix> {
        self.companion
            .get_or_init(|| {
                let spec = &self.prefix.spec;
                let m = cmix_order(spec)? as f64;
                sigma_prefix(&WeightSpec::mixed(m, 2.0 * m, spec.d())?, self.prefix.n_max)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn width(&self, q: &WidthQuery) -> Result<WidthValue> {
        let p = &self.prefix;
        let n = q.n;
        q.embedding.validate(&p.spec)?;
        let sigma = p.sigma(n)?;
        let w = match q.embedding {
            Embedding::AtoA | Embedding::FtoL2 | Embedding::HmixToH1 => WidthValue::exact(sigma),
            Embedding::AtoL2 | Embedding::AmixToH1 => {
                if q.kind.is_u() {
                    WidthValue::exact(self.u(n)?)
                } else {
                    WidthValue::exact(v_n(p, n)?)
                }
            }
            Embedding::AtoLinf | Embedding::AtoLp(_) => {
                let lower = if q.kind.is_u() { self.u(n)? } else { v_n(p, n)? };
                WidthValue::interval(lower, sigma)
            }
            Embedding::CmixToL2 => {
                if q.kind.is_u() {
                    let lower = self.u(n)?;
                    let scale = 2f64.powf(p.spec.d() as f64 / 2.0);
                    WidthValue::interval(lower, scale * self.companion()?.sigma(n)?)
                } else {
                    WidthValue::exact(v_n(p, n)?)
                }
            }
        };
        Ok(w)
    }

    /// Widths for every `n` in `ns`, evaluated in parallel.
    pub fn widths(&self, embedding: Embedding, kind: WidthKind, ns: &[usize]) -> Result<Vec<WidthValue>> {
        if embedding == Embedding::CmixToL2 && kind.is_u() {
            self.companion()?;
        }
        ns.par_iter().map(|&n| self.width(&WidthQuery::new(embedding, kind, n))).collect()
    }
}

/// One-shot width evaluation on an existing prefix.
pub fn width(prefix: &SigmaPrefix, q: &WidthQuery) -> Result<WidthValue> {
    WidthEvaluator::new(prefix.clone()).width(q)
}

/// Computes a prefix long enough for `q`, doubling it until the
/// stopping certificate of the sup over `h` fires.
pub fn width_auto(spec: &WeightSpec, q: &WidthQuery) -> Result<WidthValue> {
    evaluator_for(spec, q.embedding, q.kind, q.n)?.width(q)
}

/// An evaluator whose prefix covers every width index up to `n_max`.
pub fn evaluator_for(spec: &WeightSpec, embedding: Embedding, kind: WidthKind, n_max: usize) -> Result<WidthEvaluator> {
    embedding.validate(spec)?;
    let mut len = n_max.max(16);
    if kind.is_u() && !matches!(embedding, Embedding::AtoA | Embedding::FtoL2 | Embedding::HmixToH1) {
        len = len.saturating_mul(4);
    }
    loop {
        let ev = WidthEvaluator::new(sigma_prefix(spec, len)?);
        match ev.width(&WidthQuery::new(embedding, kind, n_max)) {
            Ok(_) => return Ok(ev),
            Err(Error::PrefixExhausted { needed }) => {
                log::info!("prefix of length {len} too short, growing to {needed}");
                len = needed.max(2 * len);
            }
            Err(e) => return Err(e),
        }
    }
}

/// `sup_{l not in Lambda} 1/omega(l)` for the optimal index set `Lambda` of size `n - 1`.
///
/// A minimizer of `omega` outside `Lambda` can always be moved towards the
/// origin one unit step at a time without increasing the weight until all its
/// inward neighbours lie in `Lambda`; so it suffices to look at the origin and
/// the outward neighbours of `Lambda`.
pub fn s_lambda_error(spec: &WeightSpec, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n starts at 1".into()));
    }
    let lambda = best_index_set(spec, n);
    let members: HashSet<&[i64]> = lambda.iter().map(Vec::as_slice).collect();
    let mut best = f64::INFINITY;
    let mut consider = |k: &[i64]| -> Result<()> {
        if !members.contains(k) {
            best = best.min(spec.evaluate(k)?);
        }
        Ok(())
    };
    consider(&vec![0; spec.d()])?;
    let mut cand = vec![0i64; spec.d()];
    for k in &lambda {
        for i in 0..k.len() {
            let steps: &[i64] = match k[i].signum() {
                0 => &[1, -1],
                s if s > 0 => &[1],
                _ => &[-1],
            };
            for &step in steps {
                cand.copy_from_slice(k);
                cand[i] += step;
                consider(&cand)?;
            }
        }
    }
    Ok(1.0 / best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prefix(spec: WeightSpec, n: usize) -> SigmaPrefix {
        sigma_prefix(&spec, n).unwrap()
    }

    #[test]
    fn examples() {
        let p = prefix(WeightSpec::mixed_inf(2.0, 2).unwrap(), 200);
        let w = |e, k, n| width(&p, &WidthQuery::new(e, k, n)).unwrap();
        assert_eq!(w(Embedding::AtoA, WidthKind::Approximation, 5), WidthValue::exact(1.0));
        assert_eq!(w(Embedding::AtoL2, WidthKind::Bernstein, 4), WidthValue::exact(0.5));
        assert_eq!(w(Embedding::AtoL2, WidthKind::Approximation, 1), WidthValue::exact(1.0));

        let h = prefix(WeightSpec::h1_ratio(2.0, 1).unwrap(), 10);
        let v = width(&h, &WidthQuery::new(Embedding::HmixToH1, WidthKind::Approximation, 2)).unwrap();
        assert!((v.value().unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sup_over_constant_prefix() {
        let spec = WeightSpec::mixed_inf(1.0, 1).unwrap();
        let p = SigmaPrefix::from_weights(spec, &[1.0; 100]).unwrap();
        assert_eq!(sup_over_h(&p, 1).unwrap(), (1.0, 1));
    }

    #[test]
    fn sup_matches_exhaustive_scan() {
        let p = prefix(WeightSpec::mixed_inf(1.0, 1).unwrap(), 10_000);
        let n = 10;
        let (v, h) = sup_over_h(&p, n).unwrap();
        let mut best = (0.0, 0);
        for h in n..=10_000 {
            let r = (h - n + 1) as f64 / p.cum_inv_sq[h - 1];
            if r > best.0 {
                best = (r, h);
            }
        }
        assert_eq!((v, h), (best.0.sqrt(), best.1));
    }

    #[test]
    fn argmax_lies_in_window() {
        let s = 1.0;
        let p = prefix(WeightSpec::mixed_inf(s, 1).unwrap(), 20_000);
        let n = 1000usize;
        let (_, h) = sup_over_h(&p, n).unwrap();
        let slack = (n as f64).powf(0.9);
        let lo = (1.0 + 0.5 / s) * (n - 1) as f64 - slack;
        let hi = (1.0 + 1.0 / s) * (n - 1) as f64 + slack;
        assert!(lo <= h as f64 && h as f64 <= hi, "h = {h}");
    }

    #[test]
    fn short_prefix_reports_needed_length() {
        let p = prefix(WeightSpec::mixed_inf(1.0, 1).unwrap(), 50);
        let err = width(&p, &WidthQuery::new(Embedding::AtoL2, WidthKind::Kolmogorov, 40)).unwrap_err();
        assert!(matches!(err, Error::PrefixExhausted { needed } if needed > 50));
        let err = width(&p, &WidthQuery::new(Embedding::AtoA, WidthKind::Weyl, 51)).unwrap_err();
        assert_eq!(err, Error::PrefixTooShort { needed: 51, have: 50 });
        let ok = width_auto(&p.spec, &WidthQuery::new(Embedding::AtoL2, WidthKind::Kolmogorov, 40)).unwrap();
        assert!(ok.exact && ok.lower < p.values[39]);
    }

    #[test]
    fn lp_domain() {
        assert!(Embedding::lp(2.0).is_err());
        assert!(Embedding::lp(f64::INFINITY).is_err());
        assert!(Embedding::lp(1.5).is_err());
        assert_eq!(Embedding::lp(4.0).unwrap(), Embedding::AtoLp(4.0));
        assert!(Embedding::from_name("a-to-lq", None).unwrap_err().to_string().contains("cmix-to-l2"));
    }

    #[test]
    fn cmix_bounds() {
        let spec = WeightSpec::mixed_inf(1.0, 2).unwrap();
        let ev = WidthEvaluator::new(prefix(spec, 4000));
        for n in [1, 5, 30, 200] {
            let u = ev.width(&WidthQuery::new(Embedding::CmixToL2, WidthKind::Approximation, n)).unwrap();
            assert!(!u.exact && u.lower <= u.upper);
            let v = ev.width(&WidthQuery::new(Embedding::CmixToL2, WidthKind::Weyl, n)).unwrap();
            assert!(v.exact && v.lower <= u.lower);
        }
        let bad = WidthEvaluator::new(prefix(WeightSpec::mixed_inf(1.5, 2).unwrap(), 10));
        assert!(bad.width(&WidthQuery::new(Embedding::CmixToL2, WidthKind::Weyl, 1)).is_err());
        let iso = WidthEvaluator::new(prefix(WeightSpec::isotropic_inf(1.0, 2).unwrap(), 10));
        assert!(iso.width(&WidthQuery::new(Embedding::AmixToH1, WidthKind::Weyl, 1)).is_err());
    }

    #[test]
    fn s_lambda_examples() {
        let e = |spec: WeightSpec, n| s_lambda_error(&spec, n).unwrap();
        assert_eq!(e(WeightSpec::mixed_inf(2.0, 2).unwrap(), 5), 1.0);
        assert_eq!(e(WeightSpec::mixed_inf(1.0, 1).unwrap(), 4), 0.5);
        assert_eq!(e(WeightSpec::mixed(1.0, 2.0, 2).unwrap(), 1), 1.0);
    }
}
