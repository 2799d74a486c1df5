//! Exact counts of lattice points under the H^1 ratio weight:
//! `C(r,d)` over `Z^d`, `A(r,l)` over `N^l` and the split counts `A(r,l,j)`.
//!
//! A point is counted when `omega(k) <= (1+r^2)^{(s-1)/2}`, equivalently
//! `prod (1+k_j^2)^s <= (1+r^2)^{s-1} (1 + sum k_j^2)`. For rational
//! `s = p/q` both sides raised to the `q`-th power are integers, which is
//! what settles every comparison the floating-point filter cannot.

use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::series_s;
use crate::error::{Error, Result};
use crate::sigma::sigma_prefix;
use crate::weights::WeightSpec;

/// Log-domain margin above which the floating-point verdict is trusted.
const FILTER_MARGIN: f64 = 1e-9;

/// Relative slack for comparing `sigma_n` against interval endpoints that are
/// evaluated through a different formula.
pub const SANDWICH_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Smoothness {
    Rational { p: u64, q: u64 },
    Real { s: f64 },
}

impl Smoothness {
    pub fn rational(p: u64, q: u64) -> Result<Self> {
        if q == 0 || p <= q {
            return Err(Error::RequiresSGreaterOne(p as f64 / q as f64));
        }
        let g = gcd(p, q);
        Ok(Smoothness::Rational { p: p / g, q: q / g })
    }

    /// Recognizes `s` as a fraction with denominator at most 1000 when it is
    /// one to within rounding; otherwise falls back to a guarded float.
    pub fn from_f64(s: f64) -> Result<Self> {
        if !(s > 1.0 && s.is_finite()) {
            return Err(Error::RequiresSGreaterOne(s));
        }
        for q in 1..=1000u64 {
            let p = (s * q as f64).round();
            if (p - s * q as f64).abs() <= 1e-12 * p && p < 1e12 {
                return Self::rational(p as u64, q);
            }
        }
        Ok(Smoothness::Real { s })
    }

    pub fn value(&self) -> f64 {
        match *self {
            Smoothness::Rational { p, q } => p as f64 / q as f64,
            Smoothness::Real { s } => s,
        }
    }
}

impl fmt::Display for Smoothness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Smoothness::Rational { p, q: 1 } => write!(f, "{p}"),
            Smoothness::Rational { p, q } => write!(f, "{p}/{q}"),
            Smoothness::Real { s } => write!(f, "{s}"),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The threshold test for one radius `r`.
#[derive(Debug, Clone, Copy)]
struct Threshold {
    s: Smoothness,
    sv: f64,
    r: u64,
    /// `(s-1) ln(1+r^2)`
    log_rhs: f64,
}

/// Outcome of one comparison: whether the point is inside, and whether the
/// verdict is certain.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Verdict {
    inside: bool,
    certain: bool,
}

impl Threshold {
    fn new(s: Smoothness, r: u64) -> Self {
        let sv = s.value();
        let r2 = (r as f64) * (r as f64);
        Self { s, sv, r, log_rhs: (sv - 1.0) * r2.ln_1p() }
    }

    fn test(&self, k: &[u64]) -> Verdict {
        let mut log_prod = 0.0;
        let mut sum_sq = 0.0;
        for &x in k {
            let x2 = (x as f64) * (x as f64);
            log_prod += x2.ln_1p();
            sum_sq += x2;
        }
        let margin = self.sv * log_prod - self.log_rhs - sum_sq.ln_1p();
        if margin < -FILTER_MARGIN {
            return Verdict { inside: true, certain: true };
        }
        if margin > FILTER_MARGIN {
            return Verdict { inside: false, certain: true };
        }
        match self.s {
            Smoothness::Rational { p, q } => Verdict { inside: exact_leq(k, p, q, self.r), certain: true },
            Smoothness::Real { .. } => Verdict { inside: margin <= 0.0, certain: false },
        }
    }
}

/// `prod (1+k_j^2)^p <= (1+r^2)^{p-q} (1 + sum k_j^2)^q` in exact integers.
fn exact_leq(k: &[u64], p: u64, q: u64, r: u64) -> bool {
    let one_plus_sq = |x: u64| BigUint::from(x) * BigUint::from(x) + 1u32;
    let mut lhs = BigUint::from(1u32);
    let mut sum = BigUint::from(1u32);
    for &x in k {
        lhs *= one_plus_sq(x).pow(p as u32);
        sum += BigUint::from(x) * BigUint::from(x);
    }
    let rhs = one_plus_sq(r).pow((p - q) as u32) * sum.pow(q as u32);
    lhs <= rhs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountResult {
    pub r: u64,
    /// `d` for `C(r,d)`, `l` for `A(r,l)` and `A(r,l,j)`.
    pub d_or_ell: u32,
    pub j: Option<u32>,
    pub r_ell: Option<u64>,
    pub count: u64,
    /// False when some comparison fell inside the float guard band for irrational `s`.
    pub exact: bool,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    count: u64,
    uncertain: bool,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally { count: self.count + o.count, uncertain: self.uncertain || o.uncertain }
    }
}

/// Per-coordinate ranges `[lo_i, hi_i]`; depth-first with the remaining
/// coordinates held at their lower ends, breaking once that already fails.
fn count_ranges(th: &Threshold, ranges: &[(u64, u64)]) -> Tally {
    if ranges.iter().any(|&(lo, hi)| lo > hi) {
        return Tally::default();
    }
    let base: Vec<u64> = ranges.iter().map(|r| r.0).collect();
    // the first coordinate is split across workers
    (ranges[0].0..=ranges[0].1)
        .into_par_iter()
        .map(|v| {
            let mut k = base.clone();
            k[0] = v;
            let verdict = th.test(&k);
            if !verdict.inside {
                return Tally { count: 0, uncertain: !verdict.certain };
            }
            ranges_dfs(th, ranges, &mut k, 1, !verdict.certain)
        })
        .reduce(Tally::default, Tally::merge)
}

fn ranges_dfs(th: &Threshold, ranges: &[(u64, u64)], k: &mut [u64], i: usize, uncertain: bool) -> Tally {
    if i == k.len() {
        return Tally { count: 1, uncertain };
    }
    let (lo, hi) = ranges[i];
    let mut tally = Tally { count: 0, uncertain };
    for v in lo..=hi {
        k[i] = v;
        let verdict = th.test(k);
        tally.uncertain |= !verdict.certain;
        if !verdict.inside {
            break;
        }
        tally = tally.merge(ranges_dfs(th, ranges, k, i + 1, !verdict.certain));
    }
    k[i] = lo;
    tally
}

/// `C(r,d)`: points of `Z^d` with `|k|_inf <= box_radius` under the threshold
/// of radius `r`. Each sign is visited as its own branch.
pub fn count_c_in_box(s: Smoothness, r: u64, d: u32, box_radius: u64) -> Result<CountResult> {
    if r == 0 || d == 0 {
        return Err(Error::InvalidParameter("count_c needs r >= 1 and d >= 1".into()));
    }
    let th = Threshold::new(s, r);
    let d = d as usize;
    let b = box_radius as i64;
    let tally = (-b..=b)
        .into_par_iter()
        .map(|v| {
            let mut k = vec![0i64; d];
            k[0] = v;
            let mut abs = vec![0u64; d];
            abs[0] = v.unsigned_abs();
            let verdict = th.test(&abs);
            if !verdict.inside {
                return Tally { count: 0, uncertain: !verdict.certain };
            }
            signed_dfs(&th, b, &mut k, &mut abs, 1, !verdict.certain)
        })
        .reduce(Tally::default, Tally::merge);
    Ok(CountResult { r, d_or_ell: d as u32, j: None, r_ell: None, count: tally.count, exact: !tally.uncertain })
}

fn signed_dfs(th: &Threshold, b: i64, k: &mut [i64], abs: &mut [u64], i: usize, uncertain: bool) -> Tally {
    if i == k.len() {
        return Tally { count: 1, uncertain };
    }
    let mut tally = Tally { count: 0, uncertain };
    for sign in [1i64, -1] {
        let start = if sign == 1 { 0 } else { 1 };
        for m in start..=b {
            k[i] = sign * m;
            abs[i] = m as u64;
            let verdict = th.test(abs);
            tally.uncertain |= !verdict.certain;
            if !verdict.inside {
                break;
            }
            tally = tally.merge(signed_dfs(th, b, k, abs, i + 1, !verdict.certain));
        }
    }
    k[i] = 0;
    abs[i] = 0;
    tally
}

/// `C(r,d)` over the box `|k_j| <= r`, which contains every counted point.
pub fn count_c(s: Smoothness, r: u64, d: u32) -> Result<CountResult> {
    count_c_in_box(s, r, d, r)
}

/// `A(r,l)`: points of `N^l` (all coordinates positive) under the threshold.
pub fn count_a(s: Smoothness, r: u64, ell: u32) -> Result<CountResult> {
    if r == 0 || ell == 0 {
        return Err(Error::InvalidParameter("count_a needs r >= 1 and l >= 1".into()));
    }
    let th = Threshold::new(s, r);
    let ranges = vec![(1, r); ell as usize];
    let tally = count_ranges(&th, &ranges);
    Ok(CountResult { r, d_or_ell: ell, j: None, r_ell: None, count: tally.count, exact: !tally.uncertain })
}

/// `A(r,l,j)`: points of `N^l` with `k_1..k_j <= r_l < k_{j+1}..k_l`.
pub fn count_a_split(s: Smoothness, r: u64, ell: u32, j: u32, r_ell: u64) -> Result<CountResult> {
    if r == 0 || ell == 0 || j > ell || r_ell == 0 || r_ell > r {
        return Err(Error::InvalidParameter(format!(
            "count_a_split needs 1 <= l, 0 <= j <= l, 1 <= r_l <= r (got r={r}, l={ell}, j={j}, r_l={r_ell})"
        )));
    }
    let th = Threshold::new(s, r);
    let ranges: Vec<(u64, u64)> = (0..ell).map(|i| if i < j { (1, r_ell) } else { (r_ell + 1, r) }).collect();
    let tally = count_ranges(&th, &ranges);
    Ok(CountResult { r, d_or_ell: ell, j: Some(j), r_ell: Some(r_ell), count: tally.count, exact: !tally.uncertain })
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `lambda_l = (s-1)/(2 s l)`, the midpoint of the admissible interval.
pub fn lambda(s: f64, ell: u32) -> f64 {
    (s - 1.0) / (2.0 * s * f64::from(ell))
}

/// `r_l = floor(r^{lambda_l})`, at least 1.
pub fn split_radius(s: f64, r: u64, ell: u32) -> u64 {
    ((r as f64).powf(lambda(s, ell)).floor() as u64).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub r: u64,
    /// `C`, `A` or `A-split`
    pub quantity: String,
    pub d_or_ell: u32,
    pub j: Option<u32>,
    pub r_ell: Option<u64>,
    pub count: u64,
    pub ratio: f64,
    pub target: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub s: f64,
    pub d: u32,
    pub series_s: f64,
    /// `2d (2S+1)^{d-1}`
    pub target_c: f64,
    pub rows: Vec<LimitRow>,
    pub exact: bool,
}

/// Ratios `C(r,d)/r`, `A(r,l)/r` and `A(r,l,j)/r` along `r_grid` with their limits.
pub fn verify_appendix_limits(s: Smoothness, d: u32, r_grid: &[u64]) -> Result<LimitReport> {
    if r_grid.is_empty() || r_grid.windows(2).any(|w| w[0] >= w[1]) || r_grid[0] == 0 {
        return Err(Error::InvalidParameter("r grid must be positive and strictly increasing".into()));
    }
    let sv = s.value();
    let big_s = series_s(sv, 1e-12)?;
    let target_c = 2.0 * f64::from(d) * (2.0 * big_s + 1.0).powi(d as i32 - 1);
    let mut rows = Vec::new();
    let mut exact = true;
    for &r in r_grid {
        let rf = r as f64;
        let c = count_c(s, r, d)?;
        exact &= c.exact;
        rows.push(LimitRow {
            r,
            quantity: "C".into(),
            d_or_ell: d,
            j: None,
            r_ell: None,
            count: c.count,
            ratio: c.count as f64 / rf,
            target: Some(target_c),
        });
        for ell in 1..=d {
            let a = count_a(s, r, ell)?;
            exact &= a.exact;
            rows.push(LimitRow {
                r,
                quantity: "A".into(),
                d_or_ell: ell,
                j: None,
                r_ell: None,
                count: a.count,
                ratio: a.count as f64 / rf,
                target: Some(f64::from(ell) * big_s.powi(ell as i32 - 1)),
            });
            if ell < 2 {
                continue;
            }
            let r_ell = split_radius(sv, r, ell);
            for j in 0..=ell {
                let a = count_a_split(s, r, ell, j, r_ell)?;
                exact &= a.exact;
                let target = if j == ell - 1 { big_s.powi(ell as i32 - 1) } else { 0.0 };
                rows.push(LimitRow {
                    r,
                    quantity: "A-split".into(),
                    d_or_ell: ell,
                    j: Some(j),
                    r_ell: Some(r_ell),
                    count: a.count,
                    ratio: a.count as f64 / rf,
                    target: Some(target),
                });
            }
        }
    }
    Ok(LimitReport { s: sv, d, series_s: big_s, target_c, rows, exact })
}

/// One exact decomposition identity at radius `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub r: u64,
    /// `c-from-a`: `C(r,d) = 1 + sum_l 2^l binom(d,l) A(r,l)`;
    /// `a-from-splits`: `A(r,l) = sum_j binom(l,j) A(r,l,j)`.
    pub identity: String,
    pub d_or_ell: u32,
    pub r_ell: Option<u64>,
    pub lhs: u64,
    pub rhs: u64,
    pub holds: bool,
}

/// Checks both decomposition identities at `r`, the split one for the radii
/// `1`, `floor(r^lambda)`, `ceil(r/2)` and `r` (duplicates dropped).
pub fn decomposition_checks(s: Smoothness, d: u32, r: u64) -> Result<Vec<IdentityRow>> {
    if d == 0 || r == 0 {
        return Err(Error::InvalidParameter("r and d must be positive".into()));
    }
    let mut rows = Vec::new();
    let mut rhs_c = 1u64;
    for ell in 1..=d {
        let a = count_a(s, r, ell)?.count;
        rhs_c += (1u64 << ell) * binomial(d as u64, ell as u64) * a;
        let mut radii = vec![1, split_radius(s.value(), r, ell), r.div_ceil(2), r];
        radii.sort_unstable();
        radii.dedup();
        for r_ell in radii {
            let mut sum = 0;
            for j in 0..=ell {
                sum += binomial(ell as u64, j as u64) * count_a_split(s, r, ell, j, r_ell)?.count;
            }
            rows.push(IdentityRow {
                r,
                identity: "a-from-splits".into(),
                d_or_ell: ell,
                r_ell: Some(r_ell),
                lhs: a,
                rhs: sum,
                holds: a == sum,
            });
        }
    }
    let c = count_c(s, r, d)?.count;
    rows.push(IdentityRow {
        r,
        identity: "c-from-a".into(),
        d_or_ell: d,
        r_ell: None,
        lhs: c,
        rhs: rhs_c,
        holds: c == rhs_c,
    });
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub s: f64,
    pub d: u32,
    pub r: u64,
    /// `C(r-1,d) + 1`
    pub n_first: u64,
    /// `C(r,d)`
    pub n_last: u64,
    /// `(1+r^2)^{-(s-1)/2}`
    pub lower: f64,
    /// `(1+(r-1)^2)^{-(s-1)/2}`
    pub upper: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Extremes of `n^{s-1} sigma_n` over the block.
    pub scaled_min: f64,
    pub scaled_max: f64,
    pub scaled_lower: f64,
    pub scaled_upper: f64,
    pub failures: u64,
    pub all_pass: bool,
}

/// Checks that `sigma_n` of the H^1 ratio weight lies between
/// `(1+r^2)^{-(s-1)/2}` and `(1+(r-1)^2)^{-(s-1)/2}` for every
/// `C(r-1,d) < n <= C(r,d)`, and the scaled form of the same bounds.
pub fn sandwich_check(s: Smoothness, d: u32, r: u64) -> Result<SandwichReport> {
    if r < 2 {
        return Err(Error::InvalidParameter("sandwich_check needs r >= 2".into()));
    }
    let sv = s.value();
    let c_prev = count_c(s, r - 1, d)?.count;
    let c_cur = count_c(s, r, d)?.count;
    let prefix = sigma_prefix(&WeightSpec::h1_ratio(sv, d as usize)?, c_cur as usize)?;
    let e = (sv - 1.0) / 2.0;
    let rf = r as f64;
    let lower = (1.0 + rf * rf).powf(-e);
    let upper = (1.0 + (rf - 1.0) * (rf - 1.0)).powf(-e);
    let scaled_lower = (c_prev as f64).powf(sv - 1.0) * lower;
    let scaled_upper = (c_cur as f64).powf(sv - 1.0) * upper;
    let lo = |x: f64| x * (1.0 - SANDWICH_SLACK);
    let hi = |x: f64| x * (1.0 + SANDWICH_SLACK);
    let mut rep = SandwichReport {
        s: sv,
        d,
        r,
        n_first: c_prev + 1,
        n_last: c_cur,
        lower,
        upper,
        sigma_min: f64::INFINITY,
        sigma_max: 0.0,
        scaled_min: f64::INFINITY,
        scaled_max: 0.0,
        scaled_lower,
        scaled_upper,
        failures: 0,
        all_pass: true,
    };
    for n in c_prev + 1..=c_cur {
        let sigma = prefix.values[n as usize - 1];
        let scaled = (n as f64).powf(sv - 1.0) * sigma;
        rep.sigma_min = rep.sigma_min.min(sigma);
        rep.sigma_max = rep.sigma_max.max(sigma);
        rep.scaled_min = rep.scaled_min.min(scaled);
        rep.scaled_max = rep.scaled_max.max(scaled);
        let ok = lo(lower) <= sigma && sigma <= hi(upper) && lo(scaled_lower) <= scaled && scaled <= hi(scaled_upper);
        if !ok {
            rep.failures += 1;
        }
    }
    rep.all_pass = rep.failures == 0 && c_cur > c_prev;
    Ok(rep)
}
