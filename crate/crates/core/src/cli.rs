//! Command-line front end. Every subcommand produces one table, written as
//! CSV (17 significant digits, `.` decimal point) or as a JSON array of
//! records. Diagnostics go to standard error through `log`.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::asymptotics::{self, aux_integral, constant, convergence_table, preasymptotic_bound, ConstantSpec};
use crate::error::{Error, Result};
use crate::lattice_count::{
    count_a, count_a_split, count_c, decomposition_checks, sandwich_check, split_radius, verify_appendix_limits,
    Smoothness,
};
use crate::sigma::{sigma_bruteforce, sigma_prefix};
use crate::weights::{Family, WeightSpec};
use crate::widths::{evaluator_for, sup_over_h, Embedding, WidthKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// A list of positive integers written as `7`, `1..12` (inclusive) or `10,100,1000`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Indices(pub Vec<u64>);

impl FromStr for Indices {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |t: &str| t.trim().replace('_', "").parse::<u64>().map_err(|e| format!("bad index '{t}': {e}"));
        let v = if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range {s}"));
            }
            (a..=b).collect()
        } else {
            s.split(',').map(num).collect::<std::result::Result<Vec<_>, _>>()?
        };
        if v.is_empty() || v.contains(&0) {
            return Err("indices must be positive".into());
        }
        Ok(Indices(v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct WeightArgs {
    /// Weight family
    #[arg(long, value_enum)]
    pub family: Family,
    /// Smoothness s > 0 (s > 1 for h1-ratio)
    #[arg(long)]
    pub s: f64,
    /// Norm parameter r, required by mixed-sr and isotropic-sr
    #[arg(long)]
    pub r: Option<f64>,
    /// Lattice dimension
    #[arg(long)]
    pub d: usize,
}

impl WeightArgs {
    pub fn spec(&self) -> Result<WeightSpec> {
        if !self.family.has_r() && self.r.is_some() {
            return Err(Error::InvalidParameter(format!("{} takes no r", self.family)));
        }
        WeightSpec::new(self.family, self.s, self.r, self.d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct EmbeddingArgs {
    /// Source and target spaces
    #[arg(long, value_parser = Embedding::NAMES)]
    pub embedding: String,
    /// Exponent p for a-to-lp, 2 < p < inf
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_enum)]
    pub kind: WidthKind,
}

impl EmbeddingArgs {
    pub fn embedding(&self) -> Result<Embedding> {
        Embedding::from_name(&self.embedding, self.p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantName {
    MixL2Sigma,
    TransferUv,
    TransferVw,
    Preasymptotic,
    H1Constant,
    SSeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// C(r,d) over Z^d
    C,
    /// A(r,l) over N^l
    A,
    /// A(r,l,j) with split radius r_l
    ASplit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Subcommand)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// sigma_1..sigma_N.
    /// Columns: n, sigma, cum_inv_sq [, oracle, rel_diff] [, preasymptotic_bound, holds]
    Sigma {
        #[command(flatten)]
        weight: WeightArgs,
        /// Prefix length N
        #[arg(long)]
        n: usize,
        /// Also compare against a full scan of the box |k|_inf <= R
        #[arg(long)]
        oracle_radius: Option<u32>,
        /// Also print the preasymptotic bound (C(d)/n)^{s/(r(1+log2(d-1)))} (mixed-sr, d >= 3)
        #[arg(long)]
        preasymptotic: bool,
    },
    /// Widths over a range of n.
    /// Columns: n, embedding, kind, lower, upper, exact, argmax_h
    Width {
        #[command(flatten)]
        weight: WeightArgs,
        #[command(flatten)]
        target: EmbeddingArgs,
        /// Width indices, e.g. 1..12 or 10,100,1000
        #[arg(long)]
        n: Indices,
    },
    /// Width divided by n^{-alpha} (ln n)^beta.
    /// Columns: n, raw, raw_lower, normalizer, ratio, target
    Converge {
        #[command(flatten)]
        weight: WeightArgs,
        #[command(flatten)]
        target: EmbeddingArgs,
        /// Increasing indices, all >= 3
        #[arg(long)]
        n_grid: Indices,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        /// Expected limit of the ratio, echoed in every row
        #[arg(long = "target")]
        target_value: Option<f64>,
    },
    /// One named constant.
    /// Columns: name, d, s, value
    Constants {
        #[arg(long, value_enum)]
        name: ConstantName,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        s: Option<f64>,
        /// Absolute tolerance for s-series
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Exact lattice counts for the h1-ratio threshold over an r grid.
    /// Columns: r, quantity, d_or_ell, j, r_ell, count, exact
    Count {
        #[arg(long, value_enum)]
        quantity: Quantity,
        /// Smoothness s > 1; fractions like 3/2 are accepted
        #[arg(long)]
        s: String,
        /// d for C, l for A and A-split
        #[arg(long)]
        d: u32,
        #[arg(long)]
        r_grid: Indices,
        /// j for a-split (default: every j in 0..=l)
        #[arg(long)]
        j: Option<u32>,
        /// Split radius for a-split (default: floor(r^{(s-1)/(2sl)}))
        #[arg(long)]
        r_ell: Option<u64>,
    },
    /// Limit ratios C/r, A/r, A-split/r with targets, the exact decomposition
    /// identities per r (count = left side, target = right side), then the sigma sandwich per r.
    /// Columns: table, r, quantity, d_or_ell, j, r_ell, count, ratio, target, lower, upper, pass
    AppendixVerify {
        #[arg(long)]
        s: String,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        r_grid: Indices,
        /// Radii r >= 2 for the sandwich check (default: 2..8)
        #[arg(long)]
        sandwich_r: Option<Indices>,
    },
    /// The auxiliary integral int_{a/n}^1 y^s (ln n / ln(yn))^beta dy along an n grid.
    /// Columns: s, beta, a, n, value, limit, abs_gap
    Integral {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 2.0)]
        a: f64,
        #[arg(long)]
        n_grid: Indices,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Parser)]
#[command(name = "widths", version, about = "Widths of weighted Wiener and mixed Sobolev embeddings", long_about = None)]
pub struct RunConfig {
    /// Output file (default: standard output)
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "WIDTHS_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u128),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => match u64::try_from(*v) {
                Ok(v) => v.into(),
                Err(_) => v.to_string().into(),
            },
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(serde_json::Value::Null, Into::into),
            Cell::Text(s) => s.clone().into(),
            Cell::Bool(b) => (*b).into(),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as u128)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u128)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as u128)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// 17 significant digits: enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(headers: &[&'static str]) -> Self {
        Self { headers: headers.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.headers)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv))?;
                }
                let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
            }
            Format::Json => {
                let records: Vec<serde_json::Map<String, serde_json::Value>> = self
                    .rows
                    .iter()
                    .map(|row| self.headers.iter().map(|h| h.to_string()).zip(row.iter().map(Cell::json)).collect())
                    .collect();
                let mut s = serde_json::to_string_pretty(&records)?;
                s.push('\n');
                Ok(s)
            }
        }
    }
}

fn smoothness(s: &str) -> Result<Smoothness> {
    if let Some((p, q)) = s.split_once('/') {
        let parse =
            |t: &str| t.trim().parse::<u64>().map_err(|_| Error::InvalidParameter(format!("bad fraction '{s}'")));
        return Smoothness::rational(parse(p)?, parse(q)?);
    }
    let v: f64 = s.parse().map_err(|_| Error::InvalidParameter(format!("bad smoothness '{s}'")))?;
    Smoothness::from_f64(v)
}

fn usizes(ix: &Indices) -> Vec<usize> {
    ix.0.iter().map(|&v| v as usize).collect()
}

impl RunConfig {
    /// Checks every parameter combination without doing any real work.
    pub fn validate(&self) -> Result<()> {
        if self.threads == Some(0) {
            return Err(Error::InvalidParameter("threads must be at least 1".into()));
        }
        match &self.command {
            Command::Sigma { weight, n, preasymptotic, .. } => {
                let spec = weight.spec()?;
                if *n == 0 {
                    return Err(Error::InvalidParameter("n must be at least 1".into()));
                }
                if *preasymptotic && (spec.family() != Family::MixedSR || spec.d() < 3) {
                    return Err(Error::InvalidParameter("the preasymptotic bound needs mixed-sr with d >= 3".into()));
                }
            }
            Command::Width { weight, target, .. } | Command::Converge { weight, target, .. } => {
                target.embedding()?.validate(&weight.spec()?)?;
            }
            Command::Constants { name, d, s, .. } => {
                self.constant_spec(*name, *d, *s)?;
            }
            Command::Count { s, quantity, d, j, r_ell, .. } => {
                smoothness(s)?;
                if *quantity != Quantity::ASplit && (j.is_some() || r_ell.is_some()) {
                    return Err(Error::InvalidParameter("--j and --r-ell apply to a-split only".into()));
                }
                if *d == 0 {
                    return Err(Error::InvalidParameter("d must be at least 1".into()));
                }
            }
            Command::AppendixVerify { s, sandwich_r, .. } => {
                smoothness(s)?;
                if sandwich_r.as_ref().is_some_and(|r| r.0.contains(&1)) {
                    return Err(Error::InvalidParameter("sandwich radii must be >= 2".into()));
                }
            }
            Command::Integral { a, .. } => {
                if !(*a > 1.0) {
                    return Err(Error::Domain(format!("a must exceed 1 (got {a})")));
                }
            }
        }
        Ok(())
    }

    fn constant_spec(&self, name: ConstantName, d: Option<u32>, s: Option<f64>) -> Result<ConstantSpec> {
        let need_d = || d.ok_or_else(|| Error::InvalidParameter("this constant needs --d".into()));
        let need_s = || s.ok_or_else(|| Error::InvalidParameter("this constant needs --s".into()));
        Ok(match name {
            ConstantName::MixL2Sigma => ConstantSpec::MixL2Sigma { d: need_d()?, s: need_s()? },
            ConstantName::TransferUv => ConstantSpec::TransferUV { s: need_s()? },
            ConstantName::TransferVw => ConstantSpec::TransferVW { s: need_s()? },
            ConstantName::Preasymptotic => ConstantSpec::Preasymptotic { d: need_d()? },
            ConstantName::H1Constant => ConstantSpec::H1Constant { d: need_d()?, s: need_s()? },
            ConstantName::SSeries => ConstantSpec::SSeries { s: need_s()? },
        })
    }

    /// Runs the command and returns its table.
    pub fn execute(&self) -> Result<Table> {
        self.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads.unwrap_or(0))
            .build()
            .map_err(|e| Error::ResourceCap(e.to_string()))?;
        pool.install(|| self.execute_inner())
    }

    fn execute_inner(&self) -> Result<Table> {
        match &self.command {
            Command::Sigma { weight, n, oracle_radius, preasymptotic } => {
                let spec = weight.spec()?;
                let prefix = sigma_prefix(&spec, *n)?;
                let oracle = oracle_radius.map(|r| sigma_bruteforce(&spec, *n, r)).transpose()?;
                let mut headers = vec!["n", "sigma", "cum_inv_sq"];
                if oracle.is_some() {
                    headers.extend(["oracle", "rel_diff"]);
                }
                if *preasymptotic {
                    headers.extend(["preasymptotic_bound", "holds"]);
                }
                let mut t = Table::new(&headers);
                for i in 0..*n {
                    let sigma = prefix.values[i];
                    let mut row: Vec<Cell> = vec![(i + 1).into(), sigma.into(), prefix.cum_inv_sq[i].into()];
                    if let Some(o) = &oracle {
                        row.push(o.values[i].into());
                        row.push(((sigma - o.values[i]).abs() / o.values[i]).into());
                    }
                    if *preasymptotic {
                        if i == 0 {
                            row.extend([Cell::Empty, Cell::Empty]);
                        } else {
                            let b =
                                preasymptotic_bound(spec.d() as u32, spec.s(), weight.r.unwrap_or(1.0), i as u64 + 1)?;
                            row.extend([b.into(), (sigma <= b).into()]);
                        }
                    }
                    t.push(row);
                }
                Ok(t)
            }
            Command::Width { weight, target, n } => {
                let spec = weight.spec()?;
                let embedding = target.embedding()?;
                let ns = usizes(n);
                let n_max = *ns.iter().max().unwrap();
                log::info!("width: {spec}, {embedding}, {}, n <= {n_max}", target.kind);
                let ev = evaluator_for(&spec, embedding, target.kind, n_max)?;
                let values = ev.widths(embedding, target.kind, &ns)?;
                let has_sup = matches!(target.kind, WidthKind::Approximation | WidthKind::Kolmogorov)
                    && !matches!(embedding, Embedding::AtoA | Embedding::FtoL2 | Embedding::HmixToH1);
                let mut t = Table::new(&["n", "embedding", "kind", "lower", "upper", "exact", "argmax_h"]);
                for (&n, w) in ns.iter().zip(values) {
                    let arg = if has_sup { Some(sup_over_h(ev.prefix(), n)?.1) } else { None };
                    t.push(vec![
                        n.into(),
                        Cell::Text(embedding.to_string()),
                        target.kind.name().into(),
                        w.lower.into(),
                        w.upper.into(),
                        w.exact.into(),
                        arg.into(),
                    ]);
                }
                Ok(t)
            }
            Command::Converge { weight, target, n_grid, alpha, beta, target_value } => {
                let spec = weight.spec()?;
                let embedding = target.embedding()?;
                let ns = usizes(n_grid);
                let ev = evaluator_for(&spec, embedding, target.kind, *ns.iter().max().unwrap())?;
                let table = convergence_table(&ev, embedding, target.kind, &ns, *alpha, *beta, *target_value)?;
                let mut t = Table::new(&["n", "raw", "raw_lower", "normalizer", "ratio", "target"]);
                for r in table.rows {
                    t.push(vec![
                        r.n.into(),
                        r.raw.into(),
                        r.raw_lower.into(),
                        r.normalizer.into(),
                        r.ratio.into(),
                        r.target.into(),
                    ]);
                }
                Ok(t)
            }
            Command::Constants { name, d, s, tol } => {
                let spec = self.constant_spec(*name, *d, *s)?;
                let value = match spec {
                    ConstantSpec::SSeries { s } => asymptotics::series_s(s, *tol)?,
                    other => constant(&other)?,
                };
                let label = name.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
                let mut t = Table::new(&["name", "d", "s", "value"]);
                t.push(vec![Cell::Text(label), (*d).into(), (*s).into(), value.into()]);
                Ok(t)
            }
            Command::Count { quantity, s, d, r_grid, j, r_ell } => {
                let sm = smoothness(s)?;
                let mut t = Table::new(&["r", "quantity", "d_or_ell", "j", "r_ell", "count", "exact"]);
                for &r in &r_grid.0 {
                    let results = match quantity {
                        Quantity::C => vec![count_c(sm, r, *d)?],
                        Quantity::A => vec![count_a(sm, r, *d)?],
                        Quantity::ASplit => {
                            let r_l = r_ell.unwrap_or_else(|| split_radius(sm.value(), r, *d));
                            let js: Vec<u32> = j.map_or_else(|| (0..=*d).collect(), |j| vec![j]);
                            js.into_iter().map(|j| count_a_split(sm, r, *d, j, r_l)).collect::<Result<_>>()?
                        }
                    };
                    let label = quantity.to_possible_value().unwrap().get_name().to_string();
                    for c in results {
                        t.push(vec![
                            c.r.into(),
                            Cell::Text(label.clone()),
                            c.d_or_ell.into(),
                            c.j.into(),
                            c.r_ell.into(),
                            c.count.into(),
                            c.exact.into(),
                        ]);
                    }
                }
                Ok(t)
            }
            Command::AppendixVerify { s, d, r_grid, sandwich_r } => {
                let sm = smoothness(s)?;
                let report = verify_appendix_limits(sm, *d, &r_grid.0)?;
                let mut t = Table::new(&[
                    "table", "r", "quantity", "d_or_ell", "j", "r_ell", "count", "ratio", "target", "lower", "upper",
                    "pass",
                ]);
                for row in &report.rows {
                    t.push(vec![
                        "limit".into(),
                        row.r.into(),
                        Cell::Text(row.quantity.clone()),
                        row.d_or_ell.into(),
                        row.j.into(),
                        row.r_ell.into(),
                        row.count.into(),
                        row.ratio.into(),
                        row.target.into(),
                        Cell::Empty,
                        Cell::Empty,
                        report.exact.into(),
                    ]);
                }
                for &r in &r_grid.0 {
                    for id in decomposition_checks(sm, *d, r)? {
                        t.push(vec![
                            "identity".into(),
                            r.into(),
                            Cell::Text(id.identity),
                            id.d_or_ell.into(),
                            Cell::Empty,
                            id.r_ell.into(),
                            id.lhs.into(),
                            Cell::Empty,
                            id.rhs.into(),
                            Cell::Empty,
                            Cell::Empty,
                            id.holds.into(),
                        ]);
                    }
                }
                let radii = sandwich_r.clone().map_or_else(|| (2..=8).collect(), |r| r.0);
                for r in radii {
                    let sw = sandwich_check(sm, *d, r)?;
                    t.push(vec![
                        "sandwich".into(),
                        r.into(),
                        "sigma".into(),
                        (*d).into(),
                        Cell::Empty,
                        Cell::Empty,
                        (sw.n_last - sw.n_first + 1).into(),
                        Cell::Empty,
                        Cell::Empty,
                        sw.lower.into(),
                        sw.upper.into(),
                        sw.all_pass.into(),
                    ]);
                }
                Ok(t)
            }
            Command::Integral { s, beta, a, n_grid } => {
                let mut t = Table::new(&["s", "beta", "a", "n", "value", "limit", "abs_gap"]);
                let limit = 1.0 / (s + 1.0);
                for &n in &n_grid.0 {
                    let v = aux_integral(*s, *beta, *a, n)?;
                    t.push(vec![
                        (*s).into(),
                        (*beta).into(),
                        (*a).into(),
                        n.into(),
                        v.into(),
                        limit.into(),
                        (v - limit).abs().into(),
                    ]);
                }
                Ok(t)
            }
        }
    }

    /// Runs the command and writes the table to the configured destination.
    pub fn run(&self) -> Result<()> {
        let table = self.execute()?;
        let text = table.render(self.format)?;
        match &self.output {
            Some(path) => {
                std::fs::write(path, text)?;
                log::info!("wrote {} rows to {}", table.rows.len(), path.display());
            }
            None => {
                use std::io::Write;
                std::io::stdout().lock().write_all(text.as_bytes())?;
            }
        }
        Ok(())
    }
}
