//! Ratio analysis of a user CSV file: point estimate, delta and bootstrap
//! intervals, and the plug-in `n_bar` rule of thumb.
//!
//! The denominator is either a column or a threshold rule
//! `indicator:COL>=w0`, which builds `Y = 1{COL >= w0}` and
//! `X = num * 1{COL >= w0}` so that the ratio is `E[num | COL >= w0]`.

use crate::asymptotic::delta_ci;
use crate::bootstrap::{bootstrap_ci, BootstrapConfig};
use crate::diagnostics::plug_in_n_bar;
use crate::error::{check_open_unit, Error, Result};
use crate::format::fmt_g;
use crate::rng::{stream, StreamTag};
use crate::sample::{Interval, PairedSample};
use crate::special::normal_quantile;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    Ge,
    Gt,
    Le,
    Lt,
}

impl Comparison {
    pub fn holds(self, v: f64, w: f64) -> bool {
        match self {
            Comparison::Ge => v >= w,
            Comparison::Gt => v > w,
            Comparison::Le => v <= w,
            Comparison::Lt => v < w,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Ge => ">=",
            Comparison::Gt => ">",
            Comparison::Le => "<=",
            Comparison::Lt => "<",
        }
    }
}

/// `indicator:COL<op>w0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRule {
    pub column: String,
    pub op: Comparison,
    pub threshold: f64,
}

impl ThresholdRule {
    pub fn indicator(&self, v: f64) -> f64 {
        if self.op.holds(v, self.threshold) {
            1.0
        } else {
            0.0
        }
    }
}

impl FromStr for ThresholdRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("threshold rule {s:?}: {why}"));
        let body = s
            .trim()
            .strip_prefix("indicator:")
            .ok_or_else(|| bad("expected the form indicator:COL>=VALUE"))?;
        let at = body.find(['<', '>']).ok_or_else(|| bad("missing comparison operator"))?;
        let column = body[..at].trim();
        if column.is_empty() {
            return Err(bad("empty column name"));
        }
        let rest = &body[at..];
        let (op, value) = if let Some(v) = rest.strip_prefix(">=") {
            (Comparison::Ge, v)
        } else if let Some(v) = rest.strip_prefix("<=") {
            (Comparison::Le, v)
        } else if let Some(v) = rest.strip_prefix('>') {
            (Comparison::Gt, v)
        } else {
            (Comparison::Lt, &rest[1..])
        };
        let threshold: f64 = value.trim().parse().map_err(|_| bad("threshold is not a number"))?;
        if !threshold.is_finite() {
            return Err(bad("threshold must be finite"));
        }
        Ok(Self {
            column: column.to_string(),
            op,
            threshold,
        })
    }
}

impl fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "indicator:{}{}{}", self.column, self.op.symbol(), self.threshold)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Denominator {
    Column(String),
    Rule(ThresholdRule),
}

impl FromStr for Denominator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim_start().starts_with("indicator:") {
            return s.parse().map(Denominator::Rule);
        }
        let c = s.trim();
        if c.is_empty() {
            return Err(Error::Parse("empty denominator column name".into()));
        }
        Ok(Denominator::Column(c.to_string()))
    }
}

/// Reads a headed CSV and extracts the paired sample.
pub fn read_paired_csv<R: Read>(reader: R, numerator: &str, denominator: &Denominator) -> Result<PairedSample> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Parse(format!("csv header: {e}")))?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::Parse("empty file: no header row".into()));
    }
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("missing column {name:?}")))
    };
    let xi = find(numerator)?;
    let (yi, rule) = match denominator {
        Denominator::Column(c) => (find(c)?, None),
        Denominator::Rule(r) => (find(&r.column)?, Some(r)),
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("csv: {e}")))?;
        let field = |i: usize| -> Result<f64> {
            let v: f64 = rec[i]
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: {:?} is not a number", row + 1, &rec[i])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse(format!("row {}: non-finite value", row + 1)))
            }
        };
        let (x, y) = (field(xi)?, field(yi)?);
        match rule {
            Some(r) => {
                let ind = r.indicator(y);
                xs.push(x * ind);
                ys.push(ind);
            }
            None => {
                xs.push(x);
                ys.push(y);
            }
        }
    }
    PairedSample::new(xs, ys)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub n: usize,
    pub alpha: f64,
    pub b_reps: usize,
    pub theta_hat: Option<f64>,
    pub delta: Interval,
    pub bootstrap: Interval,
    pub plug_in_n_bar: Option<f64>,
}

impl AnalysisReport {
    /// The plug-in `n_bar` exceeds the sample size.
    pub fn delta_flagged(&self) -> bool {
        self.plug_in_n_bar.is_some_and(|nb| nb > self.n as f64)
    }
}

fn fmt_interval(i: &Interval) -> String {
    match i.bounds() {
        Some((lo, hi)) => format!("[{}, {}]", fmt_g(lo), fmt_g(hi)),
        None => "undefined".into(),
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = fmt_g(100.0 * (1.0 - self.alpha));
        writeln!(f, "n = {}", self.n)?;
        let Some(theta) = self.theta_hat else {
            return writeln!(f, "estimate undefined: the denominator sums to zero");
        };
        writeln!(f, "theta_hat = {}", fmt_g(theta))?;
        writeln!(f, "delta CI ({level}%) = {}", fmt_interval(&self.delta))?;
        writeln!(f, "bootstrap CI ({level}%, B = {}) = {}", self.b_reps, fmt_interval(&self.bootstrap))?;
        if let Some(nb) = self.plug_in_n_bar {
            writeln!(f, "plug-in n_bar = {}", fmt_g(nb))?;
        }
        if self.delta_flagged() {
            writeln!(f, "verdict: delta method flagged unreliable (plug-in n_bar > n)")
        } else {
            writeln!(f, "verdict: plug-in n_bar <= n, no flag")
        }
    }
}

pub fn analyze_sample(s: &PairedSample, alpha: f64, b_reps: usize, seed: u64) -> Result<AnalysisReport> {
    check_open_unit("alpha", alpha)?;
    let theta_hat = s.ratio_estimate();
    let (delta, bootstrap) = if theta_hat.is_some() {
        (
            delta_ci(s, alpha)?.interval,
            bootstrap_ci(s, alpha, &BootstrapConfig::new(b_reps, seed))?.interval,
        )
    } else {
        (Interval::Undefined, Interval::Undefined)
    };
    Ok(AnalysisReport {
        n: s.n(),
        alpha,
        b_reps,
        theta_hat,
        delta,
        bootstrap,
        plug_in_n_bar: plug_in_n_bar(s, alpha)?,
    })
}

pub fn analyze_csv<R: Read>(
    reader: R,
    numerator: &str,
    denominator: &Denominator,
    alpha: f64,
    b_reps: usize,
    seed: u64,
) -> Result<AnalysisReport> {
    let s = read_paired_csv(reader, numerator, denominator)?;
    analyze_sample(&s, alpha, b_reps, seed)
}

// Log-normal body fitted to wage quantiles 2989 (90%) and 6000 (99%), with a
// Pareto tail above the 99% quantile.
const BODY_MU: f64 = 7.148;
const BODY_SIGMA: f64 = 0.667;
const TAIL_START: f64 = 6000.0;
const TAIL_MASS: f64 = 0.01;
const TAIL_INDEX: f64 = 3.19;

/// Synthetic monthly wage and female indicator, shaped like a labor survey
/// extract: about 0.02% of wages exceed 20,000 and the share of women falls
/// with the wage. The values are synthetic.
pub fn wage_mimic(n: usize, seed: u64) -> Vec<(f64, u8)> {
    let mut rng = stream(seed, StreamTag::Sampling, 0);
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let w = if u < 1.0 - TAIL_MASS {
                (BODY_MU + BODY_SIGMA * normal_quantile(u.max(1e-300)).expect("u in (0, 1)")).exp()
            } else {
                TAIL_START * ((1.0 - u) / TAIL_MASS).max(1e-300).powf(-1.0 / TAIL_INDEX)
            };
            let w = (w * 100.0).round() / 100.0;
            let p_female = 0.55 / (1.0 + w / 8000.0);
            let f = u8::from(rng.random::<f64>() < p_female);
            (w, f)
        })
        .collect()
}

/// Writes [`wage_mimic`] as CSV with columns `wage,female`.
pub fn write_wage_mimic<W: Write>(mut out: W, n: usize, seed: u64) -> Result<()> {
    writeln!(out, "wage,female")?;
    for (w, f) in wage_mimic(n, seed) {
        writeln!(out, "{w:.2},{f}")?;
    }
    Ok(())
}
