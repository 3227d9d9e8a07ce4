//! Coverage experiments described by a JSON config, with CSV and SVG output.
//!
//! ```json
//! {
//!   "experiment_id": "delta_vs_chebyshev",
//!   "dgp": {"family": "bivariate_gaussian",
//!           "params": {"mean_x": 0.5, "var_x": 1, "mean_y": 0.1, "var_y": 2, "corr": 0.5}},
//!   "n_grid": [100, 1000, 10000],
//!   "alpha": 0.1,
//!   "methods": [{"kind": "delta"}, {"kind": "bc_general", "bounds": "from_dgp"}],
//!   "reps": 2000,
//!   "seed": 1,
//!   "reference_bounds": "from_dgp",
//!   "outputs": {"csv_path": "out/delta_vs_chebyshev.csv", "svg_path": "out/delta_vs_chebyshev.svg"}
//! }
//! ```
//!
//! `dgp` and `alpha` accept a single value or a list. Rows are ordered by
//! dgp, then alpha, then n, then method. All methods of one `(dgp, alpha, n)`
//! cell see the same simulated samples.

use crate::bootstrap::UndefinedPolicy;
use crate::dgp::DgpSpec;
use crate::diagnostics::{alpha_bar_bc, alpha_bar_hoeff, n_bar_bc, n_bar_hoeff};
use crate::error::{check_open_unit, Error, Result};
use crate::format::fmt_g;
use crate::montecarlo::{estimate_coverage, CiMethod, CountingMode, CoverageReport, Method};
use crate::nonasymptotic::NonasymptoticMethod;
use crate::plot::{Chart, Rule, Series};
use crate::rng::{derive_seed, StreamTag};
use crate::sample::ClassBounds;
use rayon::prelude::*;
use serde::de::{DeserializeOwned, Error as _};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::path::{Path, PathBuf};

pub const CSV_HEADER: [&str; 12] = [
    "experiment_id",
    "dgp",
    "n",
    "alpha",
    "method",
    "counting_mode",
    "coverage",
    "undefined_rate",
    "mc_se",
    "reps",
    "seed",
    "feasible",
];

/// Class constants for a nonasymptotic method: explicit, or the true
/// constants of the simulated distribution at each `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundsSpec {
    FromDgp,
    Explicit(ClassBounds),
}

impl Serialize for BoundsSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BoundsSpec::FromDgp => s.serialize_str("from_dgp"),
            BoundsSpec::Explicit(b) => b.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for BoundsSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) if s == "from_dgp" => Ok(BoundsSpec::FromDgp),
            serde_json::Value::String(s) => Err(D::Error::custom(format!(
                "unknown bounds keyword {s:?}, expected \"from_dgp\" or an object"
            ))),
            v => {
                let b: ClassBounds = serde_json::from_value(v).map_err(D::Error::custom)?;
                b.validate().map_err(D::Error::custom)?;
                Ok(BoundsSpec::Explicit(b))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MethodConfig {
    Delta,
    Bootstrap {
        b: usize,
        #[serde(default)]
        policy: UndefinedPolicy,
    },
    BcEasy {
        #[serde(default)]
        bounds: Option<BoundsSpec>,
    },
    BcGeneral {
        #[serde(default)]
        bounds: Option<BoundsSpec>,
    },
    HoeffEasy {
        #[serde(default)]
        bounds: Option<BoundsSpec>,
    },
    HoeffGeneral {
        #[serde(default)]
        bounds: Option<BoundsSpec>,
    },
}

impl MethodConfig {
    pub fn name(&self) -> &'static str {
        match self {
            MethodConfig::Delta => "delta",
            MethodConfig::Bootstrap { .. } => "bootstrap",
            MethodConfig::BcEasy { .. } => "bc_easy",
            MethodConfig::BcGeneral { .. } => "bc_general",
            MethodConfig::HoeffEasy { .. } => "hoeff_easy",
            MethodConfig::HoeffGeneral { .. } => "hoeff_general",
        }
    }

    fn nonasymptotic(&self) -> Option<(NonasymptoticMethod, Option<BoundsSpec>)> {
        match *self {
            MethodConfig::BcEasy { bounds } => Some((NonasymptoticMethod::BcEasy, bounds)),
            MethodConfig::BcGeneral { bounds } => Some((NonasymptoticMethod::BcGeneral, bounds)),
            MethodConfig::HoeffEasy { bounds } => Some((NonasymptoticMethod::HoeffEasy, bounds)),
            MethodConfig::HoeffGeneral { bounds } => Some((NonasymptoticMethod::HoeffGeneral, bounds)),
            _ => None,
        }
    }

    /// The concrete method for `dgp` at sample size `n`.
    pub fn resolve(&self, dgp: &DgpSpec, n: usize) -> Result<Method> {
        match *self {
            MethodConfig::Delta => Ok(Method::Delta),
            MethodConfig::Bootstrap { b, policy } => {
                if b < 2 {
                    return Err(Error::param("b", format!("bootstrap needs b >= 2, got {b}")));
                }
                Ok(Method::Bootstrap { b_reps: b, policy })
            }
            _ => {
                let (method, spec) = self.nonasymptotic().expect("nonasymptotic variant");
                let spec = spec.ok_or_else(|| {
                    Error::param("bounds", format!("method {} requires bounds", method.name()))
                })?;
                let bounds = class_bounds(spec, method, dgp, n)
                    .map_err(|e| Error::param("bounds", format!("method {}: {e}", method.name())))?;
                Ok(Method::Nonasymptotic { method, bounds })
            }
        }
    }
}

fn class_bounds(spec: BoundsSpec, method: NonasymptoticMethod, dgp: &DgpSpec, n: usize) -> Result<ClassBounds> {
    if let BoundsSpec::Explicit(b) = spec {
        return Ok(b);
    }
    match method {
        NonasymptoticMethod::BcGeneral => Ok(ClassBounds::Moment {
            bounds: dgp.moment_bounds(n)?,
            a_y: None,
        }),
        NonasymptoticMethod::BcEasy => {
            let a_y = dgp
                .support_bounds(n)?
                .map(|s| s.a_y)
                .filter(|a| *a > 0.0)
                .ok_or_else(|| Error::param("a_y", "the distribution of Y is not bounded away from zero"))?;
            Ok(ClassBounds::Moment {
                bounds: dgp.moment_bounds(n)?,
                a_y: Some(a_y),
            })
        }
        NonasymptoticMethod::HoeffEasy | NonasymptoticMethod::HoeffGeneral => dgp
            .support_bounds(n)?
            .map(ClassBounds::Support)
            .ok_or_else(|| Error::param("support", "the distribution has unbounded support")),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    #[serde(deserialize_with = "one_or_many")]
    pub dgp: Vec<DgpSpec>,
    pub n_grid: Vec<usize>,
    #[serde(deserialize_with = "one_or_many")]
    pub alpha: Vec<f64>,
    pub methods: Vec<MethodConfig>,
    pub reps: u64,
    pub seed: u64,
    #[serde(default)]
    pub counting_mode: CountingMode,
    /// Class used for the `n_bar` annotation of the chart.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_bounds: Option<BoundsSpec>,
    #[serde(default)]
    pub outputs: Outputs,
}

fn one_or_many<'de, D, T>(d: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: DeserializeOwned,
{
    match serde_json::Value::deserialize(d)? {
        serde_json::Value::Array(items) => items
            .into_iter()
            .enumerate()
            .map(|(i, v)| serde_json::from_value(v).map_err(|e| D::Error::custom(format!("entry {i}: {e}"))))
            .collect(),
        v => serde_json::from_value(v).map(|x| vec![x]).map_err(D::Error::custom),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Parse(format!("experiment config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.experiment_id.trim().is_empty() {
            return Err(Error::param("experiment_id", "must be non-empty"));
        }
        if self.dgp.is_empty() {
            return Err(Error::param("dgp", "must be non-empty"));
        }
        if self.n_grid.is_empty() {
            return Err(Error::param("n_grid", "must be non-empty"));
        }
        if self.n_grid.contains(&0) {
            return Err(Error::param("n_grid", "sample sizes must be >= 1"));
        }
        if self.alpha.is_empty() {
            return Err(Error::param("alpha", "must be non-empty"));
        }
        for &a in &self.alpha {
            check_open_unit("alpha", a)?;
        }
        if self.methods.is_empty() {
            return Err(Error::param("methods", "must be non-empty"));
        }
        if self.reps == 0 {
            return Err(Error::param("reps", "must be >= 1"));
        }
        for d in &self.dgp {
            d.validate()?;
        }
        for m in &self.methods {
            if let Some((method, None)) = m.nonasymptotic() {
                return Err(Error::param("bounds", format!("method {} requires bounds", method.name())));
            }
        }
        Ok(())
    }

    /// Cells in output order: `(dgp, alpha, n, method)` indices.
    fn cells(&self) -> Vec<[usize; 4]> {
        let mut out = Vec::new();
        for d in 0..self.dgp.len() {
            for a in 0..self.alpha.len() {
                for n in 0..self.n_grid.len() {
                    for m in 0..self.methods.len() {
                        out.push([d, a, n, m]);
                    }
                }
            }
        }
        out
    }

    fn cell_seed(&self, [d, a, n, _]: [usize; 4]) -> u64 {
        let idx = (d * self.alpha.len() + a) * self.n_grid.len() + n;
        derive_seed(self.seed, StreamTag::Cell, idx as u64)
    }

    /// `n_bar` (or `alpha_bar` when `n` is fixed) of the reference class at
    /// level `alpha`, for the first dgp.
    pub fn reference_n_bar(&self, alpha: f64) -> Result<Option<f64>> {
        let Some(spec) = self.reference_bounds else {
            return Ok(None);
        };
        let n0 = self.n_grid[0];
        Ok(Some(match reference_class(spec, &self.dgp[0], n0)? {
            ClassBounds::Moment { bounds, .. } => n_bar_bc(alpha, &bounds),
            ClassBounds::Support(sb) => n_bar_hoeff(alpha, &sb),
        }))
    }

    pub fn reference_alpha_bar(&self, n: usize) -> Result<Option<f64>> {
        let Some(spec) = self.reference_bounds else {
            return Ok(None);
        };
        Ok(Some(match reference_class(spec, &self.dgp[0], n)? {
            ClassBounds::Moment { bounds, .. } => alpha_bar_bc(n, &bounds),
            ClassBounds::Support(sb) => alpha_bar_hoeff(n, &sb),
        }))
    }
}

fn reference_class(spec: BoundsSpec, dgp: &DgpSpec, n: usize) -> Result<ClassBounds> {
    match spec {
        BoundsSpec::Explicit(b) => Ok(b),
        BoundsSpec::FromDgp => Ok(ClassBounds::Moment {
            bounds: dgp.moment_bounds(n)?,
            a_y: None,
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub reports: Vec<CoverageReport>,
}

/// Runs every cell of the grid.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let cells = cfg.cells();
    let methods: Vec<Method> = cells
        .iter()
        .map(|&[d, _, n, m]| cfg.methods[m].resolve(&cfg.dgp[d], cfg.n_grid[n]))
        .collect::<Result<_>>()?;
    for (mi, mc) in cfg.methods.iter().enumerate() {
        if mc.nonasymptotic().is_none() {
            continue;
        }
        let mut any = false;
        for (c, m) in cells.iter().zip(&methods).filter(|(c, _)| c[3] == mi) {
            any |= m.feasible(cfg.n_grid[c[2]], cfg.alpha[c[1]])?;
        }
        if !any {
            return Err(Error::param(
                "methods",
                format!("method {} is infeasible at every (n, alpha) of the grid", mc.name()),
            ));
        }
    }
    let reports = cells
        .par_iter()
        .zip(methods.par_iter())
        .map(|(&c, m)| {
            let [d, a, n, _] = c;
            let mut r = estimate_coverage(
                &cfg.dgp[d],
                cfg.n_grid[n],
                cfg.alpha[a],
                m,
                cfg.reps,
                cfg.cell_seed(c),
                cfg.counting_mode,
            )?;
            r.seed = cfg.seed;
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentOutput {
        config: cfg.clone(),
        reports,
    })
}

fn opt_g(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), fmt_g)
}

impl ExperimentOutput {
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.reports {
            w.write_record([
                self.config.experiment_id.clone(),
                r.spec_id.clone(),
                r.n.to_string(),
                fmt_g(r.alpha),
                r.method_id.clone(),
                r.counting_mode.name().to_string(),
                opt_g(r.coverage()),
                opt_g(r.undefined_rate()),
                opt_g(r.mc_se()),
                r.reps.to_string(),
                r.seed.to_string(),
                r.feasible.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    /// Coverage against `n`, or against the nominal level when the grid has a
    /// single `n` and several levels.
    pub fn chart(&self) -> Result<Chart> {
        let cfg = &self.config;
        let by_level = cfg.n_grid.len() == 1 && cfg.alpha.len() > 1;
        let multi_dgp = cfg.dgp.len() > 1;
        let mut series: Vec<Series> = Vec::new();
        for r in &self.reports {
            let mut name = r.method_id.clone();
            if multi_dgp {
                name = format!("{} {name}", r.spec_id);
            }
            if !by_level && cfg.alpha.len() > 1 {
                name = format!("{name} alpha={}", fmt_g(r.alpha));
            }
            let x = if by_level { 1.0 - r.alpha } else { r.n as f64 };
            let Some(c) = r.coverage() else { continue };
            match series.iter_mut().find(|s| s.name == name) {
                Some(s) => s.points.push((x, c)),
                None => series.push(Series {
                    name,
                    points: vec![(x, c)],
                }),
            }
        }
        let mut rules = Vec::new();
        if by_level {
            rules.push(Rule::Diagonal);
            if let Some(ab) = cfg.reference_alpha_bar(cfg.n_grid[0])? {
                rules.push(Rule::Vertical {
                    x: 1.0 - ab,
                    label: format!("alpha_bar = {}", fmt_g(ab)),
                });
            }
        } else {
            for &a in &cfg.alpha {
                rules.push(Rule::Horizontal {
                    y: 1.0 - a,
                    label: fmt_g(1.0 - a),
                });
                if let Some(nb) = cfg.reference_n_bar(a)? {
                    rules.push(Rule::Vertical {
                        x: nb,
                        label: format!("n_bar = {}", fmt_g(nb)),
                    });
                }
            }
        }
        let (lo, hi) = cfg
            .n_grid
            .iter()
            .fold((usize::MAX, 0), |(lo, hi), &n| (lo.min(n), hi.max(n)));
        Ok(Chart {
            title: cfg.experiment_id.clone(),
            x_label: if by_level { "nominal level 1 - alpha".into() } else { "n".into() },
            y_label: "coverage".into(),
            log_x: !by_level && hi >= 20 * lo,
            series,
            rules,
        })
    }

    /// Writes the configured outputs, creating parent directories.
    pub fn write_outputs(&self, outputs: &Outputs) -> Result<()> {
        if let Some(p) = &outputs.csv_path {
            write_file(p, &self.to_csv())?;
        }
        if let Some(p) = &outputs.svg_path {
            write_file(p, &self.chart()?.to_svg())?;
        }
        Ok(())
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    std::fs::write(path, contents).map_err(io)
}
