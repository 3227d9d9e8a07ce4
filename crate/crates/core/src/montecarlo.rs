//! Monte Carlo estimates of pointwise coverage `P(C_n ∋ theta)`.
//!
//! Repetition `r` draws its data from stream `(seed, Data, r)` and, for
//! resampling methods, seeds its bootstrap with `derive_seed(seed, Bootstrap, r)`.
//! Per-repetition outcomes are reduced as integer counts, so reports do not
//! depend on the number of worker threads.

use crate::asymptotic::delta_ci;
use crate::bootstrap::{bootstrap_ci, BootstrapConfig, UndefinedPolicy};
use crate::dgp::{draw_resolved, true_theta, DgpSpec};
use crate::error::{check_open_unit, Error, Result};
use crate::nonasymptotic::{assemble, half_width, NonasymptoticMethod};
use crate::rng::{derive_seed, stream, StreamTag};
use crate::sample::{ClassBounds, Interval, Membership, PairedSample};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// How repetitions with an undefined interval enter the coverage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountingMode {
    /// Undefined draws count as non-coverage.
    #[default]
    UndefinedAsMiss,
    /// Coverage over repetitions with a defined interval only.
    ConditionalOnDefined,
}

impl CountingMode {
    pub fn name(self) -> &'static str {
        match self {
            CountingMode::UndefinedAsMiss => "undefined_as_miss",
            CountingMode::ConditionalOnDefined => "conditional_on_defined",
        }
    }
}

/// Anything that turns a sample into an interval.
pub trait CiMethod: Sync {
    fn id(&self) -> String;

    /// Whether the method yields a bounded interval at `(n, alpha)`.
    fn feasible(&self, _n: usize, _alpha: f64) -> Result<bool> {
        Ok(true)
    }

    /// The interval for one sample; `seed` feeds any internal randomness.
    fn interval(&self, s: &PairedSample, alpha: f64, seed: u64) -> Result<Interval>;
}

/// The interval constructions of this crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Delta,
    Bootstrap { b_reps: usize, policy: UndefinedPolicy },
    Nonasymptotic { method: NonasymptoticMethod, bounds: ClassBounds },
}

impl CiMethod for Method {
    fn id(&self) -> String {
        match self {
            Method::Delta => "delta".into(),
            Method::Bootstrap { b_reps, .. } => format!("bootstrap_b{b_reps}"),
            Method::Nonasymptotic { method, .. } => method.name().into(),
        }
    }

    fn feasible(&self, n: usize, alpha: f64) -> Result<bool> {
        match self {
            Method::Nonasymptotic { method, bounds } => Ok(half_width(n, alpha, *method, bounds)?.is_feasible()),
            _ => Ok(true),
        }
    }

    fn interval(&self, s: &PairedSample, alpha: f64, seed: u64) -> Result<Interval> {
        match self {
            Method::Delta => Ok(delta_ci(s, alpha)?.interval),
            Method::Bootstrap { b_reps, policy } => {
                let cfg = BootstrapConfig::new(*b_reps, seed).with_policy(*policy);
                Ok(bootstrap_ci(s, alpha, &cfg)?.interval)
            }
            Method::Nonasymptotic { method, bounds } => {
                let hw = half_width(s.n(), alpha, *method, bounds)?;
                Ok(assemble(s, hw, *method).interval)
            }
        }
    }
}

/// Outcome counts of one coverage cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub covered: u64,
    pub missed: u64,
    pub undefined: u64,
}

impl Counts {
    fn of(m: Membership) -> Self {
        let mut c = Self::default();
        match m {
            Membership::Covered => c.covered = 1,
            Membership::Missed => c.missed = 1,
            Membership::Undefined => c.undefined = 1,
        }
        c
    }

    fn add(self, o: Self) -> Self {
        Self {
            covered: self.covered + o.covered,
            missed: self.missed + o.missed,
            undefined: self.undefined + o.undefined,
        }
    }

    pub fn total(&self) -> u64 {
        self.covered + self.missed + self.undefined
    }

    pub fn defined(&self) -> u64 {
        self.covered + self.missed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub method_id: String,
    pub spec_id: String,
    pub n: usize,
    pub alpha: f64,
    pub seed: u64,
    pub reps: u64,
    pub counting_mode: CountingMode,
    /// False for a nonasymptotic method with no bounded interval at `(n, alpha)`;
    /// such cells carry zero counts and no coverage.
    pub feasible: bool,
    pub counts: Counts,
}

impl CoverageReport {
    fn denominator(&self) -> u64 {
        match self.counting_mode {
            CountingMode::UndefinedAsMiss => self.counts.total(),
            CountingMode::ConditionalOnDefined => self.counts.defined(),
        }
    }

    /// `None` for infeasible cells and for conditional coverage with no
    /// defined repetition.
    pub fn coverage(&self) -> Option<f64> {
        let d = self.denominator();
        (self.feasible && d > 0).then(|| self.counts.covered as f64 / d as f64)
    }

    /// Share of defined intervals that miss, over the same denominator as
    /// [`coverage`](Self::coverage).
    pub fn miss_rate(&self) -> Option<f64> {
        let d = self.denominator();
        (self.feasible && d > 0).then(|| self.counts.missed as f64 / d as f64)
    }

    pub fn undefined_rate(&self) -> Option<f64> {
        let t = self.counts.total();
        (self.feasible && t > 0).then(|| self.counts.undefined as f64 / t as f64)
    }

    /// `sqrt(c (1 - c) / d)` with `d` the counting-mode denominator.
    pub fn mc_se(&self) -> Option<f64> {
        let c = self.coverage()?;
        Some((c * (1.0 - c) / self.denominator() as f64).sqrt())
    }

    pub fn reps_defined(&self) -> u64 {
        self.counts.defined()
    }

    /// The same counts read under another mode.
    pub fn with_mode(&self, mode: CountingMode) -> Self {
        Self {
            counting_mode: mode,
            ..self.clone()
        }
    }
}

/// Coverage of `method` for `theta(spec)` at sample size `n` over `reps`
/// repetitions.
pub fn estimate_coverage(
    spec: &DgpSpec,
    n: usize,
    alpha: f64,
    method: &dyn CiMethod,
    reps: u64,
    seed: u64,
    mode: CountingMode,
) -> Result<CoverageReport> {
    check_open_unit("alpha", alpha)?;
    if reps == 0 {
        return Err(Error::param("reps", "must be >= 1"));
    }
    let resolved = spec.resolve(n)?;
    let theta = true_theta(spec, n)?;
    let mut report = CoverageReport {
        method_id: method.id(),
        spec_id: spec.display_name().into(),
        n,
        alpha,
        seed,
        reps,
        counting_mode: mode,
        feasible: method.feasible(n, alpha)?,
        counts: Counts::default(),
    };
    if !report.feasible {
        return Ok(report);
    }
    report.counts = (0..reps)
        .into_par_iter()
        .map(|r| {
            let s = draw_resolved(&resolved, n, stream(seed, StreamTag::Data, r));
            let ci = method.interval(&s, alpha, derive_seed(seed, StreamTag::Bootstrap, r))?;
            Ok::<_, Error>(Counts::of(ci.membership(theta)))
        })
        .try_reduce(Counts::default, |a, b| Ok(a.add(b)))?;
    Ok(report)
}

/// One report per `n`, grid point `i` seeded with `derive_seed(seed, Cell, i)`.
pub fn coverage_curve(
    spec: &DgpSpec,
    n_grid: &[usize],
    alpha: f64,
    method: &dyn CiMethod,
    reps: u64,
    seed: u64,
    mode: CountingMode,
) -> Result<Vec<CoverageReport>> {
    n_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let cell_seed = derive_seed(seed, StreamTag::Cell, i as u64);
            estimate_coverage(spec, n, alpha, method, reps, cell_seed, mode)
        })
        .collect()
}

/// Draws of `sqrt(n) (X_bar / Y_bar - theta) / n^e` with undefined draws
/// dropped and counted.
#[derive(Debug, Clone, PartialEq)]
pub struct RenormalizedSample {
    pub values: Vec<f64>,
    pub undefined: u64,
}

pub fn renormalized_statistic_sample(
    spec: &DgpSpec,
    n: usize,
    reps: u64,
    seed: u64,
    renorm_exponent: f64,
) -> Result<RenormalizedSample> {
    if !renorm_exponent.is_finite() {
        return Err(Error::param("renorm_exponent", "must be finite"));
    }
    if reps == 0 {
        return Ok(RenormalizedSample {
            values: Vec::new(),
            undefined: 0,
        });
    }
    let resolved = spec.resolve(n)?;
    let theta = true_theta(spec, n)?;
    let scale = (n as f64).sqrt() / (n as f64).powf(renorm_exponent);
    let draws: Vec<Option<f64>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let s = draw_resolved(&resolved, n, stream(seed, StreamTag::Data, r));
            s.ratio_estimate().map(|t| scale * (t - theta))
        })
        .collect();
    let undefined = draws.iter().filter(|d| d.is_none()).count() as u64;
    Ok(RenormalizedSample {
        values: draws.into_iter().flatten().collect(),
        undefined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::Family;

    struct Fixed {
        theta: f64,
        half: f64,
    }

    impl CiMethod for Fixed {
        fn id(&self) -> String {
            "fixed".into()
        }
        fn interval(&self, _: &PairedSample, _: f64, _: u64) -> Result<Interval> {
            Ok(Interval::symmetric(self.theta, self.half))
        }
    }

    struct PointAtEstimate;

    impl CiMethod for PointAtEstimate {
        fn id(&self) -> String {
            "point".into()
        }
        fn interval(&self, s: &PairedSample, _: f64, _: u64) -> Result<Interval> {
            Ok(s.ratio_estimate().map_or(Interval::Undefined, |t| Interval::new(t, t)))
        }
    }

    fn gauss(ey: f64) -> DgpSpec {
        DgpSpec::gaussian(1.0, 1.0, ey, 1.0)
    }

    #[test]
    fn trivial_methods() {
        let s = gauss(0.75);
        let wide = Fixed {
            theta: 1.0 / 0.75,
            half: 1e9,
        };
        let r = estimate_coverage(&s, 50, 0.05, &wide, 200, 1, CountingMode::UndefinedAsMiss).unwrap();
        assert_eq!(r.coverage(), Some(1.0));
        assert_eq!(r.undefined_rate(), Some(0.0));
        assert_eq!(r.mc_se(), Some(0.0));
        let r = estimate_coverage(&s, 50, 0.05, &PointAtEstimate, 200, 1, CountingMode::UndefinedAsMiss).unwrap();
        assert_eq!(r.coverage(), Some(0.0));
    }

    #[test]
    fn rates_partition_one() {
        let s = DgpSpec::new(Family::BernoulliProduct { p_x: 0.5, p_y: 0.05 });
        let r = estimate_coverage(&s, 20, 0.05, &Method::Delta, 2000, 7, CountingMode::UndefinedAsMiss).unwrap();
        let total = r.coverage().unwrap() + r.miss_rate().unwrap() + r.undefined_rate().unwrap();
        assert!((total - 1.0).abs() < 1e-12);
        // P(Y_bar = 0) = 0.95^20 = 0.358
        let u = r.undefined_rate().unwrap();
        assert!((u - 0.95f64.powi(20)).abs() < 4.0 * (u * (1.0 - u) / 2000.0).sqrt());
        let c = r.with_mode(CountingMode::ConditionalOnDefined);
        assert!(r.coverage().unwrap() <= c.coverage().unwrap());
        assert_eq!(c.reps_defined(), 2000 - r.counts.undefined);
        let expected = (c.coverage().unwrap() * (1.0 - c.coverage().unwrap()) / c.reps_defined() as f64).sqrt();
        assert_eq!(c.mc_se(), Some(expected));
    }

    #[test]
    fn delta_near_nominal_when_denominator_is_strong() {
        let r = estimate_coverage(&gauss(0.75), 2000, 0.05, &Method::Delta, 2000, 3, CountingMode::UndefinedAsMiss)
            .unwrap();
        let c = r.coverage().unwrap();
        assert!((c - 0.95).abs() < 4.0 * r.mc_se().unwrap().max(0.005), "{c}");
    }

    #[test]
    fn infeasible_cells_are_flagged() {
        let bounds = ClassBounds::Moment {
            bounds: crate::sample::MomentBounds::new(0.25, 0.5, 0.25).unwrap(),
            a_y: None,
        };
        let m = Method::Nonasymptotic {
            method: NonasymptoticMethod::BcGeneral,
            bounds,
        };
        let s = DgpSpec::new(Family::BernoulliProduct { p_x: 0.5, p_y: 0.25 });
        // n_bar = 2 (0.25 - 0.0625) / (0.1 * 0.0625) = 60
        let r = estimate_coverage(&s, 60, 0.1, &m, 10, 0, CountingMode::UndefinedAsMiss).unwrap();
        assert!(!r.feasible);
        assert_eq!(r.coverage(), None);
        assert_eq!(r.counts, Counts::default());
        let r = estimate_coverage(&s, 61, 0.1, &m, 10, 0, CountingMode::UndefinedAsMiss).unwrap();
        assert!(r.feasible);
        assert!(r.coverage().is_some());
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let s = gauss(0.2);
        let m = Method::Bootstrap {
            b_reps: 50,
            policy: UndefinedPolicy::DropAndRecord,
        };
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_coverage(&s, 40, 0.1, &m, 300, 11, CountingMode::UndefinedAsMiss).unwrap())
        };
        let a = run(1);
        assert_eq!(a, run(4));
        assert_eq!(a, run(4));
    }

    #[test]
    fn curve_structure() {
        let s = gauss(0.5);
        let one = coverage_curve(&s, &[30], 0.1, &Method::Delta, 50, 9, CountingMode::UndefinedAsMiss).unwrap();
        let direct = estimate_coverage(
            &s,
            30,
            0.1,
            &Method::Delta,
            50,
            derive_seed(9, StreamTag::Cell, 0),
            CountingMode::UndefinedAsMiss,
        )
        .unwrap();
        assert_eq!(one, vec![direct]);
        let two = coverage_curve(&s, &[10, 100], 0.1, &Method::Delta, 50, 9, CountingMode::UndefinedAsMiss).unwrap();
        assert_eq!(two.len(), 2);
        assert!(two.iter().all(|r| r.alpha == 0.1));
        assert_eq!((two[0].n, two[1].n), (10, 100));
    }

    #[test]
    fn mc_se_scales_with_reps() {
        let s = gauss(0.1);
        let a = estimate_coverage(&s, 100, 0.05, &Method::Delta, 1000, 5, CountingMode::UndefinedAsMiss).unwrap();
        let b = estimate_coverage(&s, 100, 0.05, &Method::Delta, 4000, 5, CountingMode::UndefinedAsMiss).unwrap();
        let ratio = a.mc_se().unwrap() / b.mc_se().unwrap();
        assert!((ratio / 2.0 - 1.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn renormalized_variance_matches_delta_sigma() {
        let s = gauss(0.75);
        let sigma = 1.0 / 0.75f64.powi(2) + 1.0 / 0.75f64.powi(4);
        let r = renormalized_statistic_sample(&s, 2000, 4000, 2, 0.0).unwrap();
        assert_eq!(r.undefined, 0);
        let m = r.values.iter().sum::<f64>() / r.values.len() as f64;
        let v = r.values.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / r.values.len() as f64;
        assert!((v / sigma - 1.0).abs() < 0.1, "{v} vs {sigma}");
        assert!(renormalized_statistic_sample(&s, 10, 0, 2, 0.0).unwrap().values.is_empty());
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = gauss(0.5);
        assert!(estimate_coverage(&s, 10, 0.05, &Method::Delta, 0, 0, CountingMode::UndefinedAsMiss).is_err());
        assert!(estimate_coverage(&s, 10, 1.5, &Method::Delta, 10, 0, CountingMode::UndefinedAsMiss).is_err());
    }
}
