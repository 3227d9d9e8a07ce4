//! Simulation families for paired data, with sequence-of-model decay of the
//! means and Gaussian-copula coupling of non-Gaussian marginals.
//!
//! A spec serializes as
//!
//! ```json
//! {"family": "gaussian_product",
//!  "params": {"mean_x": 1, "var_x": 1, "mean_y": 0.75, "var_y": 1},
//!  "decay": {"c": 0.025, "b": 0.5}}
//! ```
//!
//! `decay` replaces the denominator mean by `c n^-b` at sample size `n`;
//! `numerator_decay` does the same for the numerator mean.

use crate::adversarial::{
    bc_zero_denominator_dist, catoni_pair_dist, hoeff_zero_denominator_dist, DiscreteDist,
};
use crate::error::{check_open_unit, Error, Result};
use crate::rng::{stream, SimRng, StreamTag};
use crate::sample::{MomentBounds, PairedSample, SupportBounds};
use crate::special::{normal_cdf, normal_sf, student_t_quantile};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// `E = c n^-b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decay {
    pub c: f64,
    pub b: f64,
}

impl Decay {
    pub fn at(&self, n: usize) -> f64 {
        self.c * (n as f64).powf(-self.b)
    }

    fn validate(&self, name: &'static str) -> Result<()> {
        if !(self.c.is_finite() && self.c != 0.0) {
            return Err(Error::param(name, format!("c must be finite and nonzero, got {}", self.c)));
        }
        if !(self.b.is_finite() && self.b >= 0.0) {
            return Err(Error::param(name, format!("b must be finite and >= 0, got {}", self.b)));
        }
        Ok(())
    }
}

/// Pareto with shape `shape`, support `(threshold, inf)` and mean `mean`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoParams {
    pub mean: f64,
    pub threshold: f64,
    pub shape: f64,
}

impl ParetoParams {
    /// Scale `t = (mean - threshold)(shape - 1)` of the untranslated Pareto.
    pub fn scale(&self) -> f64 {
        (self.mean - self.threshold) * (self.shape - 1.0)
    }

    /// Translation making the mean equal to `mean`; equals `threshold - t`.
    pub fn shift(&self) -> f64 {
        self.mean - self.shape * self.scale() / (self.shape - 1.0)
    }

    pub fn variance(&self) -> f64 {
        let (t, g) = (self.scale(), self.shape);
        t * t * g / ((g - 1.0) * (g - 1.0) * (g - 2.0))
    }

    fn validate(&self) -> Result<()> {
        if !(self.shape > 2.0 && self.shape.is_finite()) {
            return Err(Error::param("shape", format!("must be > 2, got {}", self.shape)));
        }
        if !(self.mean.is_finite() && self.threshold.is_finite() && self.mean > self.threshold) {
            return Err(Error::param("threshold", "must be finite and below the mean"));
        }
        Ok(())
    }

    // P(X > x) = q
    fn upper_quantile(&self, q: f64) -> f64 {
        self.scale() * q.powf(-1.0 / self.shape) + self.shift()
    }
}

/// Which worst-case construction to sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "snake_case")]
pub enum AdversarialKind {
    BcZeroDenominator { l_y: f64, u_x: f64, u_y: f64, xi: f64 },
    HoeffZeroDenominator { a_x: f64, b_x: f64, a_y: f64, b_y: f64, l_y: f64, xi: f64 },
    Catoni { l_y: f64, u_x: f64, u_y: f64, alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Family {
    GaussianProduct {
        mean_x: f64,
        var_x: f64,
        mean_y: f64,
        var_y: f64,
    },
    BivariateGaussian {
        mean_x: f64,
        var_x: f64,
        mean_y: f64,
        var_y: f64,
        corr: f64,
    },
    BernoulliProduct {
        p_x: f64,
        p_y: f64,
    },
    /// `mean + T_nu` marginals.
    StudentCopula {
        mean_x: f64,
        nu_x: f64,
        mean_y: f64,
        nu_y: f64,
        #[serde(default)]
        corr: f64,
    },
    /// Exponential marginals parameterized by their means.
    ExponentialCopula {
        mean_x: f64,
        mean_y: f64,
        #[serde(default)]
        corr: f64,
    },
    ParetoProduct {
        x: ParetoParams,
        y: ParetoParams,
    },
    /// `Poisson(var) + (mean - var)` marginals.
    PoissonCopula {
        mean_x: f64,
        var_x: f64,
        mean_y: f64,
        var_y: f64,
        #[serde(default)]
        corr: f64,
    },
    AdversarialRef(AdversarialKind),
    DiscreteProduct {
        x: DiscreteDist,
        y: DiscreteDist,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<Decay>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numerator_decay: Option<Decay>,
    /// Display name; defaults to the family name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// Population moments at a given `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrueRatio {
    pub theta: f64,
    pub e_x: f64,
    pub e_y: f64,
    pub v_x: f64,
    pub v_y: f64,
    pub cov: f64,
    /// False when `cov` is a Monte Carlo estimate.
    pub cov_exact: bool,
}

/// One marginal of a Gaussian copula.
#[derive(Debug, Clone, PartialEq)]
pub enum Marginal {
    Normal { mean: f64, sd: f64 },
    Student { mean: f64, nu: f64 },
    Exponential { mean: f64 },
    Poisson(PoissonTable),
}

/// Translated Poisson with a precomputed CDF table.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonTable {
    shift: f64,
    cdf: Vec<f64>,
    sf: Vec<f64>,
}

impl PoissonTable {
    pub fn new(mean: f64, var: f64) -> Result<Self> {
        if !(var > 0.0 && var <= 1e4 && var.is_finite()) {
            return Err(Error::param("var", format!("must lie in (0, 1e4], got {var}")));
        }
        if !mean.is_finite() {
            return Err(Error::param("mean", "must be finite"));
        }
        let kmax = (var + 40.0 * var.sqrt() + 60.0).ceil() as usize;
        let mut pmf = Vec::with_capacity(kmax + 1);
        let mut p = (-var).exp();
        for k in 0..=kmax {
            pmf.push(p);
            p *= var / (k + 1) as f64;
        }
        let mut cdf = Vec::with_capacity(pmf.len());
        let mut acc = 0.0;
        for &q in &pmf {
            acc += q;
            cdf.push(acc);
        }
        let mut sf = vec![0.0; pmf.len()];
        let mut tail = 0.0;
        for k in (0..pmf.len()).rev() {
            sf[k] = tail;
            tail += pmf[k];
        }
        Ok(Self {
            shift: mean - var,
            cdf,
            sf,
        })
    }

    /// `P(P <= k)` for the untranslated variable.
    pub fn cdf_at(&self, k: usize) -> f64 {
        self.cdf[k.min(self.cdf.len() - 1)]
    }

    /// Smallest untranslated `k` with `P(P <= k) >= p`.
    pub fn lower_index(&self, p: f64) -> usize {
        self.cdf.partition_point(|&c| c < p).min(self.cdf.len() - 1)
    }

    /// Smallest untranslated `k` with `P(P > k) <= q`.
    pub fn upper_index(&self, q: f64) -> usize {
        self.sf.partition_point(|&s| s > q).min(self.sf.len() - 1)
    }
}

impl Marginal {
    /// Inverse CDF.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_open_unit("p", p)?;
        Ok(match self {
            Marginal::Normal { mean, sd } => mean + sd * crate::special::normal_quantile(p)?,
            Marginal::Student { mean, nu } => mean + student_t_quantile(p, *nu)?,
            Marginal::Exponential { mean } => -mean * (-p).ln_1p(),
            Marginal::Poisson(t) => t.lower_index(p) as f64 + t.shift,
        })
    }

    /// The value whose standard-normal rank is `z`, accurate in both tails.
    pub fn from_standard_normal(&self, z: f64) -> f64 {
        match self {
            Marginal::Normal { mean, sd } => mean + sd * z,
            Marginal::Student { mean, nu } => {
                let t = if z <= 0.0 {
                    tail_t(normal_cdf(z), *nu)
                } else {
                    -tail_t(normal_sf(z), *nu)
                };
                mean + t
            }
            Marginal::Exponential { mean } => {
                if z <= 0.0 {
                    -mean * (-normal_cdf(z)).ln_1p()
                } else {
                    -mean * normal_sf(z).ln()
                }
            }
            Marginal::Poisson(t) => {
                let k = if z <= 0.0 {
                    t.lower_index(normal_cdf(z))
                } else {
                    t.upper_index(normal_sf(z))
                };
                k as f64 + t.shift
            }
        }
    }

    pub fn mean(&self) -> f64 {
        marginal_moments(self).0
    }

    pub fn variance(&self) -> f64 {
        marginal_moments(self).1
    }
}

// Lower-tail Student quantile for p <= 1/2, saturating at the extremes.
fn tail_t(p: f64, nu: f64) -> f64 {
    if p >= 0.5 {
        return 0.0;
    }
    let p = p.max(f64::MIN_POSITIVE);
    student_t_quantile(p, nu).unwrap_or(f64::MIN)
}

fn poisson_var(t: &PoissonTable) -> f64 {
    // Recover lambda from the mass at zero.
    -t.cdf[0].ln()
}

impl DgpSpec {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            decay: None,
            numerator_decay: None,
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// The label, or the family name when unlabeled.
    pub fn display_name(&self) -> &str {
        self.label.as_deref().unwrap_or(self.family_name())
    }

    pub fn with_decay(mut self, c: f64, b: f64) -> Self {
        self.decay = Some(Decay { c, b });
        self
    }

    pub fn with_numerator_decay(mut self, c: f64, b: f64) -> Self {
        self.numerator_decay = Some(Decay { c, b });
        self
    }

    /// `N(mean_x, var_x) x N(mean_y, var_y)`.
    pub fn gaussian(mean_x: f64, var_x: f64, mean_y: f64, var_y: f64) -> Self {
        Self::new(Family::GaussianProduct {
            mean_x,
            var_x,
            mean_y,
            var_y,
        })
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::GaussianProduct { .. } => "gaussian_product",
            Family::BivariateGaussian { .. } => "bivariate_gaussian",
            Family::BernoulliProduct { .. } => "bernoulli_product",
            Family::StudentCopula { .. } => "student_copula",
            Family::ExponentialCopula { .. } => "exponential_copula",
            Family::ParetoProduct { .. } => "pareto_product",
            Family::PoissonCopula { .. } => "poisson_copula",
            Family::AdversarialRef(_) => "adversarial_ref",
            Family::DiscreteProduct { .. } => "discrete_product",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(d) = &self.decay {
            d.validate("decay")?;
        }
        if let Some(d) = &self.numerator_decay {
            d.validate("numerator_decay")?;
        }
        self.resolve(1).map(|_| ())
    }

    /// The family with decayed means substituted at sample size `n`.
    pub fn resolve(&self, n: usize) -> Result<Resolved> {
        if n == 0 {
            return Err(Error::param("n", "must be >= 1"));
        }
        let ey = self.decay.map(|d| d.at(n));
        let ex = self.numerator_decay.map(|d| d.at(n));
        let pick = |v: f64, o: Option<f64>| o.unwrap_or(v);
        let r = match &self.family {
            Family::GaussianProduct {
                mean_x,
                var_x,
                mean_y,
                var_y,
            } => Resolved::Gaussian {
                mean_x: pick(*mean_x, ex),
                sd_x: checked_sd("var_x", *var_x)?,
                mean_y: pick(*mean_y, ey),
                sd_y: checked_sd("var_y", *var_y)?,
                corr: 0.0,
            },
            Family::BivariateGaussian {
                mean_x,
                var_x,
                mean_y,
                var_y,
                corr,
            } => Resolved::Gaussian {
                mean_x: pick(*mean_x, ex),
                sd_x: checked_sd("var_x", *var_x)?,
                mean_y: pick(*mean_y, ey),
                sd_y: checked_sd("var_y", *var_y)?,
                corr: checked_corr(*corr)?,
            },
            Family::BernoulliProduct { p_x, p_y } => {
                let (p_x, p_y) = (pick(*p_x, ex), pick(*p_y, ey));
                check_open_unit("p_x", p_x)?;
                check_open_unit("p_y", p_y)?;
                Resolved::Bernoulli { p_x, p_y }
            }
            Family::StudentCopula {
                mean_x,
                nu_x,
                mean_y,
                nu_y,
                corr,
            } => {
                for nu in [nu_x, nu_y] {
                    if !(*nu > 2.0 && nu.is_finite()) {
                        return Err(Error::param("nu", format!("must be > 2, got {nu}")));
                    }
                }
                Resolved::Copula {
                    x: Marginal::Student {
                        mean: finite("mean_x", pick(*mean_x, ex))?,
                        nu: *nu_x,
                    },
                    y: Marginal::Student {
                        mean: finite("mean_y", pick(*mean_y, ey))?,
                        nu: *nu_y,
                    },
                    corr: checked_corr(*corr)?,
                }
            }
            Family::ExponentialCopula { mean_x, mean_y, corr } => {
                let (mx, my) = (pick(*mean_x, ex), pick(*mean_y, ey));
                for (name, m) in [("mean_x", mx), ("mean_y", my)] {
                    if !(m > 0.0 && m.is_finite()) {
                        return Err(Error::param(name, format!("must be > 0, got {m}")));
                    }
                }
                Resolved::Copula {
                    x: Marginal::Exponential { mean: mx },
                    y: Marginal::Exponential { mean: my },
                    corr: checked_corr(*corr)?,
                }
            }
            Family::ParetoProduct { x, y } => {
                let x = ParetoParams {
                    mean: pick(x.mean, ex),
                    ..*x
                };
                let y = ParetoParams {
                    mean: pick(y.mean, ey),
                    ..*y
                };
                x.validate()?;
                y.validate()?;
                Resolved::Pareto { x, y }
            }
            Family::PoissonCopula {
                mean_x,
                var_x,
                mean_y,
                var_y,
                corr,
            } => Resolved::Copula {
                x: Marginal::Poisson(PoissonTable::new(pick(*mean_x, ex), *var_x)?),
                y: Marginal::Poisson(PoissonTable::new(pick(*mean_y, ey), *var_y)?),
                corr: checked_corr(*corr)?,
            },
            Family::AdversarialRef(kind) => {
                if ex.is_some() || ey.is_some() {
                    return Err(Error::param("decay", "not supported for adversarial constructions"));
                }
                let (x, y) = match *kind {
                    AdversarialKind::BcZeroDenominator { l_y, u_x, u_y, xi } => {
                        let d = bc_zero_denominator_dist(n, &MomentBounds::new(l_y, u_x, u_y)?, xi)?;
                        (d.x, d.y)
                    }
                    AdversarialKind::HoeffZeroDenominator {
                        a_x,
                        b_x,
                        a_y,
                        b_y,
                        l_y,
                        xi,
                    } => {
                        let sb = SupportBounds::new(a_x, b_x, a_y, b_y, l_y)?;
                        let d = hoeff_zero_denominator_dist(n, &sb, xi)?;
                        (d.x, d.y)
                    }
                    AdversarialKind::Catoni { l_y, u_x, u_y, alpha } => {
                        let c = catoni_pair_dist(n, alpha, &MomentBounds::new(l_y, u_x, u_y)?)?;
                        (c.x, c.y)
                    }
                };
                Resolved::Discrete { x, y }
            }
            Family::DiscreteProduct { x, y } => {
                if ex.is_some() || ey.is_some() {
                    return Err(Error::param("decay", "not supported for discrete products"));
                }
                Resolved::Discrete { x: x.clone(), y: y.clone() }
            }
        };
        Ok(r)
    }

    /// Moment class with the true constants: `l_y = E[Y]`, `u_x = E[X^2]`,
    /// `u_y = E[Y^2]`. Requires `E[Y] > 0`.
    pub fn moment_bounds(&self, n: usize) -> Result<MomentBounds> {
        let t = self.resolve(n)?.exact_moments();
        if !(t.e_y > 0.0) {
            return Err(Error::param("mean_y", "moment bounds need a positive denominator mean"));
        }
        MomentBounds::new(t.e_y, t.v_x + t.e_x * t.e_x, t.v_y + t.e_y * t.e_y)
    }

    /// Support class for bounded families with `l_y = E[Y]`; `None` when a
    /// marginal is unbounded.
    pub fn support_bounds(&self, n: usize) -> Result<Option<SupportBounds>> {
        let r = self.resolve(n)?;
        let range = |d: &DiscreteDist| {
            let lo = d.atoms().iter().map(|a| a.0).fold(f64::INFINITY, f64::min);
            let hi = d.atoms().iter().map(|a| a.0).fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        };
        let (ax, bx, ay, by) = match &r {
            Resolved::Bernoulli { .. } => (0.0, 1.0, 0.0, 1.0),
            Resolved::Discrete { x, y } => {
                let (ax, bx) = range(x);
                let (ay, by) = range(y);
                (ax, bx, ay, by)
            }
            _ => return Ok(None),
        };
        let e_y = r.exact_moments().e_y;
        if !(e_y > 0.0) || ax >= bx || ay >= by {
            return Ok(None);
        }
        SupportBounds::new(ax, bx, ay, by, e_y).map(Some)
    }
}

fn finite(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::param(name, "must be finite"))
    }
}

fn checked_sd(name: &'static str, var: f64) -> Result<f64> {
    if !(var >= 0.0 && var.is_finite()) {
        return Err(Error::param(name, format!("must be finite and >= 0, got {var}")));
    }
    Ok(var.sqrt())
}

fn checked_corr(c: f64) -> Result<f64> {
    if !(c.abs() < 1.0) {
        return Err(Error::param("corr", format!("must lie in (-1, 1), got {c}")));
    }
    Ok(c)
}

/// A family with all `n`-dependent parameters fixed.
#[derive(Debug, Clone, PartialEq)]
pub enum Resolved {
    Gaussian {
        mean_x: f64,
        sd_x: f64,
        mean_y: f64,
        sd_y: f64,
        corr: f64,
    },
    Bernoulli {
        p_x: f64,
        p_y: f64,
    },
    Copula {
        x: Marginal,
        y: Marginal,
        corr: f64,
    },
    Pareto {
        x: ParetoParams,
        y: ParetoParams,
    },
    Discrete {
        x: DiscreteDist,
        y: DiscreteDist,
    },
}

fn correlated_normals(rng: &mut SimRng, corr: f64) -> (f64, f64) {
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    (z1, corr * z1 + (1.0 - corr * corr).sqrt() * z2)
}

// Uniform on (0, 1].
fn open_uniform(rng: &mut SimRng) -> f64 {
    1.0 - rng.random::<f64>()
}

impl Resolved {
    pub fn draw_pair(&self, rng: &mut SimRng) -> (f64, f64) {
        match self {
            Resolved::Gaussian {
                mean_x,
                sd_x,
                mean_y,
                sd_y,
                corr,
            } => {
                let (z1, z2) = correlated_normals(rng, *corr);
                (mean_x + sd_x * z1, mean_y + sd_y * z2)
            }
            Resolved::Bernoulli { p_x, p_y } => {
                let x = if rng.random::<f64>() < *p_x { 1.0 } else { 0.0 };
                let y = if rng.random::<f64>() < *p_y { 1.0 } else { 0.0 };
                (x, y)
            }
            Resolved::Copula { x, y, corr } => {
                let (z1, z2) = correlated_normals(rng, *corr);
                (x.from_standard_normal(z1), y.from_standard_normal(z2))
            }
            Resolved::Pareto { x, y } => (x.upper_quantile(open_uniform(rng)), y.upper_quantile(open_uniform(rng))),
            Resolved::Discrete { x, y } => (x.draw(rng), y.draw(rng)),
        }
    }

    /// Means and variances in closed form; `cov` is exact only when
    /// `cov_exact` is set.
    pub fn exact_moments(&self) -> TrueRatio {
        let (e_x, v_x, e_y, v_y, cov, cov_exact) = match self {
            Resolved::Gaussian {
                mean_x,
                sd_x,
                mean_y,
                sd_y,
                corr,
            } => (*mean_x, sd_x * sd_x, *mean_y, sd_y * sd_y, corr * sd_x * sd_y, true),
            Resolved::Bernoulli { p_x, p_y } => (*p_x, p_x * (1.0 - p_x), *p_y, p_y * (1.0 - p_y), 0.0, true),
            Resolved::Copula { x, y, corr } => {
                let (ex, vx) = marginal_moments(x);
                let (ey, vy) = marginal_moments(y);
                (ex, vx, ey, vy, 0.0, *corr == 0.0)
            }
            Resolved::Pareto { x, y } => (x.mean, x.variance(), y.mean, y.variance(), 0.0, true),
            Resolved::Discrete { x, y } => (x.mean(), x.variance(), y.mean(), y.variance(), 0.0, true),
        };
        TrueRatio {
            theta: e_x / e_y,
            e_x,
            e_y,
            v_x,
            v_y,
            cov,
            cov_exact,
        }
    }
}

fn marginal_moments(m: &Marginal) -> (f64, f64) {
    match m {
        Marginal::Normal { mean, sd } => (*mean, sd * sd),
        Marginal::Student { mean, nu } => (*mean, nu / (nu - 2.0)),
        Marginal::Exponential { mean } => (*mean, mean * mean),
        Marginal::Poisson(t) => {
            let lambda = poisson_var(t);
            (t.shift + lambda, lambda)
        }
    }
}

/// `n` i.i.d. pairs on the stream `(seed, Data, 0)`.
pub fn draw_sample(spec: &DgpSpec, n: usize, seed: u64) -> Result<PairedSample> {
    let r = spec.resolve(n)?;
    Ok(draw_resolved(&r, n, stream(seed, StreamTag::Data, 0)))
}

/// `n` pairs from an already resolved family using `rng`.
pub fn draw_resolved(r: &Resolved, n: usize, mut rng: SimRng) -> PairedSample {
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let (x, y) = r.draw_pair(&mut rng);
        xs.push(x);
        ys.push(y);
    }
    PairedSample::new(xs, ys).expect("families produce finite draws")
}

/// `E[X] / E[Y]` at sample size `n`; exact for every family.
pub fn true_theta(spec: &DgpSpec, n: usize) -> Result<f64> {
    let t = spec.resolve(n)?.exact_moments();
    if t.e_y == 0.0 {
        return Err(Error::param("mean_y", "the denominator mean is zero"));
    }
    Ok(t.theta)
}

/// Default size of the Monte Carlo covariance oracle for copula families.
pub const COV_ORACLE_DRAWS: usize = 10_000_000;

/// Population moments at `n`. For copulas with nonzero correlation the
/// covariance is estimated once from [`COV_ORACLE_DRAWS`] draws and cached.
pub fn true_ratio(spec: &DgpSpec, n: usize) -> Result<TrueRatio> {
    true_ratio_with(spec, n, COV_ORACLE_DRAWS)
}

/// As [`true_ratio`] with an explicit oracle size.
pub fn true_ratio_with(spec: &DgpSpec, n: usize, oracle_draws: usize) -> Result<TrueRatio> {
    let r = spec.resolve(n)?;
    let mut t = r.exact_moments();
    if t.e_y == 0.0 {
        return Err(Error::param("mean_y", "the denominator mean is zero"));
    }
    if !t.cov_exact {
        t.cov = cached_cov(&r, oracle_draws, t.e_x, t.e_y);
    }
    Ok(t)
}

fn cached_cov(r: &Resolved, draws: usize, e_x: f64, e_y: f64) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<String, f64>>> = OnceLock::new();
    let key = format!("{r:?}/{draws}");
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&v) = cache.lock().expect("cache lock").get(&key) {
        return v;
    }
    let mut rng = stream(0, StreamTag::Oracle, 0);
    let mut acc = 0.0;
    for _ in 0..draws {
        let (x, y) = r.draw_pair(&mut rng);
        acc += (x - e_x) * (y - e_y);
    }
    let v = acc / draws as f64;
    cache.lock().expect("cache lock").insert(key, v);
    v
}
