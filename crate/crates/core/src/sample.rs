//! Paired observations, their empirical moments, and the interval type shared by
//! every constructor.
//!
//! Variances and the covariance use divisor `n`, not `n - 1`. The rule-of-thumb
//! plug-in `2 (mean(Y^2) - mean(Y)^2) / (alpha mean(Y)^2)` is then literally
//! `2 var_y / (alpha mean_y^2)`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// `n >= 1` i.i.d. pairs `(x_i, y_i)` with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PairedSample {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                xs: xs.len(),
                ys: ys.len(),
            });
        }
        if xs.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(index) = xs
            .iter()
            .zip(&ys)
            .position(|(x, y)| !x.is_finite() || !y.is_finite())
        {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { xs, ys })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let (xs, ys) = pairs.into_iter().unzip();
        Self::new(xs, ys)
    }

    pub fn n(&self) -> usize {
        self.xs.len()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// True when the denominator mean is exactly zero. Tested on the raw sum so
    /// that integer-valued samples are not disturbed by division rounding.
    pub fn denominator_is_zero(&self) -> bool {
        self.ys.iter().sum::<f64>() == 0.0
    }

    pub fn moments(&self) -> SampleMoments {
        compute_moments(self)
    }

    pub fn ratio_estimate(&self) -> Option<f64> {
        ratio_estimate(self)
    }
}

/// Empirical moments with divisor `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMoments {
    pub n: usize,
    pub mean_x: f64,
    pub mean_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub cov_xy: f64,
    pub m2_x: f64,
    pub m2_y: f64,
}

/// Two-pass computation: means first, then centered sums.
pub fn compute_moments(s: &PairedSample) -> SampleMoments {
    let n = s.n() as f64;
    let mean_x = s.xs.iter().sum::<f64>() / n;
    let mean_y = s.ys.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy, mut qx, mut qy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in s.xs.iter().zip(&s.ys) {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
        qx += x * x;
        qy += y * y;
    }
    SampleMoments {
        n: s.n(),
        mean_x,
        mean_y,
        var_x: sxx / n,
        var_y: syy / n,
        cov_xy: sxy / n,
        m2_x: qx / n,
        m2_y: qy / n,
    }
}

/// `mean(x) / mean(y)`, or `None` when `sum(y) == 0` exactly.
pub fn ratio_estimate(s: &PairedSample) -> Option<f64> {
    if s.denominator_is_zero() {
        return None;
    }
    let n = s.n() as f64;
    Some((s.xs.iter().sum::<f64>() / n) / (s.ys.iter().sum::<f64>() / n))
}

/// A closed interval, or the undefined value produced when the denominator
/// mean is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Interval {
    Defined { lo: f64, hi: f64 },
    Undefined,
}

/// Outcome of asking whether an interval contains a value. `Undefined` is its
/// own outcome; the coverage harness decides how to count it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Membership {
    Covered,
    Missed,
    Undefined,
}

impl Interval {
    /// Panics if `lo > hi` or either endpoint is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        Interval::Defined { lo, hi }
    }

    pub fn symmetric(center: f64, half_width: f64) -> Self {
        Self::new(center - half_width, center + half_width)
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, Interval::Defined { .. })
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        match *self {
            Interval::Defined { lo, hi } => Some((lo, hi)),
            Interval::Undefined => None,
        }
    }

    pub fn width(&self) -> Option<f64> {
        self.bounds().map(|(lo, hi)| hi - lo)
    }

    pub fn membership(&self, value: f64) -> Membership {
        match *self {
            Interval::Defined { lo, hi } if lo <= value && value <= hi => Membership::Covered,
            Interval::Defined { .. } => Membership::Missed,
            Interval::Undefined => Membership::Undefined,
        }
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Interval::Defined { lo, hi } => write!(f, "[{lo}, {hi}]"),
            Interval::Undefined => f.write_str("undefined"),
        }
    }
}

/// Moment class constants: `E[Y] >= l_y > 0`, `E[X^2] <= u_x`, `E[Y^2] <= u_y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentBounds {
    pub l_y: f64,
    pub u_x: f64,
    pub u_y: f64,
}

impl MomentBounds {
    pub fn new(l_y: f64, u_x: f64, u_y: f64) -> Result<Self> {
        let b = Self { l_y, u_x, u_y };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { l_y, u_x, u_y } = *self;
        if !(l_y.is_finite() && l_y > 0.0) {
            return Err(Error::param("l_y", format!("must be finite and > 0, got {l_y}")));
        }
        if !(u_x.is_finite() && u_x >= 0.0) {
            return Err(Error::param("u_x", format!("must be finite and >= 0, got {u_x}")));
        }
        if !(u_y.is_finite() && u_y > 0.0) {
            return Err(Error::param("u_y", format!("must be finite and > 0, got {u_y}")));
        }
        // Jensen: E[Y]^2 <= E[Y^2], otherwise the class is empty.
        if l_y * l_y > u_y * (1.0 + 1e-12) {
            return Err(Error::param(
                "u_y",
                format!("class is empty: l_y^2 = {} exceeds u_y = {u_y}", l_y * l_y),
            ));
        }
        Ok(())
    }

    /// `u_y - l_y^2`, clamped at zero.
    pub fn var_y_bound(&self) -> f64 {
        (self.u_y - self.l_y * self.l_y).max(0.0)
    }
}

/// Support class constants: `X in [a_x, b_x]`, `Y in [a_y, b_y]`, `|E[Y]| >= l_y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportBounds {
    pub a_x: f64,
    pub b_x: f64,
    pub a_y: f64,
    pub b_y: f64,
    pub l_y: f64,
}

impl SupportBounds {
    pub fn new(a_x: f64, b_x: f64, a_y: f64, b_y: f64, l_y: f64) -> Result<Self> {
        let b = Self {
            a_x,
            b_x,
            a_y,
            b_y,
            l_y,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let Self {
            a_x,
            b_x,
            a_y,
            b_y,
            l_y,
        } = *self;
        if [a_x, b_x, a_y, b_y, l_y].iter().any(|v| !v.is_finite()) {
            return Err(Error::param("support", "bounds must be finite"));
        }
        if a_x >= b_x {
            return Err(Error::param("b_x", format!("need a_x < b_x, got [{a_x}, {b_x}]")));
        }
        // A constant denominator reduces to a plain mean of X / c.
        if a_y >= b_y {
            return Err(Error::param("b_y", format!("need a_y < b_y, got [{a_y}, {b_y}]")));
        }
        if l_y <= 0.0 {
            return Err(Error::param("l_y", format!("must be > 0, got {l_y}")));
        }
        if l_y > b_y {
            return Err(Error::param("l_y", format!("must not exceed b_y = {b_y}, got {l_y}")));
        }
        Ok(())
    }

    pub fn range_x(&self) -> f64 {
        self.b_x - self.a_x
    }

    pub fn range_y(&self) -> f64 {
        self.b_y - self.a_y
    }

    /// `max(|a_x|, |b_x|)`.
    pub fn abs_max_x(&self) -> f64 {
        self.a_x.abs().max(self.b_x.abs())
    }

    /// `2 / (b_x - a_x)^2`
    pub fn gamma_x(&self) -> f64 {
        2.0 / (self.range_x() * self.range_x())
    }

    /// `2 l_y^2 / (b_y - a_y)^2`
    pub fn gamma_y(&self) -> f64 {
        2.0 * self.l_y * self.l_y / (self.range_y() * self.range_y())
    }
}

/// The constants of one distribution class. `a_y` is the almost-sure lower
/// bound on `Y` that the Chebyshev easy case needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum ClassBounds {
    Moment {
        #[serde(flatten)]
        bounds: MomentBounds,
        #[serde(default)]
        a_y: Option<f64>,
    },
    Support(SupportBounds),
}

impl ClassBounds {
    pub fn validate(&self) -> Result<()> {
        match self {
            ClassBounds::Moment { bounds, a_y } => {
                bounds.validate()?;
                match a_y {
                    Some(a) if !(a.is_finite() && *a > 0.0) => {
                        Err(Error::param("a_y", format!("must be finite and > 0, got {a}")))
                    }
                    _ => Ok(()),
                }
            }
            ClassBounds::Support(sb) => sb.validate(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample(xs: &[f64], ys: &[f64]) -> PairedSample {
        PairedSample::new(xs.to_vec(), ys.to_vec()).unwrap()
    }

    #[test]
    fn constant_sample_has_zero_spread() {
        let m = sample(&[1.0, 1.0], &[2.0, 2.0]).moments();
        assert_eq!((m.mean_x, m.mean_y), (1.0, 2.0));
        assert_eq!((m.var_x, m.var_y, m.cov_xy), (0.0, 0.0, 0.0));
    }

    #[test]
    fn divisor_is_n() {
        let m = sample(&[0.0, 2.0], &[0.0, 2.0]).moments();
        assert_eq!(m.mean_x, 1.0);
        assert_eq!(m.var_x, 1.0);
        assert_eq!(m.cov_xy, 1.0);
    }

    #[test]
    fn perfectly_anticorrelated() {
        let m = sample(&[1.0, -1.0], &[-1.0, 1.0]).moments();
        assert_eq!(m.cov_xy, -1.0);
        assert_eq!(m.cov_xy / (m.var_x * m.var_y).sqrt(), -1.0);
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(sample(&[1.0, 3.0], &[1.0, 1.0]).ratio_estimate(), Some(2.0));
        assert_eq!(sample(&[5.0], &[0.0]).ratio_estimate(), None);
        assert_eq!(sample(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]).ratio_estimate(), Some(1.0));
        // Nonzero entries that cancel exactly.
        assert_eq!(sample(&[1.0, 1.0], &[1.0, -1.0]).ratio_estimate(), None);
    }

    #[test]
    fn rejects_bad_samples() {
        assert_eq!(PairedSample::new(vec![], vec![]), Err(Error::EmptySample));
        assert!(matches!(
            PairedSample::new(vec![1.0], vec![1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert_eq!(
            PairedSample::new(vec![1.0, f64::NAN], vec![1.0, 2.0]),
            Err(Error::NonFinite { index: 1 })
        );
        assert_eq!(
            PairedSample::new(vec![1.0], vec![f64::INFINITY]),
            Err(Error::NonFinite { index: 0 })
        );
    }

    #[test]
    fn membership_has_three_outcomes() {
        let i = Interval::new(1.0, 3.0);
        assert_eq!(i.membership(1.0), Membership::Covered);
        assert_eq!(i.membership(3.5), Membership::Missed);
        assert_eq!(Interval::Undefined.membership(2.0), Membership::Undefined);
    }

    #[test]
    fn bounds_validation() {
        assert!(MomentBounds::new(1.0, 1.0, 1.0).is_ok());
        assert!(MomentBounds::new(2.0, 1.0, 1.0).is_err());
        assert!(MomentBounds::new(0.0, 1.0, 1.0).is_err());
        assert!(SupportBounds::new(0.0, 1.0, 0.0, 1.0, 0.25).is_ok());
        assert!(SupportBounds::new(0.0, 1.0, 1.0, 1.0, 0.25).is_err());
        assert!(SupportBounds::new(0.0, 1.0, 0.0, 1.0, 2.0).is_err());
        let sb = SupportBounds::new(0.0, 1.0, 0.0, 1.0, 0.25).unwrap();
        assert_relative_eq!(sb.gamma_y(), 0.125);
        assert_relative_eq!(sb.gamma_x(), 2.0);
    }
}
