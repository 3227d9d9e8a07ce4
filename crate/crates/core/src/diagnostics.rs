//! Feasibility and impossibility thresholds, the plug-in rule of thumb,
//! length lower bounds, and signal-to-noise ratios.
//!
//! Functions that return `Option<f64>` use `None` for "not applicable": the
//! quantity is only defined under a precondition that does not hold.

use crate::error::{check_open_unit, Error, Result};
use crate::sample::{ClassBounds, MomentBounds, PairedSample, SupportBounds};
use serde::{Deserialize, Serialize};

/// `2 (u_y - l_y^2) / (n l_y^2)`: the Chebyshev general interval exists for
/// `alpha` strictly above this level.
pub fn alpha_bar_bc(n: usize, mb: &MomentBounds) -> f64 {
    bc_spread(mb) / n as f64
}

/// `2 (u_y - l_y^2) / (alpha l_y^2)`: the Chebyshev general interval exists for
/// `n` strictly above this size.
pub fn n_bar_bc(alpha: f64, mb: &MomentBounds) -> f64 {
    bc_spread(mb) / alpha
}

// 2 (u_y - l_y^2) / l_y^2
fn bc_spread(mb: &MomentBounds) -> f64 {
    2.0 * mb.var_y_bound() / (mb.l_y * mb.l_y)
}

/// `4 exp(-n gamma_y)`.
pub fn alpha_bar_hoeff(n: usize, sb: &SupportBounds) -> f64 {
    4.0 * (-(n as f64) * sb.gamma_y()).exp()
}

/// `ln(4 / alpha) / gamma_y`.
pub fn n_bar_hoeff(alpha: f64, sb: &SupportBounds) -> f64 {
    (4.0 / alpha).ln() / sb.gamma_y()
}

/// Plug-in `n_bar` with empirical moments: `2 (mean(y^2) - mean(y)^2) / (alpha mean(y)^2)`.
/// `None` when the denominator mean is zero.
pub fn plug_in_n_bar(s: &PairedSample, alpha: f64) -> Result<Option<f64>> {
    check_open_unit("alpha", alpha)?;
    if s.denominator_is_zero() {
        return Ok(None);
    }
    let m = s.moments();
    Ok(Some(2.0 * m.var_y / (alpha * m.mean_y * m.mean_y)))
}

/// `(1 - l_y^2 / u_y)^n`.
pub fn alpha_underline_bc(n: usize, mb: &MomentBounds) -> f64 {
    let base = (1.0 - mb.l_y * mb.l_y / mb.u_y).max(0.0);
    base.powf(n as f64)
}

/// `(1 - l_y / (b_y - a_y))^n`, applicable when `(b_y - a_y) / l_y > 1`.
pub fn alpha_underline_hoeff(n: usize, sb: &SupportBounds) -> Option<f64> {
    let ratio = sb.range_y() / sb.l_y;
    (ratio > 1.0).then(|| (1.0 - 1.0 / ratio).powf(n as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Bc,
    Hoeffding,
}

/// The impossibility level `alpha_lower` and the feasibility level
/// `alpha_upper` at sample size `n`. Their order is not asserted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalLevelBracket {
    pub alpha_lower: Option<f64>,
    pub alpha_upper: f64,
    pub n: usize,
    pub class_kind: ClassKind,
}

pub fn critical_bracket(n: usize, bounds: &ClassBounds) -> Result<CriticalLevelBracket> {
    bounds.validate()?;
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    Ok(match bounds {
        ClassBounds::Moment { bounds: mb, .. } => CriticalLevelBracket {
            alpha_lower: Some(alpha_underline_bc(n, mb)),
            alpha_upper: alpha_bar_bc(n, mb),
            n,
            class_kind: ClassKind::Bc,
        },
        ClassBounds::Support(sb) => CriticalLevelBracket {
            alpha_lower: alpha_underline_hoeff(n, sb),
            alpha_upper: alpha_bar_hoeff(n, sb),
            n,
            class_kind: ClassKind::Hoeffding,
        },
    })
}

/// `u_x / (l_y + sqrt(u_y - l_y^2))^2`.
pub fn v_n(mb: &MomentBounds) -> f64 {
    let d = mb.l_y + mb.var_y_bound().sqrt();
    mb.u_x / (d * d)
}

/// `sqrt(v_n / (3 n alpha))`, the half-width below which no interval centred
/// on the ratio estimate has uniform coverage `1 - alpha`. Applicable for
/// `n >= 7` and `alpha < min(1, n / (l_y + sqrt(u_y - l_y^2))^2)`.
pub fn length_lower_bound(n: usize, alpha: f64, mb: &MomentBounds) -> Result<Option<f64>> {
    check_open_unit("alpha", alpha)?;
    mb.validate()?;
    let d = mb.l_y + mb.var_y_bound().sqrt();
    if n < 7 || alpha >= n as f64 / (d * d) {
        return Ok(None);
    }
    Ok(Some((v_n(mb) / (3.0 * n as f64 * alpha)).sqrt()))
}

/// `e_y sqrt(n) gamma_y / sqrt(v22)`.
pub fn snr(e_y: f64, v22: f64, gamma_y: f64, n: usize) -> Result<f64> {
    if !(v22 > 0.0) {
        return Err(Error::param("v22", format!("must be > 0, got {v22}")));
    }
    if !(gamma_y > 0.0) {
        return Err(Error::param("gamma_y", format!("must be > 0, got {gamma_y}")));
    }
    Ok(e_y * (n as f64).sqrt() * gamma_y / v22.sqrt())
}

/// `l_y sqrt(n) / sqrt(u_y)`.
pub fn snr_tilde(n: usize, mb: &MomentBounds) -> f64 {
    mb.l_y * (n as f64).sqrt() / mb.u_y.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConsistencyContext {
    DeltaMethod,
    Bootstrap,
}

/// Bernoulli denominators with `p_n ~ n^-b`: both the delta method and the
/// bootstrap are pointwise consistent exactly when `b < 1`.
pub fn bernoulli_consistency(b_exponent: f64, _context: ConsistencyContext) -> bool {
    b_exponent < 1.0
}

/// `(1 - x/n)^(n-1) >= 1/3` for `n >= 7`, `x in (0, 1)`.
pub fn lemma4_check(n: usize, x: f64) -> Result<bool> {
    if n < 7 {
        return Err(Error::param("n", format!("must be >= 7, got {n}")));
    }
    check_open_unit("x", x)?;
    Ok((1.0 - x / n as f64).powf(n as f64 - 1.0) >= 1.0 / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mb(l: f64, ux: f64, uy: f64) -> MomentBounds {
        MomentBounds::new(l, ux, uy).unwrap()
    }

    #[test]
    fn alpha_bar_examples() {
        assert_relative_eq!(alpha_bar_bc(1000, &mb(0.25, 1.0, 1.0625)), 0.032, max_relative = 1e-12);
        assert_eq!(alpha_bar_bc(10, &mb(0.5, 1.0, 0.25)), 0.0);
        let m = mb(0.3, 1.0, 2.0);
        assert_relative_eq!(alpha_bar_bc(200, &m), alpha_bar_bc(100, &m) / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn n_bar_examples() {
        assert_relative_eq!(n_bar_bc(0.1, &mb(0.1, 1.25, 2.01)), 4000.0, max_relative = 1e-12);
        let m = mb(0.2, 1.0, 1.5);
        for n in [3, 17, 1000, 123_456] {
            assert_relative_eq!(n_bar_bc(alpha_bar_bc(n, &m), &m), n as f64, max_relative = 1e-12);
        }
        assert_relative_eq!(n_bar_bc(1.0 - 1e-15, &m), 2.0 * (1.5 - 0.04) / 0.04, max_relative = 1e-12);
    }

    #[test]
    fn plug_in_examples() {
        let s = PairedSample::new(vec![1.0; 3], vec![2.5; 3]).unwrap();
        assert_eq!(plug_in_n_bar(&s, 0.05).unwrap(), Some(0.0));
        let s = PairedSample::new(vec![0.0; 4], vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(plug_in_n_bar(&s, 0.05).unwrap().unwrap(), 120.0, max_relative = 1e-12);
        let s = PairedSample::new(vec![1.0; 2], vec![0.0; 2]).unwrap();
        assert_eq!(plug_in_n_bar(&s, 0.05).unwrap(), None);
    }

    #[test]
    fn alpha_underline_examples() {
        let v = alpha_underline_bc(10, &mb(0.25, 1.0, 1.0625));
        assert_relative_eq!(v, (16.0f64 / 17.0).powi(10), max_relative = 1e-14);
        assert!((v - 0.5454).abs() < 5e-5);
        assert_eq!(alpha_underline_bc(5, &mb(1.0, 1.0, 1.0)), 0.0);
        assert_relative_eq!(alpha_underline_bc(1, &mb(1.0, 1.0, 2.0)), 0.5);

        let sb = SupportBounds::new(0.0, 1.0, 0.0, 1.0, 0.25).unwrap();
        assert_eq!(alpha_underline_hoeff(4, &sb), Some(0.31640625));
        let tight = SupportBounds::new(0.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(alpha_underline_hoeff(4, &tight), None);
        assert!(alpha_underline_hoeff(100_000, &sb).unwrap() < 1e-300);
    }

    #[test]
    fn bracket_composition() {
        let m = mb(0.25, 1.0, 1.0625);
        let cb = ClassBounds::Moment { bounds: m, a_y: None };
        let b = critical_bracket(1000, &cb).unwrap();
        assert_eq!(b.class_kind, ClassKind::Bc);
        assert_eq!(b.alpha_upper, alpha_bar_bc(1000, &m));
        assert_eq!(b.alpha_lower, Some(alpha_underline_bc(1000, &m)));
        let b10 = critical_bracket(10, &cb).unwrap();
        assert!(b10.alpha_upper > b.alpha_upper);
        assert!(b10.alpha_lower.unwrap() > b.alpha_lower.unwrap());

        let tight = SupportBounds::new(0.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let h = critical_bracket(4, &ClassBounds::Support(tight)).unwrap();
        assert_eq!(h.class_kind, ClassKind::Hoeffding);
        assert_eq!(h.alpha_lower, None);
    }

    #[test]
    fn thresholds_decrease_in_n() {
        let ns = [10, 100, 1000, 10_000];
        for ratio in [1.1, 1.5, 2.0, 5.0, 10.0, 20.0] {
            let l: f64 = 0.4;
            let m = mb(l, 1.0, ratio * l * l);
            for w in ns.windows(2) {
                assert!(alpha_bar_bc(w[1], &m) < alpha_bar_bc(w[0], &m));
                let (lo0, lo1) = (alpha_underline_bc(w[0], &m), alpha_underline_bc(w[1], &m));
                assert!(lo1 < lo0 || (lo1 == 0.0 && lo0 == 0.0), "ratio {ratio}");
            }
        }
    }

    #[test]
    fn hoeffding_thresholds() {
        let sb = SupportBounds::new(0.0, 1.0, 0.0, 1.0, 0.25).unwrap();
        assert_relative_eq!(n_bar_hoeff(0.05, &sb), 80f64.ln() / 0.125, max_relative = 1e-14);
        assert!(alpha_bar_hoeff(35, &sb) > 0.05);
        assert!(alpha_bar_hoeff(36, &sb) < 0.05);
    }

    #[test]
    fn length_bound_examples() {
        let m = mb(1.0, 1.0, 1.0);
        let v = length_lower_bound(100, 0.05, &m).unwrap().unwrap();
        assert_relative_eq!(v, (1.0f64 / 15.0).sqrt(), max_relative = 1e-14);
        assert!((v - 0.2582).abs() < 5e-5);
        let v4 = length_lower_bound(100, 0.05, &mb(1.0, 4.0, 1.0)).unwrap().unwrap();
        assert_relative_eq!(v4, 2.0 * v, max_relative = 1e-14);
        assert_eq!(length_lower_bound(6, 0.05, &m).unwrap(), None);
        // alpha must stay below n / (l + sqrt(u - l^2))^2 = 7 / 16.
        let wide = mb(1.0, 1.0, 10.0);
        assert_eq!(length_lower_bound(7, 0.5, &wide).unwrap(), None);
        assert!(length_lower_bound(7, 0.4, &wide).unwrap().is_some());
    }

    #[test]
    fn snr_examples() {
        let p: f64 = 0.25;
        let s = snr(p, 1.0, 1.0 / (p * (1.0 - p)).sqrt(), 100).unwrap();
        assert_relative_eq!(s, (100.0 * p / (1.0 - p)).sqrt(), max_relative = 1e-14);
        assert!((s - 5.7735).abs() < 1e-4);
        assert_eq!(snr(0.0, 1.0, 1.0, 100).unwrap(), 0.0);
        assert_relative_eq!(snr(0.3, 2.0, 1.5, 400).unwrap(), 2.0 * snr(0.3, 2.0, 1.5, 100).unwrap());
        assert!(snr(1.0, 0.0, 1.0, 10).is_err());
    }

    #[test]
    fn snr_tilde_examples() {
        assert_relative_eq!(snr_tilde(49, &mb(2.0, 1.0, 4.0)), 7.0);
        assert_relative_eq!(snr_tilde(100, &mb(0.1, 1.0, 1.0)), 1.0, max_relative = 1e-14);
        let m = mb(0.3, 1.0, 1.0);
        assert_relative_eq!(snr_tilde(400, &m), 2.0 * snr_tilde(100, &m), max_relative = 1e-14);
    }

    #[test]
    fn bernoulli_consistency_examples() {
        for ctx in [ConsistencyContext::DeltaMethod, ConsistencyContext::Bootstrap] {
            assert!(bernoulli_consistency(0.5, ctx));
            assert!(!bernoulli_consistency(1.0, ctx));
            assert!(bernoulli_consistency(0.0, ctx));
        }
    }

    #[test]
    fn power_bound_examples() {
        assert!(lemma4_check(7, 0.999).unwrap());
        assert!(lemma4_check(7, 1e-12).unwrap());
        assert!(lemma4_check(1000, 0.5).unwrap());
        assert!(lemma4_check(6, 0.5).is_err());
        assert!(lemma4_check(7, 1.0).is_err());
    }
}
