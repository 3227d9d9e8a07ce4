//! Delta-method interval `theta_hat +/- z_{1-alpha/2} sqrt(Sigma_hat / n)` with
//!
//! ```text
//! Sigma = V[X]/E[Y]^2 + E[X]^2 V[Y]/E[Y]^4 - 2 Cov[X,Y] E[X]/E[Y]^3
//! ```
//!
//! evaluated at the empirical moments (divisor `n`).

use crate::error::{check_open_unit, Result};
use crate::sample::{Interval, PairedSample, SampleMoments};
use crate::special::normal_quantile;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaCiResult {
    pub interval: Interval,
    /// Plug-in asymptotic variance; `None` when the estimate is undefined.
    pub sigma2_hat: Option<f64>,
    pub theta_hat: Option<f64>,
}

/// Plug-in `Sigma`, clamped at zero against rounding. Requires `mean_y != 0`.
pub fn sigma2_from_moments(m: &SampleMoments) -> f64 {
    let (ex, ey) = (m.mean_x, m.mean_y);
    let ey2 = ey * ey;
    let s = m.var_x / ey2 + ex * ex * m.var_y / (ey2 * ey2) - 2.0 * m.cov_xy * ex / (ey2 * ey);
    s.max(0.0)
}

pub fn delta_ci(s: &PairedSample, alpha: f64) -> Result<DeltaCiResult> {
    check_open_unit("alpha", alpha)?;
    if s.denominator_is_zero() {
        return Ok(DeltaCiResult {
            interval: Interval::Undefined,
            sigma2_hat: None,
            theta_hat: None,
        });
    }
    let m = s.moments();
    let theta = m.mean_x / m.mean_y;
    let sigma2 = sigma2_from_moments(&m);
    let z = normal_quantile(1.0 - alpha / 2.0)?;
    let half = z * (sigma2 / s.n() as f64).sqrt();
    Ok(DeltaCiResult {
        interval: Interval::symmetric(theta, half),
        sigma2_hat: Some(sigma2),
        theta_hat: Some(theta),
    })
}
