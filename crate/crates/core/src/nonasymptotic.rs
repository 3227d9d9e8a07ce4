//! Finite-sample intervals `[theta_hat - t, theta_hat + t]` with half-widths
//! from Chebyshev (moment classes) and Hoeffding (bounded supports) bounds.
//!
//! The "general" variants put no restriction on the support of `Y` and only
//! exist above a critical level; below it they return
//! [`HalfWidth::Infeasible`].

use crate::diagnostics::{alpha_bar_bc, alpha_bar_hoeff};
use crate::error::{check_open_unit, Error, Result};
use crate::sample::{ClassBounds, Interval, MomentBounds, PairedSample, SupportBounds};
use serde::{Deserialize, Serialize};

// Relative slack on the feasibility boundary, so that `n == n_bar` computed
// through rounding stays infeasible.
const BOUNDARY_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonasymptoticMethod {
    BcEasy,
    BcGeneral,
    HoeffEasy,
    HoeffGeneral,
}

impl NonasymptoticMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::BcEasy => "bc_easy",
            Self::BcGeneral => "bc_general",
            Self::HoeffEasy => "hoeff_easy",
            Self::HoeffGeneral => "hoeff_general",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HalfWidth {
    Finite(f64),
    Infeasible,
}

impl HalfWidth {
    pub fn finite(self) -> Option<f64> {
        match self {
            HalfWidth::Finite(t) => Some(t),
            HalfWidth::Infeasible => None,
        }
    }

    /// The half-width, with `+inf` for the infeasible marker.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    pub fn is_feasible(self) -> bool {
        matches!(self, HalfWidth::Finite(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonasymptoticCi {
    pub interval: Interval,
    pub half_width: HalfWidth,
    pub method: NonasymptoticMethod,
    pub feasible: bool,
}

fn check_n(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    Ok(n as f64)
}

/// Chebyshev bound when `Y >= a_y > 0` almost surely:
/// `(1/l_y) r (1 + (r + sqrt(u_x)) / a_y)`, `r = sqrt((u_x + u_y - l_y^2) / (n alpha))`.
pub fn bc_easy_halfwidth(n: usize, alpha: f64, mb: &MomentBounds, a_y: f64) -> Result<f64> {
    let nf = check_n(n)?;
    check_open_unit("alpha", alpha)?;
    mb.validate()?;
    if !(a_y.is_finite() && a_y > 0.0) {
        return Err(Error::param("a_y", format!("must be finite and > 0, got {a_y}")));
    }
    let k = mb.u_x + mb.var_y_bound();
    let r = (k / (nf * alpha)).sqrt();
    Ok(r / mb.l_y * (1.0 + (r + mb.u_x.sqrt()) / a_y))
}

/// Chebyshev bound with no support restriction, feasible for
/// `alpha > 2 (u_y - l_y^2) / (n l_y^2)`.
pub fn bc_general_halfwidth(n: usize, alpha: f64, mb: &MomentBounds) -> Result<HalfWidth> {
    let nf = check_n(n)?;
    check_open_unit("alpha", alpha)?;
    mb.validate()?;
    if alpha <= alpha_bar_bc(n, mb) * (1.0 + BOUNDARY_RTOL) {
        return Ok(HalfWidth::Infeasible);
    }
    let l = mb.l_y;
    let eps = (2.0 * mb.u_x / (nf * alpha)).sqrt();
    let eps_t = (2.0 * mb.var_y_bound() / (nf * alpha * l * l)).sqrt();
    if eps_t >= 1.0 {
        return Ok(HalfWidth::Infeasible);
    }
    let d = 1.0 - eps_t;
    Ok(HalfWidth::Finite(((mb.u_x.sqrt() + eps) * eps_t / (d * d) + eps) / l))
}

/// Hoeffding bound when `a_y > 0`:
/// `(r / l_y)(1 + (max(|a_x|, |b_x|) + r) / a_y)`,
/// `r = sqrt(max((b_x - a_x)^2, (b_y - a_y)^2) ln(4/alpha) / (2n))`.
pub fn hoeff_easy_halfwidth(n: usize, alpha: f64, sb: &SupportBounds) -> Result<f64> {
    let nf = check_n(n)?;
    check_open_unit("alpha", alpha)?;
    sb.validate()?;
    if !(sb.a_y > 0.0) {
        return Err(Error::param("a_y", format!("must be > 0, got {}", sb.a_y)));
    }
    let u = sb.range_x().powi(2).max(sb.range_y().powi(2));
    let r = (u * (4.0 / alpha).ln() / (2.0 * nf)).sqrt();
    Ok(r / sb.l_y * (1.0 + (sb.abs_max_x() + r) / sb.a_y))
}

/// Hoeffding bound with no sign restriction on `Y`, feasible for
/// `alpha > 4 exp(-n gamma_y)`.
pub fn hoeff_general_halfwidth(n: usize, alpha: f64, sb: &SupportBounds) -> Result<HalfWidth> {
    let nf = check_n(n)?;
    check_open_unit("alpha", alpha)?;
    sb.validate()?;
    if alpha <= alpha_bar_hoeff(n, sb) * (1.0 + BOUNDARY_RTOL) {
        return Ok(HalfWidth::Infeasible);
    }
    let log_term = (4.0 / alpha).ln();
    let (gx, gy) = (sb.gamma_x(), sb.gamma_y());
    let ex = (log_term / (nf * gx)).sqrt();
    let ey = (log_term / (nf * gy)).sqrt();
    if ey >= 1.0 {
        return Ok(HalfWidth::Infeasible);
    }
    let lead = (log_term / (nf * gx.min(gy))).sqrt();
    let d = 1.0 - ey;
    Ok(HalfWidth::Finite(lead * ((sb.abs_max_x() + ex) / (d * d) + 1.0) / sb.l_y))
}

/// Half-width of `method` at `(n, alpha)` for the given class.
pub fn half_width(
    n: usize,
    alpha: f64,
    method: NonasymptoticMethod,
    bounds: &ClassBounds,
) -> Result<HalfWidth> {
    use NonasymptoticMethod::*;
    match (method, bounds) {
        (BcEasy, ClassBounds::Moment { bounds, a_y: Some(a_y) }) => {
            bc_easy_halfwidth(n, alpha, bounds, *a_y).map(HalfWidth::Finite)
        }
        (BcEasy, _) => Err(Error::BoundsMismatch {
            method: "bc_easy",
            expected: "moment (with a_y)",
        }),
        (BcGeneral, ClassBounds::Moment { bounds, .. }) => bc_general_halfwidth(n, alpha, bounds),
        (BcGeneral, _) => Err(Error::BoundsMismatch {
            method: "bc_general",
            expected: "moment",
        }),
        (HoeffEasy, ClassBounds::Support(sb)) => hoeff_easy_halfwidth(n, alpha, sb).map(HalfWidth::Finite),
        (HoeffGeneral, ClassBounds::Support(sb)) => hoeff_general_halfwidth(n, alpha, sb),
        (HoeffEasy | HoeffGeneral, _) => Err(Error::BoundsMismatch {
            method: method.name(),
            expected: "support",
        }),
    }
}

pub fn build_nonasymptotic_ci(
    s: &PairedSample,
    alpha: f64,
    method: NonasymptoticMethod,
    bounds: &ClassBounds,
) -> Result<NonasymptoticCi> {
    let hw = half_width(s.n(), alpha, method, bounds)?;
    Ok(assemble(s, hw, method))
}

/// Wraps a precomputed half-width around the sample's ratio estimate.
pub fn assemble(s: &PairedSample, hw: HalfWidth, method: NonasymptoticMethod) -> NonasymptoticCi {
    let interval = match (hw, s.ratio_estimate()) {
        (HalfWidth::Finite(t), Some(theta)) => Interval::symmetric(theta, t),
        _ => Interval::Undefined,
    };
    NonasymptoticCi {
        interval,
        half_width: hw,
        method,
        feasible: hw.is_feasible(),
    }
}
