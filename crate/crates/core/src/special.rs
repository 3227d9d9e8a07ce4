//! Normal and Student-t distribution functions.
//!
//! The error function and the regularized incomplete beta come from `statrs`;
//! the quantile inversions are implemented here.

use crate::error::{check_open_unit, Result};
use statrs::function::{beta, erf, gamma};
use std::f64::consts::{PI, SQRT_2};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erf::erfc(-x / SQRT_2)
}

/// Standard normal upper tail `1 - Phi(x)`, accurate for large `x`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erf::erfc(x / SQRT_2)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Inverse standard normal CDF.
///
/// Acklam's rational approximation (relative error about 1.2e-9) followed by a
/// Newton step on `Phi`. For `p > 1/2` the work is done on `q = 1 - p`, which is
/// exact in floating point, so the upper tail keeps full accuracy.
pub fn normal_quantile(p: f64) -> Result<f64> {
    check_open_unit("p", p)?;
    Ok(if p > 0.5 {
        -lower_normal_quantile(1.0 - p)
    } else {
        lower_normal_quantile(p)
    })
}

// p in (0, 1/2]
fn lower_normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549671010422470e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    x - (normal_cdf(x) - p) / normal_pdf(x)
}

/// Student-t CDF with `nu > 0` degrees of freedom.
pub fn student_t_cdf(t: f64, nu: f64) -> f64 {
    if t >= 0.0 {
        1.0 - student_t_sf(t, nu)
    } else {
        student_t_sf(-t, nu)
    }
}

/// Upper tail `P(T > t)` for `t >= 0`.
fn student_t_sf(t: f64, nu: f64) -> f64 {
    let t2 = t * t;
    if t2 < nu {
        // Central form avoids 1 - I near t = 0.
        0.5 - 0.5 * beta::beta_reg(0.5, 0.5 * nu, t2 / (nu + t2))
    } else {
        0.5 * beta::beta_reg(0.5 * nu, 0.5, nu / (nu + t2))
    }
}

/// Student-t density.
pub fn student_t_pdf(t: f64, nu: f64) -> f64 {
    let ln_c = gamma::ln_gamma(0.5 * (nu + 1.0))
        - gamma::ln_gamma(0.5 * nu)
        - 0.5 * (nu * PI).ln();
    (ln_c - 0.5 * (nu + 1.0) * (1.0 + t * t / nu).ln()).exp()
}

/// Inverse Student-t CDF for `nu > 0`.
///
/// Starts from the incomplete-beta inversion, then polishes with Newton steps
/// on the CDF inside a bisection bracket.
pub fn student_t_quantile(p: f64, nu: f64) -> Result<f64> {
    check_open_unit("p", p)?;
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(crate::Error::param("nu", format!("must be > 0, got {nu}")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // Solve for the upper tail mass q = P(T > t), t > 0, then restore sign.
    let (q, sign) = if p > 0.5 { (1.0 - p, 1.0) } else { (p, -1.0) };
    Ok(sign * upper_t_quantile(q, nu))
}

// t > 0 with P(T > t) = q, q in (0, 1/2)
fn upper_t_quantile(q: f64, nu: f64) -> f64 {
    let x = beta::inv_beta_reg(0.5 * nu, 0.5, 2.0 * q);
    let mut t = if x > 0.0 && x < 1.0 {
        (nu * (1.0 - x) / x).sqrt()
    } else {
        1.0
    };
    if !t.is_finite() {
        t = 1.0;
    }

    // Bracket [lo, hi] with sf(lo) >= q >= sf(hi).
    let (mut lo, mut hi) = (0.0_f64, t.max(1.0));
    while student_t_sf(hi, nu) > q {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return hi;
        }
    }
    if t < lo || t > hi {
        t = 0.5 * (lo + hi);
    }
    for _ in 0..100 {
        let r = student_t_sf(t, nu) - q;
        if r == 0.0 {
            return t;
        }
        if r > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        // sf is decreasing: t_new = t + r / pdf
        let step = r / student_t_pdf(t, nu);
        let mut next = t + step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= 1e-15 * t.abs().max(1e-300) || hi - lo <= 1e-15 * hi {
            return next;
        }
        t = next;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Independent oracle: bisection on the lower tail of Phi, p < 1/2.
    fn bisect_phi(p: f64) -> f64 {
        let (mut lo, mut hi) = (-40.0_f64, 0.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if normal_cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn normal_quantile_known_values() {
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
        // Frozen from the bisection oracle.
        assert_abs_diff_eq!(normal_quantile(0.975).unwrap(), 1.959963984540054, epsilon = 1e-9);
        assert_abs_diff_eq!(-bisect_phi(0.025), 1.959963984540054, epsilon = 1e-10);
    }

    #[test]
    fn normal_quantile_matches_bisection_on_a_grid() {
        let mut p = 1e-12;
        while p < 0.5 {
            for pp in [p, 1.0 - p] {
                let q = normal_quantile(pp).unwrap();
                let reference = if pp < 0.5 { bisect_phi(pp) } else { -bisect_phi(1.0 - pp) };
                assert_abs_diff_eq!(q, reference, epsilon = 1e-9);
            }
            p *= 1.7;
        }
    }

    #[test]
    fn normal_quantile_is_odd() {
        // Dyadic p so that 1 - p is exact.
        for p in [2f64.powi(-30), 2f64.powi(-10), 0.03125, 0.25, 0.375] {
            assert_abs_diff_eq!(normal_quantile(p).unwrap(), -normal_quantile(1.0 - p).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn normal_quantile_rejects_out_of_range() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(normal_quantile(p).is_err());
        }
    }

    #[test]
    fn student_t_round_trip() {
        for nu in [2.5, 3.0, 5.0, 30.0] {
            for p in [1e-9, 1e-4, 0.01, 0.2, 0.4999, 0.5001, 0.8, 0.99, 1.0 - 1e-7] {
                let t = student_t_quantile(p, nu).unwrap();
                let back = student_t_cdf(t, nu);
                assert!((back - p).abs() <= 1e-12 * p.min(1.0 - p).max(1e-3), "nu={nu} p={p}");
            }
        }
    }

    #[test]
    fn student_t_known_values() {
        assert_eq!(student_t_quantile(0.5, 3.0).unwrap(), 0.0);
        // nu = 3 has a closed-form CDF: 1/2 + (atan(u) + u/(1+u^2)) / pi, u = t / sqrt(3).
        let cdf3 = |t: f64| {
            let u = t / 3f64.sqrt();
            0.5 + (u.atan() + u / (1.0 + u * u)) / PI
        };
        for p in [0.01, 0.1, 0.3, 0.7, 0.975] {
            let t = student_t_quantile(p, 3.0).unwrap();
            assert_abs_diff_eq!(cdf3(t), p, epsilon = 1e-12);
        }
        // Tabulated t_{0.975, 3}
        assert_abs_diff_eq!(student_t_quantile(0.975, 3.0).unwrap(), 3.182446305284263, epsilon = 1e-8);
    }
}
