//! Worst-case discrete distributions behind the impossibility thresholds, with
//! their exact analytic quantities.
//!
//! Every constructor checks the moment identities its distribution is built to
//! satisfy and fails with [`Error::ConstructionInvariant`] if rounding breaks
//! them.

use crate::diagnostics::v_n;
use crate::error::{check_open_unit, Error, Result};
use crate::rng::{stream, StreamTag};
use crate::sample::{MomentBounds, SupportBounds};
use rand::Rng;
use serde::{Deserialize, Serialize};

const MOMENT_RTOL: f64 = 1e-10;

/// A finitely supported distribution on the real line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct DiscreteDist {
    atoms: Vec<(f64, f64)>,
    cumulative: Vec<f64>,
}

impl DiscreteDist {
    /// Atoms `(value, prob)`. Equal values are merged; probabilities must be
    /// positive and sum to one within `1e-12`.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::param("atoms", "at least one atom required"));
        }
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, p) in atoms {
            if !v.is_finite() {
                return Err(Error::param("atoms", format!("non-finite value {v}")));
            }
            if !(p > 0.0 && p <= 1.0 + 1e-12) {
                return Err(Error::param("atoms", format!("probability {p} not in (0, 1]")));
            }
            match merged.iter_mut().find(|(w, _)| *w == v) {
                Some(slot) => slot.1 += p,
                None => merged.push((v, p)),
            }
        }
        let total: f64 = merged.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::param("atoms", format!("probabilities sum to {total}")));
        }
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = merged
            .iter()
            .map(|a| {
                acc += a.1;
                acc
            })
            .collect();
        *cumulative.last_mut().expect("nonempty") = 1.0;
        Ok(Self {
            atoms: merged,
            cumulative,
        })
    }

    pub fn point_mass(value: f64) -> Result<Self> {
        Self::new(vec![(value, 1.0)])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|(v, p)| v * p).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.atoms.iter().map(|(v, p)| v * v * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.atoms.iter().map(|(v, p)| (v - m) * (v - m) * p).sum()
    }

    pub fn prob_of(&self, value: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 == value).map(|a| a.1).sum()
    }

    /// Inverse-CDF lookup for `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let k = self.cumulative.partition_point(|&c| c <= u);
        self.atoms[k.min(self.atoms.len() - 1)].0
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

impl TryFrom<Vec<(f64, f64)>> for DiscreteDist {
    type Error = Error;

    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DiscreteDist> for Vec<(f64, f64)> {
    fn from(d: DiscreteDist) -> Self {
        d.atoms
    }
}

/// `n` i.i.d. draws, deterministic in `seed`.
pub fn sample_discrete(d: &DiscreteDist, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, StreamTag::Sampling, 0);
    (0..n).map(|_| d.draw(&mut rng)).collect()
}

fn check_close(what: &str, got: f64, want: f64) -> Result<()> {
    if (got - want).abs() <= MOMENT_RTOL * want.abs().max(f64::MIN_POSITIVE) {
        Ok(())
    } else {
        Err(Error::ConstructionInvariant(format!("{what}: got {got}, want {want}")))
    }
}

/// Chebyshev-class distribution putting as much mass as possible on
/// `{Y_bar = 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroDenominatorDist {
    pub y: DiscreteDist,
    pub x: DiscreteDist,
    /// Exact `P(Y_bar_n = 0)`.
    pub p_ybar_zero: f64,
    /// Mass of the atom at zero.
    pub zero_mass: f64,
}

/// Open interval of admissible `xi`: `(0, min(1, u_y / l_y^2 - 1))`.
pub fn bc_xi_max(mb: &MomentBounds) -> f64 {
    1f64.min(mb.u_y / (mb.l_y * mb.l_y) - 1.0)
}

/// `Y` with mass `m = 1 - (l^2/u)(1 + xi)` at zero and `(1 - m)/2` at each of
/// `l (1 +/- sqrt(xi)) / (1 - m)`; `X` is the point mass at `sqrt(u_x)`.
/// `E[Y] = l_y`, `E[Y^2] = u_y` and `P(Y_bar_n = 0) = m^n`.
pub fn bc_zero_denominator_dist(n: usize, mb: &MomentBounds, xi: f64) -> Result<ZeroDenominatorDist> {
    mb.validate()?;
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    let xi_max = bc_xi_max(mb);
    if !(xi > 0.0 && xi < xi_max) {
        return Err(Error::param("xi", format!("must lie in (0, {xi_max}), got {xi}")));
    }
    let l = mb.l_y;
    let m = 1.0 - l * l / mb.u_y * (1.0 + xi);
    let s = xi.sqrt();
    let half = (1.0 - m) / 2.0;
    let y = DiscreteDist::new(vec![
        (0.0, m),
        (l * (1.0 - s) / (1.0 - m), half),
        (l * (1.0 + s) / (1.0 - m), half),
    ])?;
    check_close("E[Y]", y.mean(), l)?;
    check_close("E[Y^2]", y.second_moment(), mb.u_y)?;
    let x = DiscreteDist::point_mass(mb.u_x.sqrt())?;
    check_close("E[X^2]", x.second_moment(), mb.u_x)?;
    Ok(ZeroDenominatorDist {
        y,
        x,
        p_ybar_zero: m.powf(n as f64),
        zero_mass: m,
    })
}

/// Hoeffding-class analogue: mass `m = 1 - (l / (b_y - a_y))(1 + xi)` at zero,
/// the upper atom at exactly `b_y - a_y`, and `X` uniform on `{0, b_x - a_x}`.
pub fn hoeff_zero_denominator_dist(n: usize, sb: &SupportBounds, xi: f64) -> Result<ZeroDenominatorDist> {
    sb.validate()?;
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    let l = sb.l_y;
    let range = sb.range_y();
    let xi_max = 1f64.min(range / l - 1.0);
    if !(xi_max > 0.0) {
        return Err(Error::param("l_y", "requires (b_y - a_y) / l_y > 1"));
    }
    if !(xi > 0.0 && xi < xi_max) {
        return Err(Error::param("xi", format!("must lie in (0, {xi_max}), got {xi}")));
    }
    let m = 1.0 - l / range * (1.0 + xi);
    let half = (1.0 - m) / 2.0;
    let y_plus = l * (1.0 + xi) / (1.0 - m);
    let y = DiscreteDist::new(vec![(0.0, m), (l * (1.0 - xi) / (1.0 - m), half), (y_plus, half)])?;
    check_close("E[Y]", y.mean(), l)?;
    check_close("y_plus", y_plus, range)?;
    let x = DiscreteDist::new(vec![(0.0, 0.5), (sb.range_x(), 0.5)])?;
    check_close("E[X]", x.mean(), sb.range_x() / 2.0)?;
    Ok(ZeroDenominatorDist {
        y,
        x,
        p_ybar_zero: m.powf(n as f64),
        zero_mass: m,
    })
}

/// Largest `P(Y_bar_n = 0)` over the grid `xi_k = xi_max 0.9^(k+1)`,
/// `k < points`. Approaches `(1 - l^2/u)^n` from below as `points` grows.
pub fn bc_zero_probability_sup(n: usize, mb: &MomentBounds, points: usize) -> Result<f64> {
    let xi_max = bc_xi_max(mb);
    if !(xi_max > 0.0) {
        return Err(Error::param("u_y", "requires u_y > l_y^2"));
    }
    let mut best = 0.0f64;
    let mut xi = xi_max;
    for _ in 0..points {
        xi *= 0.9;
        best = best.max(bc_zero_denominator_dist(n, mb, xi)?.p_ybar_zero);
    }
    Ok(best)
}

/// Catoni-style pair whose ratio estimate deviates by more than
/// `xi sqrt(v_n / (3 n alpha))` with probability above `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct CatoniPair {
    pub x: DiscreteDist,
    pub y: DiscreteDist,
    pub eta: f64,
}

/// `X` puts `u_x / (2 n^2 eta^2)` on each of `+/- n eta` and the rest on zero;
/// `Y` is uniform on `l_y +/- sqrt(u_y - l_y^2)`; `eta = sqrt(v_n / (3 n alpha))`.
pub fn catoni_pair_dist(n: usize, alpha: f64, mb: &MomentBounds) -> Result<CatoniPair> {
    mb.validate()?;
    check_open_unit("alpha", alpha)?;
    if n < 7 {
        return Err(Error::param("n", format!("must be >= 7, got {n}")));
    }
    let s = mb.var_y_bound().sqrt();
    let d = mb.l_y + s;
    if alpha >= n as f64 / (d * d) {
        return Err(Error::param("alpha", "must be < n / (l_y + sqrt(u_y - l_y^2))^2"));
    }
    if !(mb.u_x > 0.0) {
        return Err(Error::param("u_x", "must be > 0"));
    }
    let nf = n as f64;
    let eta = (v_n(mb) / (3.0 * nf * alpha)).sqrt();
    if !(eta > mb.u_x.sqrt() / nf) {
        return Err(Error::param("alpha", "eta must exceed sqrt(u_x) / n"));
    }
    let tail = mb.u_x / (2.0 * nf * nf * eta * eta);
    let x = DiscreteDist::new(vec![(-nf * eta, tail), (0.0, 1.0 - 2.0 * tail), (nf * eta, tail)])?;
    check_close("E[X^2]", x.second_moment(), mb.u_x)?;
    if x.mean().abs() > MOMENT_RTOL * mb.u_x.sqrt() {
        return Err(Error::ConstructionInvariant(format!("E[X] = {} is not 0", x.mean())));
    }
    let y = DiscreteDist::new(vec![(mb.l_y - s, 0.5), (mb.l_y + s, 0.5)])?;
    check_close("E[Y]", y.mean(), mb.l_y)?;
    check_close("E[Y^2]", y.second_moment(), mb.u_y)?;
    Ok(CatoniPair { x, y, eta })
}
