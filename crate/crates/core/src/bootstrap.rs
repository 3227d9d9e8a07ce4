//! Efron percentile bootstrap.
//!
//! Replicate `b` draws its indices from the counter-based stream
//! `(seed, Resample, b)`, so replicates run in parallel and the result does not
//! depend on scheduling.

use crate::error::{check_open_unit, Error, Result};
use crate::rng::{stream, StreamTag};
use crate::sample::{Interval, PairedSample};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// What to do with a replicate whose resampled denominator sums to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UndefinedPolicy {
    /// Exclude it from the order statistics and count it.
    #[default]
    DropAndRecord,
    /// Make the whole interval undefined.
    FailUndefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub b_reps: usize,
    pub seed: u64,
    #[serde(default)]
    pub undefined_policy: UndefinedPolicy,
}

impl BootstrapConfig {
    pub fn new(b_reps: usize, seed: u64) -> Self {
        Self {
            b_reps,
            seed,
            undefined_policy: UndefinedPolicy::default(),
        }
    }

    pub fn with_policy(mut self, policy: UndefinedPolicy) -> Self {
        self.undefined_policy = policy;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapCiResult {
    pub interval: Interval,
    pub dropped_reps: usize,
    pub b_effective: usize,
}

/// `n` indices drawn uniformly from `[0, n)` on stream `(seed, rep)`.
pub fn resample_indices(n: usize, seed: u64, rep: u64) -> Vec<usize> {
    let mut rng = stream(seed, StreamTag::Resample, rep);
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

fn replicate_statistic(s: &PairedSample, seed: u64, rep: u64) -> Option<f64> {
    let n = s.n();
    let (xs, ys) = (s.xs(), s.ys());
    let mut rng = stream(seed, StreamTag::Resample, rep);
    let (mut sx, mut sy) = (0.0, 0.0);
    for _ in 0..n {
        let i = rng.random_range(0..n);
        sx += xs[i];
        sy += ys[i];
    }
    if sy == 0.0 {
        None
    } else {
        Some((sx / n as f64) / (sy / n as f64))
    }
}

/// `B_eff < max(2, ceil(B / 2))`.
fn too_few_replicates(b_effective: usize, b_reps: usize) -> bool {
    b_effective < 2.max(b_reps.div_ceil(2))
}

/// `[q_{alpha/2}, q_{1-alpha/2}]` from ascending replicate statistics, where
/// `q_tau` is the order statistic of 1-based rank `ceil(tau * B)` clamped to
/// `[1, B]`.
pub fn percentile_interval(sorted: &[f64], alpha: f64) -> Result<Interval> {
    check_open_unit("alpha", alpha)?;
    if sorted.is_empty() {
        return Err(Error::param("sorted", "no replicate statistics"));
    }
    Ok(Interval::new(
        order_statistic(sorted, alpha / 2.0),
        order_statistic(sorted, 1.0 - alpha / 2.0),
    ))
}

fn order_statistic(sorted: &[f64], tau: f64) -> f64 {
    let b = sorted.len();
    let rank = ((tau * b as f64).ceil() as usize).clamp(1, b);
    sorted[rank - 1]
}

pub fn bootstrap_ci(s: &PairedSample, alpha: f64, cfg: &BootstrapConfig) -> Result<BootstrapCiResult> {
    check_open_unit("alpha", alpha)?;
    if cfg.b_reps < 2 {
        return Err(Error::param("b_reps", format!("must be >= 2, got {}", cfg.b_reps)));
    }
    if s.denominator_is_zero() {
        return Ok(BootstrapCiResult {
            interval: Interval::Undefined,
            dropped_reps: 0,
            b_effective: 0,
        });
    }
    let stats: Vec<Option<f64>> = (0..cfg.b_reps as u64)
        .into_par_iter()
        .map(|b| replicate_statistic(s, cfg.seed, b))
        .collect();
    let mut defined: Vec<f64> = stats.into_iter().flatten().collect();
    let b_effective = defined.len();
    let dropped_reps = cfg.b_reps - b_effective;
    let too_few = too_few_replicates(b_effective, cfg.b_reps);
    let failed = dropped_reps > 0 && cfg.undefined_policy == UndefinedPolicy::FailUndefined;
    if too_few || failed {
        return Ok(BootstrapCiResult {
            interval: Interval::Undefined,
            dropped_reps,
            b_effective,
        });
    }
    defined.sort_by(f64::total_cmp);
    Ok(BootstrapCiResult {
        interval: percentile_interval(&defined, alpha)?,
        dropped_reps,
        b_effective,
    })
}
