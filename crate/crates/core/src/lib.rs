//! Confidence intervals for ratios of expectations `E[X] / E[Y]`.
//!
//! Three families of intervals are provided: the delta method, the Efron
//! percentile bootstrap, and finite-sample intervals built from Chebyshev and
//! Hoeffding bounds. Alongside them sit the feasibility and impossibility
//! thresholds, a regime classifier for weak denominators, the worst-case
//! distributions used to probe those thresholds, and a Monte Carlo harness for
//! coverage studies.
//!
//! An interval is [`Interval::Undefined`] whenever the sample denominator mean
//! is exactly zero.

pub mod adversarial;
pub mod analyze;
pub mod asymptotic;
pub mod bootstrap;
pub mod dgp;
pub mod diagnostics;
mod error;
pub mod experiment;
pub mod format;
pub mod montecarlo;
pub mod nonasymptotic;
pub mod plot;
pub mod regime;
pub mod rng;
pub mod sample;
pub mod special;

pub use asymptotic::{delta_ci, DeltaCiResult};
pub use bootstrap::{bootstrap_ci, resample_indices, BootstrapCiResult, BootstrapConfig, UndefinedPolicy};
pub use nonasymptotic::{build_nonasymptotic_ci, HalfWidth, NonasymptoticCi, NonasymptoticMethod};
pub use regime::{classify_regime, Exponent, LawFamily, RegimeInput, RegimeVerdict};
pub use error::{Error, Result};
pub use sample::{
    compute_moments, ratio_estimate, ClassBounds, Interval, Membership, MomentBounds, PairedSample,
    SampleMoments, SupportBounds,
};
pub use special::normal_quantile;
