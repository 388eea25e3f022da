//! Noise stability under independent vote corruption.
//!
//! Given votes `X` drawn from a [`BiasedMeasure`], the corrupted votes `Y`
//! keep each `X_i` with probability `rho` and otherwise redraw it from the
//! same measure. `S_rho(f) = E f(X) f(Y)`, and the outcome survives
//! corruption with probability `(1 + S_rho(f)) / 2`.

mod exact;
pub(crate) mod mc;
mod threshold;

use serde::Serialize;

use crate::cube::BiasedMeasure;
use crate::error::{out_of_range, Result};

pub use exact::{
    fourier_level_weights, noise_operator, noise_operator_with, stability_exact,
    stability_exact_with, stability_fourier,
};
pub use mc::{sample_corrupted, stability_mc, stability_mc_table, McConfig};
pub use threshold::{find_matching_threshold, ThresholdMatch};

#[derive(Clone, Debug, PartialEq)]
pub struct CorruptionModel {
    rho: f64,
    measure: BiasedMeasure,
}

impl CorruptionModel {
    pub fn new(rho: f64, measure: BiasedMeasure) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(out_of_range("rho", rho, "0 <= rho <= 1"));
        }
        Ok(CorruptionModel { rho, measure })
    }

    pub fn uniform(rho: f64) -> Result<Self> {
        Self::new(rho, BiasedMeasure::uniform())
    }

    /// Uniform votes, each flipped independently with probability `eps`
    /// (`rho = 1 - 2 eps`).
    pub fn from_flip_probability(eps: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&eps) {
            return Err(out_of_range("epsilon", eps, "0 <= epsilon <= 1/2"));
        }
        Self::uniform(1.0 - 2.0 * eps)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn measure(&self) -> &BiasedMeasure {
        &self.measure
    }

    /// Probability that a `+1` vote ends up `-1`.
    pub(crate) fn plus_to_minus(&self) -> f64 {
        (1.0 - self.rho) * (1.0 - self.measure.p_f64())
    }

    /// Probability that a `-1` vote ends up `+1`.
    pub(crate) fn minus_to_plus(&self) -> f64 {
        (1.0 - self.rho) * self.measure.p_f64()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: Option<u64>,
    pub exact: bool,
}

impl StabilityEstimate {
    pub fn exact(value: f64) -> Self {
        StabilityEstimate {
            value,
            stderr: 0.0,
            samples: 0,
            seed: None,
            exact: true,
        }
    }
}

/// Probability that corruption changes the outcome, `(1 - S) / 2`.
pub fn outcome_change_prob(stability: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&stability) {
        return Err(out_of_range("S", stability, "-1 <= S <= 1"));
    }
    Ok((1.0 - stability) / 2.0)
}

/// Large-`n` noise stability of majority, `(2/pi) arcsin(rho)`.
pub fn majority_limit_stability(rho: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(out_of_range("rho", rho, "0 <= rho <= 1"));
    }
    Ok(std::f64::consts::FRAC_2_PI * rho.asin())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmallNoiseMethod {
    Majority,
    /// Majority of `states` equal-sized state majorities.
    TwoTierEqual { states: u32 },
}

/// First-order small-noise approximation of `S_{1-2 eps}`:
/// `1 - (4/pi) sqrt(eps)` for majority and
/// `1 - 2 (2/pi)^(3/2) sqrt(m) sqrt(eps)` for the two-tier method.
/// Both describe the regime `m < 1/eps < n` and are evaluated verbatim.
pub fn asymptotic_small_eps(method: SmallNoiseMethod, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(out_of_range("epsilon", eps, "0 < epsilon < 1/2"));
    }
    Ok(1.0 - small_noise_slope(method)? * eps.sqrt())
}

fn small_noise_slope(method: SmallNoiseMethod) -> Result<f64> {
    use std::f64::consts::PI;
    match method {
        SmallNoiseMethod::Majority => Ok(4.0 / PI),
        SmallNoiseMethod::TwoTierEqual { states } => {
            if states == 0 {
                return Err(out_of_range("states", 0.0, "m >= 1"));
            }
            Ok(2.0 * (2.0 / PI).powf(1.5) * (states as f64).sqrt())
        }
    }
}

/// Ratio of small-noise outcome-change probabilities, two-tier over
/// majority: `2 (2/pi)^(3/2) sqrt(m) / (4/pi)`.
pub fn asymptotic_flip_ratio(states: u32) -> Result<f64> {
    Ok(small_noise_slope(SmallNoiseMethod::TwoTierEqual { states })?
        / small_noise_slope(SmallNoiseMethod::Majority)?)
}
