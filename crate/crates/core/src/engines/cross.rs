use crate::error::Result;
use crate::protocols::Protocol;
use crate::random::derive_seed;

use super::exact::{exact_success, ExactMode, ExactResult};
use super::sample::{sample_success, InputSelection, SampleConfig};

/// Pass/fail bound, in binomial standard deviations.
pub const SIGMA_BOUND: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheckLine {
    pub x: u64,
    pub y: u64,
    pub exact: f64,
    pub estimate: f64,
    pub sigma: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheckReport {
    pub trials_per_input: u64,
    pub lines: Vec<CrossCheckLine>,
    pub pass: bool,
}

/// Samples every input pair and compares against the exact engine.
pub fn cross_check<P: Protocol<f64> + ?Sized>(protocol: &P, trials: u64, seed: u64) -> Result<CrossCheckReport> {
    let exact = exact_success(protocol, ExactMode::FullEnumeration)
        .or_else(|_| exact_success(protocol, ExactMode::Compositional))?;
    cross_check_against(&exact, protocol, trials, seed)
}

/// Samples `protocol` on every input pair of `exact` and checks each
/// estimate lies within [`SIGMA_BOUND`] standard deviations of it.
pub fn cross_check_against<P: Protocol<f64> + ?Sized>(
    exact: &ExactResult<f64>,
    protocol: &P,
    trials: u64,
    seed: u64,
) -> Result<CrossCheckReport> {
    let mut lines = Vec::with_capacity(exact.per_input.len());
    for (index, (&(x, y), &p)) in exact.per_input.iter().enumerate() {
        let config = SampleConfig::new(trials, derive_seed(seed, index as u64)).with_inputs(InputSelection::Fixed(x, y));
        let sampled = sample_success(protocol, &config)?;
        let sigma = sampled.sigma_at(p);
        lines.push(CrossCheckLine {
            x,
            y,
            exact: p,
            estimate: sampled.estimate,
            sigma,
            pass: (sampled.estimate - p).abs() <= SIGMA_BOUND * sigma,
        });
    }
    let pass = lines.iter().all(|l| l.pass);
    Ok(CrossCheckReport {
        trials_per_input: trials,
        lines,
        pass,
    })
}
