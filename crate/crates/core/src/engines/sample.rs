use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::protocols::{execute, Protocol};
use crate::random::{AtomKey, AtomKind, CounterSource};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputSelection {
    Fixed(u64, u64),
    /// Trial `t` uses input pair number `t mod 2^(m+n)`.
    Cycle,
    /// Each trial draws its input pair from its own substream.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    pub trials: u64,
    pub master_seed: u64,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
    pub inputs: InputSelection,
}

impl SampleConfig {
    pub fn new(trials: u64, master_seed: u64) -> Self {
        SampleConfig {
            trials,
            master_seed,
            workers: 0,
            inputs: InputSelection::Uniform,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_inputs(mut self, inputs: InputSelection) -> Self {
        self.inputs = inputs;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleResult {
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    /// Normal-approximation 95% interval, widened by `1/(2T)` and clamped to `[0, 1]`.
    pub ci95: (f64, f64),
    pub master_seed: u64,
    pub bits_communicated: u64,
    pub box_invocations: u64,
}

impl SampleResult {
    fn from_counts(counts: Counts, master_seed: u64) -> Self {
        let t = counts.trials as f64;
        let estimate = counts.successes as f64 / t;
        let half = 1.96 * (estimate * (1.0 - estimate) / t).sqrt() + 0.5 / t;
        SampleResult {
            trials: counts.trials,
            successes: counts.successes,
            estimate,
            ci95: ((estimate - half).max(0.0), (estimate + half).min(1.0)),
            master_seed,
            bits_communicated: counts.bits,
            box_invocations: counts.boxes,
        }
    }

    /// Binomial standard deviation of the estimate if the true success is `p`.
    pub fn sigma_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    trials: u64,
    successes: u64,
    bits: u64,
    boxes: u64,
}

impl Counts {
    fn merge(self, other: Counts) -> Counts {
        Counts {
            trials: self.trials + other.trials,
            successes: self.successes + other.successes,
            bits: self.bits + other.bits,
            boxes: self.boxes + other.boxes,
        }
    }
}

fn pick_input(selection: InputSelection, trial: u64, source: &CounterSource, m: u32, n: u32) -> (u64, u64) {
    let mask = |bits: u32| if bits >= 64 { u64::MAX } else { (1u64 << bits) - 1 };
    match selection {
        InputSelection::Fixed(x, y) => (x, y),
        InputSelection::Cycle => {
            let index = trial & mask(m + n);
            (index >> n, index & mask(n))
        }
        InputSelection::Uniform => {
            let w = source.word(AtomKey::new(AtomKind::Input, 0, 0));
            (w & mask(m), (w >> m) & mask(n))
        }
    }
}

fn run_trial<S: Scalar, P: Protocol<S> + ?Sized>(protocol: &P, config: &SampleConfig, trial: u64) -> Result<Counts> {
    let mut source = CounterSource::for_trial(config.master_seed, trial);
    let (m, n) = protocol.arity();
    let (x, y) = pick_input(config.inputs, trial, &source, m, n);
    let run = execute(protocol, x, y, &mut source)?;
    Ok(Counts {
        trials: 1,
        successes: u64::from(run.answer() == protocol.target(x, y)),
        bits: run.transcript.bits_communicated(),
        boxes: run.transcript.box_invocations(),
    })
}

/// Monte Carlo success estimate.
///
/// Trial `t` draws every atom from `CounterSource::for_trial(master_seed, t)`,
/// so the result does not depend on how trials are split across workers.
pub fn sample_success<S: Scalar, P: Protocol<S> + ?Sized>(protocol: &P, config: &SampleConfig) -> Result<SampleResult> {
    if config.trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    if let Some(model) = protocol.box_model() {
        model.validate()?;
    }
    if let InputSelection::Fixed(x, y) = config.inputs {
        let (m, n) = protocol.arity();
        if x >> m != 0 || y >> n != 0 {
            return Err(Error::InvalidConfig(format!("input ({x}, {y}) exceeds arity ({m}, {n})")));
        }
    }
    let sum = || -> Result<Counts> {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(protocol, config, t))
            .try_reduce(Counts::default, |a, b| Ok(a.merge(b)))
    };
    let counts = match config.workers {
        1 => (0..config.trials).try_fold(Counts::default(), |acc, t| {
            run_trial(protocol, config, t).map(|c| acc.merge(c))
        })?,
        0 => sum()?,
        workers => rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(sum)?,
    };
    Ok(SampleResult::from_counts(counts, config.master_seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::BoxModel;
    use crate::protocols::{NonlocalEquality, NonlocalMajority};

    #[test]
    fn perfect_nle_never_fails() {
        let model = BoxModel::<f64>::Perfect;
        let r = sample_success(&NonlocalEquality { model: &model }, &SampleConfig::new(5000, 3)).unwrap();
        assert_eq!(r.successes, r.trials);
        assert_eq!(r.box_invocations, 2 * r.trials);
        assert_eq!(r.bits_communicated, 0);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let model = BoxModel::noisy(0.9).unwrap();
        let protocol = NonlocalMajority { model: &model };
        let config = SampleConfig::new(20_000, 77);
        let one = sample_success(&protocol, &config.with_workers(1)).unwrap();
        let eight = sample_success(&protocol, &config.with_workers(8)).unwrap();
        let global = sample_success(&protocol, &config).unwrap();
        assert_eq!(one, eight);
        assert_eq!(one, global);
    }

    #[test]
    fn estimate_converges_across_seeds() {
        let model = BoxModel::noisy(0.9).unwrap();
        let protocol = NonlocalMajority { model: &model };
        let exact = 0.82;
        let trials = 2000;
        let failures = (0..100u64)
            .filter(|&seed| {
                let r = sample_success(&protocol, &SampleConfig::new(trials, seed).with_workers(1)).unwrap();
                (r.estimate - exact).abs() >= 5.0 * r.sigma_at(exact)
            })
            .count();
        assert_eq!(failures, 0);
    }

    #[test]
    fn rejects_bad_configs() {
        let model = BoxModel::<f64>::Perfect;
        let protocol = NonlocalMajority { model: &model };
        assert!(sample_success(&protocol, &SampleConfig::new(0, 1)).is_err());
        let fixed = SampleConfig::new(10, 1).with_inputs(InputSelection::Fixed(8, 0));
        assert!(sample_success(&protocol, &fixed).is_err());
    }

    #[test]
    fn cycle_covers_inputs() {
        let source = CounterSource::new(0);
        let seen: std::collections::BTreeSet<_> =
            (0..16).map(|t| pick_input(InputSelection::Cycle, t, &source, 2, 2)).collect();
        assert_eq!(seen.len(), 16);
    }

    #[test]
    fn ci_contains_estimate() {
        let model = BoxModel::noisy(0.8).unwrap();
        let r = sample_success(&NonlocalMajority { model: &model }, &SampleConfig::new(1000, 5)).unwrap();
        assert!(r.ci95.0 <= r.estimate && r.estimate <= r.ci95.1);
        assert!(r.ci95.0 >= 0.0 && r.ci95.1 <= 1.0);
    }
}
