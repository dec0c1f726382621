//! Experiment configuration shared by the command line and TOML files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use nlbox::{and2, equality, inner_product, make_function, random_function, xor2, Bit, BooleanFunction, Model};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Verify,
    Sweep,
    IpDecay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Everything a run depends on. Emitting it with [`ExperimentConfig::to_toml`]
/// and reading it back yields an equal value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub model: String,
    pub function: String,
    pub depth: Vec<u32>,
    pub trials: u64,
    pub master_seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub workers: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub step: f64,
    pub n_max: u32,
}

impl ExperimentConfig {
    pub fn defaults(command: Command) -> Self {
        ExperimentConfig {
            command,
            model: match command {
                Command::IpDecay => "noisy:tsirelson".into(),
                _ => "noisy:0.95".into(),
            },
            function: "ip:2".into(),
            depth: vec![6],
            trials: match command {
                Command::Sweep => 10_000,
                _ => 100_000,
            },
            master_seed: 0,
            format: Format::Csv,
            out: None,
            workers: 0,
            p_min: 0.86,
            p_max: 0.96,
            step: 0.01,
            n_max: 8,
        }
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let config: ExperimentConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.box_model().context("field `model`")?;
        if self.command == Command::Sweep {
            parse_function(&self.function).context("field `function`")?;
            if self.step.is_nan() || self.step <= 0.0 {
                bail!("field `step`: must be positive, got {}", self.step);
            }
            if !(0.5..=1.0).contains(&self.p_min) || !(0.5..=1.0).contains(&self.p_max) || self.p_min > self.p_max {
                bail!("fields `p_min`/`p_max`: need 0.5 <= p_min <= p_max <= 1, got {}..{}", self.p_min, self.p_max);
            }
            if self.depth.is_empty() {
                bail!("field `depth`: at least one depth is required");
            }
        }
        if self.command != Command::Verify && self.trials == 0 {
            bail!("field `trials`: must be at least 1");
        }
        if self.command == Command::IpDecay && !(1..=nlbox::function::MAX_ARITY).contains(&self.n_max) {
            bail!("field `n_max`: must be in 1..={}, got {}", nlbox::function::MAX_ARITY, self.n_max);
        }
        Ok(())
    }

    pub fn box_model(&self) -> anyhow::Result<Model> {
        Ok(self.model.parse::<Model>()?)
    }

    /// Sweep grid `p_min, p_min + step, …` up to `p_max` (inclusive, with a
    /// small slack for rounding), snapped to 12 decimal places.
    pub fn p_grid(&self) -> Vec<f64> {
        let count = ((self.p_max - self.p_min) / self.step + 1e-9).floor() as u64;
        (0..=count)
            .map(|i| ((self.p_min + i as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }
}

/// `ip:n`, `eq:n`, `and`, `xor`, `random:m,n,seed` or `table:path`.
pub fn parse_function(spec: &str) -> anyhow::Result<BooleanFunction> {
    let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let int = |s: &str| -> anyhow::Result<u32> { s.trim().parse().with_context(|| format!("bad integer `{s}`")) };
    Ok(match name {
        "ip" => inner_product(int(arg)?)?,
        "eq" => equality(int(arg)?)?,
        "and" if arg.is_empty() => and2(),
        "xor" if arg.is_empty() => xor2(),
        "random" => {
            let parts: Vec<&str> = arg.split(',').collect();
            let [m, n, seed] = parts[..] else {
                bail!("expected `random:m,n,seed`");
            };
            random_function(int(m)?, int(n)?, seed.trim().parse().context("bad seed")?)?
        }
        "table" => read_table(Path::new(arg))?,
        _ => bail!("unknown function `{spec}`"),
    })
}

/// Table file: first line `m n`, then `2^(m+n)` digits `0`/`1` (whitespace
/// ignored) in row-major order `x·2^n + y`; `#` starts a comment line.
pub fn read_table(path: &Path) -> anyhow::Result<BooleanFunction> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim_start().starts_with('#'));
    let header = lines.next().context("empty table file")?;
    let dims: Vec<u32> = header
        .split_whitespace()
        .map(|t| t.parse().with_context(|| format!("bad arity `{t}`")))
        .collect::<anyhow::Result<_>>()?;
    let [m, n] = dims[..] else {
        bail!("first line must be `m n`");
    };
    let bits = lines
        .flat_map(|l| l.chars())
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(Bit::ZERO),
            '1' => Ok(Bit::ONE),
            _ => bail!("bad table digit `{c}`"),
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(make_function(&bits, m, n)?)
}
