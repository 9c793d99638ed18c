//! Flat `key=value` experiment configuration.
//!
//! ```text
//! # latch with a 100-step lag
//! task = latch
//! lag = 100
//! trainer = lstm
//! blocks = 2
//! forget_bias = 8
//! ```
//!
//! Blank lines and `#` comments are ignored. Later assignments win, so
//! command-line overrides are applied by feeding them through [`ExperimentConfig::set`]
//! after the file.
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `task` | `latch` | `latch`, `temporal_order` or `counting` |
//! | `lag` | `10` | steps between cue and answer |
//! | `noise_std` | `0.2` | standard deviation of the filler inputs |
//! | `sequences` | `100` | training sequences presented per epoch |
//! | `eval_sequences` | `200` | size of the fixed evaluation set |
//! | `epochs` | `10` | epochs; `0` writes an empty metrics file |
//! | `trainer` | `lstm` | `ffnn-bp`, `rnn-bptt`, `rnn-rtrl`, `lstm`, `gru-bptt` |
//! | `blocks`, `cells` | `2`, `1` | memory blocks and cells per block |
//! | `hidden` | `0` | hidden units (hidden layer for `ffnn-bp`/`lstm`, recurrent units otherwise) |
//! | `learning_rate` | `0.1` | step size |
//! | `online` | `false` | update after every step instead of at sequence end |
//! | `init_scale` | `0.1` | weights drawn from `[-init_scale, init_scale]` |
//! | `forget_bias` | `1` | initial forget-gate bias |
//! | `train_forget_bias` | `false` | let training move the forget-gate bias |
//! | `output_bias` | `false` | give output units a trainable bias |
//! | `target_accuracy` | `1.01` | stop once evaluation accuracy reaches this |
//! | `runs` | `1` | independent runs with seeds `seed, seed+1, ...` |
//! | `seed` | `0` | master seed |
//! | `spec` | none | topology file replacing the generated network |
//! | `epsilon` | `1e-5` | finite-difference step for `gradcheck` |
//! | `tolerance` | `1e-6` | relative error bound for `gradcheck` |

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::task::{TaskKind, TaskSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Trainer {
    FfnnBp,
    RnnBptt,
    RnnRtrl,
    Lstm,
    GruBptt,
}

impl fmt::Display for Trainer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trainer::FfnnBp => "ffnn-bp",
            Trainer::RnnBptt => "rnn-bptt",
            Trainer::RnnRtrl => "rnn-rtrl",
            Trainer::Lstm => "lstm",
            Trainer::GruBptt => "gru-bptt",
        })
    }
}

impl FromStr for Trainer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ffnn-bp" => Trainer::FfnnBp,
            "rnn-bptt" => Trainer::RnnBptt,
            "rnn-rtrl" => Trainer::RnnRtrl,
            "lstm" => Trainer::Lstm,
            "gru-bptt" => Trainer::GruBptt,
            other => return Err(Error::Config(format!("unknown trainer `{other}`"))),
        })
    }
}

/// Independent random streams derived from one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Initial weights.
    Weights = 0,
    /// Training sequences.
    Train = 1,
    /// The evaluation set.
    Eval = 2,
    /// Sequences for `gen-task`, `gradcheck` and `vanish`.
    Task = 3,
}

/// ChaCha8 generator for `stream` under master seed `seed`.
pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub task: TaskKind,
    pub lag: usize,
    pub noise_std: f64,
    pub sequences: usize,
    pub eval_sequences: usize,
    pub epochs: usize,
    pub trainer: Trainer,
    pub blocks: usize,
    pub cells: usize,
    pub hidden: usize,
    pub learning_rate: f64,
    pub online: bool,
    pub init_scale: f64,
    pub forget_bias: f64,
    pub train_forget_bias: bool,
    pub output_bias: bool,
    pub target_accuracy: f64,
    pub runs: usize,
    pub seed: u64,
    pub spec: Option<PathBuf>,
    pub epsilon: f64,
    pub tolerance: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            task: TaskKind::Latch,
            lag: 10,
            noise_std: 0.2,
            sequences: 100,
            eval_sequences: 200,
            epochs: 10,
            trainer: Trainer::Lstm,
            blocks: 2,
            cells: 1,
            hidden: 0,
            learning_rate: 0.1,
            online: false,
            init_scale: 0.1,
            forget_bias: 1.0,
            train_forget_bias: false,
            output_bias: false,
            target_accuracy: 1.01,
            runs: 1,
            seed: 0,
            spec: None,
            epsilon: 1e-5,
            tolerance: 1e-6,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::Config(format!("`{key}`: cannot parse `{value}`: {e}")))
}

impl ExperimentConfig {
    /// Defaults overridden by the assignments in `text`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected key = value, got `{line}`"),
            })?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::parse(&std::fs::read_to_string(path)?)?;
        if let (Some(spec), Some(dir)) = (&cfg.spec, path.parent()) {
            cfg.spec = Some(dir.join(spec));
        }
        Ok(cfg)
    }

    /// Applies one assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "task" => self.task = value.parse()?,
            "lag" => self.lag = parse(key, value)?,
            "noise_std" => self.noise_std = parse(key, value)?,
            "sequences" => self.sequences = parse(key, value)?,
            "eval_sequences" => self.eval_sequences = parse(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            "trainer" => self.trainer = value.parse()?,
            "blocks" => self.blocks = parse(key, value)?,
            "cells" => self.cells = parse(key, value)?,
            "hidden" => self.hidden = parse(key, value)?,
            "learning_rate" => self.learning_rate = parse(key, value)?,
            "online" => self.online = parse(key, value)?,
            "init_scale" => self.init_scale = parse(key, value)?,
            "forget_bias" => self.forget_bias = parse(key, value)?,
            "train_forget_bias" => self.train_forget_bias = parse(key, value)?,
            "output_bias" => self.output_bias = parse(key, value)?,
            "target_accuracy" => self.target_accuracy = parse(key, value)?,
            "runs" => self.runs = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "spec" => self.spec = Some(PathBuf::from(value)),
            "epsilon" => self.epsilon = parse(key, value)?,
            "tolerance" => self.tolerance = parse(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies `key=value` strings in order.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{o}` is not key=value")))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn task_spec(&self, count: usize, seed: u64) -> TaskSpec {
        TaskSpec::new(self.task, self.lag, self.noise_std, count, seed)
    }

    pub fn validate(&self) -> Result<()> {
        self.task_spec(self.sequences, self.seed).validate()?;
        let positive = [
            ("learning_rate", self.learning_rate),
            ("epsilon", self.epsilon),
            ("tolerance", self.tolerance),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("`{k}` must be positive, got {v}")));
            }
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return Err(Error::Config(format!(
                "`init_scale` must be >= 0, got {}",
                self.init_scale
            )));
        }
        if !self.forget_bias.is_finite() {
            return Err(Error::Config("`forget_bias` must be finite".into()));
        }
        let counts = [
            ("sequences", self.sequences),
            ("eval_sequences", self.eval_sequences),
            ("runs", self.runs),
        ];
        for (k, v) in counts {
            if v == 0 {
                return Err(Error::Config(format!("`{k}` must be at least 1")));
            }
        }
        if self.trainer == Trainer::Lstm
            && self.spec.is_none()
            && (self.blocks == 0 || self.cells == 0)
        {
            return Err(Error::Config(
                "`blocks` and `cells` must be at least 1".into(),
            ));
        }
        if self.trainer == Trainer::GruBptt && self.hidden == 0 {
            return Err(Error::Config(
                "`hidden` must be at least 1 for gru-bptt".into(),
            ));
        }
        Ok(())
    }
}
