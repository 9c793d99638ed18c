//! Synthetic long-time-lag tasks.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Number of pulses a counting sequence must reach before its target fires.
pub const COUNT_TARGET: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaskKind {
    /// Remember the sign of a cue across `lag` noisy steps.
    Latch,
    /// Report the order of two signed cues at the end of the sequence.
    TemporalOrder,
    /// Fire while exactly [`COUNT_TARGET`] pulses have been seen.
    Counting,
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TaskKind::Latch => "latch",
            TaskKind::TemporalOrder => "temporal_order",
            TaskKind::Counting => "counting",
        })
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "latch" => Ok(TaskKind::Latch),
            "temporal_order" => Ok(TaskKind::TemporalOrder),
            "counting" => Ok(TaskKind::Counting),
            other => Err(Error::Config(format!("unknown task kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    pub kind: TaskKind,
    pub lag: usize,
    pub noise_std: f64,
    pub sequence_count: usize,
    pub seed: u64,
}

/// Input sequence, per-step output targets (`None` where unmasked) and the
/// class the sequence belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSample {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<Vec<Option<f64>>>,
    pub class: usize,
}

impl TaskSample {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

impl TaskKind {
    pub fn input_width(self) -> usize {
        1
    }

    pub fn output_width(self) -> usize {
        match self {
            TaskKind::TemporalOrder => 4,
            _ => 1,
        }
    }

    pub fn classes(self) -> usize {
        match self {
            TaskKind::TemporalOrder => 4,
            _ => 2,
        }
    }

    fn min_lag(self) -> usize {
        match self {
            TaskKind::TemporalOrder => 3,
            _ => 1,
        }
    }
}

impl TaskSpec {
    pub fn new(
        kind: TaskKind,
        lag: usize,
        noise_std: f64,
        sequence_count: usize,
        seed: u64,
    ) -> Self {
        TaskSpec {
            kind,
            lag,
            noise_std,
            sequence_count,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lag < self.kind.min_lag() {
            return Err(Error::Config(format!(
                "{} needs lag >= {}, got {}",
                self.kind,
                self.kind.min_lag(),
                self.lag
            )));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(Error::Config(format!(
                "noise_std must be >= 0, got {}",
                self.noise_std
            )));
        }
        Ok(())
    }

    fn noise(&self) -> Normal<f64> {
        Normal::new(0.0, self.noise_std).expect("validated")
    }

    /// Draws one sequence of class `class`.
    pub fn sample_class<R: Rng + ?Sized>(&self, class: usize, rng: &mut R) -> TaskSample {
        let noise = self.noise();
        let len = self.lag + 1;
        let mut inputs: Vec<Vec<f64>> = (0..len).map(|_| vec![noise.sample(rng)]).collect();
        let outputs = self.kind.output_width();
        let mut targets = vec![vec![None; outputs]; len];
        match self.kind {
            TaskKind::Latch => {
                inputs[0][0] = if class == 1 { 1.0 } else { -1.0 };
                targets[len - 1][0] = Some(class as f64);
            }
            TaskKind::TemporalOrder => {
                let first = rng.random_range(0..len / 4 + 1);
                let second = rng.random_range(first + 1..len / 2 + 1);
                let sign = |bit: usize| if bit == 1 { -1.0 } else { 1.0 };
                inputs[first][0] = sign(class >> 1);
                inputs[second][0] = sign(class & 1);
                targets[len - 1] = (0..4)
                    .map(|k| Some(if k == class { 1.0 } else { 0.0 }))
                    .collect();
            }
            TaskKind::Counting => {
                let pulses = if class == 1 {
                    COUNT_TARGET
                } else {
                    let other: Vec<usize> = (0..=COUNT_TARGET + 1)
                        .filter(|&k| k != COUNT_TARGET)
                        .collect();
                    other[rng.random_range(0..other.len())]
                };
                let pulses = pulses.min(len);
                let mut at: Vec<usize> = (0..len).collect();
                at.shuffle(rng);
                for &t in &at[..pulses] {
                    inputs[t][0] = 1.0;
                }
                let mut seen = 0;
                for t in 0..len {
                    if inputs[t][0] == 1.0 && at[..pulses].contains(&t) {
                        seen += 1;
                    }
                    targets[t][0] = Some(if seen == COUNT_TARGET { 1.0 } else { 0.0 });
                }
            }
        }
        TaskSample {
            inputs,
            targets,
            class,
        }
    }

    /// Draws one sequence with a uniformly random class.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TaskSample {
        let class = rng.random_range(0..self.kind.classes());
        self.sample_class(class, rng)
    }
}

/// `sequence_count` sequences, deterministic in `seed`, with classes as
/// evenly represented as the count allows.
pub fn gen_task(task: &TaskSpec) -> Result<Vec<TaskSample>> {
    task.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(task.seed);
    let k = task.kind.classes();
    let mut classes: Vec<usize> = (0..task.sequence_count).map(|i| i % k).collect();
    classes.shuffle(&mut rng);
    Ok(classes
        .into_iter()
        .map(|c| task.sample_class(c, &mut rng))
        .collect())
}

/// Whether every targeted step is answered correctly: by threshold 0.5 for
/// a single output, by arg-max otherwise.
pub fn sequence_correct(outputs: &[Vec<f64>], targets: &[Vec<Option<f64>>]) -> bool {
    outputs.iter().zip(targets).all(|(y, d)| {
        if d.iter().all(Option::is_none) {
            return true;
        }
        if y.len() == 1 {
            return (y[0] > 0.5) == (d[0].unwrap_or(0.0) > 0.5);
        }
        let d: Vec<f64> = d.iter().map(|v| v.unwrap_or(f64::NEG_INFINITY)).collect();
        argmax(y) == argmax(&d)
    })
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &x)| {
            if x > best.1 {
                (i, x)
            } else {
                best
            }
        })
        .0
}
