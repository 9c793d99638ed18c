//! Seeded training runs that write per-epoch metrics and a final checkpoint.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;

use super::config::{stream_rng, ExperimentConfig, Stream, Trainer};
use super::task::{gen_task, sequence_correct, TaskSample};
use crate::error::{Error, Result};
use crate::ffnn::{FeedForward, Sample};
use crate::lstm::{Lstm, LstmConfig};
use crate::params::{Deltas, Params};
use crate::rnn::{RecurrentNet, RtrlConfig};
use crate::topology::{LstmLayout, NetworkSpec};
use crate::variants::{Gru, GruParams, GruShape};

pub const METRICS_HEADER: &str = "epoch,mse,accuracy";

/// A network and its current weights.
#[derive(Debug, Clone)]
pub enum Model {
    Ffnn {
        spec: NetworkSpec,
        net: FeedForward,
        params: Params,
    },
    Rnn {
        spec: NetworkSpec,
        net: RecurrentNet,
        params: Params,
    },
    Lstm {
        spec: NetworkSpec,
        net: Lstm,
        params: Params,
    },
    Gru {
        params: GruParams,
    },
}

fn generated_spec(cfg: &ExperimentConfig) -> NetworkSpec {
    let inputs = cfg.task.input_width();
    let outputs = cfg.task.output_width();
    match cfg.trainer {
        Trainer::FfnnBp if cfg.hidden == 0 => NetworkSpec::feed_forward(&[inputs, outputs]),
        Trainer::FfnnBp => NetworkSpec::feed_forward(&[inputs, cfg.hidden, outputs]),
        Trainer::RnnBptt | Trainer::RnnRtrl => {
            NetworkSpec::fully_recurrent(inputs, cfg.hidden, outputs)
        }
        _ => LstmLayout::new(inputs, cfg.blocks, cfg.cells, outputs)
            .hidden(cfg.hidden)
            .forget_bias(cfg.forget_bias)
            .build(),
    }
}

fn load_spec(cfg: &ExperimentConfig, path: &Path) -> Result<NetworkSpec> {
    let spec = NetworkSpec::from_text(&std::fs::read_to_string(path)?)?;
    spec.ensure_valid()?;
    let (i, o) = (spec.input_units().len(), spec.output_units().len());
    if i != cfg.task.input_width() || o != cfg.task.output_width() {
        return Err(Error::Config(format!(
            "{} has {i} inputs and {o} outputs; task {} needs {} and {}",
            path.display(),
            cfg.task,
            cfg.task.input_width(),
            cfg.task.output_width()
        )));
    }
    Ok(spec)
}

impl Model {
    /// Builds the configured network. A `spec` file supplies the topology;
    /// its weights are kept when `init_scale` is 0 and redrawn otherwise.
    pub fn build<R: Rng + ?Sized>(cfg: &ExperimentConfig, rng: &mut R) -> Result<Self> {
        if cfg.trainer == Trainer::GruBptt {
            if cfg.spec.is_some() {
                return Err(Error::Config(
                    "gru-bptt does not read topology files".into(),
                ));
            }
            let shape = GruShape {
                inputs: cfg.task.input_width(),
                units: cfg.hidden,
                outputs: cfg.task.output_width(),
            };
            return Ok(Model::Gru {
                params: GruParams::random(shape, rng, cfg.init_scale),
            });
        }
        let mut spec = match &cfg.spec {
            Some(path) => load_spec(cfg, path)?,
            None => generated_spec(cfg),
        };
        if cfg.spec.is_none() || cfg.init_scale > 0.0 {
            spec.randomize(rng, cfg.init_scale);
        }
        spec.ensure_valid()?;
        let params = Params::from_spec(&spec);
        Ok(match cfg.trainer {
            Trainer::FfnnBp => Model::Ffnn {
                net: FeedForward::compile(&spec)?,
                spec,
                params,
            },
            Trainer::RnnBptt | Trainer::RnnRtrl => Model::Rnn {
                net: RecurrentNet::compile(&spec)?,
                spec,
                params,
            },
            _ => Model::Lstm {
                net: Lstm::compile(&spec)?,
                spec,
                params,
            },
        })
    }

    /// Output activations at every step of `inputs`.
    pub fn outputs(&self, inputs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        match self {
            Model::Ffnn { net, params, .. } => inputs
                .iter()
                .map(|x| Ok(net.output_values(&net.forward(params, x)?)))
                .collect(),
            Model::Rnn { net, params, .. } => {
                let trace = net.run(params, inputs, &[])?;
                Ok(trace
                    .steps
                    .iter()
                    .map(|s| net.output_units().iter().map(|&o| s.output[o]).collect())
                    .collect())
            }
            Model::Lstm { net, params, .. } => {
                let states = net.run(params, inputs)?;
                Ok(states[1..].iter().map(|s| net.output_values(s)).collect())
            }
            Model::Gru { params } => Ok(Gru::run(params, inputs)?
                .into_iter()
                .map(|s| s.output)
                .collect()),
        }
    }

    /// Presents one sequence and updates the weights.
    pub fn train(&mut self, cfg: &ExperimentConfig, sample: &TaskSample) -> Result<()> {
        let lr = cfg.learning_rate;
        match self {
            Model::Ffnn { spec, net, params } => {
                let train_bias: Vec<bool> = spec.units.iter().map(|u| !u.role.is_input()).collect();
                let mut acc = Deltas::zeros(params.weights.len(), params.biases.len());
                for (x, row) in sample.inputs.iter().zip(&sample.targets) {
                    let Some(label) = row.iter().copied().collect::<Option<Vec<f64>>>() else {
                        continue;
                    };
                    let s = Sample::new(x.clone(), label);
                    let st = net.forward(params, &s.input)?;
                    let d = net.backprop_step(params, &st, &s, lr)?;
                    if cfg.online {
                        params.apply(&d, &train_bias);
                    } else {
                        acc.add(&d);
                    }
                }
                params.apply(&acc, &train_bias);
                params.ensure_finite("feed-forward training")
            }
            Model::Rnn { net, params, .. } => {
                let targets = net.output_targets(&sample.targets)?;
                let d = if cfg.trainer == Trainer::RnnRtrl {
                    let rc = RtrlConfig {
                        learning_rate: lr,
                        online: cfg.online,
                        require_targets: false,
                    };
                    net.rtrl(params, &sample.inputs, &targets, &rc)?
                } else {
                    let trace = net.run(params, &sample.inputs, &targets)?;
                    net.bptt(params, &trace, lr)?
                };
                params.apply(&d, &net.trainable_biases());
                params.ensure_finite("recurrent training")
            }
            Model::Lstm { net, params, .. } => {
                let lc = LstmConfig {
                    learning_rate: lr,
                    online: cfg.online,
                    train_forget_bias: cfg.train_forget_bias,
                    output_bias: cfg.output_bias,
                };
                net.train_sequence(params, &sample.inputs, &sample.targets, &lc)?;
                Ok(())
            }
            Model::Gru { params } => {
                let d = Gru::bptt(params, &sample.inputs, &sample.targets, lr)?;
                params.add_scaled(&d, 1.0);
                params.ensure_finite()
            }
        }
    }

    /// Mean squared error over targeted outputs and the fraction of
    /// sequences answered correctly.
    pub fn evaluate(&self, set: &[TaskSample]) -> Result<(f64, f64)> {
        let mut sq = 0.0;
        let mut n = 0usize;
        let mut correct = 0usize;
        for s in set {
            let y = self.outputs(&s.inputs)?;
            for (yr, dr) in y.iter().zip(&s.targets) {
                for (y, d) in yr.iter().zip(dr) {
                    if !y.is_finite() {
                        return Err(Error::Divergence("evaluation".into()));
                    }
                    if let Some(d) = d {
                        sq += (d - y).powi(2);
                        n += 1;
                    }
                }
            }
            if sequence_correct(&y, &s.targets) {
                correct += 1;
            }
        }
        let mse = if n == 0 { 0.0 } else { sq / n as f64 };
        Ok((mse, correct as f64 / set.len() as f64))
    }

    /// Topology text with the current weights, or the GRU weight table.
    pub fn checkpoint(&self) -> String {
        match self {
            Model::Ffnn { spec, params, .. }
            | Model::Rnn { spec, params, .. }
            | Model::Lstm { spec, params, .. } => params.store_into(spec).to_text(),
            Model::Gru { params } => params.to_text(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub seed: u64,
    /// Epochs completed.
    pub epochs: usize,
    /// Training sequences presented.
    pub presentations: usize,
    pub mse: f64,
    pub accuracy: f64,
    pub metrics_csv: String,
    pub checkpoint: String,
    /// Set when training stopped on a non-finite value.
    pub diverged: Option<String>,
}

/// One run under master seed `seed`. Divergence ends the run early and is
/// reported in [`RunResult::diverged`]; other failures are errors.
pub fn run_single(cfg: &ExperimentConfig, seed: u64) -> Result<RunResult> {
    cfg.validate()?;
    let mut model = Model::build(cfg, &mut stream_rng(seed, Stream::Weights))?;
    let eval_seed: u64 = stream_rng(seed, Stream::Eval).random();
    let eval = gen_task(&cfg.task_spec(cfg.eval_sequences, eval_seed))?;
    let task = cfg.task_spec(cfg.sequences, seed);
    let mut train_rng = stream_rng(seed, Stream::Train);
    let mut res = RunResult {
        seed,
        epochs: 0,
        presentations: 0,
        mse: f64::NAN,
        accuracy: 0.0,
        metrics_csv: format!("{METRICS_HEADER}\n"),
        checkpoint: String::new(),
        diverged: None,
    };
    for epoch in 1..=cfg.epochs {
        let step = (|| -> Result<(f64, f64)> {
            for _ in 0..cfg.sequences {
                model.train(cfg, &task.sample(&mut train_rng))?;
            }
            model.evaluate(&eval)
        })();
        let (mse, acc) = match step {
            Ok(v) => v,
            Err(Error::Divergence(what)) => {
                res.diverged = Some(format!("epoch {epoch}: {what}"));
                break;
            }
            Err(Error::Domain(x)) => {
                res.diverged = Some(format!("epoch {epoch}: activation input {x}"));
                break;
            }
            Err(e) => return Err(e),
        };
        res.epochs = epoch;
        res.presentations = epoch * cfg.sequences;
        res.mse = mse;
        res.accuracy = acc;
        writeln!(res.metrics_csv, "{epoch},{mse},{acc}").unwrap();
        if acc >= cfg.target_accuracy {
            break;
        }
    }
    res.checkpoint = model.checkpoint();
    Ok(res)
}

/// Runs seeds `cfg.seed .. cfg.seed + cfg.runs` on up to `jobs` threads.
pub fn run_all(cfg: &ExperimentConfig, jobs: usize) -> Result<Vec<RunResult>> {
    cfg.validate()?;
    let seeds: Vec<u64> = (0..cfg.runs as u64)
        .map(|i| cfg.seed.wrapping_add(i))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| seeds.par_iter().map(|&s| run_single(cfg, s)).collect())
}

/// Directory that holds the files of the run with `seed`.
pub fn run_dir(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("seed-{seed}"))
}

/// Runs every seed and writes `seed-<S>/metrics.csv` and
/// `seed-<S>/checkpoint.txt` under `out`.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path, jobs: usize) -> Result<Vec<RunResult>> {
    let results = run_all(cfg, jobs)?;
    for r in &results {
        let dir = run_dir(out, r.seed);
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("metrics.csv"), &r.metrics_csv)?;
        std::fs::write(dir.join("checkpoint.txt"), &r.checkpoint)?;
    }
    Ok(results)
}
