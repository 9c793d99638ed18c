//! One-off measurements behind the `gradcheck`, `vanish` and `gen-task`
//! commands.

use std::fmt::Write as _;

use rand::Rng;

use super::config::{stream_rng, ExperimentConfig, Stream, Trainer};
use super::experiment::Model;
use super::task::{gen_task, TaskSample};
use crate::error::{Error, Result};
use crate::gradcheck::{compare, fd_gradient, GradReport};
use crate::params::Deltas;
use crate::rnn::{RecurrentNet, RtrlConfig};
use crate::topology::NetworkSpec;
use crate::vanish::{error_flow_factor, FlowReport};

fn negated(d: &Deltas) -> Vec<f64> {
    d.to_flat().iter().map(|v| -v).collect()
}

impl Model {
    /// Every trainable value: weights then biases, or the GRU matrices.
    pub fn flat(&self) -> Vec<f64> {
        match self {
            Model::Ffnn { params, .. } | Model::Rnn { params, .. } | Model::Lstm { params, .. } => {
                params.to_flat()
            }
            Model::Gru { params } => params.to_flat(),
        }
    }

    pub fn set_flat(&mut self, flat: &[f64]) {
        match self {
            Model::Ffnn { params, .. } | Model::Rnn { params, .. } | Model::Lstm { params, .. } => {
                params.set_flat(flat)
            }
            Model::Gru { params } => params.set_flat(flat),
        }
    }

    /// `½ Σ (d - y)²` over the targeted outputs of one sequence. The
    /// feed-forward model only sees steps where every output has a target.
    pub fn loss(&self, sample: &TaskSample) -> Result<f64> {
        let y = self.outputs(&sample.inputs)?;
        let full_rows_only = matches!(self, Model::Ffnn { .. });
        let mut e = 0.0;
        for (yr, dr) in y.iter().zip(&sample.targets) {
            if full_rows_only && dr.iter().any(Option::is_none) {
                continue;
            }
            for (y, d) in yr.iter().zip(dr) {
                if let Some(d) = d {
                    e += 0.5 * (d - y).powi(2);
                }
            }
        }
        Ok(e)
    }

    /// Gradient of [`Self::loss`] as the configured trainer computes it, in
    /// [`Self::flat`] order. For LSTM this is the truncated gradient.
    pub fn gradient(&self, trainer: Trainer, sample: &TaskSample) -> Result<Vec<f64>> {
        match self {
            Model::Ffnn { net, params, .. } => {
                let mut acc = Deltas::zeros(params.weights.len(), params.biases.len());
                for (x, row) in sample.inputs.iter().zip(&sample.targets) {
                    let Some(label) = row.iter().copied().collect::<Option<Vec<f64>>>() else {
                        continue;
                    };
                    let s = crate::ffnn::Sample::new(x.clone(), label);
                    let st = net.forward(params, &s.input)?;
                    acc.add(&net.backprop_step(params, &st, &s, 1.0)?);
                }
                Ok(negated(&acc))
            }
            Model::Rnn { net, params, .. } => {
                let targets = net.output_targets(&sample.targets)?;
                let d = if trainer == Trainer::RnnRtrl {
                    let cfg = RtrlConfig {
                        require_targets: false,
                        ..RtrlConfig::default()
                    };
                    net.rtrl(params, &sample.inputs, &targets, &cfg)?
                } else {
                    net.bptt(params, &net.run(params, &sample.inputs, &targets)?, 1.0)?
                };
                Ok(negated(&d))
            }
            Model::Lstm { net, params, .. } => Ok(negated(&net.gradient(
                params,
                &sample.inputs,
                &sample.targets,
            )?)),
            Model::Gru { params } => {
                let d = crate::variants::Gru::bptt(params, &sample.inputs, &sample.targets, 1.0)?;
                Ok(d.to_flat().iter().map(|v| -v).collect())
            }
        }
    }
}

/// Task sequences for `gen-task`, drawn from the task stream of `seed`.
pub fn task_samples(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<TaskSample>> {
    let task_seed: u64 = stream_rng(seed, Stream::Task).random();
    gen_task(&cfg.task_spec(cfg.sequences, task_seed))
}

/// Compares the configured trainer's gradient on one task sequence with
/// central differences at `cfg.epsilon`.
pub fn gradcheck(cfg: &ExperimentConfig, seed: u64) -> Result<GradReport> {
    cfg.validate()?;
    let model = Model::build(cfg, &mut stream_rng(seed, Stream::Weights))?;
    let task_seed: u64 = stream_rng(seed, Stream::Task).random();
    let sample = gen_task(&cfg.task_spec(1, task_seed))?.remove(0);
    let analytic = model.gradient(cfg.trainer, &sample)?;
    let mut probe = model.clone();
    let numeric = fd_gradient(
        |w| {
            probe.set_flat(w);
            probe.loss(&sample).unwrap_or(f64::NAN)
        },
        &model.flat(),
        cfg.epsilon,
    )?;
    compare(&analytic, &numeric, cfg.tolerance)
}

/// Error flow from the first output unit at the last step back to the same
/// unit at step 1 of one task sequence, in a fully recurrent net with
/// `cfg.hidden` hidden units and weights from `[-init_scale, init_scale]`.
pub fn vanish_probe(cfg: &ExperimentConfig, seed: u64) -> Result<FlowReport> {
    cfg.validate()?;
    let mut spec = match &cfg.spec {
        Some(path) => NetworkSpec::from_text(&std::fs::read_to_string(path)?)?,
        None => NetworkSpec::fully_recurrent(
            cfg.task.input_width(),
            cfg.hidden,
            cfg.task.output_width(),
        ),
    };
    if cfg.spec.is_none() || cfg.init_scale > 0.0 {
        spec.randomize(&mut stream_rng(seed, Stream::Weights), cfg.init_scale);
    }
    spec.ensure_valid()?;
    let net = RecurrentNet::compile(&spec)?;
    let params = crate::params::Params::from_spec(&spec);
    let task_seed: u64 = stream_rng(seed, Stream::Task).random();
    let sample = gen_task(&cfg.task_spec(1, task_seed))?.remove(0);
    let trace = net.run(&params, &sample.inputs, &[])?;
    let o = *net
        .output_units()
        .first()
        .ok_or_else(|| Error::Config("network has no output unit".into()))?;
    error_flow_factor(&net, &params, &trace, o, o, 1, trace.len())
}

/// `sequence,step,class,x0..,d0..`, one row per step; masked targets are
/// left empty.
pub fn task_csv(samples: &[TaskSample]) -> String {
    let width_x = samples.first().map_or(0, |s| s.inputs[0].len());
    let width_d = samples.first().map_or(0, |s| s.targets[0].len());
    let mut out = String::from("sequence,step,class");
    for i in 0..width_x {
        write!(out, ",x{i}").unwrap();
    }
    for i in 0..width_d {
        write!(out, ",d{i}").unwrap();
    }
    out.push('\n');
    for (n, s) in samples.iter().enumerate() {
        for (t, (x, d)) in s.inputs.iter().zip(&s.targets).enumerate() {
            write!(out, "{n},{},{}", t + 1, s.class).unwrap();
            for v in x {
                write!(out, ",{v}").unwrap();
            }
            for v in d {
                match v {
                    Some(v) => write!(out, ",{v}").unwrap(),
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
    }
    out
}
