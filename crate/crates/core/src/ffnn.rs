//! Perceptrons and layered feed-forward networks trained by backpropagation.

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::params::{Deltas, Params};
use crate::topology::{Delay, NetworkSpec, Rule, UnitRole};

/// An input vector with its desired output.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub input: Vec<f64>,
    pub label: Vec<f64>,
}

impl Sample {
    pub fn new(input: impl Into<Vec<f64>>, label: impl Into<Vec<f64>>) -> Self {
        Sample {
            input: input.into(),
            label: label.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Training stops once the summed epoch error is at or below this.
    pub stop_tolerance: f64,
    /// Sum updates over the epoch instead of applying them per sample.
    pub batch: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            max_epochs: 1000,
            stop_tolerance: 0.0,
            batch: false,
        }
    }
}

impl TrainConfig {
    fn check(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

/// Threshold unit: `+1` when `w·x + b > 0`, otherwise `-1` (ties included).
pub fn perceptron_output(weights: &[f64], bias: f64, input: &[f64]) -> Result<f64> {
    if weights.len() != input.len() {
        return Err(Error::Dimension {
            what: "perceptron input",
            expected: weights.len(),
            got: input.len(),
        });
    }
    let s: f64 = weights.iter().zip(input).map(|(w, x)| w * x).sum::<f64>() + bias;
    Ok(if s > 0.0 { 1.0 } else { -1.0 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Perceptron {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub converged: bool,
    pub epochs: usize,
}

/// Perceptron rule `Δw_i = η (d - y) x_i`, starting from zero weights; the
/// bias is a weight on a constant input of 1.
pub fn perceptron_train(samples: &[Sample], cfg: &TrainConfig) -> Result<Perceptron> {
    cfg.check()?;
    let first = samples
        .first()
        .ok_or(Error::Empty("perceptron sample set"))?;
    let n = first.input.len();
    for s in samples {
        if s.label.len() != 1 || (s.label[0] != 1.0 && s.label[0] != -1.0) {
            return Err(Error::Config(
                "perceptron labels must be a single +1 or -1".into(),
            ));
        }
    }
    let mut weights = vec![0.0; n];
    let mut bias = 0.0;
    for epoch in 1..=cfg.max_epochs {
        let mut mistakes = 0;
        for s in samples {
            let d = s.label[0];
            let y = perceptron_output(&weights, bias, &s.input)?;
            if y != d {
                mistakes += 1;
                let k = cfg.learning_rate * (d - y);
                for (w, x) in weights.iter_mut().zip(&s.input) {
                    *w += k * x;
                }
                bias += k;
            }
        }
        if mistakes == 0 {
            return Ok(Perceptron {
                weights,
                bias,
                converged: true,
                epochs: epoch,
            });
        }
    }
    Ok(Perceptron {
        weights,
        bias,
        converged: false,
        epochs: cfg.max_epochs,
    })
}

/// Forward quantities of every unit for one input.
#[derive(Debug, Clone, PartialEq)]
pub struct FfnnState {
    /// `net_u = Σ w_uv y_v`.
    pub weighted_input: Vec<f64>,
    /// `s_u = net_u + b_u`.
    pub state: Vec<f64>,
    /// `y_u`; input units carry the external input.
    pub output: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epochs: usize,
    /// Summed squared error `Σ_samples ½ Σ_o (d_o - y_o)²` after the last epoch.
    pub error: f64,
    pub converged: bool,
}

/// A loop-free network compiled for evaluation.
#[derive(Debug, Clone)]
pub struct FeedForward {
    activation: Vec<Activation>,
    order: Vec<usize>,
    /// (connection index, source) per destination, in connection order.
    incoming: Vec<Vec<(usize, usize)>>,
    /// (connection index, destination) per source.
    outgoing: Vec<Vec<(usize, usize)>>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    connections: usize,
}

impl FeedForward {
    pub fn compile(spec: &NetworkSpec) -> Result<Self> {
        if spec.connections.iter().any(|c| c.delay != Delay::Zero) {
            return Err(Error::UnsupportedTopology(
                "feed-forward networks cannot hold delayed connections".into(),
            ));
        }
        let violations = spec.validate();
        if violations.iter().any(|v| v.rule == Rule::SameStepCycle) {
            return Err(Error::UnsupportedTopology("cycle detected".into()));
        }
        if !violations.is_empty() {
            return Err(Error::InvalidSpec(violations));
        }
        if !spec.blocks.is_empty() {
            return Err(Error::UnsupportedTopology(
                "memory blocks need the lstm executor".into(),
            ));
        }
        let n = spec.units.len();
        let mut incoming = vec![Vec::new(); n];
        let mut outgoing = vec![Vec::new(); n];
        for (k, c) in spec.connections.iter().enumerate() {
            incoming[c.dst.0].push((k, c.src.0));
            outgoing[c.src.0].push((k, c.dst.0));
        }
        let order = spec
            .same_step_order()
            .expect("validated")
            .into_iter()
            .map(|u| u.0)
            .collect();
        Ok(FeedForward {
            activation: spec.units.iter().map(|u| u.activation).collect(),
            order,
            incoming,
            outgoing,
            inputs: spec.input_units().iter().map(|u| u.0).collect(),
            outputs: spec
                .ids_with(|r| r == UnitRole::Output)
                .iter()
                .map(|u| u.0)
                .collect(),
            connections: spec.connections.len(),
        })
    }

    pub fn inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn forward(&self, params: &Params, input: &[f64]) -> Result<FfnnState> {
        params.check_shape(self.connections, self.activation.len())?;
        if input.len() != self.inputs.len() {
            return Err(Error::Dimension {
                what: "network input",
                expected: self.inputs.len(),
                got: input.len(),
            });
        }
        let n = self.activation.len();
        let mut st = FfnnState {
            weighted_input: vec![0.0; n],
            state: vec![0.0; n],
            output: vec![0.0; n],
        };
        for (&u, &x) in self.inputs.iter().zip(input) {
            st.output[u] = x;
        }
        for &u in &self.order {
            let net: f64 = self.incoming[u]
                .iter()
                .map(|&(k, v)| params.weights[k] * st.output[v])
                .sum();
            let s = net + params.biases[u];
            st.weighted_input[u] = net;
            st.state[u] = s;
            st.output[u] = self.activation[u].apply(s);
        }
        Ok(st)
    }

    /// Output-layer activations in output-unit order.
    pub fn output_values(&self, st: &FfnnState) -> Vec<f64> {
        self.outputs.iter().map(|&o| st.output[o]).collect()
    }

    /// `½ Σ_o (d_o - y_o)²`.
    pub fn squared_error(&self, st: &FfnnState, label: &[f64]) -> f64 {
        self.outputs
            .iter()
            .zip(label)
            .map(|(&o, d)| 0.5 * (d - st.output[o]).powi(2))
            .sum()
    }

    /// Error signals `ϑ_u` and updates `Δw_vu = η ϑ_u y_v`, `Δb_u = η ϑ_u`.
    pub fn backprop_step(
        &self,
        params: &Params,
        st: &FfnnState,
        sample: &Sample,
        learning_rate: f64,
    ) -> Result<Deltas> {
        let n = self.activation.len();
        if st.output.len() != n {
            return Err(Error::Dimension {
                what: "forward state",
                expected: n,
                got: st.output.len(),
            });
        }
        if sample.label.len() != self.outputs.len() {
            return Err(Error::Dimension {
                what: "label",
                expected: self.outputs.len(),
                got: sample.label.len(),
            });
        }
        let mut err = vec![0.0; n];
        for (&o, &d) in self.outputs.iter().zip(&sample.label) {
            err[o] = d - st.output[o];
        }
        let mut signal = vec![0.0; n];
        for &u in self.order.iter().rev() {
            let back: f64 = self.outgoing[u]
                .iter()
                .map(|&(k, dst)| params.weights[k] * signal[dst])
                .sum();
            signal[u] = self.activation[u].derivative(st.state[u]) * (err[u] + back);
        }
        let mut d = Deltas::zeros(self.connections, n);
        for &u in &self.order {
            for &(k, v) in &self.incoming[u] {
                d.weights[k] = learning_rate * signal[u] * st.output[v];
            }
            d.biases[u] = learning_rate * signal[u];
        }
        Ok(d)
    }

    /// Gradient descent on `½ Σ (d - y)²`, per sample or per epoch.
    pub fn train(
        &self,
        params: &mut Params,
        samples: &[Sample],
        cfg: &TrainConfig,
    ) -> Result<TrainReport> {
        cfg.check()?;
        if samples.is_empty() {
            return Err(Error::Empty("training set"));
        }
        let train_bias: Vec<bool> = (0..self.activation.len())
            .map(|u| !self.inputs.contains(&u))
            .collect();
        let mut error = self.epoch_error(params, samples)?;
        let mut epochs = 0;
        while epochs < cfg.max_epochs && error > cfg.stop_tolerance {
            let mut acc = Deltas::zeros(self.connections, self.activation.len());
            for s in samples {
                let st = self.forward(params, &s.input)?;
                let d = self.backprop_step(params, &st, s, cfg.learning_rate)?;
                if cfg.batch {
                    acc.add(&d);
                } else {
                    params.apply(&d, &train_bias);
                }
            }
            if cfg.batch {
                params.apply(&acc, &train_bias);
            }
            params.ensure_finite("feed-forward training")?;
            epochs += 1;
            error = self.epoch_error(params, samples)?;
        }
        Ok(TrainReport {
            epochs,
            error,
            converged: error <= cfg.stop_tolerance,
        })
    }

    pub fn epoch_error(&self, params: &Params, samples: &[Sample]) -> Result<f64> {
        let mut e = 0.0;
        for s in samples {
            let st = self.forward(params, &s.input)?;
            e += self.squared_error(&st, &s.label);
        }
        Ok(e)
    }
}
