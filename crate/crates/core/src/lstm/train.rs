use super::{Kind, Lstm, OpCount};
use crate::error::{Error, Result};
use crate::params::{Deltas, Params};

#[derive(Debug, Clone, PartialEq)]
pub struct LstmConfig {
    pub learning_rate: f64,
    /// Apply changes after every step instead of at the end of the sequence.
    pub online: bool,
    pub train_forget_bias: bool,
    pub output_bias: bool,
}

impl Default for LstmConfig {
    fn default() -> Self {
        LstmConfig {
            learning_rate: 0.1,
            online: false,
            train_forget_bias: false,
            output_bias: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceReport {
    /// Sequence error measured during the forward pass.
    pub error: f64,
    /// Output activations at the final step.
    pub last_output: Vec<f64>,
}

impl Lstm {
    /// Which biases [`Params::apply`] may change under `cfg`.
    pub fn trainable_biases(&self, cfg: &LstmConfig) -> Vec<bool> {
        (0..self.units())
            .map(|u| match self.kind[u] {
                Kind::Input => false,
                Kind::ForgetGate(_) => cfg.train_forget_bias,
                Kind::Readout if self.outputs.contains(&u) => cfg.output_bias,
                _ => true,
            })
            .collect()
    }

    /// Presents one sequence and updates `params` in place.
    pub fn train_sequence(
        &self,
        params: &mut Params,
        inputs: &[Vec<f64>],
        targets: &[Vec<Option<f64>>],
        cfg: &LstmConfig,
    ) -> Result<SequenceReport> {
        if inputs.is_empty() {
            return Err(Error::Empty("input sequence"));
        }
        if targets.len() != inputs.len() {
            return Err(Error::Dimension {
                what: "target sequence",
                expected: inputs.len(),
                got: targets.len(),
            });
        }
        let train_bias = self.trainable_biases(cfg);
        let mut traces = self.new_traces();
        let mut acc = Deltas::zeros(self.connections, self.units());
        let mut ops = OpCount::default();
        let mut prev = self.initial_state();
        let mut error = 0.0;
        for (x, row) in inputs.iter().zip(targets) {
            let cur = self.forward_counted(params, &prev, x, &mut ops)?;
            for (d, &o) in row.iter().zip(&self.outputs) {
                if let Some(d) = d {
                    error += 0.5 * (d - cur.y[o]).powi(2);
                }
            }
            self.advance_counted(&mut traces, &prev, &cur, &mut ops);
            self.backward_counted(
                params,
                &traces,
                &prev,
                &cur,
                row,
                cfg.learning_rate,
                &mut acc,
                &mut ops,
            )?;
            if cfg.online {
                params.apply(&acc, &train_bias);
                params.ensure_finite("lstm training")?;
                acc = Deltas::zeros(self.connections, self.units());
            }
            prev = cur;
        }
        if !cfg.online {
            params.apply(&acc, &train_bias);
            params.ensure_finite("lstm training")?;
        }
        Ok(SequenceReport {
            error,
            last_output: self.output_values(&prev),
        })
    }

    /// Multiply-adds of one forward and backward step from the zero state.
    pub fn ops_per_step(&self, params: &Params) -> Result<OpCount> {
        let mut ops = OpCount::default();
        let prev = self.initial_state();
        let x = vec![0.0; self.inputs.len()];
        let cur = self.forward_counted(params, &prev, &x, &mut ops)?;
        let mut traces = self.new_traces();
        self.advance_counted(&mut traces, &prev, &cur, &mut ops);
        let mut acc = Deltas::zeros(self.connections, self.units());
        let none = vec![None; self.outputs.len()];
        self.backward_counted(params, &traces, &prev, &cur, &none, 1.0, &mut acc, &mut ops)?;
        Ok(ops)
    }
}
