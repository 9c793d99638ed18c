//! Fully recurrent networks and the two exact-gradient trainers, BPTT and RTRL.

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::params::{Deltas, Params};
use crate::topology::{Delay, NetworkSpec, UnitRole};

/// One time step of an epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// External input `y_i(τ)` in input-unit order.
    pub input: Vec<f64>,
    /// `net_u(τ)` including the bias, indexed by unit.
    pub net: Vec<f64>,
    /// `y_u(τ)` for every unit; input slots hold the external input.
    pub output: Vec<f64>,
    /// `d_u(τ)` for units in the target set `T(τ)`, indexed by unit.
    pub target: Vec<Option<f64>>,
}

impl StepRecord {
    /// `e_u(τ) = d_u(τ) - y_u(τ)` for targeted units, zero elsewhere.
    pub fn error(&self) -> Vec<f64> {
        self.target
            .iter()
            .zip(&self.output)
            .map(|(d, y)| d.map_or(0.0, |d| d - y))
            .collect()
    }
}

/// Forward record of an epoch; `steps[τ-1]` holds time `τ`, `initial` holds `t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochTrace {
    pub initial: Vec<f64>,
    pub steps: Vec<StepRecord>,
}

impl EpochTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `E_total = Σ_τ Σ_{u∈T(τ)} ½ e_u(τ)²`.
    pub fn total_error(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| s.error().iter().map(|e| 0.5 * e * e).sum::<f64>())
            .sum()
    }

    fn output_at(&self, tau: usize) -> &[f64] {
        if tau == 0 {
            &self.initial
        } else {
            &self.steps[tau - 1].output
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RtrlConfig {
    pub learning_rate: f64,
    /// Apply each step's change immediately instead of at the epoch end.
    pub online: bool,
    /// Reject steps that carry no target at all.
    pub require_targets: bool,
}

impl Default for RtrlConfig {
    fn default() -> Self {
        RtrlConfig {
            learning_rate: 1.0,
            online: false,
            require_targets: true,
        }
    }
}

/// Sensitivities `p^k_{uv} = ∂y_k/∂w_{uv}`, one row per unit (input rows
/// stay zero) and one column per trainable value (weights, then biases).
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityStore {
    pub units: usize,
    pub params: usize,
    pub p: Vec<f64>,
}

impl SensitivityStore {
    fn zeros(units: usize, params: usize) -> Self {
        SensitivityStore {
            units,
            params,
            p: vec![0.0; units * params],
        }
    }

    pub fn get(&self, unit: usize, param: usize) -> f64 {
        self.p[unit * self.params + param]
    }

    fn row(&self, unit: usize) -> &[f64] {
        &self.p[unit * self.params..(unit + 1) * self.params]
    }
}

/// A recurrent network compiled for stepping and training.
#[derive(Debug, Clone)]
pub struct RecurrentNet {
    activation: Vec<Activation>,
    is_input: Vec<bool>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    /// (connection, source, delayed) per destination.
    incoming: Vec<Vec<(usize, usize, bool)>>,
    src: Vec<usize>,
    dst: Vec<usize>,
    delayed: Vec<bool>,
}

impl RecurrentNet {
    pub fn compile(spec: &NetworkSpec) -> Result<Self> {
        spec.ensure_valid()?;
        if !spec.blocks.is_empty() {
            return Err(Error::UnsupportedTopology(
                "memory blocks need the lstm executor".into(),
            ));
        }
        let is_input: Vec<bool> = spec.units.iter().map(|u| u.role.is_input()).collect();
        for c in &spec.connections {
            if !is_input[c.src.0] && c.delay == Delay::Zero {
                return Err(Error::UnsupportedTopology(format!(
                    "connection {} -> {} between non-input units must be delayed",
                    c.src.0, c.dst.0
                )));
            }
        }
        let n = spec.units.len();
        let mut incoming = vec![Vec::new(); n];
        for (k, c) in spec.connections.iter().enumerate() {
            incoming[c.dst.0].push((k, c.src.0, c.delay == Delay::One));
        }
        Ok(RecurrentNet {
            activation: spec.units.iter().map(|u| u.activation).collect(),
            inputs: spec.input_units().iter().map(|u| u.0).collect(),
            outputs: spec
                .ids_with(|r| r == UnitRole::Output)
                .iter()
                .map(|u| u.0)
                .collect(),
            is_input,
            incoming,
            src: spec.connections.iter().map(|c| c.src.0).collect(),
            dst: spec.connections.iter().map(|c| c.dst.0).collect(),
            delayed: spec
                .connections
                .iter()
                .map(|c| c.delay == Delay::One)
                .collect(),
        })
    }

    pub fn units(&self) -> usize {
        self.activation.len()
    }

    pub fn input_units(&self) -> &[usize] {
        &self.inputs
    }

    pub fn output_units(&self) -> &[usize] {
        &self.outputs
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activation
    }

    /// `(source, destination, delayed)` per connection.
    pub fn connection_table(&self) -> impl Iterator<Item = (usize, usize, bool)> + '_ {
        (0..self.src.len()).map(|k| (self.src[k], self.dst[k], self.delayed[k]))
    }

    /// Bias flags for [`Params::apply`]: every non-input unit.
    pub fn trainable_biases(&self) -> Vec<bool> {
        self.is_input.iter().map(|i| !i).collect()
    }

    /// Spreads per-output targets onto unit-indexed target vectors.
    pub fn output_targets(&self, targets: &[Vec<Option<f64>>]) -> Result<Vec<Vec<Option<f64>>>> {
        targets
            .iter()
            .map(|row| {
                if row.len() != self.outputs.len() {
                    return Err(Error::Dimension {
                        what: "target row",
                        expected: self.outputs.len(),
                        got: row.len(),
                    });
                }
                let mut full = vec![None; self.units()];
                for (&o, &d) in self.outputs.iter().zip(row) {
                    full[o] = d;
                }
                Ok(full)
            })
            .collect()
    }

    /// Computes `net(t+1)` and `y(t+1)` from `y(t)` (all units) and the
    /// external input at `t+1`.
    pub fn step(
        &self,
        params: &Params,
        prev: &[f64],
        input: &[f64],
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.units();
        params.check_shape(self.src.len(), n)?;
        if prev.len() != n {
            return Err(Error::Dimension {
                what: "previous outputs",
                expected: n,
                got: prev.len(),
            });
        }
        if input.len() != self.inputs.len() {
            return Err(Error::Dimension {
                what: "external input",
                expected: self.inputs.len(),
                got: input.len(),
            });
        }
        let mut y = vec![0.0; n];
        for (&i, &x) in self.inputs.iter().zip(input) {
            y[i] = x;
        }
        let mut net = vec![0.0; n];
        for u in 0..n {
            if self.is_input[u] {
                continue;
            }
            let mut s = 0.0;
            for &(k, v, delayed) in &self.incoming[u] {
                s += params.weights[k] * if delayed { prev[v] } else { y[v] };
            }
            net[u] = s + params.biases[u];
        }
        for u in 0..n {
            if !self.is_input[u] {
                y[u] = self.activation[u].apply(net[u]);
            }
        }
        Ok((y, net))
    }

    /// Runs an epoch from the zero state. `targets` is unit-indexed and may
    /// be empty (no targets anywhere).
    pub fn run(
        &self,
        params: &Params,
        inputs: &[Vec<f64>],
        targets: &[Vec<Option<f64>>],
    ) -> Result<EpochTrace> {
        let n = self.units();
        if !targets.is_empty() && targets.len() != inputs.len() {
            return Err(Error::Dimension {
                what: "target sequence",
                expected: inputs.len(),
                got: targets.len(),
            });
        }
        let mut trace = EpochTrace {
            initial: vec![0.0; n],
            steps: Vec::with_capacity(inputs.len()),
        };
        for (t, x) in inputs.iter().enumerate() {
            let target = match targets.get(t) {
                Some(row) => self.check_target_row(row, t + 1)?,
                None => vec![None; n],
            };
            let (output, net) = self.step(params, trace.output_at(t), x)?;
            trace.steps.push(StepRecord {
                input: x.clone(),
                net,
                output,
                target,
            });
        }
        Ok(trace)
    }

    fn check_target_row(&self, row: &[Option<f64>], step: usize) -> Result<Vec<Option<f64>>> {
        if row.len() != self.units() {
            return Err(Error::Dimension {
                what: "target row",
                expected: self.units(),
                got: row.len(),
            });
        }
        if let Some(u) = (0..row.len()).find(|&u| self.is_input[u] && row[u].is_some()) {
            return Err(Error::TargetOnInput { unit: u, step });
        }
        Ok(row.to_vec())
    }

    fn check_trace(&self, params: &Params, trace: &EpochTrace) -> Result<()> {
        params.check_shape(self.src.len(), self.units())?;
        let n = self.units();
        let bad = trace.initial.len() != n
            || trace
                .steps
                .iter()
                .any(|s| s.net.len() != n || s.output.len() != n || s.target.len() != n);
        if bad {
            return Err(Error::TraceMismatch(format!(
                "trace rows do not cover {n} units"
            )));
        }
        Ok(())
    }

    /// Error signals `ϑ_u(τ)` for `τ = 1..=T` (row `τ-1`), walking backwards.
    pub fn error_signals(&self, params: &Params, trace: &EpochTrace) -> Result<Vec<Vec<f64>>> {
        self.check_trace(params, trace)?;
        let n = self.units();
        let steps = trace.len();
        let mut signals = vec![vec![0.0; n]; steps];
        for tau in (0..steps).rev() {
            let rec = &trace.steps[tau];
            let mut back = rec.error();
            if tau + 1 < steps {
                let next = &signals[tau + 1];
                for k in 0..self.src.len() {
                    if self.delayed[k] {
                        back[self.src[k]] += params.weights[k] * next[self.dst[k]];
                    }
                }
            }
            for u in 0..n {
                if !self.is_input[u] {
                    signals[tau][u] = self.activation[u].derivative(rec.net[u]) * back[u];
                }
            }
        }
        Ok(signals)
    }

    /// Backpropagation through time: `Δw_uv = η Σ_τ ϑ_u(τ) x_uv(τ)`.
    pub fn bptt(&self, params: &Params, trace: &EpochTrace, learning_rate: f64) -> Result<Deltas> {
        let signals = self.error_signals(params, trace)?;
        let n = self.units();
        let mut d = Deltas::zeros(self.src.len(), n);
        for (tau, sig) in signals.iter().enumerate() {
            let now = &trace.steps[tau].output;
            let before = trace.output_at(tau);
            for k in 0..self.src.len() {
                let x = if self.delayed[k] {
                    before[self.src[k]]
                } else {
                    now[self.src[k]]
                };
                d.weights[k] += sig[self.dst[k]] * x;
            }
            for u in 0..n {
                d.biases[u] += sig[u];
            }
        }
        d.scale(learning_rate);
        Ok(d)
    }

    /// Real-time recurrent learning over one epoch. Targets are unit-indexed.
    /// With `online` set, each step's change is applied to a working copy of
    /// the weights before the next step; the returned deltas are then the sum
    /// of everything applied.
    pub fn rtrl(
        &self,
        params: &Params,
        inputs: &[Vec<f64>],
        targets: &[Vec<Option<f64>>],
        cfg: &RtrlConfig,
    ) -> Result<Deltas> {
        Ok(self.rtrl_with_store(params, inputs, targets, cfg)?.0)
    }

    /// As [`Self::rtrl`], also returning the final sensitivities.
    pub fn rtrl_with_store(
        &self,
        params: &Params,
        inputs: &[Vec<f64>],
        targets: &[Vec<Option<f64>>],
        cfg: &RtrlConfig,
    ) -> Result<(Deltas, SensitivityStore)> {
        let n = self.units();
        let nc = self.src.len();
        params.check_shape(nc, n)?;
        if targets.len() != inputs.len() {
            if targets.len() < inputs.len() && cfg.require_targets {
                return Err(Error::MissingTarget(targets.len() + 1));
            }
            return Err(Error::Dimension {
                what: "target sequence",
                expected: inputs.len(),
                got: targets.len(),
            });
        }
        let np = nc + n;
        let mut w = params.clone();
        let train_bias = self.trainable_biases();
        let mut store = SensitivityStore::zeros(n, np);
        let mut total = Deltas::zeros(nc, n);
        let mut prev = vec![0.0; n];
        for (t, (x, row)) in inputs.iter().zip(targets).enumerate() {
            let row = self.check_target_row(row, t + 1)?;
            if cfg.require_targets && row.iter().all(Option::is_none) {
                return Err(Error::MissingTarget(t + 1));
            }
            let (y, net) = self.step(&w, &prev, x)?;
            let mut next = SensitivityStore::zeros(n, np);
            for k in 0..n {
                if self.is_input[k] {
                    continue;
                }
                let fprime = self.activation[k].derivative(net[k]);
                let out = &mut next.p[k * np..(k + 1) * np];
                // Σ_l w_kl p^l(t) over delayed non-input sources.
                for &(c, l, delayed) in &self.incoming[k] {
                    if delayed {
                        let wkl = w.weights[c];
                        for (o, p) in out.iter_mut().zip(store.row(l)) {
                            *o += wkl * p;
                        }
                    }
                }
                // Kronecker term: weights into k and k's bias.
                for &(c, v, delayed) in &self.incoming[k] {
                    out[c] += if delayed { prev[v] } else { y[v] };
                }
                out[nc + k] += 1.0;
                for o in out.iter_mut() {
                    *o *= fprime;
                }
            }
            store = next;
            let mut step = Deltas::zeros(nc, n);
            for (k, d) in row.iter().enumerate() {
                if let Some(d) = d {
                    let e = d - y[k];
                    let p = store.row(k);
                    for (j, dw) in step.weights.iter_mut().enumerate() {
                        *dw += e * p[j];
                    }
                    for (j, db) in step.biases.iter_mut().enumerate() {
                        *db += e * p[nc + j];
                    }
                }
            }
            step.scale(cfg.learning_rate);
            if cfg.online {
                w.apply(&step, &train_bias);
                w.ensure_finite("online rtrl")?;
            }
            total.add(&step);
            prev = y;
        }
        Ok((total, store))
    }
}
