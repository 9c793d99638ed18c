use super::{Kind, Lstm, LstmState, OpCount, TraceKind, Traced, CELL_OUTPUT};
use crate::error::{Error, Result};
use crate::params::{Deltas, Params};

/// Running `∂s_c/∂w` for every weight into a cell, its input gate and its
/// forget gate; one row per cell in [`Lstm::cell_units`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStore {
    pub ds: Vec<Vec<f64>>,
}

/// Error signals of one step, indexed by unit: `ε` for hidden units, output
/// units and output gates, and the local state error `∂E(t)/∂s_c(t)` for cells.
#[derive(Debug, Clone, PartialEq)]
pub struct StepErrors {
    pub eps: Vec<f64>,
}

/// Individual errors over a sequence. `local[t-1]` holds the step errors at
/// `t`; `cell[t-1][i]` holds `ε_c(t) = e_s(t) + ε_c(t+1)·y_φ(t+1)` for the
/// `i`-th cell.
#[derive(Debug, Clone, PartialEq)]
pub struct IndividualError {
    pub local: Vec<StepErrors>,
    pub cell: Vec<Vec<f64>>,
}

impl Lstm {
    pub fn new_traces(&self) -> TraceStore {
        TraceStore {
            ds: self.traced.iter().map(|t| vec![0.0; t.len()]).collect(),
        }
    }

    fn signal(tr: &Traced, prev: &LstmState, cur: &LstmState) -> f64 {
        match tr.src {
            Some((v, true)) => prev.y[v],
            Some((v, false)) => cur.y[v],
            None => 1.0,
        }
    }

    /// `∂s_c(t+1)/∂w` coming from `w`'s own step, before the forget factor
    /// carries it on.
    fn injection(&self, pos: usize, tr: &Traced, prev: &LstmState, cur: &LstmState) -> f64 {
        let c = self.cells[pos];
        let Kind::Cell(b) = self.kind[c] else {
            unreachable!()
        };
        let blk = &self.blocks[b];
        let x = Self::signal(tr, prev, cur);
        let g = self.activation[c];
        match tr.kind {
            TraceKind::Cell => g.derivative(cur.net[c]) * cur.y[blk.ig] * x,
            TraceKind::InGate => {
                g.apply(cur.net[c]) * self.activation[blk.ig].derivative(cur.net[blk.ig]) * x
            }
            TraceKind::Forget => {
                let f = blk.fg.expect("forget trace without forget gate");
                prev.s[c] * self.activation[f].derivative(cur.net[f]) * x
            }
        }
    }

    /// Moves the traces from `t` (state `prev`) to `t+1` (state `cur`).
    pub fn advance_traces(&self, traces: &mut TraceStore, prev: &LstmState, cur: &LstmState) {
        self.advance_counted(traces, prev, cur, &mut OpCount::default());
    }

    pub(crate) fn advance_counted(
        &self,
        traces: &mut TraceStore,
        prev: &LstmState,
        cur: &LstmState,
        ops: &mut OpCount,
    ) {
        for (pos, (row, list)) in traces.ds.iter_mut().zip(&self.traced).enumerate() {
            let Kind::Cell(b) = self.kind[self.cells[pos]] else {
                unreachable!()
            };
            let keep = cur.forget[b];
            for (d, tr) in row.iter_mut().zip(list) {
                *d = *d * keep + self.injection(pos, tr, prev, cur);
            }
            ops.add(row.len());
        }
    }

    /// Error signals at `t+1` for output-ordered `targets` (empty for none).
    pub fn step_errors(
        &self,
        params: &Params,
        cur: &LstmState,
        targets: &[Option<f64>],
    ) -> Result<StepErrors> {
        self.errors_counted(params, cur, targets, &mut OpCount::default())
    }

    fn errors_counted(
        &self,
        params: &Params,
        cur: &LstmState,
        targets: &[Option<f64>],
        ops: &mut OpCount,
    ) -> Result<StepErrors> {
        if !targets.is_empty() && targets.len() != self.outputs.len() {
            return Err(Error::Dimension {
                what: "target row",
                expected: self.outputs.len(),
                got: targets.len(),
            });
        }
        let mut eps = vec![0.0; self.units()];
        let mut err = vec![0.0; self.units()];
        for (&o, d) in self.outputs.iter().zip(targets) {
            if let Some(d) = d {
                err[o] = d - cur.y[o];
            }
        }
        let back = |u: usize, eps: &[f64]| -> f64 {
            self.forward_edges[u]
                .iter()
                .map(|&(k, dst)| params.weights[k] * eps[dst])
                .sum()
        };
        for &u in self.readout.iter().rev() {
            eps[u] = self.activation[u].derivative(cur.net[u]) * (err[u] + back(u, &eps));
            ops.add(self.forward_edges[u].len());
        }
        for blk in &self.blocks {
            let y_out = cur.y[blk.og];
            let mut gate_sum = 0.0;
            for &c in &blk.cells {
                let b = back(c, &eps);
                ops.add(self.forward_edges[c].len());
                eps[c] = y_out * CELL_OUTPUT.derivative(cur.s[c]) * b;
                gate_sum += CELL_OUTPUT.apply(cur.s[c]) * b;
            }
            eps[blk.og] = self.activation[blk.og].derivative(cur.net[blk.og]) * gate_sum;
        }
        Ok(StepErrors { eps })
    }

    /// Adds `η ε_u x` for readout units and output gates into `acc`.
    fn output_side_deltas(
        &self,
        errors: &StepErrors,
        prev: &LstmState,
        cur: &LstmState,
        learning_rate: f64,
        acc: &mut Deltas,
        ops: &mut OpCount,
    ) {
        let gates = self.blocks.iter().map(|b| b.og);
        for u in self.readout.iter().copied().chain(gates) {
            let e = learning_rate * errors.eps[u];
            for &(k, v, delayed) in &self.incoming[u] {
                acc.weights[k] += e * if delayed { prev.y[v] } else { cur.y[v] };
            }
            ops.add(self.incoming[u].len());
            acc.biases[u] += e;
        }
    }

    fn add_param(&self, acc: &mut Deltas, param: usize, v: f64) {
        if param < self.connections {
            acc.weights[param] += v;
        } else {
            acc.biases[param - self.connections] += v;
        }
    }

    /// Backward half of a step: errors at `t+1` and the weight changes they
    /// imply, given traces already advanced to `t+1`.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn backward_counted(
        &self,
        params: &Params,
        traces: &TraceStore,
        prev: &LstmState,
        cur: &LstmState,
        targets: &[Option<f64>],
        learning_rate: f64,
        acc: &mut Deltas,
        ops: &mut OpCount,
    ) -> Result<StepErrors> {
        let errors = self.errors_counted(params, cur, targets, ops)?;
        self.output_side_deltas(&errors, prev, cur, learning_rate, acc, ops);
        for (pos, (row, list)) in traces.ds.iter().zip(&self.traced).enumerate() {
            let e = learning_rate * errors.eps[self.cells[pos]];
            for (d, tr) in row.iter().zip(list) {
                self.add_param(acc, tr.param, e * d);
            }
            ops.add(row.len());
        }
        Ok(errors)
    }

    fn check_targets(&self, inputs: &[Vec<f64>], targets: &[Vec<Option<f64>>]) -> Result<()> {
        if !targets.is_empty() && targets.len() != inputs.len() {
            return Err(Error::Dimension {
                what: "target sequence",
                expected: inputs.len(),
                got: targets.len(),
            });
        }
        Ok(())
    }

    /// Hybrid weight changes for one sequence with frozen weights and `η = 1`.
    pub fn gradient(
        &self,
        params: &Params,
        inputs: &[Vec<f64>],
        targets: &[Vec<Option<f64>>],
    ) -> Result<Deltas> {
        self.check_targets(inputs, targets)?;
        let states = self.run(params, inputs)?;
        let mut traces = self.new_traces();
        let mut acc = Deltas::zeros(self.connections, self.units());
        let mut ops = OpCount::default();
        for t in 1..states.len() {
            self.advance_counted(&mut traces, &states[t - 1], &states[t], &mut ops);
            let row = targets.get(t - 1).map_or(&[][..], |r| r.as_slice());
            self.backward_counted(
                params,
                &traces,
                &states[t - 1],
                &states[t],
                row,
                1.0,
                &mut acc,
                &mut ops,
            )?;
        }
        Ok(acc)
    }

    /// Step errors plus the cell errors carried back through the forget gates.
    pub fn individual_errors(
        &self,
        params: &Params,
        states: &[LstmState],
        targets: &[Vec<Option<f64>>],
    ) -> Result<IndividualError> {
        if states.is_empty() {
            return Err(Error::Empty("state sequence"));
        }
        let steps = states.len() - 1;
        let mut local = Vec::with_capacity(steps);
        for t in 1..=steps {
            let row = targets.get(t - 1).map_or(&[][..], |r| r.as_slice());
            local.push(self.step_errors(params, &states[t], row)?);
        }
        let mut cell = vec![vec![0.0; self.cells.len()]; steps];
        for t in (0..steps).rev() {
            for (i, &c) in self.cells.iter().enumerate() {
                let Kind::Cell(b) = self.kind[c] else {
                    unreachable!()
                };
                let carried = if t + 1 < steps {
                    cell[t + 1][i] * states[t + 2].forget[b]
                } else {
                    0.0
                };
                cell[t][i] = local[t].eps[c] + carried;
            }
        }
        Ok(IndividualError { local, cell })
    }

    /// The same weight changes as [`Lstm::gradient`], with the cell side
    /// written as `Σ_t ε_c(t) · ∂s_c(t)/∂w|_t` over per-step injections
    /// instead of local errors times running traces.
    pub fn gradient_from_cell_errors(
        &self,
        params: &Params,
        inputs: &[Vec<f64>],
        targets: &[Vec<Option<f64>>],
    ) -> Result<Deltas> {
        self.check_targets(inputs, targets)?;
        let states = self.run(params, inputs)?;
        let ind = self.individual_errors(params, &states, targets)?;
        let mut acc = Deltas::zeros(self.connections, self.units());
        let mut ops = OpCount::default();
        for t in 1..states.len() {
            let (prev, cur) = (&states[t - 1], &states[t]);
            self.output_side_deltas(&ind.local[t - 1], prev, cur, 1.0, &mut acc, &mut ops);
            for (pos, list) in self.traced.iter().enumerate() {
                let e = ind.cell[t - 1][pos];
                for tr in list {
                    self.add_param(&mut acc, tr.param, e * self.injection(pos, tr, prev, cur));
                }
            }
        }
        Ok(acc)
    }
}
