//! Memory-block networks: constant error carousels guarded by input, output
//! and forget gates, trained with truncated backpropagation for the output
//! side and forward-running state traces for the cell side.

mod backward;
mod train;

pub use backward::{IndividualError, StepErrors, TraceStore};
pub use train::{LstmConfig, SequenceReport};

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::params::Params;
use crate::topology::{Delay, NetworkSpec, UnitRole};

/// `s(t+1) = s(t)·y_φ(t+1) + y_in(t+1)·g(net_c(t+1))`.
pub fn update_cell_state(s_prev: f64, y_forget: f64, y_in: f64, g_of_net: f64) -> f64 {
    s_prev * y_forget + y_in * g_of_net
}

/// Squashing applied to the cell state before the output gate.
pub const CELL_OUTPUT: Activation = Activation::CellOutput;

/// Arithmetic performed, counted as multiply-adds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCount(pub u64);

impl OpCount {
    fn add(&mut self, n: usize) {
        self.0 += n as u64;
    }
}

/// Activations of one time step. Vectors are indexed by unit; `s` is zero
/// outside cells and `forget` is indexed by block.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub net: Vec<f64>,
    pub y: Vec<f64>,
    pub s: Vec<f64>,
    pub forget: Vec<f64>,
}

impl LstmState {
    pub fn zeros(units: usize, blocks: usize) -> Self {
        LstmState {
            net: vec![0.0; units],
            y: vec![0.0; units],
            s: vec![0.0; units],
            forget: vec![0.0; blocks],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Input,
    Cell(usize),
    InGate(usize),
    OutGate(usize),
    ForgetGate(usize),
    Readout,
}

#[derive(Debug, Clone)]
struct BlockIdx {
    cells: Vec<usize>,
    ig: usize,
    og: usize,
    fg: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TraceKind {
    Cell,
    InGate,
    Forget,
}

/// One cell-side weight whose effect on `s_c` is carried forward.
#[derive(Debug, Clone, Copy)]
struct Traced {
    /// Index into the flat weights-then-biases layout.
    param: usize,
    /// Signal source, `None` for a bias.
    src: Option<(usize, bool)>,
    kind: TraceKind,
}

/// A memory-block network compiled for execution.
#[derive(Debug, Clone)]
pub struct Lstm {
    activation: Vec<Activation>,
    kind: Vec<Kind>,
    blocks: Vec<BlockIdx>,
    /// Hidden and output units in same-step order.
    readout: Vec<usize>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    incoming: Vec<Vec<(usize, usize, bool)>>,
    /// Same-step (connection, destination) edges into readout units.
    forward_edges: Vec<Vec<(usize, usize)>>,
    /// All cells, block by block.
    cells: Vec<usize>,
    traced: Vec<Vec<Traced>>,
    connections: usize,
}

impl Lstm {
    pub fn compile(spec: &NetworkSpec) -> Result<Self> {
        spec.ensure_valid()?;
        let n = spec.units.len();
        let mut kind = Vec::with_capacity(n);
        for u in &spec.units {
            kind.push(match u.role {
                UnitRole::Input => Kind::Input,
                UnitRole::Cell(b) => Kind::Cell(b),
                UnitRole::InputGate(b) => Kind::InGate(b),
                UnitRole::OutputGate(b) => Kind::OutGate(b),
                UnitRole::ForgetGate(b) => Kind::ForgetGate(b),
                UnitRole::Hidden | UnitRole::Output => Kind::Readout,
                UnitRole::GruUnit => {
                    return Err(Error::UnsupportedTopology(
                        "gated recurrent units need the gru executor".into(),
                    ))
                }
            });
        }
        // Block ids are positions so that per-block vectors can be indexed by them.
        for (pos, blk) in spec.blocks.iter().enumerate() {
            if blk.id != pos {
                return Err(Error::UnsupportedTopology(format!(
                    "block ids must be 0..{}; found {} at position {pos}",
                    spec.blocks.len(),
                    blk.id
                )));
            }
        }
        let blocks: Vec<BlockIdx> = spec
            .blocks
            .iter()
            .map(|b| BlockIdx {
                cells: b.cells.iter().map(|c| c.0).collect(),
                ig: b.input_gate.0,
                og: b.output_gate.0,
                fg: b.forget_gate.map(|f| f.0),
            })
            .collect();
        let mut incoming = vec![Vec::new(); n];
        let mut forward_edges = vec![Vec::new(); n];
        for (k, c) in spec.connections.iter().enumerate() {
            let delayed = c.delay == Delay::One;
            incoming[c.dst.0].push((k, c.src.0, delayed));
            if !delayed && kind[c.dst.0] == Kind::Readout {
                forward_edges[c.src.0].push((k, c.dst.0));
            }
        }
        let readout = spec
            .same_step_order()
            .expect("validated")
            .into_iter()
            .map(|u| u.0)
            .filter(|&u| kind[u] == Kind::Readout)
            .collect();
        let nc = spec.connections.len();
        let traced_into = |u: usize, kind: TraceKind| {
            incoming[u]
                .iter()
                .map(move |&(k, src, delayed)| Traced {
                    param: k,
                    src: Some((src, delayed)),
                    kind,
                })
                .chain(std::iter::once(Traced {
                    param: nc + u,
                    src: None,
                    kind,
                }))
        };
        let mut cells = Vec::new();
        let mut traced = Vec::new();
        for b in &blocks {
            for &c in &b.cells {
                let mut t: Vec<Traced> = traced_into(c, TraceKind::Cell).collect();
                t.extend(traced_into(b.ig, TraceKind::InGate));
                if let Some(f) = b.fg {
                    t.extend(traced_into(f, TraceKind::Forget));
                }
                cells.push(c);
                traced.push(t);
            }
        }
        Ok(Lstm {
            activation: spec.units.iter().map(|u| u.activation).collect(),
            inputs: spec.input_units().iter().map(|u| u.0).collect(),
            outputs: spec
                .ids_with(|r| r == UnitRole::Output)
                .iter()
                .map(|u| u.0)
                .collect(),
            kind,
            blocks,
            readout,
            incoming,
            forward_edges,
            cells,
            traced,
            connections: nc,
        })
    }

    pub fn units(&self) -> usize {
        self.activation.len()
    }

    pub fn blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn connections(&self) -> usize {
        self.connections
    }

    pub fn output_units(&self) -> &[usize] {
        &self.outputs
    }

    pub fn cell_units(&self) -> &[usize] {
        &self.cells
    }

    pub fn initial_state(&self) -> LstmState {
        LstmState::zeros(self.units(), self.blocks.len())
    }

    /// Output activations in output-unit order.
    pub fn output_values(&self, st: &LstmState) -> Vec<f64> {
        self.outputs.iter().map(|&o| st.y[o]).collect()
    }

    /// Gate activation `y_in`, `y_out`, `y_φ` of block `b` (`y_φ = 1` without a forget gate).
    pub fn gates(&self, st: &LstmState, b: usize) -> (f64, f64, f64) {
        let blk = &self.blocks[b];
        (st.y[blk.ig], st.y[blk.og], st.forget[b])
    }

    fn net_of(
        &self,
        params: &Params,
        u: usize,
        prev: &LstmState,
        y: &[f64],
        ops: &mut OpCount,
    ) -> f64 {
        let mut s = 0.0;
        for &(k, v, delayed) in &self.incoming[u] {
            s += params.weights[k] * if delayed { prev.y[v] } else { y[v] };
        }
        ops.add(self.incoming[u].len());
        s + params.biases[u]
    }

    /// One step: gates, then cell states, then cell outputs, then the
    /// hidden and output units.
    pub fn forward_step(
        &self,
        params: &Params,
        prev: &LstmState,
        input: &[f64],
    ) -> Result<LstmState> {
        self.forward_counted(params, prev, input, &mut OpCount::default())
    }

    pub(crate) fn forward_counted(
        &self,
        params: &Params,
        prev: &LstmState,
        input: &[f64],
        ops: &mut OpCount,
    ) -> Result<LstmState> {
        let n = self.units();
        params.check_shape(self.connections, n)?;
        if input.len() != self.inputs.len() {
            return Err(Error::Dimension {
                what: "external input",
                expected: self.inputs.len(),
                got: input.len(),
            });
        }
        if prev.y.len() != n || prev.s.len() != n || prev.forget.len() != self.blocks.len() {
            return Err(Error::TraceMismatch(
                "previous state does not match the network".into(),
            ));
        }
        let mut st = LstmState::zeros(n, self.blocks.len());
        for (&i, &x) in self.inputs.iter().zip(input) {
            st.y[i] = x;
        }
        for (b, blk) in self.blocks.iter().enumerate() {
            for gate in [Some(blk.ig), Some(blk.og), blk.fg].into_iter().flatten() {
                let net = self.net_of(params, gate, prev, &st.y, ops);
                st.net[gate] = net;
                st.y[gate] = self.activation[gate].apply(net);
            }
            st.forget[b] = blk.fg.map_or(1.0, |f| st.y[f]);
            let (y_in, y_out) = (st.y[blk.ig], st.y[blk.og]);
            for &c in &blk.cells {
                let net = self.net_of(params, c, prev, &st.y, ops);
                st.net[c] = net;
                st.s[c] =
                    update_cell_state(prev.s[c], st.forget[b], y_in, self.activation[c].apply(net));
                st.y[c] = y_out * CELL_OUTPUT.apply(st.s[c]);
            }
        }
        for &u in &self.readout {
            let net = self.net_of(params, u, prev, &st.y, ops);
            st.net[u] = net;
            st.y[u] = self.activation[u].apply(net);
        }
        Ok(st)
    }

    /// States `0..=T` for an input sequence; index 0 is the zero state.
    pub fn run(&self, params: &Params, inputs: &[Vec<f64>]) -> Result<Vec<LstmState>> {
        let mut states = Vec::with_capacity(inputs.len() + 1);
        states.push(self.initial_state());
        for x in inputs {
            let next = self.forward_step(params, states.last().unwrap(), x)?;
            states.push(next);
        }
        Ok(states)
    }

    /// `Σ_t Σ_o ½ (d_o(t) - y_o(t))²` over the steps that carry targets.
    pub fn sequence_error(&self, states: &[LstmState], targets: &[Vec<Option<f64>>]) -> f64 {
        targets
            .iter()
            .zip(states.iter().skip(1))
            .map(|(row, st)| {
                row.iter()
                    .zip(&self.outputs)
                    .filter_map(|(d, &o)| d.map(|d| 0.5 * (d - st.y[o]).powi(2)))
                    .sum::<f64>()
            })
            .sum()
    }
}
