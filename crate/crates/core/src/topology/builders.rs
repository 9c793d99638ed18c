use rand::Rng;

use super::{Block, Delay, NetworkSpec, UnitId, UnitRole};
use crate::activation::Activation;

/// Default forget-gate bias.
pub const FORGET_BIAS: f64 = 1.0;

/// Shape of a standard memory-block network: inputs feed every cell and gate,
/// cells feed the outputs (optionally through one hidden layer), and, when
/// `recurrent` is set, every cell output of step `t` feeds every cell and gate
/// at `t + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmLayout {
    pub inputs: usize,
    pub blocks: usize,
    pub cells_per_block: usize,
    pub outputs: usize,
    pub hidden: usize,
    pub forget_gates: bool,
    pub recurrent: bool,
    pub forget_bias: f64,
}

impl LstmLayout {
    pub fn new(inputs: usize, blocks: usize, cells_per_block: usize, outputs: usize) -> Self {
        LstmLayout {
            inputs,
            blocks,
            cells_per_block,
            outputs,
            hidden: 0,
            forget_gates: true,
            recurrent: true,
            forget_bias: FORGET_BIAS,
        }
    }

    pub fn hidden(mut self, n: usize) -> Self {
        self.hidden = n;
        self
    }

    pub fn forget_gates(mut self, on: bool) -> Self {
        self.forget_gates = on;
        self
    }

    pub fn recurrent(mut self, on: bool) -> Self {
        self.recurrent = on;
        self
    }

    pub fn forget_bias(mut self, b: f64) -> Self {
        self.forget_bias = b;
        self
    }

    /// Builds the spec with all weights zero.
    pub fn build(&self) -> NetworkSpec {
        let mut s = NetworkSpec::default();
        let inputs: Vec<UnitId> = (0..self.inputs)
            .map(|_| s.add_unit(UnitRole::Input, Activation::Identity, 0.0))
            .collect();

        let mut block_units = Vec::new();
        let mut cells = Vec::new();
        for b in 0..self.blocks {
            let cs: Vec<UnitId> = (0..self.cells_per_block)
                .map(|_| s.add_unit(UnitRole::Cell(b), Activation::CellInput, 0.0))
                .collect();
            let ig = s.add_unit(UnitRole::InputGate(b), Activation::LOGISTIC, 0.0);
            let og = s.add_unit(UnitRole::OutputGate(b), Activation::LOGISTIC, 0.0);
            let fg = self.forget_gates.then(|| {
                s.add_unit(
                    UnitRole::ForgetGate(b),
                    Activation::LOGISTIC,
                    self.forget_bias,
                )
            });
            block_units.extend(cs.iter().copied());
            block_units.push(ig);
            block_units.push(og);
            block_units.extend(fg);
            cells.extend(cs.iter().copied());
            s.blocks.push(Block {
                id: b,
                cells: cs,
                input_gate: ig,
                output_gate: og,
                forget_gate: fg,
            });
        }
        let hidden: Vec<UnitId> = (0..self.hidden)
            .map(|_| s.add_unit(UnitRole::Hidden, Activation::LOGISTIC, 0.0))
            .collect();
        let outputs: Vec<UnitId> = (0..self.outputs)
            .map(|_| s.add_unit(UnitRole::Output, Activation::LOGISTIC, 0.0))
            .collect();

        for &dst in &block_units {
            for &i in &inputs {
                s.connect(i, dst, 0.0, Delay::Zero);
            }
            if self.recurrent {
                for &c in &cells {
                    s.connect(c, dst, 0.0, Delay::One);
                }
            }
        }
        let readout = if hidden.is_empty() { &cells } else { &hidden };
        for &h in &hidden {
            for &c in &cells {
                s.connect(c, h, 0.0, Delay::Zero);
            }
        }
        for &o in &outputs {
            for &r in readout {
                s.connect(r, o, 0.0, Delay::Zero);
            }
        }
        s
    }
}

impl NetworkSpec {
    /// Fully recurrent network: every non-input unit reads every non-input
    /// unit (itself included) with one step of delay, and every input unit
    /// with none.
    pub fn fully_recurrent(inputs: usize, hidden: usize, outputs: usize) -> NetworkSpec {
        let mut s = NetworkSpec::default();
        let ins: Vec<UnitId> = (0..inputs)
            .map(|_| s.add_unit(UnitRole::Input, Activation::Identity, 0.0))
            .collect();
        let mut rest: Vec<UnitId> = (0..hidden)
            .map(|_| s.add_unit(UnitRole::Hidden, Activation::LOGISTIC, 0.0))
            .collect();
        rest.extend((0..outputs).map(|_| s.add_unit(UnitRole::Output, Activation::LOGISTIC, 0.0)));
        for &dst in &rest {
            for &src in &rest {
                s.connect(src, dst, 0.0, Delay::One);
            }
            for &i in &ins {
                s.connect(i, dst, 0.0, Delay::Zero);
            }
        }
        s
    }

    /// Fully connected layered feed-forward network; `layers[0]` is the input
    /// layer and the last entry the output layer.
    pub fn feed_forward(layers: &[usize]) -> NetworkSpec {
        let mut s = NetworkSpec::default();
        let last = layers.len().saturating_sub(1);
        let mut prev: Vec<UnitId> = Vec::new();
        for (l, &width) in layers.iter().enumerate() {
            let (role, act) = match l {
                0 => (UnitRole::Input, Activation::Identity),
                l if l == last => (UnitRole::Output, Activation::LOGISTIC),
                _ => (UnitRole::Hidden, Activation::LOGISTIC),
            };
            let layer: Vec<UnitId> = (0..width).map(|_| s.add_unit(role, act, 0.0)).collect();
            for &dst in &layer {
                for &src in &prev {
                    s.connect(src, dst, 0.0, Delay::Zero);
                }
            }
            prev = layer;
        }
        s
    }

    /// Draws every weight uniformly from `[-scale, scale]`. Input and output
    /// gate biases are drawn from `[-2, -1]`; forget-gate biases keep their
    /// configured value; all other biases are left untouched.
    pub fn randomize<R: Rng + ?Sized>(&mut self, rng: &mut R, scale: f64) {
        for c in &mut self.connections {
            c.weight = rng.random_range(-scale..=scale);
        }
        for u in &mut self.units {
            if matches!(u.role, UnitRole::InputGate(_) | UnitRole::OutputGate(_)) {
                u.bias = rng.random_range(-2.0..=-1.0);
            }
        }
    }
}
