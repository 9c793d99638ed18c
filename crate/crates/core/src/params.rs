//! Trainable values of a network, kept apart from its structure.

use crate::error::{Error, Result};
use crate::topology::NetworkSpec;

/// Connection weights (in connection order) and unit biases (in unit order).
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

/// Per-weight changes `Δw = -η ∂E/∂w` summed over an epoch, laid out like
/// [`Params`]. With `η = 1` this is the negative gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct Deltas {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Params {
    pub fn from_spec(spec: &NetworkSpec) -> Self {
        Params {
            weights: spec.connections.iter().map(|c| c.weight).collect(),
            biases: spec.units.iter().map(|u| u.bias).collect(),
        }
    }

    /// Writes the values back into a copy of `spec`.
    pub fn store_into(&self, spec: &NetworkSpec) -> NetworkSpec {
        let mut out = spec.clone();
        for (c, &w) in out.connections.iter_mut().zip(&self.weights) {
            c.weight = w;
        }
        for (u, &b) in out.units.iter_mut().zip(&self.biases) {
            u.bias = b;
        }
        out
    }

    pub fn len(&self) -> usize {
        self.weights.len() + self.biases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Weights followed by biases.
    pub fn to_flat(&self) -> Vec<f64> {
        self.weights.iter().chain(&self.biases).copied().collect()
    }

    pub fn set_flat(&mut self, flat: &[f64]) {
        let nw = self.weights.len();
        self.weights.copy_from_slice(&flat[..nw]);
        self.biases.copy_from_slice(&flat[nw..]);
    }

    /// Adds `d` to every weight and to the biases flagged in `train_bias`.
    pub fn apply(&mut self, d: &Deltas, train_bias: &[bool]) {
        for (w, dw) in self.weights.iter_mut().zip(&d.weights) {
            *w += dw;
        }
        for ((b, db), &on) in self.biases.iter_mut().zip(&d.biases).zip(train_bias) {
            if on {
                *b += db;
            }
        }
    }

    pub fn ensure_finite(&self, context: &str) -> Result<()> {
        if self
            .weights
            .iter()
            .chain(&self.biases)
            .all(|v| v.is_finite())
        {
            Ok(())
        } else {
            Err(Error::Divergence(context.to_string()))
        }
    }

    pub(crate) fn check_shape(&self, connections: usize, units: usize) -> Result<()> {
        if self.weights.len() != connections {
            return Err(Error::Dimension {
                what: "weights",
                expected: connections,
                got: self.weights.len(),
            });
        }
        if self.biases.len() != units {
            return Err(Error::Dimension {
                what: "biases",
                expected: units,
                got: self.biases.len(),
            });
        }
        Ok(())
    }
}

impl Deltas {
    pub fn zeros(connections: usize, units: usize) -> Self {
        Deltas {
            weights: vec![0.0; connections],
            biases: vec![0.0; units],
        }
    }

    pub fn zeros_like(p: &Params) -> Self {
        Self::zeros(p.weights.len(), p.biases.len())
    }

    pub fn add(&mut self, other: &Deltas) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            *a += b;
        }
        for (a, b) in self.biases.iter_mut().zip(&other.biases) {
            *a += b;
        }
    }

    pub fn scale(&mut self, k: f64) {
        for v in self.weights.iter_mut().chain(self.biases.iter_mut()) {
            *v *= k;
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.weights.iter().chain(&self.biases).copied().collect()
    }

    pub fn max_abs_diff(&self, other: &Deltas) -> f64 {
        self.to_flat()
            .iter()
            .zip(other.to_flat())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().chain(&self.biases).all(|&v| v == 0.0)
    }
}
