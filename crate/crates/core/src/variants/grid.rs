//! Grid, multidimensional and stacked LSTM blocks over dense vectors.

use rand::Rng;

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::lstm::{update_cell_state, CELL_OUTPUT};

/// `x ↦ act(W x + b)` with a row-major `rows × cols` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub rows: usize,
    pub cols: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl Affine {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Affine {
            rows,
            cols,
            w: vec![0.0; rows * cols],
            b: vec![0.0; rows],
        }
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R, scale: f64) -> Self {
        let mut a = Self::zeros(rows, cols);
        for w in a.w.iter_mut().chain(a.b.iter_mut()) {
            *w = rng.random_range(-scale..=scale);
        }
        a
    }

    pub fn apply(&self, x: &[f64], act: Activation) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension {
                what: "affine input",
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                let mut s = 0.0;
                for (w, v) in self.w[r * self.cols..(r + 1) * self.cols].iter().zip(x) {
                    s += w * v;
                }
                act.apply(s + self.b[r])
            })
            .collect())
    }
}

/// Gate and cell-input maps of one LSTM transform.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformWeights {
    pub input: Affine,
    pub forget: Affine,
    pub output: Affine,
    pub cell: Affine,
}

impl TransformWeights {
    pub fn zeros(size: usize, input_len: usize) -> Self {
        TransformWeights {
            input: Affine::zeros(size, input_len),
            forget: Affine::zeros(size, input_len),
            output: Affine::zeros(size, input_len),
            cell: Affine::zeros(size, input_len),
        }
    }

    pub fn random<R: Rng + ?Sized>(size: usize, input_len: usize, rng: &mut R, scale: f64) -> Self {
        TransformWeights {
            input: Affine::random(size, input_len, rng, scale),
            forget: Affine::random(size, input_len, rng, scale),
            output: Affine::random(size, input_len, rng, scale),
            cell: Affine::random(size, input_len, rng, scale),
        }
    }

    pub fn size(&self) -> usize {
        self.cell.rows
    }

    pub fn input_len(&self) -> usize {
        self.cell.cols
    }
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension {
            what,
            expected,
            got,
        })
    }
}

/// One LSTM step on the concatenated input `h_cat` with memory `m`:
/// `m' = f ⊙ m + i ⊙ g(W_z H)`, `h' = o ⊙ h(m')`.
pub fn lstm_transform(
    w: &TransformWeights,
    h_cat: &[f64],
    m: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len("memory", w.size(), m.len())?;
    let sig = Activation::LOGISTIC;
    let i = w.input.apply(h_cat, sig)?;
    let f = w.forget.apply(h_cat, sig)?;
    let o = w.output.apply(h_cat, sig)?;
    let z = w.cell.apply(h_cat, Activation::CellInput)?;
    let m_next: Vec<f64> = (0..m.len())
        .map(|k| update_cell_state(m[k], f[k], i[k], z[k]))
        .collect();
    let h_next = m_next
        .iter()
        .zip(&o)
        .map(|(s, o)| o * CELL_OUTPUT.apply(*s))
        .collect();
    Ok((h_next, m_next))
}

/// `m = Σ_k f_k ⊙ m_k + i ⊙ z`.
pub fn multidim_memory(f: &[Vec<f64>], m: &[Vec<f64>], i: &[f64], z: &[f64]) -> Result<Vec<f64>> {
    check_len("memory count", f.len(), m.len())?;
    if f.is_empty() {
        return Err(Error::Empty("memory vectors"));
    }
    let n = i.len();
    check_len("cell input", n, z.len())?;
    for (fk, mk) in f.iter().zip(m) {
        check_len("forget vector", n, fk.len())?;
        check_len("memory vector", n, mk.len())?;
    }
    Ok((0..n)
        .map(|e| {
            let mut acc = m[0][e] * f[0][e];
            for (fk, mk) in f.iter().zip(m).skip(1) {
                acc += mk[e] * fk[e];
            }
            acc + i[e] * z[e]
        })
        .collect())
}

/// Weights of a multidimensional block: one forget gate per incoming memory.
#[derive(Debug, Clone, PartialEq)]
pub struct MultidimWeights {
    pub input: Affine,
    pub output: Affine,
    pub cell: Affine,
    pub forget: Vec<Affine>,
}

impl MultidimWeights {
    pub fn random<R: Rng + ?Sized>(
        size: usize,
        input_len: usize,
        dims: usize,
        rng: &mut R,
        scale: f64,
    ) -> Self {
        MultidimWeights {
            input: Affine::random(size, input_len, rng, scale),
            output: Affine::random(size, input_len, rng, scale),
            cell: Affine::random(size, input_len, rng, scale),
            forget: (0..dims)
                .map(|_| Affine::random(size, input_len, rng, scale))
                .collect(),
        }
    }
}

/// Merges `N` memories into one and emits a single hidden vector through
/// the usual output gate.
pub fn multidim_step(
    w: &MultidimWeights,
    h_cat: &[f64],
    m: &[Vec<f64>],
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len("memory count", w.forget.len(), m.len())?;
    let sig = Activation::LOGISTIC;
    let i = w.input.apply(h_cat, sig)?;
    let o = w.output.apply(h_cat, sig)?;
    let z = w.cell.apply(h_cat, Activation::CellInput)?;
    let f = w
        .forget
        .iter()
        .map(|a| a.apply(h_cat, sig))
        .collect::<Result<Vec<_>>>()?;
    let merged = multidim_memory(&f, m, &i, &z)?;
    let h = merged
        .iter()
        .zip(&o)
        .map(|(s, o)| o * CELL_OUTPUT.apply(*s))
        .collect();
    Ok((h, merged))
}

/// Grid block: every dimension's transform reads the concatenation of all
/// hidden vectors and updates its own memory.
pub fn grid_block(
    h_parts: &[Vec<f64>],
    m_parts: &[Vec<f64>],
    weights: &[TransformWeights],
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    check_len("memory parts", h_parts.len(), m_parts.len())?;
    check_len("weight sets", h_parts.len(), weights.len())?;
    let h_cat: Vec<f64> = h_parts.concat();
    let mut hs = Vec::with_capacity(weights.len());
    let mut ms = Vec::with_capacity(weights.len());
    for ((w, h), m) in weights.iter().zip(h_parts).zip(m_parts) {
        check_len("hidden part", w.size(), h.len())?;
        let (h2, m2) = lstm_transform(w, &h_cat, m)?;
        hs.push(h2);
        ms.push(m2);
    }
    Ok((hs, ms))
}

/// One time step of a stack of LSTM layers: layer `l` reads the new hidden
/// vector of layer `l - 1` (or the input) next to its own previous one.
/// Returns the new hidden and memory vectors of every layer.
pub fn stacked_step(
    layers: &[TransformWeights],
    x: &[f64],
    h_prev: &[Vec<f64>],
    m_prev: &[Vec<f64>],
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    check_len("hidden layers", layers.len(), h_prev.len())?;
    check_len("memory layers", layers.len(), m_prev.len())?;
    let mut below = x.to_vec();
    let mut hs = Vec::with_capacity(layers.len());
    let mut ms = Vec::with_capacity(layers.len());
    for ((w, h), m) in layers.iter().zip(h_prev).zip(m_prev) {
        let h_cat = [below.as_slice(), h.as_slice()].concat();
        let (h2, m2) = lstm_transform(w, &h_cat, m)?;
        below.clone_from(&h2);
        hs.push(h2);
        ms.push(m2);
    }
    Ok((hs, ms))
}
