//! A dense layer of gated recurrent units read out by logistic output units.

use rand::Rng;

use crate::activation::Activation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GruShape {
    pub inputs: usize,
    pub units: usize,
    pub outputs: usize,
}

/// Row-major weight matrices: `w_*` are `units × inputs`, `u_*` are
/// `units × units`, `v` is `outputs × units`.
#[derive(Debug, Clone, PartialEq)]
pub struct GruParams {
    pub shape: GruShape,
    pub w_r: Vec<f64>,
    pub u_r: Vec<f64>,
    pub b_r: Vec<f64>,
    pub w_z: Vec<f64>,
    pub u_z: Vec<f64>,
    pub b_z: Vec<f64>,
    pub w_h: Vec<f64>,
    pub u_h: Vec<f64>,
    pub b_h: Vec<f64>,
    pub v: Vec<f64>,
    pub c: Vec<f64>,
}

impl GruParams {
    pub fn zeros(shape: GruShape) -> Self {
        let GruShape {
            inputs: i,
            units: n,
            outputs: o,
        } = shape;
        GruParams {
            shape,
            w_r: vec![0.0; n * i],
            u_r: vec![0.0; n * n],
            b_r: vec![0.0; n],
            w_z: vec![0.0; n * i],
            u_z: vec![0.0; n * n],
            b_z: vec![0.0; n],
            w_h: vec![0.0; n * i],
            u_h: vec![0.0; n * n],
            b_h: vec![0.0; n],
            v: vec![0.0; o * n],
            c: vec![0.0; o],
        }
    }

    /// Weights uniform in `[-scale, scale]`, biases zero.
    pub fn random<R: Rng + ?Sized>(shape: GruShape, rng: &mut R, scale: f64) -> Self {
        let mut p = Self::zeros(shape);
        for m in [
            &mut p.w_r, &mut p.u_r, &mut p.w_z, &mut p.u_z, &mut p.w_h, &mut p.u_h, &mut p.v,
        ] {
            for w in m.iter_mut() {
                *w = rng.random_range(-scale..=scale);
            }
        }
        p
    }

    fn fields(&self) -> [&Vec<f64>; 11] {
        [
            &self.w_r, &self.u_r, &self.b_r, &self.w_z, &self.u_z, &self.b_z, &self.w_h, &self.u_h,
            &self.b_h, &self.v, &self.c,
        ]
    }

    fn fields_mut(&mut self) -> [&mut Vec<f64>; 11] {
        [
            &mut self.w_r,
            &mut self.u_r,
            &mut self.b_r,
            &mut self.w_z,
            &mut self.u_z,
            &mut self.b_z,
            &mut self.w_h,
            &mut self.u_h,
            &mut self.b_h,
            &mut self.v,
            &mut self.c,
        ]
    }

    /// Weight table: a shape line, then one line per matrix in
    /// [`Self::to_flat`] order with its values separated by spaces.
    pub fn to_text(&self) -> String {
        let GruShape {
            inputs,
            units,
            outputs,
        } = self.shape;
        let mut out =
            format!("# seqnet gru v1\nshape inputs={inputs} units={units} outputs={outputs}\n");
        let names = [
            "w_r", "u_r", "b_r", "w_z", "u_z", "b_z", "w_h", "u_h", "b_h", "v", "c",
        ];
        for (name, f) in names.iter().zip(self.fields()) {
            let vals: Vec<String> = f.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("{name} {}\n", vals.join(" ")));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.fields().iter().map(|f| f.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.fields()
            .iter()
            .flat_map(|f| f.iter().copied())
            .collect()
    }

    pub fn set_flat(&mut self, flat: &[f64]) {
        let mut rest = flat;
        for f in self.fields_mut() {
            let (head, tail) = rest.split_at(f.len());
            f.copy_from_slice(head);
            rest = tail;
        }
    }

    /// `self += k · other`.
    pub fn add_scaled(&mut self, other: &GruParams, k: f64) {
        for (a, b) in self.fields_mut().into_iter().zip(other.fields()) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += k * y;
            }
        }
    }

    pub fn ensure_finite(&self) -> Result<()> {
        if self
            .fields()
            .iter()
            .all(|f| f.iter().all(|v| v.is_finite()))
        {
            Ok(())
        } else {
            Err(Error::Divergence("gru training".into()))
        }
    }
}

/// One step of the layer.
#[derive(Debug, Clone, PartialEq)]
pub struct GruLayerState {
    pub h: Vec<f64>,
    pub r: Vec<f64>,
    pub z: Vec<f64>,
    pub candidate: Vec<f64>,
    /// `Σ_k u_jk h_k(t)`, the recurrent sum the reset gate scales.
    pub recurrent: Vec<f64>,
    pub output: Vec<f64>,
}

fn affine(w: &[f64], u: &[f64], b: &[f64], x: &[f64], h: &[f64], j: usize) -> f64 {
    let (ni, nh) = (x.len(), h.len());
    let mut s = 0.0;
    for (wi, xi) in w[j * ni..(j + 1) * ni].iter().zip(x) {
        s += wi * xi;
    }
    for (uk, hk) in u[j * nh..(j + 1) * nh].iter().zip(h) {
        s += uk * hk;
    }
    s + b[j]
}

fn dot(row: &[f64], v: &[f64]) -> f64 {
    row.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// `r = σ(W_r x + U_r h + b_r)`, `z = σ(W_z x + U_z h + b_z)`,
/// `ĥ = tanh(W_h x + r ⊙ (U_h h) + b_h)`, `h' = z ⊙ h + (1 - z) ⊙ ĥ`.
pub fn gru_step(p: &GruParams, prev_h: &[f64], x: &[f64]) -> Result<GruLayerState> {
    let GruShape {
        inputs,
        units,
        outputs,
    } = p.shape;
    if prev_h.len() != units {
        return Err(Error::Dimension {
            what: "previous hidden state",
            expected: units,
            got: prev_h.len(),
        });
    }
    if x.len() != inputs {
        return Err(Error::Dimension {
            what: "external input",
            expected: inputs,
            got: x.len(),
        });
    }
    let sig = Activation::LOGISTIC;
    let mut st = GruLayerState {
        h: vec![0.0; units],
        r: vec![0.0; units],
        z: vec![0.0; units],
        candidate: vec![0.0; units],
        recurrent: vec![0.0; units],
        output: vec![0.0; outputs],
    };
    for j in 0..units {
        st.r[j] = sig.apply(affine(&p.w_r, &p.u_r, &p.b_r, x, prev_h, j));
        st.z[j] = sig.apply(affine(&p.w_z, &p.u_z, &p.b_z, x, prev_h, j));
        st.recurrent[j] = dot(&p.u_h[j * units..(j + 1) * units], prev_h);
        let a = dot(&p.w_h[j * inputs..(j + 1) * inputs], x) + st.r[j] * st.recurrent[j] + p.b_h[j];
        st.candidate[j] = Activation::Tanh.apply(a);
        st.h[j] = st.z[j] * prev_h[j] + (1.0 - st.z[j]) * st.candidate[j];
    }
    for o in 0..outputs {
        st.output[o] = sig.apply(dot(&p.v[o * units..(o + 1) * units], &st.h) + p.c[o]);
    }
    Ok(st)
}

/// Sequence-level driver: forward runs, error and backpropagation through time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gru;

impl Gru {
    /// States `1..=T` from a zero initial hidden state.
    pub fn run(p: &GruParams, inputs: &[Vec<f64>]) -> Result<Vec<GruLayerState>> {
        let mut h = vec![0.0; p.shape.units];
        let mut out = Vec::with_capacity(inputs.len());
        for x in inputs {
            let st = gru_step(p, &h, x)?;
            h.clone_from(&st.h);
            out.push(st);
        }
        Ok(out)
    }

    pub fn sequence_error(states: &[GruLayerState], targets: &[Vec<Option<f64>>]) -> f64 {
        states
            .iter()
            .zip(targets)
            .map(|(st, row)| {
                st.output
                    .iter()
                    .zip(row)
                    .filter_map(|(y, d)| d.map(|d| 0.5 * (d - y).powi(2)))
                    .sum::<f64>()
            })
            .sum()
    }

    /// `Δθ = -η ∂E/∂θ` over one sequence, `E` summed over targeted steps.
    pub fn bptt(
        p: &GruParams,
        inputs: &[Vec<f64>],
        targets: &[Vec<Option<f64>>],
        learning_rate: f64,
    ) -> Result<GruParams> {
        if targets.len() != inputs.len() {
            return Err(Error::Dimension {
                what: "target sequence",
                expected: inputs.len(),
                got: targets.len(),
            });
        }
        let GruShape {
            inputs: ni,
            units: n,
            outputs: no,
        } = p.shape;
        if let Some(row) = targets.iter().find(|r| r.len() != no) {
            return Err(Error::Dimension {
                what: "target row",
                expected: no,
                got: row.len(),
            });
        }
        let states = Self::run(p, inputs)?;
        let mut g = GruParams::zeros(p.shape);
        let zero = vec![0.0; n];
        let mut carry = vec![0.0; n];
        for t in (0..states.len()).rev() {
            let st = &states[t];
            let prev = if t == 0 { &zero } else { &states[t - 1].h };
            let x = &inputs[t];
            let mut dh = carry.clone();
            for o in 0..no {
                if let Some(d) = targets[t][o] {
                    let y = st.output[o];
                    let delta = -(d - y) * y * (1.0 - y);
                    g.c[o] += delta;
                    for j in 0..n {
                        g.v[o * n + j] += delta * st.h[j];
                        dh[j] += p.v[o * n + j] * delta;
                    }
                }
            }
            let mut da_r = vec![0.0; n];
            let mut da_z = vec![0.0; n];
            let mut da_c = vec![0.0; n];
            let mut dq = vec![0.0; n];
            for j in 0..n {
                let (r, z, c) = (st.r[j], st.z[j], st.candidate[j]);
                da_z[j] = dh[j] * (prev[j] - c) * z * (1.0 - z);
                da_c[j] = dh[j] * (1.0 - z) * (1.0 - c * c);
                dq[j] = da_c[j] * r;
                da_r[j] = da_c[j] * st.recurrent[j] * r * (1.0 - r);
            }
            for j in 0..n {
                carry[j] = dh[j] * st.z[j];
            }
            for j in 0..n {
                for k in 0..n {
                    carry[k] += p.u_h[j * n + k] * dq[j]
                        + p.u_z[j * n + k] * da_z[j]
                        + p.u_r[j * n + k] * da_r[j];
                    g.u_h[j * n + k] += dq[j] * prev[k];
                    g.u_z[j * n + k] += da_z[j] * prev[k];
                    g.u_r[j * n + k] += da_r[j] * prev[k];
                }
                for i in 0..ni {
                    g.w_h[j * ni + i] += da_c[j] * x[i];
                    g.w_z[j * ni + i] += da_z[j] * x[i];
                    g.w_r[j * ni + i] += da_r[j] * x[i];
                }
                g.b_h[j] += da_c[j];
                g.b_z[j] += da_z[j];
                g.b_r[j] += da_r[j];
            }
        }
        let mut delta = GruParams::zeros(p.shape);
        delta.add_scaled(&g, -learning_rate);
        Ok(delta)
    }
}
