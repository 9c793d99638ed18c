//! How an error signal injected at one unit scales on its way back in time.

use std::fmt;
use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::params::Params;
use crate::rnn::{EpochTrace, RecurrentNet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Vanishing,
    Exploding,
    Marginal,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Vanishing => "vanishing",
            Regime::Exploding => "exploding",
            Regime::Marginal => "marginal",
        })
    }
}

/// Exploding iff every factor exceeds 1, vanishing iff every factor is below 1.
pub fn classify_regime(factors: &[f64]) -> Result<Regime> {
    if factors.is_empty() {
        return Err(Error::Empty("per-step factors"));
    }
    Ok(if factors.iter().all(|f| f.abs() > 1.0) {
        Regime::Exploding
    } else if factors.iter().all(|f| f.abs() < 1.0) {
        Regime::Vanishing
    } else {
        Regime::Marginal
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowReport {
    /// `∂ϑ_v(t0) / ∂ϑ_o(t_final)`.
    pub factor: f64,
    /// `|f'_l(net_l) w_lk|` per step along the path with the largest product,
    /// ordered from `t_final` backwards.
    pub chain: Vec<f64>,
    /// Units on that path, from `o` at `t_final` to `v` at `t0`.
    pub chain_units: Vec<usize>,
    /// Spectral norm of each step's Jacobian over the non-input units.
    pub jacobian_norms: Vec<f64>,
    /// Classification of `chain`.
    pub regime: Regime,
    /// Classification of `jacobian_norms`.
    pub norm_regime: Regime,
    /// `curve[k]` is the factor from `o` at `t_final` to `v` at `t_final - k`.
    pub curve: Vec<f64>,
}

impl FlowReport {
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("step,factor\n");
        for (k, f) in self.curve.iter().enumerate() {
            writeln!(out, "{k},{f}").unwrap();
        }
        out
    }
}

struct Local {
    /// Non-input units in index order.
    units: Vec<usize>,
    /// `w[l][u]` over all units, zero where no delayed connection exists.
    w: Vec<Vec<f64>>,
}

fn local_weights(net: &RecurrentNet, params: &Params) -> Local {
    let n = net.units();
    let inputs = net.input_units();
    let units: Vec<usize> = (0..n).filter(|u| !inputs.contains(u)).collect();
    let mut w = vec![vec![0.0; n]; n];
    for (k, (src, dst, delayed)) in net.connection_table().enumerate() {
        if delayed {
            w[dst][src] += params.weights[k];
        }
    }
    Local { units, w }
}

/// Scaling of the error signal from output unit `o` at `t_final` back to
/// unit `v` at `t0`, on the frozen `trace`.
pub fn error_flow_factor(
    net: &RecurrentNet,
    params: &Params,
    trace: &EpochTrace,
    o: usize,
    v: usize,
    t0: usize,
    t_final: usize,
) -> Result<FlowReport> {
    if t0 < 1 || t0 >= t_final || t_final > trace.len() {
        return Err(Error::Span {
            t0,
            t_final,
            len: trace.len(),
        });
    }
    let n = net.units();
    if trace.initial.len() != n || trace.steps.iter().any(|s| s.net.len() != n) {
        return Err(Error::TraceMismatch(format!(
            "trace rows do not cover {n} units"
        )));
    }
    let inputs = net.input_units();
    for (what, u) in [("source unit", o), ("sink unit", v)] {
        if u >= n || inputs.contains(&u) {
            return Err(Error::Config(format!("{what} {u} is not a non-input unit")));
        }
    }
    let Local { units, w } = local_weights(net, params);
    let act = net.activations();
    let fprime = |u: usize, tau: usize| act[u].derivative(trace.steps[tau - 1].net[u]);

    let mut a = vec![0.0; n];
    a[o] = 1.0;
    let mut best = vec![f64::NEG_INFINITY; n];
    best[o] = 1.0;
    let mut back_ptr: Vec<Vec<usize>> = Vec::new();
    let mut curve = vec![a[v]];
    let mut jacobian_norms = Vec::new();
    for tau in (t0..t_final).rev() {
        let mut next_a = vec![0.0; n];
        let mut next_best = vec![f64::NEG_INFINITY; n];
        let mut ptr = vec![0; n];
        for &u in &units {
            let d = fprime(u, tau);
            let mut s = 0.0;
            for &l in &units {
                s += w[l][u] * a[l];
                if best[l] >= 0.0 {
                    let cand = best[l] * (d * w[l][u]).abs();
                    if cand > next_best[u] {
                        next_best[u] = cand;
                        ptr[u] = l;
                    }
                }
            }
            next_a[u] = d * s;
        }
        let m = units.len();
        let jac = DMatrix::from_fn(m, m, |i, j| fprime(units[j], tau) * w[units[i]][units[j]]);
        jacobian_norms.push(jac.singular_values().max());
        a = next_a;
        best = next_best;
        back_ptr.push(ptr);
        curve.push(a[v]);
    }

    let mut chain_units = vec![v];
    let mut u = v;
    for ptr in back_ptr.iter().rev() {
        u = ptr[u];
        chain_units.push(u);
    }
    chain_units.reverse();
    let chain: Vec<f64> = chain_units
        .windows(2)
        .enumerate()
        .map(|(m, pair)| {
            let tau = t_final - 1 - m;
            (fprime(pair[1], tau) * w[pair[0]][pair[1]]).abs()
        })
        .collect();

    Ok(FlowReport {
        factor: a[v],
        regime: classify_regime(&chain)?,
        norm_regime: classify_regime(&jacobian_norms)?,
        chain,
        chain_units,
        jacobian_norms,
        curve,
    })
}

/// `Σ_o ∂ϑ_v(t0)/∂ϑ_o(t_final)` over all output units.
pub fn summed_factor(
    net: &RecurrentNet,
    params: &Params,
    trace: &EpochTrace,
    v: usize,
    t0: usize,
    t_final: usize,
) -> Result<f64> {
    let mut total = 0.0;
    for &o in net.output_units() {
        total += error_flow_factor(net, params, trace, o, v, t0, t_final)?.factor;
    }
    Ok(total)
}
