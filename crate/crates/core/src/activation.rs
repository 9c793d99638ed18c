//! Scalar squashing functions and their derivatives.
//!
//! All functions work in `f64` and saturate naturally; nothing is clamped, so
//! derivative magnitudes at extreme arguments are the true ones.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A squashing function attached to a unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    /// `1 / (1 + exp(-slope * x))`, range (0, 1).
    Logistic {
        slope: f64,
    },
    /// Cell input squashing `4 σ(x) - 2`, range (-2, 2).
    CellInput,
    /// Cell output squashing `2 σ(x) - 1`, range (-1, 1).
    CellOutput,
    Identity,
    Tanh,
}

impl Default for Activation {
    fn default() -> Self {
        Activation::LOGISTIC
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl Activation {
    pub const LOGISTIC: Activation = Activation::Logistic { slope: 1.0 };

    /// Checked evaluation; rejects non-finite arguments.
    pub fn eval(self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain(x));
        }
        Ok(self.apply(x))
    }

    /// Checked derivative; rejects non-finite arguments.
    pub fn deriv(self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain(x));
        }
        Ok(self.derivative(x))
    }

    /// Unchecked evaluation used on the hot paths.
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Logistic { slope } => sigmoid(slope * x),
            Activation::CellInput => 4.0 * sigmoid(x) - 2.0,
            Activation::CellOutput => 2.0 * sigmoid(x) - 1.0,
            Activation::Identity => x,
            Activation::Tanh => x.tanh(),
        }
    }

    /// Unchecked derivative `d/dx apply(x)`.
    #[inline]
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Logistic { slope } => {
                let y = sigmoid(slope * x);
                slope * y * (1.0 - y)
            }
            Activation::CellInput => {
                let y = sigmoid(x);
                4.0 * y * (1.0 - y)
            }
            Activation::CellOutput => {
                let y = sigmoid(x);
                2.0 * y * (1.0 - y)
            }
            Activation::Identity => 1.0,
            Activation::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
        }
    }

    /// Open interval the output lies in.
    pub fn range(self) -> (f64, f64) {
        match self {
            Activation::Logistic { .. } => (0.0, 1.0),
            Activation::CellInput => (-2.0, 2.0),
            Activation::CellOutput | Activation::Tanh => (-1.0, 1.0),
            Activation::Identity => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activation::Logistic { slope } => write!(f, "logistic({slope})"),
            Activation::CellInput => f.write_str("cell_input"),
            Activation::CellOutput => f.write_str("cell_output"),
            Activation::Identity => f.write_str("identity"),
            Activation::Tanh => f.write_str("tanh"),
        }
    }
}

impl FromStr for Activation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "logistic" => Ok(Activation::LOGISTIC),
            "cell_input" => Ok(Activation::CellInput),
            "cell_output" => Ok(Activation::CellOutput),
            "identity" => Ok(Activation::Identity),
            "tanh" => Ok(Activation::Tanh),
            _ => {
                let slope = s
                    .strip_prefix("logistic(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| format!("unknown activation `{s}`"))?;
                let slope: f64 = slope
                    .parse()
                    .map_err(|_| format!("bad logistic slope in `{s}`"))?;
                if !(slope > 0.0) {
                    return Err(format!("logistic slope must be positive, got {slope}"));
                }
                Ok(Activation::Logistic { slope })
            }
        }
    }
}
