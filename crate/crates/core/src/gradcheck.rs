//! Central finite-difference gradients and comparison against analytic ones.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 1e-5;

/// `(L(w + εe_i) - L(w - εe_i)) / 2ε` for every coordinate `i`.
pub fn fd_gradient<F>(mut loss: F, weights: &[f64], epsilon: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> f64,
{
    check_epsilon(epsilon)?;
    let mut w = weights.to_vec();
    let mut grad = Vec::with_capacity(w.len());
    for i in 0..w.len() {
        let orig = w[i];
        w[i] = orig + epsilon;
        let up = loss(&w);
        w[i] = orig - epsilon;
        let down = loss(&w);
        w[i] = orig;
        grad.push(central(up, down, epsilon, i)?);
    }
    Ok(grad)
}

/// [`fd_gradient`] with coordinates perturbed in parallel.
pub fn fd_gradient_par<F>(loss: F, weights: &[f64], epsilon: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    check_epsilon(epsilon)?;
    (0..weights.len())
        .into_par_iter()
        .map(|i| {
            let mut w = weights.to_vec();
            w[i] = weights[i] + epsilon;
            let up = loss(&w);
            w[i] = weights[i] - epsilon;
            let down = loss(&w);
            central(up, down, epsilon, i)
        })
        .collect()
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "epsilon must be positive, got {epsilon}"
        )))
    }
}

fn central(up: f64, down: f64, epsilon: f64, i: usize) -> Result<f64> {
    if !up.is_finite() || !down.is_finite() {
        return Err(Error::NonFiniteLoss(i));
    }
    Ok((up - down) / (2.0 * epsilon))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradEntry {
    pub analytic: f64,
    pub numeric: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradReport {
    pub entries: Vec<GradEntry>,
    pub max_rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Relative error with the denominator floored at `1e-12`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / 1e-12_f64.max(numeric.abs()).max(analytic.abs())
}

pub fn compare(analytic: &[f64], numeric: &[f64], tol_rel: f64) -> Result<GradReport> {
    if analytic.len() != numeric.len() {
        return Err(Error::Dimension {
            what: "numeric gradient",
            expected: analytic.len(),
            got: numeric.len(),
        });
    }
    let entries: Vec<GradEntry> = analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &n)| GradEntry {
            analytic: a,
            numeric: n,
            abs_err: (a - n).abs(),
            rel_err: relative_error(a, n),
        })
        .collect();
    let max_rel_err = entries.iter().map(|e| e.rel_err).fold(0.0, f64::max);
    Ok(GradReport {
        entries,
        max_rel_err,
        tolerance: tol_rel,
        pass: max_rel_err <= tol_rel,
    })
}

impl GradReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("weight,analytic,numeric,rel_err\n");
        for (i, e) in self.entries.iter().enumerate() {
            writeln!(out, "{i},{},{},{}", e.analytic, e.numeric, e.rel_err).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_is_exact() {
        let g = fd_gradient(|w| w[0] * w[0], &[3.0], DEFAULT_EPSILON).unwrap();
        assert!((g[0] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn constant_gives_zero() {
        let g = fd_gradient(|_| 4.2, &[1.0, -2.0, 3.0], DEFAULT_EPSILON).unwrap();
        assert_eq!(g, vec![0.0; 3]);
    }

    #[test]
    fn cubic_error_shrinks_quadratically() {
        // d/dw w³ = 3w²; central FD error is exactly ε².
        let w = 1.7;
        for eps in [1e-2, 1e-3] {
            let g = fd_gradient(|v| v[0].powi(3), &[w], eps).unwrap();
            let err = (g[0] - 3.0 * w * w).abs();
            assert!(err <= 1.01 * eps * eps, "eps {eps}: {err}");
        }
    }

    #[test]
    fn parallel_matches_serial() {
        let loss = |w: &[f64]| {
            w.iter()
                .enumerate()
                .map(|(i, x)| (i as f64 + 1.0) * x.sin())
                .sum::<f64>()
        };
        let w = [0.3, -1.1, 2.0, 0.0];
        assert_eq!(
            fd_gradient(loss, &w, 1e-5).unwrap(),
            fd_gradient_par(loss, &w, 1e-5).unwrap()
        );
    }

    #[test]
    fn non_finite_loss_reported() {
        let r = fd_gradient(
            |w| if w[1] > 1.0 { f64::NAN } else { 0.0 },
            &[0.0, 1.0],
            1e-5,
        );
        assert!(matches!(r, Err(Error::NonFiniteLoss(1))));
        assert!(fd_gradient(|_| 0.0, &[0.0], 0.0).is_err());
    }

    #[test]
    fn compare_examples() {
        let r = compare(&[1.0, -2.0], &[1.0, -2.0], 1e-9).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_rel_err, 0.0);
        assert!(compare(&[1.0], &[1.001], 1e-2).unwrap().pass);
        assert!(!compare(&[1.0], &[2.0], 1e-2).unwrap().pass);
        assert!(compare(&[1.0], &[], 1e-2).is_err());
    }

    #[test]
    fn rel_err_floor() {
        let r = compare(&[0.0], &[1e-20], 1.0).unwrap();
        assert_eq!(r.entries[0].rel_err, 1e-20 / 1e-12);
        assert!(compare(&[0.0], &[0.0], 0.0).unwrap().pass);
    }

    #[test]
    fn csv_layout() {
        let r = compare(&[0.5], &[0.25], 1.0).unwrap();
        assert_eq!(
            r.to_csv(),
            "weight,analytic,numeric,rel_err\n0,0.5,0.25,0.5\n"
        );
    }
}
