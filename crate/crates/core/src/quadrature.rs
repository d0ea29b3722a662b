//! Gauss–Legendre rules and their rational map onto `[0, ∞)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `(-1, 1)`, nodes ascending.
///
/// Newton iteration on `P_n` from the Tricomi initial guesses; converges to
/// machine precision for any practical `n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the three-term recurrence.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Quadrature over imaginary frequency `ξ ∈ [0, ∞)` (eV).
///
/// Gauss–Legendre on `t ∈ (-1, 1)` mapped by `ξ = s (1 + t) / (1 − t)`,
/// `dξ/dt = 2s / (1 − t)²`, where `s` is the mapping scale.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    scale: f64,
}

impl FrequencyGrid {
    pub const DEFAULT_NODES: usize = 48;

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫₀^∞ f(ξ) dξ` as the weighted node sum, summed in node order.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn try_integrate<F: FnMut(f64) -> Result<f64>>(&self, mut f: F) -> Result<f64> {
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(x)?;
        }
        Ok(acc)
    }
}

pub fn make_frequency_grid(scale: f64, n_nodes: usize) -> Result<FrequencyGrid> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidConfiguration(format!(
            "frequency-grid scale must be positive, got {scale}"
        )));
    }
    if n_nodes < 4 {
        return Err(Error::InvalidConfiguration(format!(
            "frequency grid needs at least 4 nodes, got {n_nodes}"
        )));
    }
    let (t, w) = gauss_legendre(n_nodes);
    let nodes = t.iter().map(|&t| scale * (1.0 + t) / (1.0 - t)).collect();
    let weights = t
        .iter()
        .zip(&w)
        .map(|(&t, &w)| w * 2.0 * scale / ((1.0 - t) * (1.0 - t)))
        .collect();
    Ok(FrequencyGrid {
        nodes,
        weights,
        scale,
    })
}

/// Double-exponential (exp-sinh) rule for `∫₀^∞ f(x) dx`.
///
/// Substitutes `x = exp(π/2 · sinh t)` and applies the trapezoid rule with
/// step `h` on `|t| ≤ t_max`. Shares nothing with the Gauss–Legendre grids,
/// which makes it a useful second opinion for smooth integrands.
pub fn exp_sinh<F: FnMut(f64) -> f64>(mut f: F, h: f64, t_max: f64) -> f64 {
    let k_max = (t_max / h).floor() as i64;
    let mut acc = 0.0;
    for k in -k_max..=k_max {
        let t = k as f64 * h;
        let x = (0.5 * PI * t.sinh()).exp();
        if x == 0.0 || !x.is_finite() {
            continue;
        }
        let dx = 0.5 * PI * t.cosh() * x;
        acc += f(x) * dx;
    }
    acc * h
}
