//! The DeGroot-Friedkin self-confidence map, trajectories, and the convex
//! homotopy between the map and the identity.
//!
//! The map is evaluated in product form,
//!
//! ```text
//! F_i(x) ∝ γ_i · Π_{k≠i} (1 − x_k),   normalized to Σ F_i = 1,
//! ```
//!
//! which equals `α(x) γ_i / (1 − x_i)` wherever that expression is defined and is
//! smooth through the corners, where it returns `F(e_i) = e_i` without a case split.

use crate::parallel::Execution;
use crate::simplex::{InfluenceWeights, SimplexPoint};

/// A map `ℝⁿ → ℝⁿ` with a pointwise evaluation off the simplex, as needed for
/// ambient finite differences.
pub trait AmbientMap {
    fn dim(&self) -> usize;
    fn eval_ambient(&self, x: &[f64]) -> Vec<f64>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct DfMap {
    weights: InfluenceWeights,
}

impl DfMap {
    pub fn new(weights: InfluenceWeights) -> Self {
        Self { weights }
    }

    pub fn weights(&self) -> &InfluenceWeights {
        &self.weights
    }

    pub fn gamma(&self) -> &[f64] {
        self.weights.as_slice()
    }

    pub fn dim(&self) -> usize {
        self.weights.dim()
    }

    pub fn evaluate(&self, x: &SimplexPoint) -> SimplexPoint {
        assert_eq!(x.dim(), self.dim(), "point and weights differ in dimension");
        SimplexPoint::from_nonnegative(product_form(self.gamma(), x.coords()))
    }

    pub fn evaluate_batch(&self, xs: &[SimplexPoint], exec: Execution) -> Vec<SimplexPoint> {
        exec.map(xs, |x| self.evaluate(x))
    }

    /// `‖F(x) − x‖∞`.
    pub fn residual(&self, x: &SimplexPoint) -> f64 {
        self.evaluate(x).sup_distance(x)
    }

    pub fn simulate(&self, x0: &SimplexPoint, steps: usize) -> Trajectory {
        let mut states = Vec::with_capacity(steps + 1);
        states.push(x0.clone());
        for k in 0..steps {
            let next = self.evaluate(&states[k]);
            states.push(next);
        }
        Trajectory {
            states,
            step_count: steps,
        }
    }

    /// `t·x + (1 − t)·F(x)`, not renormalized: convexity alone keeps it on the simplex.
    pub fn homotopy_point(&self, x: &SimplexPoint, t: f64) -> SimplexPoint {
        assert!((0.0..=1.0).contains(&t), "homotopy parameter {t} outside [0, 1]");
        let fx = self.evaluate(x);
        let coords = x
            .coords()
            .iter()
            .zip(fx.coords())
            .map(|(a, b)| t * a + (1.0 - t) * b)
            .collect();
        SimplexPoint::from_raw(coords)
    }
}

impl AmbientMap for DfMap {
    fn dim(&self) -> usize {
        self.weights.dim()
    }

    fn eval_ambient(&self, x: &[f64]) -> Vec<f64> {
        product_form(self.gamma(), x)
    }
}

/// The homotopy `H(·, t) = t·I + (1 − t)·F` as an ambient map; `t = 1` is the identity.
#[derive(Debug, Clone)]
pub struct Homotopy<'a> {
    pub map: &'a DfMap,
    pub t: f64,
}

impl AmbientMap for Homotopy<'_> {
    fn dim(&self) -> usize {
        self.map.dim()
    }

    fn eval_ambient(&self, x: &[f64]) -> Vec<f64> {
        let fx = self.map.eval_ambient(x);
        x.iter().zip(fx).map(|(a, b)| self.t * a + (1.0 - self.t) * b).collect()
    }
}

/// Normalized product form via prefix/suffix products; no division by `1 − x_i`.
pub(crate) fn product_form(gamma: &[f64], x: &[f64]) -> Vec<f64> {
    let n = gamma.len();
    debug_assert_eq!(x.len(), n);
    // suffix[i] = Π_{k≥i} (1 − x_k)
    let mut suffix = vec![1.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] * (1.0 - x[i]);
    }
    let mut numer = Vec::with_capacity(n);
    let mut prefix = 1.0;
    for i in 0..n {
        numer.push(gamma[i] * prefix * suffix[i + 1]);
        prefix *= 1.0 - x[i];
    }
    let sum: f64 = numer.iter().sum();
    if sum.abs() < f64::MIN_POSITIVE || !sum.is_finite() {
        return product_form_log(gamma, x);
    }
    numer.into_iter().map(|v| v / sum).collect()
}

/// Underflow fallback: numerators in log space, rescaled by their maximum.
fn product_form_log(gamma: &[f64], x: &[f64]) -> Vec<f64> {
    let logs: Vec<f64> = x.iter().map(|&xk| (1.0 - xk).abs().ln()).collect();
    let total: f64 = logs.iter().filter(|l| l.is_finite()).sum();
    let zeros = logs.iter().filter(|l| !l.is_finite()).count();
    let log_numer: Vec<f64> = (0..gamma.len())
        .map(|i| {
            let own_zero = !logs[i].is_finite();
            if zeros > usize::from(own_zero) {
                f64::NEG_INFINITY
            } else {
                let rest = if own_zero { total } else { total - logs[i] };
                gamma[i].ln() + rest
            }
        })
        .collect();
    let peak = log_numer.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = log_numer.iter().map(|l| (l - peak).exp()).collect();
    let sum: f64 = scaled.iter().sum();
    scaled.into_iter().map(|v| v / sum).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<SimplexPoint>,
    pub step_count: usize,
}

impl Trajectory {
    pub fn last(&self) -> &SimplexPoint {
        self.states.last().expect("trajectory holds at least x0")
    }
}
