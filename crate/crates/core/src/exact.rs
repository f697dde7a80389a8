//! Closed-form solutions of `i ∂_t ψ + ½ Δ ψ = 0` with exact derivatives.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::field::{Partial, PiecewiseField};
use crate::poly::{DerivativeOracle, MultiIndex};

/// Number of odd modes kept when the series is used for error measurement.
pub const DEFAULT_SERIES_MODES: usize = 250;

/// `ψ(x, t) = exp(κ·x + i|κ|² t / 2)`, any space dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSolution {
    pub kappa: Vec<f64>,
}

impl ExpSolution {
    /// The one-dimensional solution `exp(κx + iκ²t/2)`.
    pub fn new(kappa: f64) -> Self {
        Self { kappa: vec![kappa] }
    }

    pub fn with_wavevector(kappa: Vec<f64>) -> Self {
        Self { kappa }
    }

    fn omega(&self) -> Complex64 {
        Complex64::new(0.0, 0.5 * self.kappa.iter().map(|k| k * k).sum::<f64>())
    }

    pub fn value(&self, x: &[f64], t: f64) -> Complex64 {
        let phase: f64 = self.kappa.iter().zip(x).map(|(k, x)| k * x).sum();
        (self.omega() * t + phase).exp()
    }
}

/// `D^j ψ = κ^{j_x} (i|κ|²/2)^{j_t} ψ`.
pub fn exp_derivative(sol: &ExpSolution, j: &MultiIndex, x: &[f64], t: f64) -> Complex64 {
    let space: f64 = sol.kappa.iter().zip(&j.space).map(|(k, &n)| k.powi(n as i32)).product();
    sol.value(x, t) * space * sol.omega().powu(j.time)
}

impl DerivativeOracle for ExpSolution {
    fn dim(&self) -> usize {
        self.kappa.len()
    }

    fn derivative(&self, j: &MultiIndex, x: &[f64], t: f64) -> Complex64 {
        exp_derivative(self, j, x, t)
    }
}

impl PiecewiseField for ExpSolution {
    fn eval(&self, _: usize, x: f64, t: f64, which: Partial) -> Complex64 {
        exp_derivative(self, &which.multi_index(), &[x], t)
    }
}

/// Particle in the unit box released from `ψ₀(x) = √30 x(1 − x)`:
///
/// ```text
/// ψ(x, t) = √30 (2/π)³ Σ_{m ≥ 0} (2m+1)⁻³ sin((2m+1)πx) exp(−i(2m+1)²π²t/2)
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareWellSeries {
    pub n_trunc: usize,
}

impl Default for SquareWellSeries {
    fn default() -> Self {
        Self { n_trunc: DEFAULT_SERIES_MODES }
    }
}

impl SquareWellSeries {
    pub fn amplitude() -> f64 {
        30f64.sqrt() * (2.0 / PI).powi(3)
    }

    /// The initial datum the series expands.
    pub fn initial_datum(x: f64) -> Complex64 {
        Complex64::new(30f64.sqrt() * x * (1.0 - x), 0.0)
    }
}

/// Truncated series and its partials, summed term by term.
pub fn series_eval(sol: &SquareWellSeries, x: f64, t: f64, which: Partial) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..sol.n_trunc {
        let k = (2 * m + 1) as f64 * PI;
        let n3 = ((2 * m + 1) as f64).powi(3);
        let time = Complex64::new(0.0, -0.5 * k * k * t).exp();
        let term = match which {
            Partial::Value => Complex64::from((k * x).sin()) * time,
            Partial::Dx => Complex64::from(k * (k * x).cos()) * time,
            Partial::Dt => Complex64::new(0.0, -0.5 * k * k) * (k * x).sin() * time,
            Partial::Dxx => Complex64::from(-k * k * (k * x).sin()) * time,
        };
        acc += term / n3;
    }
    acc * SquareWellSeries::amplitude()
}

impl PiecewiseField for SquareWellSeries {
    fn eval(&self, _: usize, x: f64, t: f64, which: Partial) -> Complex64 {
        series_eval(self, x, t, which)
    }
}
