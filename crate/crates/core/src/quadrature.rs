//! Gauss–Legendre rules on intervals and tensor rules on rectangles.

use num_complex::Complex64;

use crate::error::Error;

/// Largest rule size accepted by [`gauss_legendre`].
pub const MAX_NODES: usize = 64;

/// A quadrature rule on the reference interval `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely onto `(lo, hi)`.
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F>(&self, lo: f64, hi: f64, mut f: F) -> Complex64
    where
        F: FnMut(f64) -> Complex64,
    {
        self.mapped(lo, hi).map(|(x, w)| f(x) * w).sum()
    }

    /// Tensor-product rule on `(x_lo, x_hi) × (t_lo, t_hi)`.
    pub fn integrate_rectangle<F>(&self, x: (f64, f64), t: (f64, f64), mut f: F) -> Complex64
    where
        F: FnMut(f64, f64) -> Complex64,
    {
        let mut acc = Complex64::new(0.0, 0.0);
        for (tq, wt) in self.mapped(t.0, t.1) {
            for (xq, wx) in self.mapped(x.0, x.1) {
                acc += f(xq, tq) * (wx * wt);
            }
        }
        acc
    }
}

/// Legendre polynomial `P_n(x)` and its derivative by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let k = k as f64;
        let next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// The `n`-point Gauss–Legendre rule, nodes in ascending order.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule, Error> {
    if n == 0 || n > MAX_NODES {
        return Err(Error::QuadratureSize { requested: n, max: MAX_NODES });
    }
    if n == 1 {
        return Ok(QuadratureRule { nodes: vec![0.0], weights: vec![2.0] });
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
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
    Ok(QuadratureRule { nodes, weights })
}

/// Integrates `f` over `(lo, hi)` with the `n`-point Gauss–Legendre rule.
pub fn integrate_interval<F>(f: F, interval: (f64, f64), n: usize) -> Result<Complex64, Error>
where
    F: FnMut(f64) -> Complex64,
{
    Ok(gauss_legendre(n)?.integrate(interval.0, interval.1, f))
}
