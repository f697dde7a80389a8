//! Complex polynomials in scaled, centred space–time monomials.
//!
//! A [`ScaledPolynomial`] in `d` space variables stores coefficients `C_j` of
//!
//! ```text
//! p(x, t) = Σ_j C_j ((x − z)/h_x)^{j_x} ((t − s)/h_t)^{j_t}
//! ```
//!
//! in a sparse map with lexicographic key order, so iteration (and hence
//! assembly and serialisation) is deterministic.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Space–time multi-index `j = (j_x, j_t)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex {
    pub space: Vec<u32>,
    pub time: u32,
}

impl MultiIndex {
    pub fn new(space: Vec<u32>, time: u32) -> Self {
        Self { space, time }
    }

    pub fn zero(dim: usize) -> Self {
        Self { space: vec![0; dim], time: 0 }
    }

    /// Shorthand for `d = 1`.
    pub fn xt(jx: u32, jt: u32) -> Self {
        Self { space: vec![jx], time: jt }
    }

    pub fn dim(&self) -> usize {
        self.space.len()
    }

    pub fn space_order(&self) -> u32 {
        self.space.iter().sum()
    }

    /// `|j| = |j_x| + j_t`.
    pub fn order(&self) -> u32 {
        self.space_order() + self.time
    }

    /// `j_x! j_t!`
    pub fn factorial(&self) -> f64 {
        self.space.iter().map(|&k| factorial(k)).product::<f64>() * factorial(self.time)
    }

    /// `j + 2 e_l` in the space part.
    pub fn plus_two_in(&self, l: usize) -> Self {
        let mut out = self.clone();
        out.space[l] += 2;
        out
    }

    pub fn with_time(&self, time: u32) -> Self {
        Self { space: self.space.clone(), time }
    }
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `n (n − 1) ⋯ (n − k + 1)`, zero when `k > n`.
fn falling_factorial(n: u32, k: u32) -> f64 {
    if k > n {
        0.0
    } else {
        (n - k + 1..=n).map(f64::from).product()
    }
}

/// All spatial exponents with `|j_x| ≤ max_degree`, graded by total degree and
/// lexicographically descending inside a degree (`1, x₁, x₂, x₁², x₁x₂, x₂², …`).
pub fn space_indices(dim: usize, max_degree: u32) -> Vec<Vec<u32>> {
    fn fill(dim: usize, remaining: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == dim {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=remaining).rev() {
            prefix.push(k);
            fill(dim, remaining - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for degree in 0..=max_degree {
        if dim == 0 {
            if degree == 0 {
                out.push(Vec::new());
            }
            continue;
        }
        fill(dim, degree, &mut Vec::with_capacity(dim), &mut out);
    }
    out
}

/// Gives `D^j φ(x, t)` for any multi-index `j`.
pub trait DerivativeOracle {
    fn dim(&self) -> usize;
    fn derivative(&self, j: &MultiIndex, x: &[f64], t: f64) -> Complex64;
}

/// Centre `(z, s)` and scales `(h_x, h_t)` of the local monomials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub center_x: Vec<f64>,
    pub center_t: f64,
    pub h_x: f64,
    pub h_t: f64,
}

impl Frame {
    pub fn new(center_x: Vec<f64>, center_t: f64, h_x: f64, h_t: f64) -> Self {
        assert!(h_x > 0.0 && h_t > 0.0, "monomial scales must be positive");
        Self { center_x, center_t, h_x, h_t }
    }

    /// Unit scales centred at the origin.
    pub fn unit(dim: usize) -> Self {
        Self::new(vec![0.0; dim], 0.0, 1.0, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.center_x.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaledPolynomial {
    frame: Frame,
    coeffs: BTreeMap<MultiIndex, Complex64>,
    degree_bound: u32,
}

impl ScaledPolynomial {
    pub fn zero(frame: Frame, degree_bound: u32) -> Self {
        Self { frame, coeffs: BTreeMap::new(), degree_bound }
    }

    pub fn constant(frame: Frame, value: Complex64) -> Self {
        let mut p = Self::zero(frame, 0);
        let dim = p.dim();
        p.set(MultiIndex::zero(dim), value);
        p
    }

    /// Builds a polynomial from `(index, coefficient)` pairs; the degree bound
    /// is the largest order present.
    pub fn from_terms<T>(frame: Frame, terms: T) -> Self
    where
        T: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        let coeffs: BTreeMap<_, _> = terms.into_iter().collect();
        let degree_bound = coeffs.keys().map(MultiIndex::order).max().unwrap_or(0);
        let p = Self { frame, coeffs, degree_bound };
        assert!(p.coeffs.keys().all(|j| j.dim() == p.dim()), "multi-index dimension mismatch");
        p
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, j: &MultiIndex) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or(ZERO)
    }

    /// Stores a coefficient. Panics if `j` violates the degree bound.
    pub fn set(&mut self, j: MultiIndex, value: Complex64) {
        assert!(j.order() <= self.degree_bound, "index {j:?} exceeds degree bound {}", self.degree_bound);
        assert_eq!(j.dim(), self.dim(), "multi-index dimension mismatch");
        self.coeffs.insert(j, value);
    }

    /// Same coefficients expressed around another centre with the same scales.
    pub fn recentered(&self, center_x: Vec<f64>, center_t: f64) -> Self {
        assert_eq!(center_x.len(), self.dim());
        Self {
            frame: Frame { center_x, center_t, ..self.frame.clone() },
            coeffs: self.coeffs.clone(),
            degree_bound: self.degree_bound,
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Highest order with a nonzero coefficient.
    pub fn degree(&self) -> u32 {
        self.coeffs.iter().filter(|(_, c)| **c != ZERO).map(|(j, _)| j.order()).max().unwrap_or(0)
    }

    /// `D^deriv p` at `(x, t)`, exact from the coefficients.
    pub fn eval(&self, x: &[f64], t: f64, deriv: &MultiIndex) -> Complex64 {
        let dim = self.dim();
        debug_assert_eq!(x.len(), dim);
        debug_assert_eq!(deriv.dim(), dim);
        let f = &self.frame;
        let deg = self.degree_bound as usize;
        // Powers of the local coordinates, one row per variable.
        let mut powers = vec![1.0; (dim + 1) * (deg + 1)];
        for v in 0..=dim {
            let u = if v < dim { (x[v] - f.center_x[v]) / f.h_x } else { (t - f.center_t) / f.h_t };
            let row = &mut powers[v * (deg + 1)..(v + 1) * (deg + 1)];
            for k in 1..=deg {
                row[k] = row[k - 1] * u;
            }
        }
        let pow = |v: usize, k: u32| powers[v * (deg + 1) + k as usize];
        let scale = f.h_x.powi(-(deriv.space_order() as i32)) * f.h_t.powi(-(deriv.time as i32));

        let mut acc = ZERO;
        'terms: for (j, c) in &self.coeffs {
            let mut w = 1.0;
            for l in 0..dim {
                let (n, k) = (j.space[l], deriv.space[l]);
                if k > n {
                    continue 'terms;
                }
                w *= falling_factorial(n, k) * pow(l, n - k);
            }
            if deriv.time > j.time {
                continue;
            }
            w *= falling_factorial(j.time, deriv.time) * pow(dim, j.time - deriv.time);
            acc += c * w;
        }
        acc * scale
    }

    /// Value at `(x, t)` for `d = 1`.
    pub fn value_1d(&self, x: f64, t: f64) -> Complex64 {
        self.eval(&[x], t, &MultiIndex::xt(0, 0))
    }

    /// Coefficients of `i ∂_t p + ½ Δ_x p` in the same frame.
    pub fn apply_schrodinger(&self) -> ScaledPolynomial {
        let f = &self.frame;
        let mut out: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        let inv_ht = 1.0 / f.h_t;
        let inv_hx2 = 1.0 / (f.h_x * f.h_x);
        for (j, &c) in &self.coeffs {
            if c == ZERO {
                continue;
            }
            // i ∂_t maps ξ^{jx} τ^{jt} to i jt/h_t ξ^{jx} τ^{jt−1}.
            if j.time > 0 {
                let target = j.with_time(j.time - 1);
                *out.entry(target).or_insert(ZERO) += I * c * (f64::from(j.time) * inv_ht);
            }
            // ½ ∂²_{x_l} maps ξ_l^{n} to ½ n(n−1)/h_x² ξ_l^{n−2}.
            for l in 0..self.dim() {
                let n = j.space[l];
                if n >= 2 {
                    let mut target = j.clone();
                    target.space[l] -= 2;
                    *out.entry(target).or_insert(ZERO) += c * (0.5 * f64::from(n * (n - 1)) * inv_hx2);
                }
            }
        }
        ScaledPolynomial {
            frame: f.clone(),
            coeffs: out,
            degree_bound: self.degree_bound.saturating_sub(1),
        }
    }

    /// Restriction to `t = s` (the frame's time centre), as the coefficients
    /// with `j_t = 0`.
    pub fn trace_at_center_time(&self) -> BTreeMap<Vec<u32>, Complex64> {
        self.coeffs.iter().filter(|(j, _)| j.time == 0).map(|(j, &c)| (j.space.clone(), c)).collect()
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        assert_eq!(self.frame, other.frame, "polynomials live in different frames");
        let mut coeffs = self.coeffs.clone();
        for (j, &c) in &other.coeffs {
            *coeffs.entry(j.clone()).or_insert(ZERO) += c * sign;
        }
        Self { frame: self.frame.clone(), coeffs, degree_bound: self.degree_bound.max(other.degree_bound) }
    }

    pub fn to_json(&self) -> PolynomialJson {
        PolynomialJson {
            center: (self.frame.center_x.clone(), self.frame.center_t),
            scales: (self.frame.h_x, self.frame.h_t),
            terms: self.coeffs.iter().map(|(j, c)| (j.space.clone(), j.time, c.re, c.im)).collect(),
        }
    }

    pub fn from_json(json: &PolynomialJson) -> Self {
        let frame = Frame::new(json.center.0.clone(), json.center.1, json.scales.0, json.scales.1);
        Self::from_terms(
            frame,
            json.terms.iter().map(|(jx, jt, re, im)| (MultiIndex::new(jx.clone(), *jt), Complex64::new(*re, *im))),
        )
    }
}

/// Wire form: `{center: [z, s], scales: [h_x, h_t], terms: [[j_x, j_t, re, im], …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub center: (Vec<f64>, f64),
    pub scales: (f64, f64),
    pub terms: Vec<(Vec<u32>, u32, f64, f64)>,
}

impl Serialize for ScaledPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ScaledPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        PolynomialJson::deserialize(d).map(|j| Self::from_json(&j))
    }
}

impl Add for &ScaledPolynomial {
    type Output = ScaledPolynomial;
    fn add(self, rhs: Self) -> ScaledPolynomial {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &ScaledPolynomial {
    type Output = ScaledPolynomial;
    fn sub(self, rhs: Self) -> ScaledPolynomial {
        self.combine(rhs, -1.0)
    }
}

impl Mul<Complex64> for &ScaledPolynomial {
    type Output = ScaledPolynomial;
    fn mul(self, rhs: Complex64) -> ScaledPolynomial {
        ScaledPolynomial {
            frame: self.frame.clone(),
            coeffs: self.coeffs.iter().map(|(j, &c)| (j.clone(), c * rhs)).collect(),
            degree_bound: self.degree_bound,
        }
    }
}

impl DerivativeOracle for ScaledPolynomial {
    fn dim(&self) -> usize {
        self.frame.dim()
    }

    fn derivative(&self, j: &MultiIndex, x: &[f64], t: f64) -> Complex64 {
        self.eval(x, t, j)
    }
}

/// Scaled coefficient `D^j φ(z, s) h_x^{|j_x|} h_t^{j_t} / (j_x! j_t!)`.
fn taylor_coefficient(oracle: &dyn DerivativeOracle, j: &MultiIndex, frame: &Frame) -> Complex64 {
    let d = oracle.derivative(j, &frame.center_x, frame.center_t);
    d * (frame.h_x.powi(j.space_order() as i32) * frame.h_t.powi(j.time as i32) / j.factorial())
}

/// Taylor polynomial of order `m` (degree `m − 1`) centred at the frame centre.
pub fn taylor_poly(oracle: &dyn DerivativeOracle, order: u32, frame: Frame) -> ScaledPolynomial {
    assert!(order >= 1, "Taylor order must be at least 1");
    assert_eq!(oracle.dim(), frame.dim());
    let degree = order - 1;
    let mut p = ScaledPolynomial::zero(frame, degree);
    for jx in space_indices(p.dim(), degree) {
        let sx: u32 = jx.iter().sum();
        for jt in 0..=degree - sx {
            let j = MultiIndex::new(jx.clone(), jt);
            let c = taylor_coefficient(oracle, &j, &p.frame);
            p.set(j, c);
        }
    }
    p
}

/// Extended Taylor polynomial of degree `2p`: the order-`p+1` Taylor
/// polynomial plus every term with `2 j_t + |j_x| ≤ 2p` and `|j| ≥ p + 1`.
pub fn extended_taylor_poly(oracle: &dyn DerivativeOracle, p: u32, frame: Frame) -> ScaledPolynomial {
    let mut out = taylor_poly(oracle, p + 1, frame);
    out.degree_bound = 2 * p;
    for jx in space_indices(out.dim(), 2 * p) {
        let sx: u32 = jx.iter().sum();
        for jt in 0..=(2 * p - sx) / 2 {
            if sx + jt >= p + 1 {
                let j = MultiIndex::new(jx.clone(), jt);
                let c = taylor_coefficient(oracle, &j, &out.frame);
                out.set(j, c);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `exp(κ·x + i|κ|² t / 2)` with closed-form derivatives, kept local so the
    /// polynomial tests do not depend on the solution module.
    struct Plane(Vec<f64>);

    impl DerivativeOracle for Plane {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn derivative(&self, j: &MultiIndex, x: &[f64], t: f64) -> Complex64 {
            let k2: f64 = self.0.iter().map(|k| k * k).sum();
            let omega = c(0.0, 0.5 * k2);
            let phase: f64 = self.0.iter().zip(x).map(|(k, x)| k * x).sum();
            let base = (omega * t + phase).exp();
            let sp: f64 = self.0.iter().zip(&j.space).map(|(k, &n)| k.powi(n as i32)).product();
            base * sp * omega.powu(j.time)
        }
    }

    fn x2_plus_it() -> ScaledPolynomial {
        ScaledPolynomial::from_terms(
            Frame::unit(1),
            [(MultiIndex::xt(2, 0), c(1.0, 0.0)), (MultiIndex::xt(0, 1), c(0.0, 1.0))],
        )
    }

    #[test]
    fn eval_examples() {
        let one = ScaledPolynomial::constant(Frame::unit(1), c(1.0, 0.0));
        assert_eq!(one.eval(&[0.7], -3.0, &MultiIndex::xt(0, 0)), c(1.0, 0.0));
        let p = x2_plus_it();
        assert_eq!(p.eval(&[2.0], 3.0, &MultiIndex::xt(0, 0)), c(4.0, 3.0));
        assert_eq!(p.eval(&[2.0], 3.0, &MultiIndex::xt(0, 1)), c(0.0, 1.0));
        assert_eq!(p.eval(&[-5.0], 1.0, &MultiIndex::xt(0, 1)), c(0.0, 1.0));
        assert_eq!(p.eval(&[1.0], 1.0, &MultiIndex::xt(1, 0)), c(2.0, 0.0));
        assert_eq!(p.eval(&[1.0], 1.0, &MultiIndex::xt(3, 0)), c(0.0, 0.0));
    }

    #[test]
    fn eval_uses_frame() {
        // ((x − 1)/2)² at x = 2 → 1/4; second derivative 2/4.
        let f = Frame::new(vec![1.0], 0.5, 2.0, 0.25);
        let p = ScaledPolynomial::from_terms(f, [(MultiIndex::xt(2, 1), c(1.0, 0.0))]);
        // value ((x−1)/2)² ((t−0.5)/0.25) at (2, 1) = 0.25 · 2
        assert_relative_eq!(p.eval(&[2.0], 1.0, &MultiIndex::xt(0, 0)).re, 0.5);
        assert_relative_eq!(p.eval(&[2.0], 1.0, &MultiIndex::xt(2, 0)).re, 2.0 / 4.0 * 2.0);
        assert_relative_eq!(p.eval(&[2.0], 1.0, &MultiIndex::xt(0, 1)).re, 0.25 * 4.0);
    }

    #[test]
    fn value_at_center_is_constant_coefficient() {
        let f = Frame::new(vec![0.3, -0.2], 0.7, 0.1, 0.05);
        let p = ScaledPolynomial::from_terms(
            f,
            [
                (MultiIndex::new(vec![0, 0], 0), c(0.123, -4.5)),
                (MultiIndex::new(vec![1, 2], 1), c(7.0, 1.0)),
                (MultiIndex::new(vec![0, 0], 3), c(-2.0, 0.5)),
            ],
        );
        assert_eq!(p.eval(&[0.3, -0.2], 0.7, &MultiIndex::zero(2)), c(0.123, -4.5));
    }

    #[test]
    fn schrodinger_kills_listed_trefftz_polynomials() {
        assert!(x2_plus_it().apply_schrodinger().max_abs_coeff() == 0.0);
        let quartic = ScaledPolynomial::from_terms(
            Frame::unit(1),
            [
                (MultiIndex::xt(4, 0), c(1.0, 0.0)),
                (MultiIndex::xt(2, 1), c(0.0, 6.0)),
                (MultiIndex::xt(0, 2), c(-3.0, 0.0)),
            ],
        );
        assert!(quartic.apply_schrodinger().max_abs_coeff() == 0.0);
        let t = ScaledPolynomial::from_terms(Frame::unit(1), [(MultiIndex::xt(0, 1), c(1.0, 0.0))]);
        let st = t.apply_schrodinger();
        assert_eq!(st.coeffs().len(), 1);
        assert_eq!(st.coeff(&MultiIndex::xt(0, 0)), c(0.0, 1.0));
    }

    #[test]
    fn schrodinger_matches_pointwise_derivatives() {
        let f = Frame::new(vec![0.2], 0.4, 0.3, 0.7);
        let p = ScaledPolynomial::from_terms(
            f,
            (0..4u32).flat_map(|a| (0..3u32).map(move |b| (MultiIndex::xt(a, b), c(a as f64 + 0.5, b as f64 - 1.0)))),
        );
        let sp = p.apply_schrodinger();
        for &(x, t) in &[(0.0, 0.0), (0.5, 1.0), (-0.3, 0.2)] {
            let direct = I * p.eval(&[x], t, &MultiIndex::xt(0, 1)) + 0.5 * p.eval(&[x], t, &MultiIndex::xt(2, 0));
            let via = sp.eval(&[x], t, &MultiIndex::xt(0, 0));
            assert!((direct - via).norm() < 1e-12 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn taylor_examples() {
        let psi = Plane(vec![1.0]);
        let t2 = taylor_poly(&psi, 2, Frame::unit(1));
        assert_eq!(t2.coeff(&MultiIndex::xt(0, 0)), c(1.0, 0.0));
        assert_eq!(t2.coeff(&MultiIndex::xt(1, 0)), c(1.0, 0.0));
        assert_eq!(t2.coeff(&MultiIndex::xt(0, 1)), c(0.0, 0.5));
        assert_eq!(t2.coeffs().len(), 3);
        // Not Trefftz: S(1 + x + it/2) = −1/2.
        assert_eq!(t2.apply_schrodinger().coeff(&MultiIndex::xt(0, 0)), c(-0.5, 0.0));

        let t1 = taylor_poly(&psi, 1, Frame::unit(1));
        assert_eq!(t1.coeffs().len(), 1);
        assert_eq!(t1.coeff(&MultiIndex::xt(0, 0)), c(1.0, 0.0));

        let k = ScaledPolynomial::constant(Frame::unit(1), c(2.5, -1.0));
        for m in 1..5 {
            let t = taylor_poly(&k, m, Frame::new(vec![0.3], 0.1, 0.5, 0.5));
            assert_eq!(t.coeff(&MultiIndex::xt(0, 0)), c(2.5, -1.0));
            assert!(t.coeffs().iter().filter(|(j, _)| j.order() > 0).all(|(_, v)| *v == ZERO));
        }
    }

    #[test]
    fn extended_taylor_examples() {
        let psi = Plane(vec![1.0]);
        let e = extended_taylor_poly(&psi, 1, Frame::unit(1));
        let expected = [
            (MultiIndex::xt(0, 0), c(1.0, 0.0)),
            (MultiIndex::xt(1, 0), c(1.0, 0.0)),
            (MultiIndex::xt(0, 1), c(0.0, 0.5)),
            (MultiIndex::xt(2, 0), c(0.5, 0.0)),
        ];
        assert_eq!(e.coeffs().len(), expected.len());
        for (j, v) in &expected {
            assert_relative_eq!((e.coeff(j) - v).norm(), 0.0, epsilon = 1e-15);
        }
        assert!(e.apply_schrodinger().max_abs_coeff() < 1e-15);

        let kappa = 5.0;
        let e = extended_taylor_poly(&Plane(vec![kappa]), 1, Frame::unit(1));
        assert_relative_eq!(e.coeff(&MultiIndex::xt(1, 0)).re, kappa);
        assert_relative_eq!(e.coeff(&MultiIndex::xt(0, 1)).im, kappa * kappa / 2.0);
        assert_relative_eq!(e.coeff(&MultiIndex::xt(2, 0)).re, kappa * kappa / 2.0);

        let e0 = extended_taylor_poly(&psi, 0, Frame::new(vec![0.4], 0.2, 0.1, 0.1));
        assert_eq!(e0.coeffs().len(), 1);
        let v = psi.derivative(&MultiIndex::xt(0, 0), &[0.4], 0.2);
        assert_eq!(e0.coeff(&MultiIndex::xt(0, 0)), v);
    }

    #[test]
    fn extended_taylor_is_trefftz() {
        for p in 1..=4 {
            for frame in [Frame::unit(1), Frame::new(vec![0.35], 0.05, 0.1, 0.1)] {
                let e = extended_taylor_poly(&Plane(vec![5.0]), p, frame.clone());
                let rel = e.apply_schrodinger().max_abs_coeff() / e.max_abs_coeff();
                assert!(rel <= 1e-13, "p = {p}: residual {rel}");
                let t = taylor_poly(&Plane(vec![5.0]), p + 1, frame);
                for (j, v) in t.coeffs() {
                    assert_eq!(e.coeff(j), *v);
                }
            }
        }
        for p in 1..=3 {
            let e = extended_taylor_poly(&Plane(vec![1.5, -2.0]), p, Frame::new(vec![0.1, 0.2], 0.3, 0.5, 0.25));
            let rel = e.apply_schrodinger().max_abs_coeff() / e.max_abs_coeff();
            assert!(rel <= 1e-13, "d = 2, p = {p}: residual {rel}");
        }
    }

    #[test]
    fn graded_space_indices() {
        assert_eq!(space_indices(1, 3), vec![vec![0], vec![1], vec![2], vec![3]]);
        assert_eq!(
            space_indices(2, 2),
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]
        );
        assert_eq!(space_indices(3, 2).len(), 10);
    }

    #[test]
    fn json_shape_and_round_trip() {
        let p = x2_plus_it();
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["scales"], serde_json::json!([1.0, 1.0]));
        assert_eq!(v["terms"][0], serde_json::json!([[0], 1, 0.0, 1.0]));
        let back: ScaledPolynomial = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn poly_strategy() -> impl Strategy<Value = ScaledPolynomial> {
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 15).prop_map(|v| {
                let mut it = v.into_iter();
                let frame = Frame::new(vec![0.1], -0.2, 0.3, 0.2);
                let mut terms = Vec::new();
                for a in 0..5u32 {
                    for b in 0..3u32 {
                        let (re, im) = it.next().unwrap();
                        terms.push((MultiIndex::xt(a, b), c(re, im)));
                    }
                }
                ScaledPolynomial::from_terms(frame, terms)
            })
        }

        proptest! {
            #[test]
            fn schrodinger_is_linear(
                p in poly_strategy(),
                q in poly_strategy(),
                a in (-2.0f64..2.0, -2.0f64..2.0),
                b in (-2.0f64..2.0, -2.0f64..2.0),
            ) {
                let (a, b) = (c(a.0, a.1), c(b.0, b.1));
                let lhs = (&(&p * a) + &(&q * b)).apply_schrodinger();
                let rhs = &(&p.apply_schrodinger() * a) + &(&q.apply_schrodinger() * b);
                let diff = &lhs - &rhs;
                let scale = lhs.max_abs_coeff().max(1.0);
                prop_assert!(diff.max_abs_coeff() <= 1e-14 * scale);
            }
        }
    }
}
