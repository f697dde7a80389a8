//! Piecewise fields on a (1+1)-dimensional mesh: anything that can report its
//! value and first/second partials on a given element.

use num_complex::Complex64;

use crate::poly::{MultiIndex, ScaledPolynomial};

/// The partial derivatives the DG forms and norms need.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Partial {
    Value,
    Dx,
    Dt,
    Dxx,
}

impl Partial {
    pub fn multi_index(self) -> MultiIndex {
        match self {
            Partial::Value => MultiIndex::xt(0, 0),
            Partial::Dx => MultiIndex::xt(1, 0),
            Partial::Dt => MultiIndex::xt(0, 1),
            Partial::Dxx => MultiIndex::xt(2, 0),
        }
    }
}

/// A field that is smooth inside each element; `element` selects the one-sided
/// trace on facets.
pub trait PiecewiseField: Sync {
    fn eval(&self, element: usize, x: f64, t: f64, which: Partial) -> Complex64;
}

impl<F: PiecewiseField + ?Sized> PiecewiseField for &F {
    fn eval(&self, element: usize, x: f64, t: f64, which: Partial) -> Complex64 {
        (**self).eval(element, x, t, which)
    }
}

/// `a − b`.
pub struct Difference<A, B>(pub A, pub B);

impl<A: PiecewiseField, B: PiecewiseField> PiecewiseField for Difference<A, B> {
    fn eval(&self, element: usize, x: f64, t: f64, which: Partial) -> Complex64 {
        self.0.eval(element, x, t, which) - self.1.eval(element, x, t, which)
    }
}

/// `c · a`.
pub struct Scaled<A>(pub Complex64, pub A);

impl<A: PiecewiseField> PiecewiseField for Scaled<A> {
    fn eval(&self, element: usize, x: f64, t: f64, which: Partial) -> Complex64 {
        self.0 * self.1.eval(element, x, t, which)
    }
}

/// The zero field.
pub struct Zero;

impl PiecewiseField for Zero {
    fn eval(&self, _: usize, _: f64, _: f64, _: Partial) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
}

/// A constant on every element.
pub struct Constant(pub Complex64);

impl PiecewiseField for Constant {
    fn eval(&self, _: usize, _: f64, _: f64, which: Partial) -> Complex64 {
        match which {
            Partial::Value => self.0,
            _ => Complex64::new(0.0, 0.0),
        }
    }
}

/// One polynomial per element (e.g. an elementwise interpolant).
pub struct PolynomialField {
    pub polys: Vec<ScaledPolynomial>,
}

impl PiecewiseField for PolynomialField {
    fn eval(&self, element: usize, x: f64, t: f64, which: Partial) -> Complex64 {
        self.polys[element].eval(&[x], t, &which.multi_index())
    }
}

/// Restricts a field to a single element; zero elsewhere.
pub struct OnElement<A> {
    pub element: usize,
    pub field: A,
}

impl<A: PiecewiseField> PiecewiseField for OnElement<A> {
    fn eval(&self, element: usize, x: f64, t: f64, which: Partial) -> Complex64 {
        if element == self.element {
            self.field.eval(element, x, t, which)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}
