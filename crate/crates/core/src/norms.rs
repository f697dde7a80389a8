//! Mesh-dependent DG and DG⁺ norms of piecewise fields, plus the `L²(Ω)`
//! norm at a fixed time.

use num_complex::Complex64;

use crate::field::{Partial, PiecewiseField};
use crate::mesh::{Facet, FacetGeometry, Mesh, Neighbors};
use crate::quadrature::{gauss_legendre, QuadratureRule};

/// Node count used when no rule is given.
pub const DEFAULT_NORM_NODES: usize = 20;

fn default_rule() -> QuadratureRule {
    gauss_legendre(DEFAULT_NORM_NODES).expect("default rule size is supported")
}

/// Squared facet contributions before the common factor ½.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NormTerms {
    pub dg: f64,
    pub plus: f64,
}

fn integrate_sq<F: Fn(f64) -> f64>(rule: &QuadratureRule, lo: f64, hi: f64, f: F) -> f64 {
    rule.mapped(lo, hi).map(|(s, w)| w * f(s)).sum()
}

fn facet_terms(w: &dyn PiecewiseField, f: &Facet, rule: &QuadratureRule) -> NormTerms {
    let v = |e: usize, x: f64, t: f64| w.eval(e, x, t, Partial::Value);
    let dx = |e: usize, x: f64, t: f64| w.eval(e, x, t, Partial::Dx);
    let sq = Complex64::norm_sqr;
    match (f.geometry, f.neighbors) {
        (FacetGeometry::Horizontal { t, x_range: (x0, x1) }, Neighbors::BelowAbove { below, above }) => NormTerms {
            dg: integrate_sq(rule, x0, x1, |x| sq(&(v(below, x, t) - v(above, x, t)))),
            plus: integrate_sq(rule, x0, x1, |x| sq(&v(below, x, t))),
        },
        (FacetGeometry::Horizontal { t, x_range: (x0, x1) }, Neighbors::Boundary(e)) => {
            NormTerms { dg: integrate_sq(rule, x0, x1, |x| sq(&v(e, x, t))), plus: 0.0 }
        }
        (FacetGeometry::Vertical { x, t_range: (t0, t1) }, Neighbors::LeftRight { left, right }) => {
            let (a, b) = (f.alpha, f.beta);
            NormTerms {
                dg: integrate_sq(rule, t0, t1, |t| {
                    a * sq(&(v(left, x, t) - v(right, x, t))) + b * sq(&(dx(left, x, t) - dx(right, x, t)))
                }),
                plus: integrate_sq(rule, t0, t1, |t| {
                    sq(&(0.5 * (dx(left, x, t) + dx(right, x, t)))) / a + sq(&(0.5 * (v(left, x, t) + v(right, x, t)))) / b
                }),
            }
        }
        (FacetGeometry::Vertical { x, t_range: (t0, t1) }, Neighbors::Boundary(e)) => NormTerms {
            dg: integrate_sq(rule, t0, t1, |t| f.alpha * sq(&v(e, x, t))),
            plus: integrate_sq(rule, t0, t1, |t| sq(&(f.normal_sign * dx(e, x, t))) / f.alpha),
        },
        _ => unreachable!("facet geometry and neighbours disagree"),
    }
}

/// Sums of the squared DG terms and of the extra DG⁺ terms over all facets.
pub fn norm_terms(w: &dyn PiecewiseField, mesh: &Mesh, rule: &QuadratureRule) -> NormTerms {
    mesh.facets.iter().fold(NormTerms::default(), |acc, f| {
        let t = facet_terms(w, f, rule);
        NormTerms { dg: acc.dg + t.dg, plus: acc.plus + t.plus }
    })
}

pub fn dg_norm_with(w: &dyn PiecewiseField, mesh: &Mesh, rule: &QuadratureRule) -> f64 {
    (0.5 * norm_terms(w, mesh, rule).dg).sqrt()
}

pub fn dg_plus_norm_with(w: &dyn PiecewiseField, mesh: &Mesh, rule: &QuadratureRule) -> f64 {
    let t = norm_terms(w, mesh, rule);
    (0.5 * (t.dg + t.plus)).sqrt()
}

/// `⦀w⦀_DG`.
pub fn dg_norm(w: &dyn PiecewiseField, mesh: &Mesh) -> f64 {
    dg_norm_with(w, mesh, &default_rule())
}

/// `⦀w⦀_DG⁺`.
pub fn dg_plus_norm(w: &dyn PiecewiseField, mesh: &Mesh) -> f64 {
    dg_plus_norm_with(w, mesh, &default_rule())
}

/// `‖w(·, t)‖_{L²(Ω)}`, taking the trace from the later slab at slab interfaces.
pub fn l2_slice_error(w: &dyn PiecewiseField, t: f64, mesh: &Mesh) -> f64 {
    let rule = default_rule();
    let t = t.clamp(0.0, mesh.domain.t_final);
    let slab = mesh.elements.iter().filter(|e| e.t_range.0 <= t).map(|e| e.slab).max().unwrap_or(0);
    let ids = mesh.slab(slab).expect("slab index comes from the mesh");
    ids.iter()
        .map(|&e| {
            let el = &mesh.elements[e];
            integrate_sq(&rule, el.x_range.0, el.x_range.1, |x| w.eval(e, x, t, Partial::Value).norm_sqr())
        })
        .sum::<f64>()
        .sqrt()
}
