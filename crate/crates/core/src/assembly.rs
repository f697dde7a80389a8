//! Ultra-weak space-time DG system: slab-by-slab assembly and marching, the
//! coupled global system used as an oracle, and generic evaluators of the
//! sesquilinear form and right-hand side for arbitrary piecewise fields.

use std::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Partial, PiecewiseField};
use crate::linalg::{relative_residual, DenseComplexMatrix, LuFactorization};
use crate::mesh::{Facet, FacetGeometry, FacetKind, Mesh, Neighbors};
use crate::quadrature::{gauss_legendre, QuadratureRule};
use crate::spaces::{mesh_bases, BasisFunction, ElementBasis, SpaceKind};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Largest system the dense global oracle accepts.
pub const GLOBAL_DOF_CAP: usize = 5000;
/// Minimum node count for non-polynomial integrands.
pub const DATA_QUADRATURE_MIN: usize = 20;

type InitialDatum = Box<dyn Fn(f64) -> Complex64 + Send + Sync>;
type DirichletDatum = Box<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

/// Initial datum `ψ₀(x)` and Dirichlet datum `g_D(x, t)`.
pub struct BoundaryData {
    pub psi0: InitialDatum,
    pub g_d: DirichletDatum,
}

impl BoundaryData {
    pub fn new<P, G>(psi0: P, g_d: G) -> Self
    where
        P: Fn(f64) -> Complex64 + Send + Sync + 'static,
        G: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        Self { psi0: Box::new(psi0), g_d: Box::new(g_d) }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(move |_| c, move |_, _| c)
    }

    pub fn zero() -> Self {
        Self::constant(ZERO)
    }

    /// Initial and boundary values of a known solution.
    pub fn from_field<F: PiecewiseField + Send + 'static>(field: F) -> Self {
        let field = std::sync::Arc::new(field);
        let f2 = field.clone();
        Self::new(move |x| field.eval(0, x, 0.0, Partial::Value), move |x, t| f2.eval(0, x, t, Partial::Value))
    }
}

/// Node counts for matrix entries and for data or norm integrals.
#[derive(Debug, Clone)]
pub struct QuadratureChoice {
    pub matrix: QuadratureRule,
    pub data: QuadratureRule,
}

impl QuadratureChoice {
    /// `2p + 2` nodes for polynomial products, at least twenty otherwise; an
    /// override applies to both.
    pub fn for_space(kind: SpaceKind, override_n: Option<usize>) -> Result<Self> {
        let poly_n = 2 * kind.degree_parameter() as usize + 2;
        let data_n = poly_n.max(DATA_QUADRATURE_MIN);
        let (m, d) = match override_n {
            Some(n) => (n, n),
            None if kind.is_polynomial() => (poly_n, data_n),
            None => (data_n, data_n),
        };
        Ok(Self { matrix: gauss_legendre(m)?, data: gauss_legendre(d)? })
    }
}

/// A mesh together with a discrete space on it and the dof numbering.
pub struct Discretization<'m> {
    pub mesh: &'m Mesh,
    pub kind: SpaceKind,
    pub bases: Vec<ElementBasis>,
    pub quad: QuadratureChoice,
    offsets: Vec<usize>,
}

impl<'m> Discretization<'m> {
    pub fn new(mesh: &'m Mesh, kind: SpaceKind) -> Result<Self> {
        Self::with_quadrature(mesh, kind, None)
    }

    pub fn with_quadrature(mesh: &'m Mesh, kind: SpaceKind, quad_n: Option<usize>) -> Result<Self> {
        let bases = mesh_bases(mesh, kind)?;
        let quad = QuadratureChoice::for_space(kind, quad_n)?;
        let mut offsets = Vec::with_capacity(bases.len() + 1);
        offsets.push(0);
        for b in &bases {
            offsets.push(offsets.last().unwrap() + b.dim());
        }
        Ok(Self { mesh, kind, bases, quad, offsets })
    }

    pub fn n_dofs(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Global dof range of one element.
    pub fn element_dofs(&self, element: usize) -> Range<usize> {
        self.offsets[element]..self.offsets[element + 1]
    }

    pub fn slab_dofs(&self, slab: usize) -> Result<Range<usize>> {
        let ids = self.mesh.slab(slab)?;
        Ok(self.offsets[ids[0]]..self.offsets[ids[ids.len() - 1] + 1])
    }

    fn needs_volume_term(&self) -> bool {
        !self.kind.is_trefftz()
    }
}

/// The previous-slab input of a slab system.
#[derive(Clone, Copy)]
pub enum Below<'a> {
    Initial,
    Slab { slab: usize, solution: &'a DiscreteSolution },
}

#[derive(Debug, Clone)]
pub struct SlabSystem {
    pub slab: usize,
    pub matrix: DenseComplexMatrix,
    pub rhs: Vec<Complex64>,
    /// Row `r` belongs to basis function `dof_map[r].1` of element `dof_map[r].0`.
    pub dof_map: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveDiagnostics {
    /// Smallest `min |u_ii| / max |u_ii|` over the factorized slab matrices.
    pub min_pivot_ratio: f64,
    pub max_relative_residual: f64,
}

/// Per-element coefficients of the discrete solution.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    pub kind: SpaceKind,
    pub bases: Vec<ElementBasis>,
    pub coeffs: Vec<Vec<Complex64>>,
    /// Slabs `0..solved_slabs` carry computed coefficients.
    pub solved_slabs: usize,
    pub diagnostics: SolveDiagnostics,
}

impl DiscreteSolution {
    fn empty(disc: &Discretization) -> Self {
        Self {
            kind: disc.kind,
            bases: disc.bases.clone(),
            coeffs: disc.bases.iter().map(|b| vec![ZERO; b.dim()]).collect(),
            solved_slabs: 0,
            diagnostics: SolveDiagnostics { min_pivot_ratio: 1.0, max_relative_residual: 0.0 },
        }
    }

    /// Coefficients in global dof order.
    pub fn flat_coeffs(&self) -> Vec<Complex64> {
        self.coeffs.iter().flatten().copied().collect()
    }

    pub fn from_flat(disc: &Discretization, flat: &[Complex64]) -> Self {
        let mut s = Self::empty(disc);
        for (e, c) in s.coeffs.iter_mut().enumerate() {
            c.copy_from_slice(&flat[disc.element_dofs(e)]);
        }
        s.solved_slabs = disc.mesh.n_slabs;
        s
    }
}

impl PiecewiseField for DiscreteSolution {
    fn eval(&self, element: usize, x: f64, t: f64, which: Partial) -> Complex64 {
        self.bases[element].functions.iter().zip(&self.coeffs[element]).map(|(b, c)| c * b.eval(x, t, which)).sum()
    }
}

/// A single basis function of one element, zero elsewhere.
pub struct BasisField<'a> {
    pub element: usize,
    pub function: &'a BasisFunction,
}

impl PiecewiseField for BasisField<'_> {
    fn eval(&self, element: usize, x: f64, t: f64, which: Partial) -> Complex64 {
        if element == self.element {
            self.function.eval(x, t, which)
        } else {
            ZERO
        }
    }
}

// Facet integrands shared by the matrix assembly and the generic evaluators.
// One-sided traces are passed as (value, ∂x) pairs.

/// `½({∂ψ}⟦s̄⟧ + iα⟦ψ⟧⟦s̄⟧ − {ψ}⟦∂s̄⟧ + iβ⟦∂ψ⟧⟦∂s̄⟧)` with `⟦w⟧ = w_L − w_R`.
fn time_like_integrand(
    alpha: f64,
    beta: f64,
    trial: ((Complex64, Complex64), (Complex64, Complex64)),
    test: ((Complex64, Complex64), (Complex64, Complex64)),
) -> Complex64 {
    let ((pl, dpl), (pr, dpr)) = trial;
    let ((sl, dsl), (sr, dsr)) = test;
    let jump = pl - pr;
    let jump_d = dpl - dpr;
    let avg = 0.5 * (pl + pr);
    let avg_d = 0.5 * (dpl + dpr);
    let sj = (sl - sr).conj();
    let sjd = (dsl - dsr).conj();
    0.5 * (avg_d * sj + I * alpha * jump * sj - avg * sjd + I * beta * jump_d * sjd)
}

/// `½(n ∂ψ + iαψ) s̄`.
fn dirichlet_integrand(alpha: f64, n: f64, trial: (Complex64, Complex64), test: Complex64) -> Complex64 {
    0.5 * (n * trial.1 + I * alpha * trial.0) * test.conj()
}

/// `½ g (n ∂s̄ + iα s̄)`.
fn dirichlet_data_integrand(alpha: f64, n: f64, g: Complex64, test: (Complex64, Complex64)) -> Complex64 {
    0.5 * g * (n * test.1.conj() + I * alpha * test.0.conj())
}

fn vertical(f: &Facet) -> (f64, (f64, f64)) {
    match f.geometry {
        FacetGeometry::Vertical { x, t_range } => (x, t_range),
        FacetGeometry::Horizontal { .. } => unreachable!("time-like facet with horizontal geometry"),
    }
}

fn horizontal(f: &Facet) -> (f64, (f64, f64)) {
    match f.geometry {
        FacetGeometry::Horizontal { t, x_range } => (t, x_range),
        FacetGeometry::Vertical { .. } => unreachable!("space-like facet with vertical geometry"),
    }
}

fn values(basis: &ElementBasis, x: f64, t: f64, which: Partial) -> Vec<Complex64> {
    basis.functions.iter().map(|f| f.eval(x, t, which)).collect()
}

/// Adds `Σ_q w_q f(i, j, q)` into the block at `(rows, cols)`.
fn add_block(m: &mut DenseComplexMatrix, rows: usize, cols: usize, block: &[Vec<Complex64>]) {
    for (i, row) in block.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            m[(rows + i, cols + j)] += *v;
        }
    }
}

/// Local matrices: `m[i][j]` couples test function `i` with trial function `j`.
struct LocalTerms<'a> {
    disc: &'a Discretization<'a>,
}

impl<'a> LocalTerms<'a> {
    /// `i ∫ φ_j φ̄_i` over the top edge of `e`.
    fn top(&self, e: usize) -> Vec<Vec<Complex64>> {
        let el = &self.disc.mesh.elements[e];
        let b = &self.disc.bases[e];
        let n = b.dim();
        let mut out = vec![vec![ZERO; n]; n];
        for (x, w) in self.disc.quad.matrix.mapped(el.x_range.0, el.x_range.1) {
            let v = values(b, x, el.t_range.1, Partial::Value);
            for i in 0..n {
                let si = I * w * v[i].conj();
                for j in 0..n {
                    out[i][j] += v[j] * si;
                }
            }
        }
        out
    }

    /// `∫_K φ_j conj(S φ_i)`.
    fn volume(&self, e: usize) -> Vec<Vec<Complex64>> {
        let el = &self.disc.mesh.elements[e];
        let b = &self.disc.bases[e];
        let n = b.dim();
        let rule = &self.disc.quad.matrix;
        let mut out = vec![vec![ZERO; n]; n];
        for (t, wt) in rule.mapped(el.t_range.0, el.t_range.1) {
            for (x, wx) in rule.mapped(el.x_range.0, el.x_range.1) {
                let v = values(b, x, t, Partial::Value);
                let s: Vec<Complex64> = b.functions.iter().map(|f| f.schrodinger(x, t)).collect();
                for i in 0..n {
                    let si = wt * wx * s[i].conj();
                    for j in 0..n {
                        out[i][j] += v[j] * si;
                    }
                }
            }
        }
        out
    }

    /// Blocks `[test side][trial side]` of an interior time-like facet.
    fn time_like(&self, f: &Facet, left: usize, right: usize) -> [[Vec<Vec<Complex64>>; 2]; 2] {
        let (x, (t0, t1)) = vertical(f);
        let sides = [left, right];
        let dims = [self.disc.bases[left].dim(), self.disc.bases[right].dim()];
        let mut out: [[Vec<Vec<Complex64>>; 2]; 2] = Default::default();
        for s in 0..2 {
            for p in 0..2 {
                out[s][p] = vec![vec![ZERO; dims[p]]; dims[s]];
            }
        }
        for (t, w) in self.disc.quad.matrix.mapped(t0, t1) {
            let tr: Vec<(Vec<Complex64>, Vec<Complex64>)> = sides
                .iter()
                .map(|&e| (values(&self.disc.bases[e], x, t, Partial::Value), values(&self.disc.bases[e], x, t, Partial::Dx)))
                .collect();
            let zero = (ZERO, ZERO);
            for s in 0..2 {
                for p in 0..2 {
                    let block = &mut out[s][p];
                    for i in 0..dims[s] {
                        let sv = (tr[s].0[i], tr[s].1[i]);
                        let test = if s == 0 { (sv, zero) } else { (zero, sv) };
                        for j in 0..dims[p] {
                            let pv = (tr[p].0[j], tr[p].1[j]);
                            let trial = if p == 0 { (pv, zero) } else { (zero, pv) };
                            block[i][j] += w * time_like_integrand(f.alpha, f.beta, trial, test);
                        }
                    }
                }
            }
        }
        out
    }

    fn dirichlet(&self, f: &Facet, e: usize) -> Vec<Vec<Complex64>> {
        let (x, (t0, t1)) = vertical(f);
        let b = &self.disc.bases[e];
        let n = b.dim();
        let mut out = vec![vec![ZERO; n]; n];
        for (t, w) in self.disc.quad.matrix.mapped(t0, t1) {
            let v = values(b, x, t, Partial::Value);
            let d = values(b, x, t, Partial::Dx);
            for i in 0..n {
                for j in 0..n {
                    out[i][j] += w * dirichlet_integrand(f.alpha, f.normal_sign, (v[j], d[j]), v[i]);
                }
            }
        }
        out
    }

    /// `−i ∫ φ_j^below φ̄_i^above` on a space-like interior facet.
    fn cross_slab(&self, f: &Facet, below: usize, above: usize) -> Vec<Vec<Complex64>> {
        let (t, (x0, x1)) = horizontal(f);
        let (bb, ba) = (&self.disc.bases[below], &self.disc.bases[above]);
        let mut out = vec![vec![ZERO; bb.dim()]; ba.dim()];
        for (x, w) in self.disc.quad.matrix.mapped(x0, x1) {
            let vb = values(bb, x, t, Partial::Value);
            let va = values(ba, x, t, Partial::Value);
            for (i, a) in va.iter().enumerate() {
                for (j, b) in vb.iter().enumerate() {
                    out[i][j] -= I * w * b * a.conj();
                }
            }
        }
        out
    }
}

/// Adds the within-slab matrix terms into `m`, with element dofs placed at
/// `disc.element_dofs(e).start - shift`.
fn fill_slab_matrix(disc: &Discretization, slab: usize, m: &mut DenseComplexMatrix, shift: usize) -> Result<()> {
    let local = LocalTerms { disc };
    let mesh = disc.mesh;
    for &e in mesh.slab(slab)? {
        let off = disc.element_dofs(e).start - shift;
        add_block(m, off, off, &local.top(e));
        if disc.needs_volume_term() {
            add_block(m, off, off, &local.volume(e));
        }
        let [_, _, left, right] = mesh.element_facet_ids(e)?;
        for fid in [left, right] {
            let f = &mesh.facets[fid];
            match (f.kind, f.neighbors) {
                (FacetKind::Dirichlet, _) => add_block(m, off, off, &local.dirichlet(f, e)),
                (FacetKind::TimeLikeInterior, Neighbors::LeftRight { left: l, right: r }) if r == e => {
                    let blocks = local.time_like(f, l, r);
                    let offs = [disc.element_dofs(l).start - shift, off];
                    for s in 0..2 {
                        for p in 0..2 {
                            add_block(m, offs[s], offs[p], &blocks[s][p]);
                        }
                    }
                }
                _ => {}
            }
        }
    }
    Ok(())
}

/// Right-hand side Dirichlet terms for the elements of one slab.
fn add_dirichlet_rhs(disc: &Discretization, slab: usize, data: &BoundaryData, rhs: &mut [Complex64], shift: usize) -> Result<()> {
    let mesh = disc.mesh;
    for &e in mesh.slab(slab)? {
        let off = disc.element_dofs(e).start - shift;
        let b = &disc.bases[e];
        let [_, _, left, right] = mesh.element_facet_ids(e)?;
        for fid in [left, right] {
            let f = &mesh.facets[fid];
            if f.kind != FacetKind::Dirichlet {
                continue;
            }
            let (x, (t0, t1)) = vertical(f);
            for (t, w) in disc.quad.data.mapped(t0, t1) {
                let g = (data.g_d)(x, t);
                let v = values(b, x, t, Partial::Value);
                let d = values(b, x, t, Partial::Dx);
                for i in 0..b.dim() {
                    rhs[off + i] += w * dirichlet_data_integrand(f.alpha, f.normal_sign, g, (v[i], d[i]));
                }
            }
        }
    }
    Ok(())
}

/// `i ∫_{F⁰} ψ₀ s̄` for the elements of slab 0.
fn add_initial_rhs(disc: &Discretization, data: &BoundaryData, rhs: &mut [Complex64]) -> Result<()> {
    for &e in disc.mesh.slab(0)? {
        let el = &disc.mesh.elements[e];
        let off = disc.element_dofs(e).start;
        let b = &disc.bases[e];
        for (x, w) in disc.quad.data.mapped(el.x_range.0, el.x_range.1) {
            let psi = (data.psi0)(x);
            let v = values(b, x, el.t_range.0, Partial::Value);
            for i in 0..b.dim() {
                rhs[off + i] += I * w * psi * v[i].conj();
            }
        }
    }
    Ok(())
}

pub fn assemble_slab(disc: &Discretization, slab: usize, data: &BoundaryData, below: Below) -> Result<SlabSystem> {
    let mesh = disc.mesh;
    let range = disc.slab_dofs(slab)?;
    let (shift, n) = (range.start, range.len());
    let mut matrix = DenseComplexMatrix::zeros(n, n);
    fill_slab_matrix(disc, slab, &mut matrix, shift)?;

    let mut rhs = vec![ZERO; n];
    match below {
        Below::Initial if slab == 0 => add_initial_rhs(disc, data, &mut rhs)?,
        Below::Initial => {
            return Err(Error::WrongPreviousSlab { slab, below: "the initial datum".into() });
        }
        Below::Slab { slab: prev, solution } => {
            if slab == 0 || prev + 1 != slab || solution.solved_slabs <= prev {
                let below = format!("slab {prev} ({} slabs solved)", solution.solved_slabs);
                return Err(Error::WrongPreviousSlab { slab, below });
            }
            for &e in mesh.slab(slab)? {
                let bottom = &mesh.facets[mesh.element_facet_ids(e)?[0]];
                let Neighbors::BelowAbove { below: eb, .. } = bottom.neighbors else {
                    unreachable!("bottom facet of a later slab is interior")
                };
                let (t, (x0, x1)) = horizontal(bottom);
                let off = disc.element_dofs(e).start - shift;
                let b = &disc.bases[e];
                for (x, w) in disc.quad.data.mapped(x0, x1) {
                    let psi = solution.eval(eb, x, t, Partial::Value);
                    let v = values(b, x, t, Partial::Value);
                    for i in 0..b.dim() {
                        rhs[off + i] += I * w * psi * v[i].conj();
                    }
                }
            }
        }
    }
    add_dirichlet_rhs(disc, slab, data, &mut rhs, shift)?;

    let dof_map = mesh.slab(slab)?.iter().flat_map(|&e| (0..disc.bases[e].dim()).map(move |k| (e, k))).collect();
    Ok(SlabSystem { slab, matrix, rhs, dof_map })
}

/// The coupled system over all slabs.
pub fn assemble_global(disc: &Discretization, data: &BoundaryData) -> Result<(DenseComplexMatrix, Vec<Complex64>)> {
    let n = disc.n_dofs();
    if n > GLOBAL_DOF_CAP {
        return Err(Error::SystemTooLarge { dofs: n, cap: GLOBAL_DOF_CAP });
    }
    let mesh = disc.mesh;
    let mut matrix = DenseComplexMatrix::zeros(n, n);
    let mut rhs = vec![ZERO; n];
    for slab in 0..mesh.n_slabs {
        fill_slab_matrix(disc, slab, &mut matrix, 0)?;
        add_dirichlet_rhs(disc, slab, data, &mut rhs, 0)?;
    }
    add_initial_rhs(disc, data, &mut rhs)?;
    let local = LocalTerms { disc };
    for f in &mesh.facets {
        if let (FacetKind::SpaceLikeInterior, Neighbors::BelowAbove { below, above }) = (f.kind, f.neighbors) {
            let block = local.cross_slab(f, below, above);
            add_block(&mut matrix, disc.element_dofs(above).start, disc.element_dofs(below).start, &block);
        }
    }
    Ok((matrix, rhs))
}

/// Solves the slab systems in time order.
pub fn march(disc: &Discretization, data: &BoundaryData) -> Result<DiscreteSolution> {
    let mut sol = DiscreteSolution::empty(disc);
    for slab in 0..disc.mesh.n_slabs {
        let system = if slab == 0 {
            assemble_slab(disc, 0, data, Below::Initial)?
        } else {
            assemble_slab(disc, slab, data, Below::Slab { slab: slab - 1, solution: &sol })?
        };
        let lu = LuFactorization::new(&system.matrix)
            .map_err(|source| Error::SlabSolve { slab, condition_estimate: f64::INFINITY, source })?;
        let x = lu.solve(&system.rhs).map_err(|source| Error::SlabSolve {
            slab,
            condition_estimate: 1.0 / lu.pivot_ratio(),
            source,
        })?;
        let d = &mut sol.diagnostics;
        d.min_pivot_ratio = d.min_pivot_ratio.min(lu.pivot_ratio());
        d.max_relative_residual = d.max_relative_residual.max(relative_residual(&system.matrix, &x, &system.rhs));
        for (r, &(e, k)) in system.dof_map.iter().enumerate() {
            sol.coeffs[e][k] = x[r];
        }
        sol.solved_slabs = slab + 1;
    }
    Ok(sol)
}

/// Solves the global system in one dense factorization.
pub fn solve_global(disc: &Discretization, data: &BoundaryData) -> Result<DiscreteSolution> {
    let (a, b) = assemble_global(disc, data)?;
    let lu = LuFactorization::new(&a)?;
    let x = lu.solve(&b)?;
    let mut sol = DiscreteSolution::from_flat(disc, &x);
    sol.diagnostics =
        SolveDiagnostics { min_pivot_ratio: lu.pivot_ratio(), max_relative_residual: relative_residual(&a, &x, &b) };
    Ok(sol)
}

/// `A(ψ, s)` for arbitrary piecewise fields, optionally with the volume term
/// `Σ_K ∫_K ψ conj(S s)`.
pub fn sesquilinear_form(
    mesh: &Mesh,
    trial: &dyn PiecewiseField,
    test: &dyn PiecewiseField,
    volume: bool,
    rule: &QuadratureRule,
) -> Complex64 {
    let mut acc = ZERO;
    let vd = |f: &dyn PiecewiseField, e: usize, x: f64, t: f64| (f.eval(e, x, t, Partial::Value), f.eval(e, x, t, Partial::Dx));
    for f in &mesh.facets {
        match (f.kind, f.neighbors) {
            (FacetKind::SpaceLikeInterior, Neighbors::BelowAbove { below, above }) => {
                let (t, (x0, x1)) = horizontal(f);
                acc += rule.integrate(x0, x1, |x| {
                    let jump = test.eval(below, x, t, Partial::Value) - test.eval(above, x, t, Partial::Value);
                    I * trial.eval(below, x, t, Partial::Value) * jump.conj()
                });
            }
            (FacetKind::Final, Neighbors::Boundary(e)) => {
                let (t, (x0, x1)) = horizontal(f);
                acc += rule.integrate(x0, x1, |x| {
                    I * trial.eval(e, x, t, Partial::Value) * test.eval(e, x, t, Partial::Value).conj()
                });
            }
            (FacetKind::TimeLikeInterior, Neighbors::LeftRight { left, right }) => {
                let (x, (t0, t1)) = vertical(f);
                acc += rule.integrate(t0, t1, |t| {
                    time_like_integrand(
                        f.alpha,
                        f.beta,
                        (vd(trial, left, x, t), vd(trial, right, x, t)),
                        (vd(test, left, x, t), vd(test, right, x, t)),
                    )
                });
            }
            (FacetKind::Dirichlet, Neighbors::Boundary(e)) => {
                let (x, (t0, t1)) = vertical(f);
                acc += rule.integrate(t0, t1, |t| {
                    dirichlet_integrand(f.alpha, f.normal_sign, vd(trial, e, x, t), test.eval(e, x, t, Partial::Value))
                });
            }
            _ => {}
        }
    }
    if volume {
        for el in &mesh.elements {
            acc += rule.integrate_rectangle(el.x_range, el.t_range, |x, t| {
                let s = I * test.eval(el.id, x, t, Partial::Dt) + 0.5 * test.eval(el.id, x, t, Partial::Dxx);
                trial.eval(el.id, x, t, Partial::Value) * s.conj()
            });
        }
    }
    acc
}

/// `ℓ(s) = i ∫_{F⁰} ψ₀ s̄ + ½ ∫_{F_D} g_D (∂_n s̄ + iα s̄)`.
pub fn linear_functional(mesh: &Mesh, data: &BoundaryData, test: &dyn PiecewiseField, rule: &QuadratureRule) -> Complex64 {
    let mut acc = ZERO;
    for f in &mesh.facets {
        match (f.kind, f.neighbors) {
            (FacetKind::Initial, Neighbors::Boundary(e)) => {
                let (t, (x0, x1)) = horizontal(f);
                acc += rule.integrate(x0, x1, |x| I * (data.psi0)(x) * test.eval(e, x, t, Partial::Value).conj());
            }
            (FacetKind::Dirichlet, Neighbors::Boundary(e)) => {
                let (x, (t0, t1)) = vertical(f);
                acc += rule.integrate(t0, t1, |t| {
                    let s = (test.eval(e, x, t, Partial::Value), test.eval(e, x, t, Partial::Dx));
                    dirichlet_data_integrand(f.alpha, f.normal_sign, (data.g_d)(x, t), s)
                });
            }
            _ => {}
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ExpSolution;
    use crate::linalg::solve_lu;
    use crate::mesh::{build_cartesian_mesh, SpaceTimeDomain};
    use crate::spaces::SeedChoice;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const P0: SpaceKind = SpaceKind::TrefftzPoly { p: 0, seed: SeedChoice::A };

    fn all_kinds(p: u32) -> Vec<SpaceKind> {
        vec![
            SpaceKind::TrefftzPoly { p, seed: SeedChoice::B },
            SpaceKind::QuasiTrefftz { p },
            SpaceKind::FullPoly { p },
            SpaceKind::PlaneWave { p },
        ]
    }

    #[test]
    fn single_element_constant_system() {
        let mesh = build_cartesian_mesh(SpaceTimeDomain::unit(), 1, 1).unwrap();
        let disc = Discretization::new(&mesh, P0).unwrap();
        let sys = assemble_slab(&disc, 0, &BoundaryData::constant(c(1.0, 0.0)), Below::Initial).unwrap();
        assert_eq!(sys.matrix.nrows(), 1);
        assert!((sys.matrix[(0, 0)] - c(0.0, 2.0)).norm() < 1e-14);
        assert!((sys.rhs[0] - c(0.0, 2.0)).norm() < 1e-14);
        let x = solve_lu(&sys.matrix, &sys.rhs).unwrap();
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-14);

        let sys = assemble_slab(&disc, 0, &BoundaryData::zero(), Below::Initial).unwrap();
        assert!(sys.rhs.iter().all(|v| *v == ZERO));
        let (g, rhs) = assemble_global(&disc, &BoundaryData::constant(c(1.0, 0.0))).unwrap();
        assert_eq!(g, sys.matrix);
        assert!((rhs[0] - c(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn wrong_previous_slab_is_rejected() {
        let mesh = build_cartesian_mesh(SpaceTimeDomain::unit(), 2, 3).unwrap();
        let disc = Discretization::new(&mesh, P0).unwrap();
        let data = BoundaryData::zero();
        assert!(matches!(assemble_slab(&disc, 1, &data, Below::Initial), Err(Error::WrongPreviousSlab { .. })));
        let sol = march(&disc, &data).unwrap();
        assert!(assemble_slab(&disc, 2, &data, Below::Slab { slab: 0, solution: &sol }).is_err());
        assert!(assemble_slab(&disc, 0, &data, Below::Slab { slab: 0, solution: &sol }).is_err());
        assert!(assemble_slab(&disc, 3, &data, Below::Initial).is_err());
        assert!(assemble_slab(&disc, 2, &data, Below::Slab { slab: 1, solution: &sol }).is_ok());
    }

    #[test]
    fn two_slab_global_matches_marching() {
        let mesh = build_cartesian_mesh(SpaceTimeDomain::unit(), 1, 2).unwrap();
        let disc = Discretization::new(&mesh, P0).unwrap();
        let data = BoundaryData::new(|x| c(x, 0.5), |x, t| c(x + t, -t));
        let marched = march(&disc, &data).unwrap().flat_coeffs();
        let global = solve_global(&disc, &data).unwrap().flat_coeffs();
        for (a, b) in marched.iter().zip(&global) {
            assert!((a - b).norm() <= 1e-14 * b.norm().max(1.0));
        }
    }

    #[test]
    fn global_matrix_is_block_lower_triangular() {
        let mesh = build_cartesian_mesh(SpaceTimeDomain::unit(), 3, 3).unwrap();
        for kind in all_kinds(1) {
            let disc = Discretization::new(&mesh, kind).unwrap();
            let (a, _) = assemble_global(&disc, &BoundaryData::zero()).unwrap();
            for s_test in 0..3 {
                for s_trial in s_test + 1..3 {
                    for r in disc.slab_dofs(s_test).unwrap() {
                        for col in disc.slab_dofs(s_trial).unwrap() {
                            assert_eq!(a[(r, col)], ZERO, "{kind}");
                        }
                    }
                }
            }
            // Diagonal blocks are the slab matrices.
            let sys = assemble_slab(&disc, 0, &BoundaryData::zero(), Below::Initial).unwrap();
            let r = disc.slab_dofs(0).unwrap();
            for i in r.clone() {
                for j in r.clone() {
                    assert_eq!(a[(i, j)], sys.matrix[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn constants_are_reproduced() {
        let mesh = build_cartesian_mesh(SpaceTimeDomain::unit(), 4, 3).unwrap();
        let one = c(1.0, 0.0);
        for p in 0..=2 {
            let mut kinds = vec![SpaceKind::TrefftzPoly { p, seed: SeedChoice::A }, SpaceKind::FullPoly { p }];
            if p > 0 {
                kinds.extend([SpaceKind::QuasiTrefftz { p }, SpaceKind::PlaneWave { p }]);
            }
            for kind in kinds {
                let disc = Discretization::new(&mesh, kind).unwrap();
                let sol = march(&disc, &BoundaryData::constant(one)).unwrap();
                for el in &mesh.elements {
                    for &(dx, dt) in &[(0.0, 0.0), (0.1, -0.1)] {
                        let v = sol.eval(el.id, el.center.0 + dx, el.center.1 + dt, Partial::Value);
                        assert!((v - one).norm() <= 1e-12, "{kind}: {v}");
                    }
                }
                let zero = march(&disc, &BoundaryData::zero()).unwrap();
                assert!(zero.flat_coeffs().iter().all(|v| v.norm() == 0.0));
            }
        }
    }

    #[test]
    fn matrix_entries_match_generic_form() {
        let mesh = build_cartesian_mesh(SpaceTimeDomain::new(0.0, 1.0, 0.5).unwrap(), 3, 2).unwrap();
        let data = BoundaryData::from_field(ExpSolution::new(1.5));
        for kind in all_kinds(1) {
            let disc = Discretization::new(&mesh, kind).unwrap();
            let (a, b) = assemble_global(&disc, &data).unwrap();
            let rule = gauss_legendre(20).unwrap();
            let volume = !kind.is_trefftz();
            let fields: Vec<BasisField> = mesh
                .elements
                .iter()
                .flat_map(|e| disc.bases[e.id].functions.iter().map(move |f| BasisField { element: e.id, function: f }))
                .collect();
            for (i, s) in fields.iter().enumerate() {
                let l = linear_functional(&mesh, &data, s, &rule);
                assert!((l - b[i]).norm() <= 1e-12 * (1.0 + l.norm()), "{kind} rhs {i}");
                for (j, p) in fields.iter().enumerate() {
                    let v = sesquilinear_form(&mesh, p, s, volume, &rule);
                    assert!((v - a[(i, j)]).norm() <= 1e-12 * (1.0 + v.norm()), "{kind} ({i},{j}): {v} vs {}", a[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn exact_solution_satisfies_the_scheme() {
        let mesh = build_cartesian_mesh(SpaceTimeDomain::unit(), 4, 4).unwrap();
        let exact = ExpSolution::new(5.0);
        let data = BoundaryData::from_field(exact.clone());
        let rule = gauss_legendre(30).unwrap();
        for p in 1..=2 {
            for kind in all_kinds(p) {
                let disc = Discretization::new(&mesh, kind).unwrap();
                let volume = !kind.is_trefftz();
                for e in &mesh.elements {
                    for f in &disc.bases[e.id].functions {
                        let s = BasisField { element: e.id, function: f };
                        let a = sesquilinear_form(&mesh, &exact, &s, volume, &rule);
                        let l = linear_functional(&mesh, &data, &s, &rule);
                        let scale = a.norm().max(l.norm()).max(1.0);
                        assert!((a - l).norm() <= 1e-9 * scale, "{kind} e={}: {a} vs {l}", e.id);
                    }
                }
            }
        }
    }
}
