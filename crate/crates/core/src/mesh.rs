//! Tensor-product space–time meshes of `(a, b) × (0, T)` with facet classification.
//!
//! Elements are numbered by slab, then by position in `x`. Every element owns
//! exactly four facets: bottom, top, left and right. Horizontal interfaces are
//! split per element pair, so a space-like facet always has exactly one element
//! below and one above.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeDomain {
    pub x_lo: f64,
    pub x_hi: f64,
    pub t_final: f64,
}

impl SpaceTimeDomain {
    pub fn new(x_lo: f64, x_hi: f64, t_final: f64) -> Result<Self> {
        if !(x_lo < x_hi) {
            return Err(Error::InvalidDomain(format!("need x_lo < x_hi, got ({x_lo}, {x_hi})")));
        }
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(Error::InvalidDomain(format!("need T > 0, got {t_final}")));
        }
        Ok(Self { x_lo, x_hi, t_final })
    }

    /// The unit square `(0, 1) × (0, 1)`.
    pub fn unit() -> Self {
        Self { x_lo: 0.0, x_hi: 1.0, t_final: 1.0 }
    }

    pub fn measure(&self) -> f64 {
        (self.x_hi - self.x_lo) * self.t_final
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub id: usize,
    pub x_range: (f64, f64),
    pub t_range: (f64, f64),
    pub h_x: f64,
    pub h_t: f64,
    pub center: (f64, f64),
    pub slab: usize,
    /// Position of the element inside its slab.
    pub x_index: usize,
}

impl Element {
    pub fn diam(&self) -> f64 {
        self.h_x.hypot(self.h_t)
    }

    pub fn area(&self) -> f64 {
        self.h_x * self.h_t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FacetKind {
    SpaceLikeInterior,
    Final,
    Initial,
    TimeLikeInterior,
    Dirichlet,
}

impl FacetKind {
    pub fn is_space_like(self) -> bool {
        matches!(self, FacetKind::SpaceLikeInterior | FacetKind::Final | FacetKind::Initial)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FacetGeometry {
    /// A segment `x_range × {t}`.
    Horizontal { t: f64, x_range: (f64, f64) },
    /// A segment `{x} × t_range`.
    Vertical { x: f64, t_range: (f64, f64) },
}

impl FacetGeometry {
    pub fn length(&self) -> f64 {
        match *self {
            FacetGeometry::Horizontal { x_range, .. } => x_range.1 - x_range.0,
            FacetGeometry::Vertical { t_range, .. } => t_range.1 - t_range.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Neighbors {
    BelowAbove { below: usize, above: usize },
    LeftRight { left: usize, right: usize },
    Boundary(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub id: usize,
    pub kind: FacetKind,
    pub geometry: FacetGeometry,
    pub neighbors: Neighbors,
    /// Spatial normal: `+1` (pointing out of the left element) on time-like
    /// interior facets, the outward normal on Dirichlet facets, `0` otherwise.
    pub normal_sign: f64,
    pub h_f_x: f64,
    /// `1 / h_F_x` on time-like and Dirichlet facets, `0` elsewhere.
    pub alpha: f64,
    /// `h_F_x` on time-like interior facets, `0` elsewhere.
    pub beta: f64,
}

impl Facet {
    pub fn elements(&self) -> Vec<usize> {
        match self.neighbors {
            Neighbors::BelowAbove { below, above } => vec![below, above],
            Neighbors::LeftRight { left, right } => vec![left, right],
            Neighbors::Boundary(e) => vec![e],
        }
    }
}

/// The position of an element relative to one of its facets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FacetRole {
    /// The element lies below the facet (the facet is its top).
    Below,
    /// The element lies above the facet (the facet is its bottom).
    Above,
    /// The element lies left of a vertical facet.
    LeftOf,
    /// The element lies right of a vertical facet.
    RightOf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mesh {
    pub domain: SpaceTimeDomain,
    pub elements: Vec<Element>,
    pub facets: Vec<Facet>,
    pub n_slabs: usize,
    pub slab_index: Vec<Vec<usize>>,
    /// Facet ids of each element as `[bottom, top, left, right]`.
    element_facets: Vec<[usize; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshSummary {
    pub elements: usize,
    pub facets: BTreeMap<String, usize>,
    pub h_x: f64,
    pub h_t: f64,
    pub lqu: f64,
}

/// Uniform `nx × nt` grid of `domain`.
pub fn build_cartesian_mesh(domain: SpaceTimeDomain, nx: usize, nt: usize) -> Result<Mesh> {
    if nx == 0 || nt == 0 {
        return Err(Error::EmptyMesh { nx, nt });
    }
    let width = domain.x_hi - domain.x_lo;
    let x_nodes: Vec<f64> = (0..=nx)
        .map(|i| if i == nx { domain.x_hi } else { domain.x_lo + width * i as f64 / nx as f64 })
        .collect();
    let t_nodes: Vec<f64> = (0..=nt)
        .map(|n| if n == nt { domain.t_final } else { domain.t_final * n as f64 / nt as f64 })
        .collect();
    Mesh::tensor(domain, &x_nodes, &t_nodes)
}

/// All facets on the boundary of `element_id`, paired with the element's role.
pub fn facets_of(mesh: &Mesh, element_id: usize) -> Result<Vec<(&Facet, FacetRole)>> {
    let ids = mesh.element_facet_ids(element_id)?;
    let roles = [FacetRole::Above, FacetRole::Below, FacetRole::RightOf, FacetRole::LeftOf];
    Ok(ids.iter().zip(roles).map(|(&f, r)| (&mesh.facets[f], r)).collect())
}

impl Mesh {
    /// Tensor mesh from strictly increasing node coordinates that span the domain.
    pub fn tensor(domain: SpaceTimeDomain, x_nodes: &[f64], t_nodes: &[f64]) -> Result<Self> {
        let nx = x_nodes.len().saturating_sub(1);
        let nt = t_nodes.len().saturating_sub(1);
        if nx == 0 || nt == 0 {
            return Err(Error::EmptyMesh { nx, nt });
        }
        if x_nodes.windows(2).any(|w| !(w[0] < w[1])) || t_nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidDomain("mesh nodes must be strictly increasing".into()));
        }
        if x_nodes[0] != domain.x_lo || x_nodes[nx] != domain.x_hi || t_nodes[0] != 0.0 || t_nodes[nt] != domain.t_final
        {
            return Err(Error::InvalidDomain("mesh nodes must span the domain".into()));
        }

        let mut elements = Vec::with_capacity(nx * nt);
        let mut slab_index = Vec::with_capacity(nt);
        for n in 0..nt {
            let mut ids = Vec::with_capacity(nx);
            for i in 0..nx {
                let id = n * nx + i;
                let x_range = (x_nodes[i], x_nodes[i + 1]);
                let t_range = (t_nodes[n], t_nodes[n + 1]);
                elements.push(Element {
                    id,
                    x_range,
                    t_range,
                    h_x: x_range.1 - x_range.0,
                    h_t: t_range.1 - t_range.0,
                    center: (0.5 * (x_range.0 + x_range.1), 0.5 * (t_range.0 + t_range.1)),
                    slab: n,
                    x_index: i,
                });
                ids.push(id);
            }
            slab_index.push(ids);
        }

        let mut facets = Vec::new();
        let mut element_facets = vec![[usize::MAX; 4]; nx * nt];
        let push = |facets: &mut Vec<Facet>, kind, geometry, neighbors, normal_sign, h_f_x: f64| {
            let (alpha, beta) = match kind {
                FacetKind::TimeLikeInterior => (1.0 / h_f_x, h_f_x),
                FacetKind::Dirichlet => (1.0 / h_f_x, 0.0),
                _ => (0.0, 0.0),
            };
            let id = facets.len();
            facets.push(Facet { id, kind, geometry, neighbors, normal_sign, h_f_x, alpha, beta });
            id
        };

        for n in 0..nt {
            // Horizontal facets at the bottom of slab n.
            for i in 0..nx {
                let above = n * nx + i;
                let geometry = FacetGeometry::Horizontal { t: t_nodes[n], x_range: (x_nodes[i], x_nodes[i + 1]) };
                let h = elements[above].h_x;
                let id = if n == 0 {
                    push(&mut facets, FacetKind::Initial, geometry, Neighbors::Boundary(above), 0.0, h)
                } else {
                    let below = above - nx;
                    let nb = Neighbors::BelowAbove { below, above };
                    let id = push(&mut facets, FacetKind::SpaceLikeInterior, geometry, nb, 0.0, h);
                    element_facets[below][1] = id;
                    id
                };
                element_facets[above][0] = id;
            }
            // Vertical facets of slab n, left to right.
            let t_range = (t_nodes[n], t_nodes[n + 1]);
            for k in 0..=nx {
                let geometry = FacetGeometry::Vertical { x: x_nodes[k], t_range };
                if k == 0 || k == nx {
                    let (owner, normal) = if k == 0 { (n * nx, -1.0) } else { (n * nx + nx - 1, 1.0) };
                    let h = elements[owner].h_x;
                    let id = push(&mut facets, FacetKind::Dirichlet, geometry, Neighbors::Boundary(owner), normal, h);
                    element_facets[owner][if k == 0 { 2 } else { 3 }] = id;
                } else {
                    let left = n * nx + k - 1;
                    let right = left + 1;
                    let h = elements[left].h_x.min(elements[right].h_x);
                    let nb = Neighbors::LeftRight { left, right };
                    let id = push(&mut facets, FacetKind::TimeLikeInterior, geometry, nb, 1.0, h);
                    element_facets[left][3] = id;
                    element_facets[right][2] = id;
                }
            }
        }
        for i in 0..nx {
            let below = (nt - 1) * nx + i;
            let geometry = FacetGeometry::Horizontal { t: t_nodes[nt], x_range: (x_nodes[i], x_nodes[i + 1]) };
            let h = elements[below].h_x;
            let id = push(&mut facets, FacetKind::Final, geometry, Neighbors::Boundary(below), 0.0, h);
            element_facets[below][1] = id;
        }

        Ok(Self { domain, elements, facets, n_slabs: nt, slab_index, element_facets })
    }

    pub fn element(&self, id: usize) -> Result<&Element> {
        self.elements.get(id).ok_or(Error::InvalidElement { id, count: self.elements.len() })
    }

    /// Facet ids of an element as `[bottom, top, left, right]`.
    pub fn element_facet_ids(&self, id: usize) -> Result<[usize; 4]> {
        self.element_facets
            .get(id)
            .copied()
            .ok_or(Error::InvalidElement { id, count: self.elements.len() })
    }

    pub fn slab(&self, slab: usize) -> Result<&[usize]> {
        self.slab_index
            .get(slab)
            .map(Vec::as_slice)
            .ok_or(Error::InvalidSlab { slab, count: self.n_slabs })
    }

    pub fn facet_count(&self, kind: FacetKind) -> usize {
        self.facets.iter().filter(|f| f.kind == kind).count()
    }

    /// Local quasi-uniformity: the largest ratio of spatial sizes between
    /// elements that share a facet (1 on uniform meshes).
    pub fn lqu(&self) -> f64 {
        self.facets
            .iter()
            .filter_map(|f| match f.neighbors {
                Neighbors::BelowAbove { below: a, above: b } | Neighbors::LeftRight { left: a, right: b } => {
                    let (ha, hb) = (self.elements[a].h_x, self.elements[b].h_x);
                    Some((ha / hb).max(hb / ha))
                }
                Neighbors::Boundary(_) => None,
            })
            .fold(1.0, f64::max)
    }

    /// Largest element extents `(h_x, h_t)`.
    pub fn max_sizes(&self) -> (f64, f64) {
        self.elements.iter().fold((0.0, 0.0), |(a, b), e| (a.max(e.h_x), b.max(e.h_t)))
    }

    /// Index of the element containing `(x, t)`; points on interfaces go to the
    /// later (in `t`) and rightmost (in `x`) element.
    pub fn locate(&self, x: f64, t: f64) -> Option<usize> {
        let d = &self.domain;
        if !(0.0..=d.t_final).contains(&t) || !(d.x_lo..=d.x_hi).contains(&x) {
            return None;
        }
        let slab = self.slab_index.iter().rposition(|ids| self.elements[ids[0]].t_range.0 <= t)?;
        let row = &self.slab_index[slab];
        let k = row.iter().rposition(|&id| self.elements[id].x_range.0 <= x)?;
        Some(row[k])
    }

    pub fn summary(&self) -> MeshSummary {
        let kinds = [
            FacetKind::SpaceLikeInterior,
            FacetKind::Final,
            FacetKind::Initial,
            FacetKind::TimeLikeInterior,
            FacetKind::Dirichlet,
        ];
        let facets = kinds.iter().map(|&k| (format!("{k:?}"), self.facet_count(k))).collect();
        let (h_x, h_t) = self.max_sizes();
        MeshSummary { elements: self.elements.len(), facets, h_x, h_t, lqu: self.lqu() }
    }
}
