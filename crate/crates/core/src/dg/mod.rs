//! Discontinuous piecewise-polynomial spaces for multi-field shell unknowns.
//!
//! Degrees of freedom are ordered element-major: all coefficients of
//! element 0 (field by field), then element 1, and so on.

mod basis;
mod trace;


use std::sync::Arc;

use nalgebra::{DVector, Vector2};
use rayon::prelude::*;
use thiserror::Error;

use crate::mesh::Mesh;
use crate::quadrature::{LineRule, TriangleRule};
use crate::scalar::{lit, to_f64, Real};

pub use basis::{map_rule, monomial_exponents, ElementBasis, Jet};
pub use trace::EdgeTrace;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DgError {
    #[error("point ({x}, {y}) lies outside element {element}")]
    PointOutside { element: usize, x: f64, y: f64 },
    #[error("edge {0} is a boundary edge")]
    BoundaryEdge(usize),
}

/// Scalar fields carried by a space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldLayout {
    /// `θ₁, θ₂, u₁, u₂, w`.
    Naghdi,
    /// `u₁, u₂, w`.
    Koiter,
    /// `u₁, u₂`.
    Plane,
    /// A single field, addressed as `w`.
    Scalar,
}

impl FieldLayout {
    pub fn num_fields(self) -> usize {
        match self {
            FieldLayout::Naghdi => 5,
            FieldLayout::Koiter => 3,
            FieldLayout::Plane => 2,
            FieldLayout::Scalar => 1,
        }
    }

    pub fn theta(self) -> Option<[usize; 2]> {
        match self {
            FieldLayout::Naghdi => Some([0, 1]),
            _ => None,
        }
    }

    pub fn u(self) -> Option<[usize; 2]> {
        match self {
            FieldLayout::Naghdi => Some([2, 3]),
            FieldLayout::Koiter | FieldLayout::Plane => Some([0, 1]),
            FieldLayout::Scalar => None,
        }
    }

    pub fn w(self) -> Option<usize> {
        match self {
            FieldLayout::Naghdi => Some(4),
            FieldLayout::Koiter => Some(2),
            FieldLayout::Plane => None,
            FieldLayout::Scalar => Some(0),
        }
    }
}

/// Basis jets at a set of quadrature points: entry `q * len + i` belongs to
/// basis function `i` at point `q`.
#[derive(Clone, Debug)]
pub struct BasisTable<T: Real> {
    pub len: usize,
    pub jets: Vec<Jet<T>>,
}

impl<T: Real> BasisTable<T> {
    pub fn at(&self, q: usize) -> &[Jet<T>] {
        &self.jets[q * self.len..(q + 1) * self.len]
    }
}

/// Quadrature data of one element.
#[derive(Clone, Debug)]
pub struct ElementTable<T: Real> {
    pub points: Vec<Vector2<T>>,
    /// Area-scaled weights.
    pub weights: Vec<T>,
    pub basis: BasisTable<T>,
}

/// Quadrature data of one edge, with basis jets of each adjacent element.
#[derive(Clone, Debug)]
pub struct EdgeTable<T: Real> {
    pub edge: usize,
    pub points: Vec<Vector2<T>>,
    /// Length-scaled weights (parameter arc length).
    pub weights: Vec<T>,
    /// Side 1 then, for interior edges, side 2: `(element, jets)`.
    pub sides: Vec<(usize, BasisTable<T>)>,
}

/// Multi-field DG space of degree `k` on a mesh.
#[derive(Clone, Debug)]
pub struct DgSpace<T: Real> {
    pub mesh: Arc<Mesh<T>>,
    pub degree: usize,
    pub layout: FieldLayout,
    pub bases: Vec<ElementBasis<T>>,
    pub element_rule: TriangleRule,
    pub edge_rule: LineRule,
    tables: Vec<ElementTable<T>>,
}

/// Jets of every field at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSample<T: Real> {
    pub layout: FieldLayout,
    pub jets: Vec<Jet<T>>,
}

impl<T: Real> FieldSample<T> {
    pub fn zero(layout: FieldLayout) -> Self {
        FieldSample {
            layout,
            jets: vec![Jet::default(); layout.num_fields()],
        }
    }

    /// Sample with a single nonzero field.
    pub fn single(layout: FieldLayout, field: usize, jet: Jet<T>) -> Self {
        let mut s = Self::zero(layout);
        s.jets[field] = jet;
        s
    }

    pub fn theta(&self) -> [Jet<T>; 2] {
        self.layout
            .theta()
            .map(|[a, b]| [self.jets[a], self.jets[b]])
            .unwrap_or_default()
    }

    pub fn u(&self) -> [Jet<T>; 2] {
        self.layout
            .u()
            .map(|[a, b]| [self.jets[a], self.jets[b]])
            .unwrap_or_default()
    }

    pub fn w(&self) -> Jet<T> {
        self.layout.w().map(|i| self.jets[i]).unwrap_or_default()
    }
}

impl<T: Real> DgSpace<T> {
    /// Builds bases and element quadrature; rules are exact to `2k + 3`.
    pub fn new(mesh: impl Into<Arc<Mesh<T>>>, degree: usize, layout: FieldLayout) -> Self {
        assert!(degree >= 1, "polynomial degree must be at least 1");
        let mesh = mesh.into();
        let element_rule = TriangleRule::exact_to(2 * degree + 3);
        let edge_rule = LineRule::exact_to(2 * degree + 3);
        let bases: Vec<ElementBasis<T>> = (0..mesh.num_triangles())
            .into_par_iter()
            .map(|t| ElementBasis::new(&mesh.corners(t), degree, &element_rule))
            .collect();
        let tables = (0..mesh.num_triangles())
            .into_par_iter()
            .map(|t| {
                let (points, weights) = map_rule(&mesh.corners(t), &element_rule);
                let jets = points.iter().flat_map(|x| bases[t].eval(x)).collect();
                ElementTable {
                    points,
                    weights,
                    basis: BasisTable {
                        len: bases[t].len(),
                        jets,
                    },
                }
            })
            .collect();
        DgSpace {
            mesh,
            degree,
            layout,
            bases,
            element_rule,
            edge_rule,
            tables,
        }
    }

    /// Basis functions per element and field, `(k+1)(k+2)/2`.
    pub fn basis_len(&self) -> usize {
        (self.degree + 1) * (self.degree + 2) / 2
    }

    pub fn num_fields(&self) -> usize {
        self.layout.num_fields()
    }

    /// Local dofs per element.
    pub fn element_dofs(&self) -> usize {
        self.num_fields() * self.basis_len()
    }

    pub fn dof_count(&self) -> usize {
        self.element_dofs() * self.mesh.num_triangles()
    }

    pub fn dof(&self, element: usize, field: usize, i: usize) -> usize {
        (element * self.num_fields() + field) * self.basis_len() + i
    }

    /// First global dof of `element`; its local dofs are contiguous.
    pub fn element_offset(&self, element: usize) -> usize {
        element * self.element_dofs()
    }

    pub fn element_table(&self, element: usize) -> &ElementTable<T> {
        &self.tables[element]
    }

    /// Edge quadrature with basis jets from each adjacent element.
    pub fn edge_table(&self, edge: usize) -> EdgeTable<T> {
        let [a, b] = self.mesh.edge_points(edge);
        let e = &self.mesh.edges[edge];
        let points: Vec<Vector2<T>> = self
            .edge_rule
            .points
            .iter()
            .map(|&s| a + (b - a) * lit::<T>(s))
            .collect();
        let weights = self
            .edge_rule
            .weights
            .iter()
            .map(|&w| lit::<T>(w) * e.length)
            .collect();
        let side = |t: usize| {
            let jets = points.iter().flat_map(|x| self.bases[t].eval(x)).collect();
            (
                t,
                BasisTable {
                    len: self.basis_len(),
                    jets,
                },
            )
        };
        let mut sides = vec![side(e.elements.0)];
        if let Some(t2) = e.elements.1 {
            sides.push(side(t2));
        }
        EdgeTable {
            edge,
            points,
            weights,
            sides,
        }
    }

    /// Element-wise `L²` projection of `f`, which returns one value per field.
    pub fn interpolate<F>(&self, f: F) -> DVector<T>
    where
        F: Fn(&Vector2<T>) -> Vec<T> + Sync,
    {
        let nf = self.num_fields();
        let nb = self.basis_len();
        let blocks: Vec<Vec<T>> = (0..self.mesh.num_triangles())
            .into_par_iter()
            .map(|t| {
                let table = &self.tables[t];
                let mut local = vec![T::zero(); nf * nb];
                for (q, x) in table.points.iter().enumerate() {
                    let values = f(x);
                    assert_eq!(values.len(), nf, "interpolant must return one value per field");
                    let w = table.weights[q];
                    for (field, &v) in values.iter().enumerate() {
                        for (i, jet) in table.basis.at(q).iter().enumerate() {
                            local[field * nb + i] += w * v * jet.value;
                        }
                    }
                }
                local
            })
            .collect();
        DVector::from_iterator(self.dof_count(), blocks.into_iter().flatten())
    }

    /// Field jets of `element`'s polynomial at `x` from basis jets.
    pub fn sample_from_jets(&self, coeffs: &DVector<T>, element: usize, jets: &[Jet<T>]) -> FieldSample<T> {
        let nb = self.basis_len();
        let mut sample = FieldSample::zero(self.layout);
        for field in 0..self.num_fields() {
            let base = self.dof(element, field, 0);
            for (i, jet) in jets.iter().enumerate().take(nb) {
                sample.jets[field].add_scaled(jet, coeffs[base + i]);
            }
        }
        sample
    }

    /// Evaluates the discrete function inside `element`.
    pub fn evaluate(
        &self,
        coeffs: &DVector<T>,
        element: usize,
        x: &Vector2<T>,
    ) -> Result<FieldSample<T>, DgError> {
        let tol = lit::<T>(1e-10);
        if !self.mesh.contains(element, x, tol) {
            return Err(DgError::PointOutside {
                element,
                x: to_f64(x.x),
                y: to_f64(x.y),
            });
        }
        Ok(self.sample_from_jets(coeffs, element, &self.bases[element].eval(x)))
    }

    /// Locates the element containing `x` (first match) and evaluates there.
    pub fn evaluate_at(&self, coeffs: &DVector<T>, x: &Vector2<T>) -> Option<FieldSample<T>> {
        let tol = lit::<T>(1e-12);
        (0..self.mesh.num_triangles())
            .find(|&t| self.mesh.contains(t, x, tol))
            .map(|t| self.sample_from_jets(coeffs, t, &self.bases[t].eval(x)))
    }

    /// Both traces of every field on an interior edge.
    pub fn edge_traces(&self, coeffs: &DVector<T>, edge: usize) -> Result<EdgeTrace<T>, DgError> {
        if self.mesh.edges[edge].is_boundary() {
            return Err(DgError::BoundaryEdge(edge));
        }
        let table = self.edge_table(edge);
        let e = &self.mesh.edges[edge];
        let samples = |side: usize| -> Vec<FieldSample<T>> {
            let (t, basis) = &table.sides[side];
            (0..table.points.len())
                .map(|q| self.sample_from_jets(coeffs, *t, basis.at(q)))
                .collect()
        };
        Ok(EdgeTrace {
            edge,
            points: table.points.clone(),
            weights: table.weights.clone(),
            normal: e.normal,
            tangent: e.tangent,
            side1: samples(0),
            side2: samples(1),
        })
    }
}
