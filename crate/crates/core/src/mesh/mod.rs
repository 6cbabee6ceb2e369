//! Triangulations of the polygonal parameter domain.
//!
//! A [`Mesh`] owns vertices, counterclockwise triangles and the derived edge
//! topology. Generators, refinement, shape-regularity metrics, line cuts,
//! boundary strips and plain-text IO live in the submodules.

mod generate;
mod io;
mod partition;
mod queries;
mod refine;
mod regularity;

#[cfg(test)]
mod tests;

use std::collections::BTreeMap;

use nalgebra::Vector2;
use thiserror::Error;

use crate::scalar::{lit, to_f64, Real};

pub use generate::{Domain, Grading, SplitPattern};
pub use io::{export_mesh, import_mesh, read_mesh_files, write_mesh_files};
pub use partition::{BoundaryPartition, BoundarySpec, Marker, Side};
pub use queries::{Line, Strip};
pub use regularity::{shape_ratio, RegularityReport};

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("triangle {index} has zero area")]
    DegenerateTriangle { index: usize },
    #[error("non-conforming topology: {0}")]
    Topology(String),
    #[error("vertices {a} and {b} coincide")]
    DuplicateVertex { a: usize, b: usize },
    #[error("unknown boundary marker {0} (expected 1=D, 2=S, 3=F)")]
    UnknownMarker(i64),
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("invalid boundary specification '{0}'")]
    BoundarySpec(String),
    #[error("stretch factor {0} outside [1, {max}]", max = generate::MAX_STRETCH)]
    Stretch(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An edge of the triangulation.
///
/// For interior edges `elements.0 < elements.1` and side 1 is the lower
/// element index. `normal` is the unit normal pointing out of side 1
/// (out of the domain for boundary edges); `tangent` is `normal` rotated
/// by +90°.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge<T: Real> {
    pub vertices: [usize; 2],
    pub length: T,
    pub normal: Vector2<T>,
    pub tangent: Vector2<T>,
    pub elements: (usize, Option<usize>),
    /// Marker read from an edge file, inherited by refined children.
    pub tag: Option<i64>,
}

impl<T: Real> Edge<T> {
    pub fn is_boundary(&self) -> bool {
        self.elements.1.is_none()
    }
}

/// Conforming triangulation with edge topology.
///
/// Triangles store their vertices counterclockwise. The first vertex of a
/// triangle is its newest vertex: bisection splits the opposite edge.
#[derive(Clone, Debug)]
pub struct Mesh<T: Real> {
    pub vertices: Vec<Vector2<T>>,
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<Edge<T>>,
    /// Indices into `edges` of interior edges, ascending.
    pub interior_edges: Vec<usize>,
    /// Indices into `edges` of boundary edges, ascending.
    pub boundary_edges: Vec<usize>,
    /// Edge index of the side opposite local vertex `i`.
    pub triangle_edges: Vec<[usize; 3]>,
    pub areas: Vec<T>,
    pub diameters: Vec<T>,
}

pub(crate) type EdgeKey = (usize, usize);

pub(crate) fn edge_key(a: usize, b: usize) -> EdgeKey {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn signed_area<T: Real>(a: &Vector2<T>, b: &Vector2<T>, c: &Vector2<T>) -> T {
    let u = b - a;
    let v = c - a;
    (u.x * v.y - u.y * v.x) * lit::<T>(0.5)
}

impl<T: Real> Mesh<T> {
    /// Builds topology from vertices and triangles.
    ///
    /// Clockwise triangles are reoriented (keeping the first vertex).
    /// `tags` attaches markers to boundary edges by vertex pair.
    pub fn from_parts(
        vertices: Vec<Vector2<T>>,
        mut triangles: Vec<[usize; 3]>,
        tags: &BTreeMap<EdgeKey, i64>,
    ) -> Result<Self, MeshError> {
        let nv = vertices.len();
        let mut areas = Vec::with_capacity(triangles.len());
        for (index, tri) in triangles.iter_mut().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(MeshError::Topology(format!(
                    "triangle {index} references a missing vertex"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::DegenerateTriangle { index });
            }
            let mut area = signed_area(&vertices[tri[0]], &vertices[tri[1]], &vertices[tri[2]]);
            if area < T::zero() {
                tri.swap(1, 2);
                area = -area;
            }
            let scale = (&vertices[tri[1]] - &vertices[tri[0]])
                .norm_squared()
                .max((&vertices[tri[2]] - &vertices[tri[0]]).norm_squared());
            if !(area > scale * T::default_epsilon() * lit(16.0)) {
                return Err(MeshError::DegenerateTriangle { index });
            }
            areas.push(area);
        }

        let mut adjacency: BTreeMap<EdgeKey, Vec<(usize, usize)>> = BTreeMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for local in 0..3 {
                let a = tri[(local + 1) % 3];
                let b = tri[(local + 2) % 3];
                adjacency.entry(edge_key(a, b)).or_default().push((t, local));
            }
        }

        let mut triangle_edges = vec![[usize::MAX; 3]; triangles.len()];
        let mut edges = Vec::with_capacity(adjacency.len());
        let mut interior_edges = Vec::new();
        let mut boundary_edges = Vec::new();
        for (key, sides) in &adjacency {
            let index = edges.len();
            let (first, second) = match sides.as_slice() {
                [one] => (*one, None),
                [x, y] => {
                    if x.0 < y.0 {
                        (*x, Some(*y))
                    } else {
                        (*y, Some(*x))
                    }
                }
                _ => {
                    return Err(MeshError::Topology(format!(
                        "edge ({}, {}) shared by {} triangles",
                        key.0 + 1,
                        key.1 + 1,
                        sides.len()
                    )))
                }
            };
            let (t1, l1) = first;
            let tri = triangles[t1];
            // Counterclockwise traversal of side 1 runs a -> b; its outward
            // normal is the clockwise rotation of the edge direction.
            let a = tri[(l1 + 1) % 3];
            let b = tri[(l1 + 2) % 3];
            let d = &vertices[b] - &vertices[a];
            let length = d.norm();
            let tangent_dir = d / length;
            let normal = Vector2::new(tangent_dir.y, -tangent_dir.x);
            let tangent = Vector2::new(-normal.y, normal.x);
            triangle_edges[t1][l1] = index;
            let elements = match second {
                Some((t2, l2)) => {
                    triangle_edges[t2][l2] = index;
                    interior_edges.push(index);
                    (t1, Some(t2))
                }
                None => {
                    boundary_edges.push(index);
                    (t1, None)
                }
            };
            edges.push(Edge {
                vertices: [key.0, key.1],
                length,
                normal,
                tangent,
                elements,
                tag: if second.is_none() { tags.get(key).copied() } else { None },
            });
        }

        let diameters = triangles
            .iter()
            .map(|tri| {
                let p = |i: usize| &vertices[tri[i]];
                (p(0) - p(1)).norm().max((p(1) - p(2)).norm()).max((p(2) - p(0)).norm())
            })
            .collect();

        let mesh = Mesh {
            vertices,
            triangles,
            edges,
            interior_edges,
            boundary_edges,
            triangle_edges,
            areas,
            diameters,
        };
        mesh.check_hanging_vertices()?;
        Ok(mesh)
    }

    /// Rejects vertices lying inside a boundary edge: the signature of a
    /// hanging node once the long side is seen from one triangle only.
    fn check_hanging_vertices(&self) -> Result<(), MeshError> {
        let mut on_boundary: Vec<usize> = self
            .boundary_edges
            .iter()
            .flat_map(|&e| self.edges[e].vertices)
            .collect();
        on_boundary.sort_unstable();
        on_boundary.dedup();
        for &e in &self.boundary_edges {
            let edge = &self.edges[e];
            let a = &self.vertices[edge.vertices[0]];
            let b = &self.vertices[edge.vertices[1]];
            let d = b - a;
            let len2 = d.norm_squared();
            let tol = lit::<T>(1e-12) * len2.sqrt();
            for &v in &on_boundary {
                if edge.vertices.contains(&v) {
                    continue;
                }
                let p = &self.vertices[v] - a;
                let s = p.dot(&d) / len2;
                let cross = (p.x * d.y - p.y * d.x).abs() / len2.sqrt();
                if s > T::zero() && s < T::one() && cross <= tol {
                    return Err(MeshError::Topology(format!(
                        "vertex {} hangs on edge ({}, {})",
                        v + 1,
                        edge.vertices[0] + 1,
                        edge.vertices[1] + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Corner coordinates of triangle `t`.
    pub fn corners(&self, t: usize) -> [Vector2<T>; 3] {
        let tri = self.triangles[t];
        [self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]]]
    }

    pub fn centroid(&self, t: usize) -> Vector2<T> {
        let [a, b, c] = self.corners(t);
        (a + b + c) / lit::<T>(3.0)
    }

    /// Endpoint coordinates of edge `e`.
    pub fn edge_points(&self, e: usize) -> [Vector2<T>; 2] {
        let [a, b] = self.edges[e].vertices;
        [self.vertices[a], self.vertices[b]]
    }

    pub fn total_area(&self) -> T {
        self.areas.iter().fold(T::zero(), |s, &a| s + a)
    }

    pub fn max_h(&self) -> T {
        self.diameters.iter().fold(T::zero(), |m, &h| m.max(h))
    }

    pub fn min_h(&self) -> T {
        self.diameters
            .iter()
            .fold(T::max_value().unwrap_or_else(|| lit(f64::MAX)), |m, &h| m.min(h))
    }

    pub fn min_edge_length(&self) -> T {
        self.edges
            .iter()
            .fold(T::max_value().unwrap_or_else(|| lit(f64::MAX)), |m, e| m.min(e.length))
    }

    /// Boundary edge markers keyed by vertex pair, for rebuilding after
    /// vertex/triangle edits.
    pub(crate) fn tag_map(&self) -> BTreeMap<EdgeKey, i64> {
        self.boundary_edges
            .iter()
            .filter_map(|&e| {
                let edge = &self.edges[e];
                edge.tag.map(|t| ((edge.vertices[0], edge.vertices[1]), t))
            })
            .collect()
    }

    /// Barycentric coordinates of `p` in triangle `t`.
    pub fn barycentric(&self, t: usize, p: &Vector2<T>) -> [T; 3] {
        let [a, b, c] = self.corners(t);
        let two_area = self.areas[t] * lit(2.0);
        let l1 = ((b - p).x * (c - p).y - (b - p).y * (c - p).x) / two_area;
        let l2 = ((c - p).x * (a - p).y - (c - p).y * (a - p).x) / two_area;
        [l1, l2, T::one() - l1 - l2]
    }

    /// Whether `p` lies in the closed triangle `t` up to `tol` in barycentric
    /// coordinates.
    pub fn contains(&self, t: usize, p: &Vector2<T>, tol: T) -> bool {
        self.barycentric(t, p).iter().all(|&l| l >= -tol)
    }

    /// Euler characteristic `V - E + T`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Inradius of triangle `t`.
    pub fn inradius(&self, t: usize) -> T {
        let [a, b, c] = self.corners(t);
        let s = ((a - b).norm() + (b - c).norm() + (c - a).norm()) * lit(0.5);
        self.areas[t] / s
    }

    pub(crate) fn describe(&self) -> String {
        format!(
            "{} vertices, {} triangles, {} edges ({} interior), h in [{:.3e}, {:.3e}]",
            self.vertices.len(),
            self.triangles.len(),
            self.edges.len(),
            self.interior_edges.len(),
            to_f64(self.min_h()),
            to_f64(self.max_h())
        )
    }
}

impl<T: Real> std::fmt::Display for Mesh<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.describe())
    }
}
