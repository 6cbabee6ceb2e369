use nalgebra::Vector2;

use super::generate::segment_distance;
use super::Mesh;
use crate::scalar::{lit, to_f64, Real};

/// Straight line `point + t·direction`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line<T: Real> {
    pub point: Vector2<T>,
    pub direction: Vector2<T>,
}

impl<T: Real> Line<T> {
    pub fn new(point: Vector2<T>, direction: Vector2<T>) -> Self {
        Line {
            point,
            direction: direction.normalize(),
        }
    }

    pub fn horizontal(y: T) -> Self {
        Line::new(Vector2::new(T::zero(), y), Vector2::new(T::one(), T::zero()))
    }

    /// Signed distance of `p` from the line (positive to the left).
    pub fn side(&self, p: &Vector2<T>) -> T {
        let q = p - self.point;
        self.direction.x * q.y - self.direction.y * q.x
    }
}

/// Element-union approximation of a boundary strip `Ω_δ`.
#[derive(Clone, Debug)]
pub struct Strip<T: Real> {
    pub delta: T,
    pub elements: Vec<usize>,
    /// Total area of the selected triangles.
    pub measure: T,
    /// Set when `δ` exceeds the estimated inradius of the domain.
    pub covers_domain: bool,
}

impl<T: Real> Mesh<T> {
    /// Sum of the full lengths of all edges crossed by `line`.
    ///
    /// A line through a vertex is shifted sideways by `1e-9·min h` until it
    /// avoids every vertex.
    pub fn line_cut_edge_sum(&self, line: &Line<T>) -> T {
        let shift = lit::<T>(1e-9) * self.min_h();
        let tol = shift * lit(1e-3);
        let normal = Vector2::new(-line.direction.y, line.direction.x);
        let mut line = *line;
        for _ in 0..64 {
            if self.vertices.iter().all(|v| line.side(v).abs() > tol) {
                break;
            }
            line.point += normal * shift;
        }
        self.edges
            .iter()
            .filter(|e| {
                let a = line.side(&self.vertices[e.vertices[0]]);
                let b = line.side(&self.vertices[e.vertices[1]]);
                (a > T::zero()) != (b > T::zero())
            })
            .fold(T::zero(), |s, e| s + e.length)
    }

    /// Distance from triangle `t` to the closest boundary edge.
    pub fn boundary_distance(&self, t: usize) -> T {
        let corners = self.corners(t);
        let mut best = T::max_value().unwrap_or_else(|| lit(f64::MAX));
        for &e in &self.boundary_edges {
            let [a, b] = self.edge_points(e);
            for p in &corners {
                best = best.min(segment_distance(p, &a, &b));
            }
            best = best.min(self.point_distance(t, &a)).min(self.point_distance(t, &b));
        }
        best
    }

    fn point_boundary_distance(&self, p: &Vector2<T>) -> T {
        self.boundary_edges
            .iter()
            .map(|&e| {
                let [a, b] = self.edge_points(e);
                segment_distance(p, &a, &b)
            })
            .fold(T::max_value().unwrap_or_else(|| lit(f64::MAX)), |m, d| m.min(d))
    }

    /// Triangles at distance `< δ` from `∂Ω`.
    pub fn boundary_strip_elements(&self, delta: T) -> Strip<T> {
        let elements: Vec<usize> = (0..self.triangles.len())
            .filter(|&t| self.boundary_distance(t) < delta)
            .collect();
        let measure = elements.iter().fold(T::zero(), |s, &t| s + self.areas[t]);
        let inradius = self
            .vertices
            .iter()
            .copied()
            .chain((0..self.triangles.len()).map(|t| self.centroid(t)))
            .map(|p| self.point_boundary_distance(&p))
            .fold(T::zero(), |m, d| m.max(d));
        let covers_domain = delta > inradius;
        if covers_domain {
            log::warn!(
                "strip width {} exceeds the domain inradius {}; the whole mesh is selected",
                to_f64(delta),
                to_f64(inradius)
            );
        }
        Strip {
            delta,
            elements,
            measure,
            covers_domain,
        }
    }
}
