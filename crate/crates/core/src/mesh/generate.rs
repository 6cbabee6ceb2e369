use std::collections::BTreeMap;

use nalgebra::Vector2;

use super::{Mesh, MeshError};
use crate::scalar::{from_usize, lit, Real};

/// Largest accepted anisotropic stretch factor.
pub const MAX_STRETCH: f64 = 64.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    /// `[0,1]²`.
    UnitSquare,
    /// `[0,1]²` minus the open quadrant `(1/2,1]²`.
    LShape,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Grading {
    None,
    /// Newest-vertex bisection toward the corner `(0,0)`; pass `j` bisects
    /// every triangle closer than `q^⌈j/2⌉` to the corner.
    Geometric(f64),
}

/// How each rectangular grid cell is cut into triangles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitPattern {
    /// Two right triangles along the `(i,j)-(i+1,j+1)` diagonal.
    Diagonal,
    /// Four triangles meeting at the cell center.
    CrissCross,
}

fn grid<T: Real>(
    nx: usize,
    ny: usize,
    pattern: SplitPattern,
    keep: impl Fn(usize, usize) -> bool,
) -> Mesh<T> {
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut vertices: Vec<Vector2<T>> = Vec::new();
    // Lattice points live on a doubled grid so cell centers have integer keys.
    let mut vertex = |i2: usize, j2: usize, vertices: &mut Vec<Vector2<T>>| -> usize {
        *index.entry((j2, i2)).or_insert_with(|| {
            vertices.push(Vector2::new(
                from_usize::<T>(i2) / from_usize::<T>(2 * nx),
                from_usize::<T>(j2) / from_usize::<T>(2 * ny),
            ));
            vertices.len() - 1
        })
    };
    let mut triangles = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if !keep(i, j) {
                continue;
            }
            let p00 = vertex(2 * i, 2 * j, &mut vertices);
            let p10 = vertex(2 * i + 2, 2 * j, &mut vertices);
            let p11 = vertex(2 * i + 2, 2 * j + 2, &mut vertices);
            let p01 = vertex(2 * i, 2 * j + 2, &mut vertices);
            match pattern {
                SplitPattern::Diagonal => {
                    // Right angle first; both share the diagonal as the
                    // bisection edge.
                    triangles.push([p10, p11, p00]);
                    triangles.push([p01, p00, p11]);
                }
                SplitPattern::CrissCross => {
                    let c = vertex(2 * i + 1, 2 * j + 1, &mut vertices);
                    triangles.push([c, p00, p10]);
                    triangles.push([c, p10, p11]);
                    triangles.push([c, p11, p01]);
                    triangles.push([c, p01, p00]);
                }
            }
        }
    }
    // Renumber vertices row-major on the doubled lattice for a stable order.
    let mut order: Vec<(&(usize, usize), &usize)> = index.iter().collect();
    order.sort();
    let mut remap = vec![0; vertices.len()];
    let mut sorted = Vec::with_capacity(vertices.len());
    for (new, (_, &old)) in order.iter().enumerate() {
        remap[old] = new;
        sorted.push(vertices[old]);
    }
    for tri in &mut triangles {
        for v in tri.iter_mut() {
            *v = remap[*v];
        }
    }
    Mesh::from_parts(sorted, triangles, &BTreeMap::new())
        .expect("structured grids are conforming")
}

fn ceil_log2(n: usize) -> usize {
    let mut k = 0;
    while (1usize << k) < n {
        k += 1;
    }
    k
}

impl<T: Real> Mesh<T> {
    /// Structured `n × n` diagonal mesh of the unit square.
    pub fn unit_square(n: usize) -> Self {
        Self::structured(n, Domain::UnitSquare, Grading::None)
    }

    /// Structured mesh with `n` cells per unit length, optionally graded.
    ///
    /// Geometric grading applies `2(⌈log₂ n⌉ + 1)` bisection passes, so the
    /// quasi-uniformity ratio grows with `n` while every triangle stays a
    /// right isosceles triangle.
    pub fn structured(n: usize, domain: Domain, grading: Grading) -> Self {
        assert!(n >= 1, "need at least one subdivision");
        let base = match domain {
            Domain::UnitSquare => grid(n, n, SplitPattern::Diagonal, |_, _| true),
            Domain::LShape => grid(2 * n, 2 * n, SplitPattern::Diagonal, |i, j| i < n || j < n),
        };
        match grading {
            Grading::None => base,
            Grading::Geometric(q) => {
                assert!(q > 0.0 && q <= 1.0, "grading factor must lie in (0, 1]");
                let passes = 2 * (ceil_log2(n) + 1);
                let corner = Vector2::<T>::zeros();
                let mut mesh = base;
                for j in 1..=passes {
                    let radius = lit::<T>(q.powi(j.div_ceil(2) as i32));
                    let marked: Vec<bool> = (0..mesh.num_triangles())
                        .map(|t| mesh.point_distance(t, &corner) < radius)
                        .collect();
                    mesh = mesh.bisect(&marked);
                }
                mesh
            }
        }
    }

    /// Unit-square mesh with `n` columns and `round(n·s)` rows: cells have
    /// aspect ratio `s`.
    pub fn stretched(n: usize, stretch: f64, pattern: SplitPattern) -> Result<Self, MeshError> {
        if !(1.0..=MAX_STRETCH).contains(&stretch) {
            return Err(MeshError::Stretch(stretch));
        }
        let rows = ((n as f64) * stretch).round().max(1.0) as usize;
        Ok(grid(n, rows, pattern, |_, _| true))
    }

    /// Structured rectangle grid of the unit square with an explicit pattern.
    pub fn grid(nx: usize, ny: usize, pattern: SplitPattern) -> Self {
        grid(nx, ny, pattern, |_, _| true)
    }

    /// Distance from point `p` to the closed triangle `t`.
    pub fn point_distance(&self, t: usize, p: &Vector2<T>) -> T {
        if self.contains(t, p, T::zero()) {
            return T::zero();
        }
        let [a, b, c] = self.corners(t);
        segment_distance(p, &a, &b)
            .min(segment_distance(p, &b, &c))
            .min(segment_distance(p, &c, &a))
    }
}

pub(crate) fn segment_distance<T: Real>(p: &Vector2<T>, a: &Vector2<T>, b: &Vector2<T>) -> T {
    let d = b - a;
    let s = ((p - a).dot(&d) / d.norm_squared()).max(T::zero()).min(T::one());
    (p - (a + d * s)).norm()
}
